#pragma once

#include "cellguard/lang/qualified_name.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

// CellScript abstract syntax tree.
//
// Nodes are immutable once parsing finishes; the scope pass fills in the
// free-name sets on lambdas and function definitions before `parse_cell`
// returns.

namespace cellguard::lang {

    struct source_span {
        int line{1};
        int column{1};
    };

    struct none_literal {
        bool operator==(const none_literal&) const = default;
    };

    using literal = std::variant<none_literal, bool, std::int64_t, double, std::string>;

    enum class unary_op : std::uint8_t { negate, logical_not };
    enum class binary_op : std::uint8_t { add, sub, mul, div, floor_div, mod, logical_and, logical_or };
    enum class compare_op : std::uint8_t { eq, ne, lt, le, gt, ge };

    std::string_view to_string(unary_op op);
    std::string_view to_string(binary_op op);
    std::string_view to_string(compare_op op);

    struct expr;
    using expr_ptr = std::unique_ptr<expr>;

    struct name_expr {
        std::string id;
    };

    struct literal_expr {
        literal value;
    };

    struct list_expr {
        std::vector<expr_ptr> items;
    };

    struct dict_expr {
        std::vector<std::pair<expr_ptr, expr_ptr>> entries;
    };

    struct attribute_expr {
        expr_ptr object;
        std::string name;
    };

    struct subscript_expr {
        expr_ptr object;
        expr_ptr index;
    };

    struct call_expr {
        expr_ptr callee;
        std::vector<expr_ptr> args;
    };

    struct lambda_expr {
        std::vector<std::string> params;
        expr_ptr body;
        // Qualified names read by the body that are bound outside every
        // enclosing function scope (i.e. notebook globals).
        name_set free_names;
    };

    struct unary_expr {
        unary_op op;
        expr_ptr operand;
    };

    struct binary_expr {
        binary_op op;
        expr_ptr lhs;
        expr_ptr rhs;
    };

    struct compare_expr {
        compare_op op;
        expr_ptr lhs;
        expr_ptr rhs;
    };

    struct expr {
        using node_type = std::variant<name_expr,
                                       literal_expr,
                                       list_expr,
                                       dict_expr,
                                       attribute_expr,
                                       subscript_expr,
                                       call_expr,
                                       lambda_expr,
                                       unary_expr,
                                       binary_expr,
                                       compare_expr>;

        node_type node;
        source_span span{};

        template <typename T>
        const T* as() const {
            return std::get_if<T>(&node);
        }
    };

    struct stmt;
    using stmt_ptr = std::unique_ptr<stmt>;
    using block = std::vector<stmt_ptr>;

    struct assign_stmt {
        expr_ptr target;  // name, attribute or subscript
        expr_ptr value;
    };

    struct aug_assign_stmt {
        expr_ptr target;
        binary_op op;
        expr_ptr value;
    };

    struct expr_stmt {
        expr_ptr value;
    };

    struct if_branch {
        expr_ptr cond;
        block body;
    };

    struct if_stmt {
        std::vector<if_branch> branches;  // `if` then each `elif`
        std::optional<block> orelse;
    };

    struct while_stmt {
        expr_ptr cond;
        block body;
    };

    struct for_stmt {
        std::string target;
        expr_ptr iter;
        block body;
    };

    struct func_def_stmt {
        std::string name;
        std::vector<std::string> params;
        block body;
        std::set<std::string> locals;  // params plus every name bound in the body
        name_set free_names;
    };

    struct return_stmt {
        expr_ptr value;  // may be null
    };

    struct del_stmt {
        expr_ptr target;
    };

    struct pass_stmt {};

    enum class stmt_kind : std::uint8_t {
        assign,
        aug_assign,
        member_assign,  // attribute/subscript target
        expr_stmt,
        if_stmt,
        while_stmt,
        for_stmt,
        func_def,
        return_stmt,
        del_stmt,
        pass_stmt,
    };

    std::string_view to_string(stmt_kind k);

    struct stmt {
        using node_type = std::variant<assign_stmt,
                                       aug_assign_stmt,
                                       expr_stmt,
                                       if_stmt,
                                       while_stmt,
                                       for_stmt,
                                       func_def_stmt,
                                       return_stmt,
                                       del_stmt,
                                       pass_stmt>;

        node_type node;
        source_span span{};
        // Pre-order position within the owning cell, unique per cell.
        int index{0};

        stmt_kind kind() const;
        bool is_compound() const;

        template <typename T>
        const T* as() const {
            return std::get_if<T>(&node);
        }
    };

    struct program {
        block body;
        int statement_count{0};

        std::vector<const stmt*> top_level() const;
    };

    // Builtin callables; they never read notebook globals.
    bool is_builtin_name(std::string_view name);
    // Methods with builtin meaning (currently list `append`).
    bool is_builtin_method(std::string_view name);

}  // namespace cellguard::lang
