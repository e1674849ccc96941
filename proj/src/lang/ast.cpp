#include "cellguard/lang/ast.hpp"

#include <algorithm>
#include <array>

namespace cellguard::lang {

    std::string_view to_string(unary_op op) {
        switch (op) {
            case unary_op::negate:
                return "-";
            case unary_op::logical_not:
                return "not";
        }
        return "?";
    }

    std::string_view to_string(binary_op op) {
        switch (op) {
            case binary_op::add:
                return "+";
            case binary_op::sub:
                return "-";
            case binary_op::mul:
                return "*";
            case binary_op::div:
                return "/";
            case binary_op::floor_div:
                return "//";
            case binary_op::mod:
                return "%";
            case binary_op::logical_and:
                return "and";
            case binary_op::logical_or:
                return "or";
        }
        return "?";
    }

    std::string_view to_string(compare_op op) {
        switch (op) {
            case compare_op::eq:
                return "==";
            case compare_op::ne:
                return "!=";
            case compare_op::lt:
                return "<";
            case compare_op::le:
                return "<=";
            case compare_op::gt:
                return ">";
            case compare_op::ge:
                return ">=";
        }
        return "?";
    }

    std::string_view to_string(stmt_kind k) {
        switch (k) {
            case stmt_kind::assign:
                return "Assign";
            case stmt_kind::aug_assign:
                return "AugAssign";
            case stmt_kind::member_assign:
                return "MemberAssign";
            case stmt_kind::expr_stmt:
                return "ExprStmt";
            case stmt_kind::if_stmt:
                return "If";
            case stmt_kind::while_stmt:
                return "While";
            case stmt_kind::for_stmt:
                return "For";
            case stmt_kind::func_def:
                return "FuncDef";
            case stmt_kind::return_stmt:
                return "Return";
            case stmt_kind::del_stmt:
                return "Del";
            case stmt_kind::pass_stmt:
                return "Pass";
        }
        return "?";
    }

    stmt_kind stmt::kind() const {
        return std::visit(
                [](const auto& n) -> stmt_kind {
                    using T = std::decay_t<decltype(n)>;
                    if constexpr (std::is_same_v<T, assign_stmt>) {
                        return n.target->template as<name_expr>() ? stmt_kind::assign : stmt_kind::member_assign;
                    }
                    else if constexpr (std::is_same_v<T, aug_assign_stmt>) {
                        return stmt_kind::aug_assign;
                    }
                    else if constexpr (std::is_same_v<T, expr_stmt>) {
                        return stmt_kind::expr_stmt;
                    }
                    else if constexpr (std::is_same_v<T, if_stmt>) {
                        return stmt_kind::if_stmt;
                    }
                    else if constexpr (std::is_same_v<T, while_stmt>) {
                        return stmt_kind::while_stmt;
                    }
                    else if constexpr (std::is_same_v<T, for_stmt>) {
                        return stmt_kind::for_stmt;
                    }
                    else if constexpr (std::is_same_v<T, func_def_stmt>) {
                        return stmt_kind::func_def;
                    }
                    else if constexpr (std::is_same_v<T, return_stmt>) {
                        return stmt_kind::return_stmt;
                    }
                    else if constexpr (std::is_same_v<T, del_stmt>) {
                        return stmt_kind::del_stmt;
                    }
                    else {
                        return stmt_kind::pass_stmt;
                    }
                },
                node);
    }

    bool stmt::is_compound() const {
        auto k = kind();
        return k == stmt_kind::if_stmt || k == stmt_kind::while_stmt || k == stmt_kind::for_stmt;
    }

    std::vector<const stmt*> program::top_level() const {
        std::vector<const stmt*> out;
        out.reserve(body.size());
        for (const auto& s : body) {
            out.push_back(s.get());
        }
        return out;
    }

    namespace {
        constexpr std::array<std::string_view, 7> builtin_names = {
                "print", "len", "range", "map", "list", "sample", "fail"};
    }

    bool is_builtin_name(std::string_view name) {
        return std::find(builtin_names.begin(), builtin_names.end(), name) != builtin_names.end();
    }

    bool is_builtin_method(std::string_view name) {
        return name == "append";
    }

}  // namespace cellguard::lang
