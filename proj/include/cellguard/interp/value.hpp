#pragma once

#include "cellguard/lang/ast.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace cellguard::interp {

    using object_id = std::uint64_t;

    struct list_object;
    struct dict_object;
    struct function_object;
    struct frame;

    struct none_value {
        bool operator==(const none_value&) const = default;
    };

    enum class builtin : std::uint8_t { print, len, range, map, list, sample, fail };

    std::string_view to_string(builtin b);
    std::optional<builtin> find_builtin(std::string_view name);

    using value = std::variant<none_value,
                               bool,
                               std::int64_t,
                               double,
                               std::string,
                               std::shared_ptr<list_object>,
                               std::shared_ptr<dict_object>,
                               std::shared_ptr<function_object>,
                               builtin>;

    struct list_object {
        object_id id{0};
        std::vector<value> items;
    };

    // String-keyed, insertion ordered.
    struct dict_object {
        object_id id{0};
        std::vector<std::pair<std::string, value>> entries;

        value* find(const std::string& key);
        const value* find(const std::string& key) const;
        void set(const std::string& key, value v);
        bool erase(const std::string& key);
    };

    struct function_object {
        object_id id{0};
        std::string name;
        const lang::func_def_stmt* def{nullptr};
        const lang::lambda_expr* lambda{nullptr};
        std::set<std::string> lambda_params;
        std::shared_ptr<const lang::program> owner;  // keeps the AST alive
        std::shared_ptr<frame> closure;
        // Identifies the defining cell version for first-execution bookkeeping.
        std::uint32_t unit{0};

        const lang::name_set& free_names() const { return def ? def->free_names : lambda->free_names; }
        const std::set<std::string>& locals() const { return def ? def->locals : lambda_params; }
    };

    // Runtime failure inside a cell (unbound name, type error, fail(), ...).
    class runtime_error : public std::runtime_error {
      public:
        using std::runtime_error::runtime_error;
    };

    std::optional<object_id> identity(const value& v);
    bool truthy(const value& v);
    std::string type_name(const value& v);
    // Python-style rendering; strings are quoted unless `top_level`.
    std::string repr(const value& v, bool top_level = false);
    bool values_equal(const value& a, const value& b);

}  // namespace cellguard::interp
