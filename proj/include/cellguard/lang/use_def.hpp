#pragma once

#include "cellguard/lang/ast.hpp"

#include <optional>
#include <vector>

namespace cellguard::lang {

    struct use_def_sets {
        name_set use_set;
        name_set def_set;

        bool operator==(const use_def_sets&) const = default;
    };

    // The qualified name spelled by `e` when it is built only from names,
    // attributes and literal subscripts (`a.b[0]["k"]`).
    std::optional<qualified_name> static_chain(const expr& e);

    // Names read when evaluating `e`. Builtins and lambda parameters are excluded.
    name_set expr_uses(const expr& e);

    // Use/def sets of a simple statement. Throws std::invalid_argument for
    // if/while/for, which are split into CFG nodes first.
    use_def_sets use_def(const stmt& s);

    // Call expressions evaluated directly by `e` (not those inside lambda bodies),
    // innermost first.
    void collect_calls(const expr& e, std::vector<const call_expr*>& out);

}  // namespace cellguard::lang
