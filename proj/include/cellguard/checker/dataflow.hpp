#pragma once

#include "cellguard/lang/cfg.hpp"

#include <cstddef>
#include <unordered_map>
#include <vector>

namespace cellguard::checker {

    using lang::name_set;

    // Either a finite set of names or the complement of one. The universal set
    // is `cofinite_set::all()`.
    struct cofinite_set {
        bool complement{false};
        name_set items;

        static cofinite_set all() { return {true, {}}; }
        static cofinite_set of(name_set names) { return {false, std::move(names)}; }

        bool contains(const lang::qualified_name& n) const { return complement != items.contains(n); }
        bool is_finite() const { return !complement; }

        bool operator==(const cofinite_set&) const = default;
    };

    cofinite_set intersect(const cofinite_set& a, const cofinite_set& b);
    cofinite_set unite(const cofinite_set& a, const name_set& b);

    // Extra names read by each call site, from resolving its callee.
    using call_uses = std::unordered_map<const lang::call_expr*, name_set>;

    // Node use set plus the reads contributed by resolved calls.
    name_set effective_uses(const lang::cfg_node& n, const call_uses* calls);

    struct liveness_result {
        name_set live_at_top;
        std::vector<name_set> live_in;
        std::vector<name_set> live_out;
        std::size_t iterations{0};
    };

    struct dead_result {
        name_set dead_at_bottom;
        std::vector<cofinite_set> dead_in;
        std::vector<cofinite_set> dead_out;
        std::size_t iterations{0};
    };

    // Backward may-analysis: names whose value at entry can be read later.
    liveness_result liveness(const lang::cfg& g, const call_uses* calls = nullptr);

    // Forward must-analysis: names overwritten on every path to the exit.
    dead_result dead(const lang::cfg& g, const call_uses* calls = nullptr);

}  // namespace cellguard::checker
