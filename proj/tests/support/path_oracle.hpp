#pragma once

#include "cellguard/lang/cfg.hpp"

#include <optional>

// Brute-force dataflow over every entry-to-exit path of an acyclic graph.
namespace cellguard::testing {

    struct path_facts {
        lang::name_set live;
        lang::name_set dead;
    };

    inline path_facts enumerate_paths(const lang::cfg& g) {
        path_facts out;
        std::optional<lang::name_set> dead_all;
        std::vector<int> path;
        auto finish = [&]() {
            lang::name_set written;
            lang::name_set killed;
            for (int id : path) {
                const auto& n = g.node(id);
                for (const auto& u : n.use_set) {
                    if (!written.contains(u)) {
                        out.live.insert(u);
                    }
                }
                written.insert(n.def_set.begin(), n.def_set.end());
                auto k = lang::set_difference(n.def_set, n.use_set);
                killed.insert(k.begin(), k.end());
            }
            dead_all = dead_all ? lang::set_intersection(*dead_all, killed) : killed;
        };
        auto walk = [&](auto&& self, int v) -> void {
            path.push_back(v);
            if (v == g.exit) {
                finish();
            }
            for (int w : g.node(v).succ) {
                self(self, w);
            }
            path.pop_back();
        };
        walk(walk, g.entry);
        out.dead = dead_all.value_or(lang::name_set{});
        return out;
    }

}  // namespace cellguard::testing
