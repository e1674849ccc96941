#pragma once

#include "cellguard/lineage/graph.hpp"

#include <map>

namespace cellguard::testing {

    // Stale flags recomputed from scratch as the least fixed point of
    // "some parent is stale or newer".
    inline std::map<lineage::symbol_id, bool> oracle_staleness(const lineage::graph& g) {
        std::map<lineage::symbol_id, bool> stale;
        auto ids = g.ids();
        for (auto id : ids) {
            stale[id] = false;
        }
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto id : ids) {
                if (stale[id]) {
                    continue;
                }
                const auto& s = g.at(id);
                for (auto p : s.parents) {
                    if (stale[p] || g.at(p).ts > s.ts) {
                        stale[id] = true;
                        changed = true;
                        break;
                    }
                }
            }
        }
        return stale;
    }

    inline bool matches_oracle(const lineage::graph& g) {
        auto expected = oracle_staleness(g);
        for (auto [id, flag] : expected) {
            if (g.at(id).stale != flag) {
                return false;
            }
        }
        return true;
    }

}  // namespace cellguard::testing
