#include "cellguard/highlights/report.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

namespace cellguard::highlights {

    std::string report::to_json() const {
        auto list = [](const cell_set& s) { return nlohmann::json(std::vector<std::string>(s.begin(), s.end())); };
        nlohmann::json j{{"counter", counter},
                         {"stale", list(stale)},
                         {"fresh", list(fresh)},
                         {"refresher", list(refresher)},
                         {"new_fresh", list(new_fresh)},
                         {"new_refresher", list(new_refresher)},
                         {"stale_symbols", stale_symbols},
                         {"analysis_counts",
                          {{"liveness_runs", counts.liveness_runs}, {"dead_runs", counts.dead_runs}}}};
        return j.dump();
    }

    stale_fresh compute_stale_fresh(const checker::analyzer& a, analysis_counts& counts) {
        stale_fresh out;
        auto before = a.liveness_runs();
        std::map<lineage::symbol_id, lang::name_set> by_symbol;
        for (const auto& v : a.views()) {
            const auto& id = v.id;
            by_symbol.clear();
            auto c = a.classify(a.live(v).live_at_top, v.ts, &by_symbol);
            if (c.stale()) {
                out.stale.insert(id);
                out.stale_names[id] = std::move(by_symbol);
                out.stale_syms[id] = std::move(c.stale_syms);
            }
            else if (c.fresh()) {
                out.fresh.insert(id);
            }
        }
        counts.liveness_runs += a.liveness_runs() - before;
        return out;
    }

    cell_set compute_refresher_naive(const checker::analyzer& a, const stale_fresh& sf, analysis_counts& counts) {
        cell_set out;
        auto before = a.liveness_runs();
        for (const auto& candidate : a.cells()) {
            if (sf.stale.contains(candidate)) {
                continue;
            }
            for (const auto& stale_cell : sf.stale) {
                auto joined = a.stale_of_concat(candidate, stale_cell);
                const auto& before = sf.stale_syms.at(stale_cell);
                bool shrinks = std::any_of(before.begin(), before.end(), [&](auto s) { return !joined.contains(s); });
                if (shrinks) {
                    out.insert(candidate);
                }
            }
        }
        counts.liveness_runs += a.liveness_runs() - before;
        return out;
    }

    cell_set compute_refresher_fast(const checker::analyzer& a, const stale_fresh& sf, analysis_counts& counts) {
        cell_set out;
        if (sf.stale.empty()) {
            return out;
        }
        // Only names through which a stale cell reaches a stale symbol matter.
        std::map<lang::qualified_name, cell_set> dead_index;
        for (const auto& [stale_cell, by_symbol] : sf.stale_names) {
            for (const auto& [symbol, names] : by_symbol) {
                for (const auto& n : names) {
                    dead_index.try_emplace(n);
                }
            }
        }
        auto before = a.dead_runs();
        for (const auto& v : a.views()) {
            if (sf.stale.contains(v.id)) {
                continue;
            }
            for (const auto& n : a.dead_names(v).dead_at_bottom) {
                if (auto it = dead_index.find(n); it != dead_index.end()) {
                    it->second.insert(v.id);
                }
            }
        }
        counts.dead_runs += a.dead_runs() - before;
        for (const auto& [stale_cell, by_symbol] : sf.stale_names) {
            for (const auto& [symbol, names] : by_symbol) {
                // The symbol stops being live only if every name reaching it is dead.
                std::optional<cell_set> cells;
                for (const auto& n : names) {
                    auto it = dead_index.find(n);
                    if (it->second.empty()) {
                        cells = cell_set{};
                        break;
                    }
                    if (!cells) {
                        cells = it->second;
                    }
                    else {
                        cell_set keep;
                        std::set_intersection(cells->begin(), cells->end(), it->second.begin(), it->second.end(),
                                              std::inserter(keep, keep.end()));
                        cells = std::move(keep);
                    }
                }
                if (cells) {
                    out.insert(cells->begin(), cells->end());
                }
            }
        }
        return out;
    }

    void compute_deltas(const report* previous, report& current) {
        static const cell_set empty;
        const auto& prev_fresh = previous ? previous->fresh : empty;
        const auto& prev_refresher = previous ? previous->refresher : empty;
        current.new_fresh.clear();
        current.new_refresher.clear();
        std::set_difference(current.fresh.begin(), current.fresh.end(), prev_fresh.begin(), prev_fresh.end(),
                            std::inserter(current.new_fresh, current.new_fresh.end()));
        std::set_difference(current.refresher.begin(), current.refresher.end(), prev_refresher.begin(),
                            prev_refresher.end(), std::inserter(current.new_refresher, current.new_refresher.end()));
    }

    report compute_report(const interp::notebook_state& state,
                          refresher_mode mode,
                          const report* previous,
                          checker::analysis_cache* cache) {
        checker::analyzer a(state, cache);
        report r;
        r.counter = state.counter();
        auto sf = compute_stale_fresh(a, r.counts);
        r.stale = sf.stale;
        r.fresh = sf.fresh;
        for (const auto& [cell, syms] : sf.stale_syms) {
            auto& names = r.stale_symbols[cell];
            for (auto s : syms) {
                names.push_back(state.lineage().at(s).name.str());
            }
            std::sort(names.begin(), names.end());
        }
        r.refresher = mode == refresher_mode::naive ? compute_refresher_naive(a, sf, r.counts)
                                                    : compute_refresher_fast(a, sf, r.counts);
        compute_deltas(previous, r);
        return r;
    }

}  // namespace cellguard::highlights
