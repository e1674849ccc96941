#pragma once

#include "cellguard/checker/analyzer.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>

namespace cellguard::highlights {

    using cell_set = std::set<std::string>;

    struct analysis_counts {
        std::size_t liveness_runs{0};
        std::size_t dead_runs{0};

        bool operator==(const analysis_counts&) const = default;
    };

    struct report {
        std::int64_t counter{0};
        cell_set stale;
        cell_set fresh;
        cell_set refresher;
        cell_set new_fresh;
        cell_set new_refresher;
        // Stale symbol names per stale cell.
        std::map<std::string, std::vector<std::string>> stale_symbols;
        analysis_counts counts;

        std::string to_json() const;
        bool operator==(const report&) const = default;
    };

    // Per-cell classification of one notebook state.
    struct stale_fresh {
        cell_set stale;
        cell_set fresh;
        std::map<std::string, checker::symbol_set> stale_syms;
        // Live names of each stale cell that resolve to each of its stale symbols.
        std::map<std::string, std::map<lineage::symbol_id, lang::name_set>> stale_names;
    };

    stale_fresh compute_stale_fresh(const checker::analyzer& a, analysis_counts& counts);

    // One liveness run per (candidate, stale cell) pair over the concatenated cells.
    cell_set compute_refresher_naive(const checker::analyzer& a, const stale_fresh& sf, analysis_counts& counts);

    // One dead-name run per non-stale cell and an inverted index over the results.
    cell_set compute_refresher_fast(const checker::analyzer& a, const stale_fresh& sf, analysis_counts& counts);

    // Fills new_fresh/new_refresher from the previous report, or treats it as
    // empty when absent.
    void compute_deltas(const report* previous, report& current);

    enum class refresher_mode : std::uint8_t { naive, fast };

    // With a cache, counts report only the analyses that were not reused.
    report compute_report(const interp::notebook_state& state,
                          refresher_mode mode,
                          const report* previous,
                          checker::analysis_cache* cache = nullptr);

}  // namespace cellguard::highlights
