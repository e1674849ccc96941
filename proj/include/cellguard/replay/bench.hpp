#pragma once

#include "cellguard/highlights/report.hpp"
#include "cellguard/interp/notebook.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cellguard::replay {

    // A notebook of `cells` cells where every other cell descends from the first
    // cell, executed in order and then with the first cell edited and rerun,
    // leaving the descendants stale.
    interp::notebook_state bench_notebook(int cells, std::uint64_t seed);

    struct bench_row {
        int cells{0};
        std::size_t stale{0};
        double fast_ms{0};
        double naive_ms{0};
        highlights::analysis_counts fast_counts;
        highlights::analysis_counts naive_counts;
    };

    // Best-of-`repeats` wall-clock of one full report in each refresher mode.
    bench_row bench_point(int cells, std::uint64_t seed, int repeats);

    std::vector<int> bench_sizes(int max_cells);
    void write_bench_csv(std::ostream& out, const std::vector<bench_row>& rows);

}  // namespace cellguard::replay
