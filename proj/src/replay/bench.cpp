#include "cellguard/replay/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace cellguard::replay {

    namespace {

        std::string var(char group, int i) { return std::string(1, group) + std::to_string(i); }

    }  // namespace

    interp::notebook_state bench_notebook(int cells, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        auto step = [&] { return std::to_string(std::uniform_int_distribution<int>(1, 9)(rng)); };
        interp::notebook_state st;
        st.upsert_cell("c1", "t0 = 1\n");
        int last_t = 0;
        int last_u = -1;
        for (int i = 1; i < cells; ++i) {
            std::string src;
            if (i % 2 == 1) {
                src = var('t', i) + " = " + var('t', last_t) + " + " + step() + "\n";
                src += "if " + var('t', i) + " > 3:\n    " + var('t', i) + " = " + var('t', i) + " - 1\n";
                last_t = i;
            }
            else {
                std::string from = last_u < 0 ? "0" : var('u', last_u);
                src = var('u', i) + " = " + from + " + " + step() + "\n";
                src += "if " + var('u', i) + " > 3:\n    " + var('u', i) + " = " + var('u', i) + " % 7\n";
                last_u = i;
            }
            st.upsert_cell("c" + std::to_string(i + 1), src);
        }
        for (const auto& id : std::vector<std::string>(st.cell_ids())) {
            if (!st.execute_cell(id).ok) {
                throw std::logic_error("bench cell failed: " + id);
            }
        }
        st.upsert_cell("c1", "t0 = 2\n");
        st.execute_cell("c1");
        return st;
    }

    bench_row bench_point(int cells, std::uint64_t seed, int repeats) {
        auto st = bench_notebook(cells, seed);
        bench_row row;
        row.cells = cells;
        auto best_of = [&](highlights::refresher_mode mode, highlights::analysis_counts& counts) {
            double best = std::numeric_limits<double>::infinity();
            for (int r = 0; r < std::max(1, repeats); ++r) {
                auto start = std::chrono::steady_clock::now();
                auto rep = highlights::compute_report(st, mode, nullptr);
                std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
                best = std::min(best, took.count());
                counts = rep.counts;
                row.stale = rep.stale.size();
            }
            return best;
        };
        row.fast_ms = best_of(highlights::refresher_mode::fast, row.fast_counts);
        row.naive_ms = best_of(highlights::refresher_mode::naive, row.naive_counts);
        return row;
    }

    std::vector<int> bench_sizes(int max_cells) {
        std::vector<int> out;
        for (int n : {10, 20, 50, 100, 150, 200, 300, 400, 500}) {
            if (n <= max_cells) {
                out.push_back(n);
            }
        }
        if (out.empty() || out.back() != max_cells) {
            out.push_back(max_cells);
        }
        return out;
    }

    void write_bench_csv(std::ostream& out, const std::vector<bench_row>& rows) {
        out << "cells,stale,fast_ms,naive_ms,fast_liveness_runs,fast_dead_runs,naive_liveness_runs\n";
        for (const auto& r : rows) {
            out << r.cells << ',' << r.stale << ',' << r.fast_ms << ',' << r.naive_ms << ',' << r.fast_counts.liveness_runs
                << ',' << r.fast_counts.dead_runs << ',' << r.naive_counts.liveness_runs << '\n';
        }
    }

}  // namespace cellguard::replay
