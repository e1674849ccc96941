// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include "cellguard/checker/dataflow.hpp"
#include "cellguard/highlights/report.hpp"
#include "cellguard/kernel/service.hpp"
#include "cellguard/replay/bench.hpp"
#include "cellguard/replay/corpus.hpp"
#include "cellguard/replay/session.hpp"

#include "support/ast_gen.hpp"
#include "support/branchy_gen.hpp"
#include "support/aggregation_notebook.hpp"
#include "support/notebook_gen.hpp"
#include "support/path_oracle.hpp"
#include "support/script_gen.hpp"
#include "support/staleness_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace cellguard;
using highlights::cell_set;
using highlights::refresher_mode;

namespace {

    // Pinned limits.
    constexpr double golden_limit_s = 1.0;
    constexpr double identity_limit_s = 120.0;
    constexpr double overhead_limit_s = 300.0;
    constexpr double max_trace_overhead = 2.0;
    constexpr double min_branch_density = 0.3;
    constexpr double min_bench_stale_fraction = 0.2;
    constexpr double max_fast_growth = 15.0;
    constexpr double min_naive_growth = 50.0;
    constexpr double min_naive_pair_factor = 0.1;
    constexpr std::size_t min_random_samples = 10'000;
    constexpr double random_mean_lo = 0.9;
    constexpr double random_mean_hi = 1.1;

    struct verdict {
        bool ok{true};
        std::ostringstream detail;
        std::vector<std::string> failed;

        void require(bool cond, const std::string& what) {
            if (!cond) {
                failed.push_back(what);
                ok = false;
            }
        }
    };

    using clock_type = std::chrono::steady_clock;

    double seconds_since(clock_type::time_point start) {
        return std::chrono::duration<double>(clock_type::now() - start).count();
    }

    int failures = 0;

    void criterion(const std::string& name, const std::function<void(verdict&)>& body) {
        verdict v;
        auto start = clock_type::now();
        try {
            body(v);
        }
        catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        auto elapsed = seconds_since(start);
        failures += !v.ok;
        std::cout << (v.ok ? "PASS " : "FAIL ") << name << " [" << std::fixed << std::setprecision(3) << elapsed
                  << " s] " << v.detail.str();
        for (std::size_t i = 0; i < v.failed.size(); ++i) {
            std::cout << (i == 0 ? " | failed: " : "; ") << v.failed[i];
        }
        std::cout << std::endl;
    }

    std::string join(const cell_set& s) {
        std::string out = "{";
        for (const auto& c : s) {
            out += (out.size() > 1 ? "," : "") + c;
        }
        return out + "}";
    }

    // ---- golden scenarios -----------------------------------------------------

    void aggregation_scenario(verdict& v) {
        namespace agg = cellguard::testing::aggregation;
        auto start = clock_type::now();
        kernel::session_service svc;
        auto id = svc.create_session();
        svc.upsert_cell(id, "c1", agg::c1);
        svc.upsert_cell(id, "c2", agg::c2);
        svc.upsert_cell(id, "c3", agg::c3);
        for (const char* c : {"c1", "c2", "c3"}) {
            auto out = svc.run_cell(id, c, false);
            v.require(!out.rejected() && out.result.ok, std::string("clean run of ") + c);
        }
        svc.upsert_cell(id, "c1", agg::c1_fixed);
        v.require(svc.run_cell(id, "c1", false).result.ok, "edited c1 runs");
        auto r = svc.get_highlights(id);
        v.require(r.counter == 4, "counter 4");
        v.require(r.stale == cell_set{"c3"}, "stale " + join(r.stale));
        v.require(r.refresher == cell_set{"c2"}, "refresher " + join(r.refresher));
        auto gated = svc.run_cell(id, "c3", false);
        v.require(gated.rejected(), "c3 gated");
        if (gated.rejected()) {
            v.require(gated.warning->symbols == std::vector<std::string>{"agg_by_col"}, "warning names agg_by_col");
        }
        v.require(svc.get_highlights(id).counter == 4, "gated run leaves counter");
        double elapsed = seconds_since(start);
        v.require(elapsed < golden_limit_s, "runtime under 1 s");
        v.detail << "stale=" << join(r.stale) << " refresher=" << join(r.refresher) << " warning="
                 << (gated.rejected() ? gated.warning->to_json() : "none");
    }

    void three_cell_scenario(verdict& v) {
        interp::notebook_state nb;
        auto run = [&](const std::string& id, const std::string& src) {
            nb.upsert_cell(id, src);
            v.require(nb.execute_cell(id).ok, id + " runs");
        };
        run("c1", "a = 4");
        run("c2", "b = a");
        run("c3", "c = a + b");
        run("c1", "a = 5");
        for (auto mode : {refresher_mode::fast, refresher_mode::naive}) {
            auto r = highlights::compute_report(nb, mode, nullptr);
            v.require(r.stale == cell_set{"c3"}, "stale " + join(r.stale));
            v.require(r.fresh.contains("c2"), "c2 fresh");
            v.require(r.refresher.contains("c2"), "c2 refresher");
        }
        auto before = highlights::compute_report(nb, refresher_mode::fast, nullptr);
        nb.execute_cell("c2");
        auto after = highlights::compute_report(nb, refresher_mode::fast, &before);
        v.require(after.stale.empty(), "stale empty after c2");
        v.detail << "before stale=" << join(before.stale) << " fresh=" << join(before.fresh)
                 << " refresher=" << join(before.refresher) << "; after stale=" << join(after.stale);
    }

    // ---- concatenation identity and refresher equivalence ---------------------

    struct pair_stats {
        std::size_t notebooks{0};
        std::size_t states{0};
        std::size_t pairs{0};
        std::size_t shrinking{0};
        std::size_t identity_failures{0};
        std::size_t refresher_mismatches{0};
        std::size_t statements{0};
        std::size_t branches{0};
    };

    // Stale symbols of a stale cell whose every live name is dead after the candidate.
    checker::symbol_set dead_meets_stale(const lang::name_set& dead,
                                         const std::map<lineage::symbol_id, lang::name_set>& stale_names) {
        checker::symbol_set out;
        for (const auto& [symbol, names] : stale_names) {
            if (std::all_of(names.begin(), names.end(), [&](const auto& n) { return dead.contains(n); })) {
                out.insert(symbol);
            }
        }
        return out;
    }

    void check_state(const interp::notebook_state& nb, pair_stats& st) {
        checker::analyzer a(nb);
        highlights::analysis_counts counts;
        auto sf = highlights::compute_stale_fresh(a, counts);
        ++st.states;
        for (const auto& candidate : a.cells()) {
            if (sf.stale.contains(candidate)) {
                continue;
            }
            const auto dead = a.dead_names(candidate).dead_at_bottom;
            for (const auto& target : sf.stale) {
                const auto& before = sf.stale_syms.at(target);
                auto joined = a.stale_of_concat(candidate, target);
                checker::symbol_set shrink;
                for (auto s : before) {
                    if (!joined.contains(s)) {
                        shrink.insert(s);
                    }
                }
                ++st.pairs;
                st.shrinking += !shrink.empty();
                st.identity_failures += shrink != dead_meets_stale(dead, sf.stale_names.at(target));
            }
        }
        auto naive = highlights::compute_refresher_naive(a, sf, counts);
        auto fast = highlights::compute_refresher_fast(a, sf, counts);
        st.refresher_mismatches += naive != fast;
    }

    const pair_stats& notebook_suite() {
        static const pair_stats stats = [] {
            pair_stats st;
            for (unsigned seed = 1; seed <= 1000; ++seed) {
                cellguard::testing::notebook_generator gen(seed);
                auto cells = gen.notebook(10, 6, 0.5);
                interp::notebook_state nb;
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    auto id = "c" + std::to_string(i);
                    nb.upsert_cell(id, cells[i]);
                    for (const auto& s : nb.program_of(id)->body) {
                        ++st.statements;
                        st.branches += s->as<lang::if_stmt>() != nullptr;
                    }
                }
                ++st.notebooks;
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    nb.execute_cell("c" + std::to_string(i));
                }
                check_state(nb, st);
                for (auto step : gen.reruns(static_cast<int>(cells.size()), 4)) {
                    auto id = "c" + std::to_string(step.cell);
                    if (step.rewrite && step.cell > 0) {
                        nb.upsert_cell(id, gen.cell(6, 0.5));
                    }
                    nb.execute_cell(id);
                    check_state(nb, st);
                }
            }
            return st;
        }();
        return stats;
    }

    void concatenation_identity(verdict& v) {
        auto start = clock_type::now();
        const auto& st = notebook_suite();
        double density = static_cast<double>(st.branches) / static_cast<double>(st.statements);
        double elapsed = seconds_since(start);
        v.require(st.notebooks == 1000, "1000 notebooks");
        v.require(density >= min_branch_density, "branch density >= 0.3");
        v.require(st.identity_failures == 0, "identity holds on every pair");
        v.require(st.shrinking > 0, "some pairs shrink");
        v.require(elapsed < identity_limit_s, "runtime under 2 min");
        v.detail << "notebooks=" << st.notebooks << " states=" << st.states << " pairs=" << st.pairs
                 << " shrinking=" << st.shrinking << " failures=" << st.identity_failures
                 << " branch_density=" << density;
    }

    void refresher_equivalence(verdict& v) {
        const auto& st = notebook_suite();
        v.require(st.refresher_mismatches == 0, "fast equals naive");
        v.detail << "states=" << st.states << " mismatches=" << st.refresher_mismatches;
    }

    // ---- dataflow against path enumeration ------------------------------------

    bool has_loop(const lang::block& b) {
        for (const auto& s : b) {
            if (s->as<lang::while_stmt>() || s->as<lang::for_stmt>()) {
                return true;
            }
            if (auto i = s->as<lang::if_stmt>()) {
                for (const auto& br : i->branches) {
                    if (has_loop(br.body)) {
                        return true;
                    }
                }
                if (i->orelse && has_loop(*i->orelse)) {
                    return true;
                }
            }
        }
        return false;
    }

    void dataflow_oracle(verdict& v) {
        int checked = 0;
        int mismatches = 0;
        int max_branches = 0;
        auto check = [&](const lang::program& p) {
            auto g = lang::build_cfg(p);
            if (!g.back_edges().empty() || g.branch_points() > 8) {
                return;
            }
            ++checked;
            max_branches = std::max(max_branches, g.branch_points());
            auto facts = cellguard::testing::enumerate_paths(g);
            mismatches += checker::liveness(g).live_at_top != facts.live;
            mismatches += checker::dead(g).dead_at_bottom != facts.dead;
        };
        for (unsigned seed = 1; checked < 250 && seed < 20000; ++seed) {
            cellguard::testing::ast_generator gen(seed + 500'000);
            auto p = gen.program(8);
            if (!has_loop(p.body)) {
                check(p);
            }
        }
        for (unsigned seed = 1; checked < 500 && seed < 20000; ++seed) {
            cellguard::testing::branchy_generator gen(seed + 500'000);
            check(lang::parse_cell(gen.cell(6, 8)));
        }
        v.require(checked == 500, "500 graphs");
        v.require(mismatches == 0, "exact equality");
        v.detail << "graphs=" << checked << " mismatches=" << mismatches << " max_branch_points=" << max_branches;
    }

    // ---- incremental staleness ------------------------------------------------

    void incremental_staleness(verdict& v) {
        std::size_t steps = 0;
        std::size_t mismatches = 0;
        std::size_t with_stale = 0;
        for (unsigned seed = 1; seed <= 200; ++seed) {
            cellguard::testing::script_generator gen(seed + 700'000);
            auto cells = gen.notebook(5);
            interp::notebook_state nb;
            nb.set_step_limit(200'000);
            for (std::size_t i = 0; i < cells.size(); ++i) {
                nb.upsert_cell("c" + std::to_string(i), cells[i]);
            }
            std::mt19937_64 rng(seed);
            auto schedule = gen.schedule(5, 50);
            for (int c : schedule) {
                auto id = "c" + std::to_string(c);
                if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
                    nb.upsert_cell(id, gen.cell());
                }
                nb.execute_cell(id);
                ++steps;
                mismatches += !cellguard::testing::matches_oracle(nb.lineage());
                auto expected = cellguard::testing::oracle_staleness(nb.lineage());
                with_stale += std::any_of(expected.begin(), expected.end(), [](const auto& kv) { return kv.second; });
            }
            v.require(schedule.size() >= 50, "at least 50 steps per sequence");
        }
        v.require(mismatches == 0, "flags equal the from-scratch fixed point");
        v.detail << "sequences=200 steps=" << steps << " states_with_stale=" << with_stale
                 << " mismatches=" << mismatches;
    }

    // ---- complexity witness ---------------------------------------------------

    void complexity_witness(verdict& v) {
        std::map<int, replay::bench_row> rows;
        for (int n : replay::bench_sizes(200)) {
            auto row = replay::bench_point(n, 1, 5);
            v.require(static_cast<double>(row.stale) >= min_bench_stale_fraction * n,
                      "at least 20% stale at " + std::to_string(n));
            v.require(row.fast_counts.liveness_runs == static_cast<std::size_t>(n),
                      "fast liveness runs equal cells at " + std::to_string(n));
            v.require(row.fast_counts.dead_runs <= static_cast<std::size_t>(n),
                      "fast dead runs at most cells at " + std::to_string(n));
            rows[n] = row;
        }
        const auto& big = rows.at(200);
        const auto& small = rows.at(20);
        auto pairs = big.naive_counts.liveness_runs - 200;
        v.require(static_cast<double>(pairs) >= min_naive_pair_factor * 200 * 200, "naive pairs >= 0.1 N^2");
        double fast_growth = big.fast_ms / small.fast_ms;
        double naive_growth = big.naive_ms / small.naive_ms;
        v.require(fast_growth < max_fast_growth, "fast(200)/fast(20) < 15");
        v.require(naive_growth > min_naive_growth, "naive(200)/naive(20) > 50");
        v.detail << std::setprecision(3) << "fast_ms(20)=" << small.fast_ms << " fast_ms(200)=" << big.fast_ms
                 << " naive_ms(20)=" << small.naive_ms << " naive_ms(200)=" << big.naive_ms
                 << " fast_growth=" << fast_growth << " naive_growth=" << naive_growth << " naive_pairs(200)=" << pairs
                 << " stale(200)=" << big.stale;
    }

    // ---- tracing overhead -----------------------------------------------------

    double replay_seconds(const std::vector<replay::session_log>& logs, bool trace) {
        replay::replay_options opt;
        opt.trace = trace;
        auto start = clock_type::now();
        std::size_t executions = 0;
        for (const auto& log : logs) {
            executions += replay::replay_session(log, opt).executions;
        }
        if (executions == 0) {
            throw std::logic_error("empty corpus");
        }
        return seconds_since(start);
    }

    void tracing_overhead(verdict& v) {
        auto start = clock_type::now();
        auto logs = replay::generate_corpus(7, 50);
        double traced = 1e300;
        double plain = 1e300;
        for (int i = 0; i < 5; ++i) {
            plain = std::min(plain, replay_seconds(logs, false));
            traced = std::min(traced, replay_seconds(logs, true));
        }
        double ratio = traced / plain;
        v.require(ratio <= max_trace_overhead, "traced <= 2.0x untraced");
        v.require(seconds_since(start) < overhead_limit_s, "runtime under 5 min");
        v.detail << std::setprecision(4) << "sessions=50 traced_s=" << traced << " untraced_s=" << plain
                 << " ratio=" << ratio;
    }

    // ---- predictive power -----------------------------------------------------

    std::string stat(const std::optional<double>& x) {
        if (!x) {
            return "n/a";
        }
        std::ostringstream s;
        s << std::setprecision(4) << *x;
        return s.str();
    }

    void predictive_power(verdict& v) {
        auto logs = replay::generate_corpus(11, 800);
        std::vector<replay::metrics_record> records;
        for (const auto& log : logs) {
            replay::replay_options opt;
            opt.seed = records.size() + 1;
            records.push_back(replay::replay_session(log, opt));
        }
        auto m = replay::aggregate(records);
        using replay::family;
        auto rnd = m.pooled_mean(family::random);
        v.require(m.samples(family::random) >= min_random_samples, "at least 10000 random samples");
        v.require(rnd && *rnd >= random_mean_lo && *rnd <= random_mean_hi, "random mean in [0.9, 1.1]");
        auto refresher = m.average(family::refresher);
        auto stale = m.average(family::stale);
        v.require(refresher && *refresher > 1.0, "refresher average > 1");
        v.require(stale && *stale < 1.0, "stale average < 1");
        v.detail << "random_samples=" << m.samples(family::random) << " random_mean=" << stat(rnd);
        for (auto f : replay::all_families) {
            v.detail << " avg_" << replay::family_name(f) << "=" << stat(m.average(f));
        }
        v.detail << " sessions_with_safety_errors=" << m.sessions_with_safety_errors << "/" << m.included_sessions
                 << " safety_errors=" << m.safety_error_count;
    }

    // ---- semantics preservation -----------------------------------------------

    std::string final_globals(unsigned seed, bool tracing) {
        cellguard::testing::script_generator gen(seed);
        auto cells = gen.notebook(4);
        auto order = gen.schedule(4, 8);
        interp::notebook_state nb;
        nb.set_tracing(tracing);
        nb.set_step_limit(200'000);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            nb.upsert_cell("c" + std::to_string(i), cells[i]);
        }
        for (int c : order) {
            nb.execute_cell("c" + std::to_string(c));
        }
        return nb.dump_globals();
    }

    void semantics_preservation(verdict& v) {
        int differing = 0;
        for (unsigned seed = 1; seed <= 500; ++seed) {
            differing += final_globals(seed + 900'000, true) != final_globals(seed + 900'000, false);
        }
        v.require(differing == 0, "identical globals");
        v.detail << "scripts=500 differing=" << differing;
    }

}  // namespace

int main() {
    criterion("aggregation-golden-scenario", aggregation_scenario);
    criterion("three-cell-golden-scenario", three_cell_scenario);
    criterion("dead-stale-concatenation-identity", concatenation_identity);
    criterion("refresher-fast-equals-naive", refresher_equivalence);
    criterion("dataflow-path-oracle", dataflow_oracle);
    criterion("incremental-staleness-oracle", incremental_staleness);
    criterion("complexity-witness", complexity_witness);
    criterion("tracing-overhead", tracing_overhead);
    criterion("predictive-power-baselines", predictive_power);
    criterion("semantics-preservation", semantics_preservation);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
