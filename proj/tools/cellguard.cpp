#include "cellguard/highlights/report.hpp"
#include "cellguard/kernel/server.hpp"
#include "cellguard/lang/notebook_file.hpp"
#include "cellguard/replay/bench.hpp"
#include "cellguard/replay/corpus.hpp"
#include "cellguard/replay/session.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

using namespace cellguard;

namespace {

    highlights::refresher_mode parse_mode(const std::string& s) {
        return s == "naive" ? highlights::refresher_mode::naive : highlights::refresher_mode::fast;
    }

    int cmd_replay(const std::vector<std::string>& logs, const std::string& metrics_path, const std::string& refresher,
                   bool no_trace, std::uint64_t seed) {
        replay::replay_options opt{parse_mode(refresher), !no_trace, seed};
        std::vector<replay::metrics_record> records;
        for (const auto& path : logs) {
            records.push_back(replay::replay_session(replay::read_log_file(path), opt));
        }
        auto summary = replay::aggregate(records);
        std::cout << summary.to_json() << '\n';
        if (!metrics_path.empty()) {
            nlohmann::json out{{"summary", nlohmann::json::parse(summary.to_json())},
                               {"sessions", nlohmann::json::array()}};
            for (const auto& r : records) {
                out["sessions"].push_back(nlohmann::json::parse(r.to_json()));
            }
            std::ofstream f(metrics_path);
            if (!f) {
                std::cerr << "cannot write " << metrics_path << '\n';
                return 1;
            }
            f << out.dump(2) << '\n';
        }
        return 0;
    }

    int cmd_gen_corpus(std::uint64_t seed, int sessions, const replay::corpus_params& params, const std::string& dir) {
        std::filesystem::create_directories(dir);
        auto corpus = replay::generate_corpus(seed, sessions, params);
        for (const auto& log : corpus) {
            auto path = std::filesystem::path(dir) / (log.name + ".jsonl");
            std::ofstream f(path);
            if (!f) {
                std::cerr << "cannot write " << path << '\n';
                return 1;
            }
            replay::write_log(f, log);
        }
        std::cout << "wrote " << corpus.size() << " sessions to " << dir << '\n';
        return 0;
    }

    int cmd_bench(int max_cells, int repeats, std::uint64_t seed) {
        std::vector<replay::bench_row> rows;
        for (int n : replay::bench_sizes(max_cells)) {
            rows.push_back(replay::bench_point(n, seed, repeats));
        }
        replay::write_bench_csv(std::cout, rows);
        return 0;
    }

    int cmd_run(const std::string& path, const std::vector<std::string>& order, const std::string& refresher) {
        interp::notebook_state state;
        auto cells = lang::load_notebook(path);
        std::vector<std::string> schedule;
        for (const auto& c : cells) {
            state.upsert_cell(c.id, c.source);
            schedule.push_back(c.id);
        }
        if (!order.empty()) {
            schedule = order;
        }
        highlights::report previous;
        for (const auto& id : schedule) {
            if (!state.has_cell(id)) {
                std::cerr << "unknown cell " << id << '\n';
                return 1;
            }
            std::cout << state.execute_cell(id).to_json() << '\n';
            auto report = highlights::compute_report(state, parse_mode(refresher), &previous);
            std::cout << report.to_json() << '\n';
            previous = std::move(report);
        }
        return 0;
    }

    int cmd_serve(const std::string& host, unsigned short port, const std::string& refresher) {
        kernel::session_service service(parse_mode(refresher));
        kernel::http_server server(service, host, port);
        server.start();
        std::cout << "listening on " << host << ':' << server.port() << std::endl;
        // Signal delivery only flags the stop; the waiting thread does the teardown.
        static std::atomic<bool> interrupted{false};
        std::signal(SIGINT, [](int) { interrupted = true; });
        std::signal(SIGTERM, [](int) { interrupted = true; });
        while (!interrupted) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        server.stop();
        return 0;
    }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Any-order notebook safety engine"};
    app.require_subcommand(1);

    std::string refresher = "fast";
    auto add_refresher = [&](CLI::App* cmd) {
        cmd->add_option("--refresher", refresher, "Refresher computation")->check(CLI::IsMember({"naive", "fast"}));
    };

    auto* replay_cmd = app.add_subcommand("replay", "Replay execution logs and compute highlight metrics");
    std::vector<std::string> logs;
    std::string metrics_path;
    bool no_trace = false;
    std::uint64_t seed = 0;
    replay_cmd->add_option("logs", logs, "JSON Lines execution logs")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--metrics", metrics_path, "Write per-session and aggregate metrics here");
    replay_cmd->add_flag("--no-trace", no_trace, "Disable lineage tracking and highlights");
    replay_cmd->add_option("--seed", seed, "Seed for the random baseline");
    add_refresher(replay_cmd);

    auto* gen_cmd = app.add_subcommand("gen-corpus", "Generate synthetic execution logs");
    replay::corpus_params params;
    int sessions = 10;
    std::string out_dir;
    std::uint64_t gen_seed = 0;
    gen_cmd->add_option("--seed", gen_seed, "Generator seed");
    gen_cmd->add_option("--sessions", sessions, "Number of sessions")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--cells", params.cells, "Distinct cells per session")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--edit-rate", params.edit_rate, "Chance a step revisits an existing cell")
            ->check(CLI::Range(0.0, 0.95));
    gen_cmd->add_option("--dependency-density", params.dependency_density, "Chance an operand reads an earlier cell")
            ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--refresher-rerun", params.refresher_rerun, "Chance a revisit is followed by a dependent")
            ->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--loop-iterations", params.loop_iterations, "Trip count of loop cells")
            ->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("-o,--out", out_dir, "Output directory")->required();

    auto* bench_cmd = app.add_subcommand("bench", "Analysis latency against notebook size, as CSV");
    int max_cells = 200;
    int repeats = 3;
    std::uint64_t bench_seed = 1;
    bench_cmd->add_option("--max-cells", max_cells, "Largest notebook")->check(CLI::Range(2, 2000));
    bench_cmd->add_option("--repeats", repeats, "Timing repetitions per point")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench_seed, "Notebook seed");

    auto* run_cmd = app.add_subcommand("run", "Execute a notebook file and print results and reports");
    std::string notebook_path;
    std::vector<std::string> order;
    run_cmd->add_option("notebook", notebook_path, "Notebook file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--order", order, "Cell ids to execute, in order")->delimiter(',');
    add_refresher(run_cmd);

    auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP/WebSocket kernel");
    std::string host = "127.0.0.1";
    unsigned short port = 8787;
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port (0 picks a free one)");
    add_refresher(serve_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*replay_cmd) {
            return cmd_replay(logs, metrics_path, refresher, no_trace, seed);
        }
        if (*gen_cmd) {
            return cmd_gen_corpus(gen_seed, sessions, params, out_dir);
        }
        if (*bench_cmd) {
            return cmd_bench(max_cells, repeats, bench_seed);
        }
        if (*run_cmd) {
            return cmd_run(notebook_path, order, refresher);
        }
        if (*serve_cmd) {
            return cmd_serve(host, port, refresher);
        }
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
