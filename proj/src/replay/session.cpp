#include "cellguard/replay/session.hpp"

#include "cellguard/interp/notebook.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cellguard::replay {

    session_log read_log(std::istream& in, std::string name) {
        session_log log{std::move(name), {}};
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                continue;
            }
            auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
            log_entry e;
            try {
                auto j = nlohmann::json::parse(line);
                e.counter = j.at("counter").get<std::int64_t>();
                e.source = j.at("source").get<std::string>();
            }
            catch (const nlohmann::json::exception& ex) {
                throw std::invalid_argument(where() + ex.what());
            }
            if (e.source.empty()) {
                throw std::invalid_argument(where() + "empty source");
            }
            if (!log.entries.empty() && e.counter <= log.entries.back().counter) {
                throw std::invalid_argument(where() + "counter does not increase");
            }
            log.entries.push_back(std::move(e));
        }
        return log;
    }

    session_log read_log_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw std::invalid_argument("cannot open " + path);
        }
        return read_log(in, path);
    }

    void write_log(std::ostream& out, const session_log& log) {
        for (const auto& e : log.entries) {
            out << nlohmann::json{{"counter", e.counter}, {"source", e.source}}.dump() << '\n';
        }
    }

    std::size_t levenshtein(std::string_view a, std::string_view b) {
        if (a.size() < b.size()) {
            std::swap(a, b);
        }
        std::vector<std::size_t> row(b.size() + 1);
        std::iota(row.begin(), row.end(), std::size_t{0});
        for (std::size_t i = 1; i <= a.size(); ++i) {
            std::size_t diag = row[0];
            row[0] = i;
            for (std::size_t j = 1; j <= b.size(); ++j) {
                std::size_t up = row[j];
                row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
                diag = up;
            }
        }
        return row[b.size()];
    }

    std::size_t levenshtein_within(std::string_view a, std::string_view b, std::size_t limit) {
        if (a.size() < b.size()) {
            std::swap(a, b);
        }
        if (a.size() - b.size() > limit) {
            return limit + 1;
        }
        // Only cells within `limit` of the diagonal can stay within the limit.
        const std::size_t over = limit + 1;
        std::vector<std::size_t> row(b.size() + 1, over);
        for (std::size_t j = 0; j <= std::min(b.size(), limit); ++j) {
            row[j] = j;
        }
        for (std::size_t i = 1; i <= a.size(); ++i) {
            std::size_t lo = i > limit ? i - limit : 1;
            std::size_t hi = std::min(b.size(), i + limit);
            std::size_t diag = row[lo - 1];
            row[lo - 1] = lo == 1 && i <= limit ? i : over;
            std::size_t best = row[lo - 1];
            for (std::size_t j = lo; j <= hi; ++j) {
                std::size_t up = row[j];
                std::size_t v = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
                row[j] = std::min(v, over);
                best = std::min(best, row[j]);
                diag = up;
            }
            if (hi < b.size()) {
                row[hi + 1] = over;
            }
            if (best > limit) {
                return over;
            }
        }
        return row[b.size()];
    }

    double similarity(std::string_view a, std::string_view b) {
        std::size_t longest = std::max(a.size(), b.size());
        if (longest == 0) {
            return 1.0;
        }
        return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
    }

    std::optional<std::string> identity_map::lookup(std::string_view source) const {
        const known* best = nullptr;
        double best_score = identity_threshold;
        for (const auto& k : cells_) {
            std::size_t longest = std::max(k.text.size(), source.size());
            std::size_t shortest = std::min(k.text.size(), source.size());
            // The length difference alone bounds the similarity from above.
            if (longest > 0 && static_cast<double>(shortest) / static_cast<double>(longest) < best_score) {
                continue;
            }
            // similarity >= best_score exactly when the distance fits this budget.
            auto budget = static_cast<std::size_t>((1.0 - best_score) * static_cast<double>(longest) + 1e-9);
            std::size_t d = levenshtein_within(k.text, source, budget);
            if (d > budget) {
                continue;
            }
            double s = 1.0 - static_cast<double>(d) / static_cast<double>(longest);
            if (s < best_score) {
                continue;
            }
            if (!best || s > best_score || k.last_run > best->last_run) {
                best = &k;
                best_score = s;
            }
        }
        if (!best) {
            return std::nullopt;
        }
        return best->id;
    }

    identity_map::match identity_map::infer(const std::string& source) {
        ++clock_;
        if (auto id = lookup(source)) {
            auto it = std::find_if(cells_.begin(), cells_.end(), [&](const known& k) { return k.id == *id; });
            it->text = source;
            it->last_run = clock_;
            return {*id, true};
        }
        std::string id = "c" + std::to_string(cells_.size() + 1);
        cells_.push_back({id, source, clock_});
        return {id, false};
    }

    const std::string& identity_map::text(const std::string& id) const {
        auto it = std::find_if(cells_.begin(), cells_.end(), [&](const known& k) { return k.id == id; });
        if (it == cells_.end()) {
            throw std::out_of_range("unknown cell " + id);
        }
        return it->text;
    }

    double predictive_power(const highlights::cell_set& h, const std::string& executed, std::size_t notebook_size) {
        if (h.empty() || !h.contains(executed)) {
            return 0.0;
        }
        return static_cast<double>(notebook_size) / static_cast<double>(h.size());
    }

    const char* family_name(family f) {
        switch (f) {
            case family::stale:
                return "stale";
            case family::fresh:
                return "fresh";
            case family::new_fresh:
                return "new_fresh";
            case family::refresher:
                return "refresher";
            case family::new_refresher:
                return "new_refresher";
            case family::next:
                return "next";
            case family::random:
                return "random";
        }
        return "?";
    }

    namespace {

        std::optional<double> mean(const std::vector<double>& xs) {
            if (xs.empty()) {
                return std::nullopt;
            }
            return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
        }

        nlohmann::json optional_number(std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

        // The cell after the most recently executed one, in notebook order.
        highlights::cell_set next_cell(const std::vector<std::string>& order, const std::string& last) {
            auto it = std::find(order.begin(), order.end(), last);
            if (it == order.end() || std::next(it) == order.end()) {
                return {};
            }
            return {*std::next(it)};
        }

    }  // namespace

    std::optional<double> metrics_record::average(family f) const { return mean(of(f)); }

    std::string metrics_record::to_json() const {
        nlohmann::json samples_json = nlohmann::json::object();
        nlohmann::json averages = nlohmann::json::object();
        for (auto f : all_families) {
            samples_json[family_name(f)] = of(f);
            averages[family_name(f)] = optional_number(average(f));
        }
        nlohmann::json j{{"session", session},
                         {"executions", executions},
                         {"errors", errors},
                         {"reexecutions", reexecutions},
                         {"excluded", excluded()},
                         {"safety_error_count", safety_error_count},
                         {"samples", samples_json},
                         {"averages", averages}};
        return j.dump();
    }

    metrics_record replay_session(const session_log& log, const replay_options& options) {
        metrics_record m;
        m.session = log.name;
        interp::notebook_state state;
        state.set_tracing(options.trace);
        state.set_record_events(false);
        identity_map ids;
        std::mt19937_64 rng(options.seed);
        highlights::report current;
        checker::analysis_cache cache;
        std::string last_executed;

        for (const auto& entry : log.entries) {
            auto [id, existing] = ids.infer(entry.source);
            state.upsert_cell(id, entry.source);
            bool parses = !state.parse_error(id).has_value();
            const auto& order = state.cell_ids();

            if (existing && parses) {
                ++m.reexecutions;
                auto sample = [&](family f, const highlights::cell_set& h) {
                    if (!h.empty()) {
                        m.of(f).push_back(predictive_power(h, id, order.size()));
                    }
                };
                if (options.trace) {
                    sample(family::stale, current.stale);
                    sample(family::fresh, current.fresh);
                    sample(family::new_fresh, current.new_fresh);
                    sample(family::refresher, current.refresher);
                    sample(family::new_refresher, current.new_refresher);
                }
                sample(family::next, next_cell(order, last_executed));
                std::uniform_int_distribution<std::size_t> pick(0, order.size() - 1);
                sample(family::random, {order[pick(rng)]});
            }
            if (options.trace && parses && current.stale.contains(id)) {
                ++m.safety_error_count;
            }

            auto result = state.execute_cell(id);
            ++m.executions;
            if (!result.ok) {
                ++m.errors;
            }
            last_executed = id;
            if (options.trace) {
                auto previous = std::move(current);
                current = highlights::compute_report(state, options.refresher, &previous, &cache);
            }
        }
        return m;
    }

    corpus_metrics aggregate(const std::vector<metrics_record>& records) {
        corpus_metrics c;
        c.sessions = records.size();
        std::array<std::vector<double>, family_count> session_means;
        std::array<double, family_count> sums{};
        for (const auto& r : records) {
            c.executions += r.executions;
            if (r.excluded()) {
                continue;
            }
            ++c.included_sessions;
            c.safety_error_count += r.safety_error_count;
            if (r.safety_error_count > 0) {
                ++c.sessions_with_safety_errors;
            }
            for (std::size_t i = 0; i < family_count; ++i) {
                const auto& xs = r.samples[i];
                if (xs.empty()) {
                    continue;
                }
                session_means[i].push_back(*mean(xs));
                ++c.sessions_with_samples[i];
                c.sample_counts[i] += xs.size();
                sums[i] += std::accumulate(xs.begin(), xs.end(), 0.0);
            }
        }
        for (std::size_t i = 0; i < family_count; ++i) {
            c.averages[i] = mean(session_means[i]);
            if (c.sample_counts[i] > 0) {
                c.pooled[i] = sums[i] / static_cast<double>(c.sample_counts[i]);
            }
        }
        return c;
    }

    std::string corpus_metrics::to_json() const {
        nlohmann::json averages_json = nlohmann::json::object();
        nlohmann::json pooled_json = nlohmann::json::object();
        nlohmann::json counts = nlohmann::json::object();
        nlohmann::json with_samples = nlohmann::json::object();
        for (std::size_t i = 0; i < family_count; ++i) {
            const char* name = family_name(all_families[i]);
            averages_json[name] = optional_number(averages[i]);
            pooled_json[name] = optional_number(pooled[i]);
            counts[name] = sample_counts[i];
            with_samples[name] = sessions_with_samples[i];
        }
        nlohmann::json j{{"sessions", sessions},
                         {"included_sessions", included_sessions},
                         {"sessions_with_safety_errors", sessions_with_safety_errors},
                         {"safety_error_count", safety_error_count},
                         {"executions", executions},
                         {"averages", averages_json},
                         {"pooled_means", pooled_json},
                         {"sample_counts", counts},
                         {"sessions_with_samples", with_samples}};
        return j.dump(2);
    }

}  // namespace cellguard::replay
