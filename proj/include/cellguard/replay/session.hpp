#pragma once

#include "cellguard/highlights/report.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cellguard::replay {

    struct log_entry {
        std::int64_t counter{0};
        std::string source;

        bool operator==(const log_entry&) const = default;
    };

    struct session_log {
        std::string name;
        std::vector<log_entry> entries;
    };

    // JSON Lines, one {"counter", "source"} object per line. Throws
    // std::invalid_argument on malformed lines, empty sources or counters
    // that do not strictly increase.
    session_log read_log(std::istream& in, std::string name = {});
    session_log read_log_file(const std::string& path);
    void write_log(std::ostream& out, const session_log& log);

    std::size_t levenshtein(std::string_view a, std::string_view b);
    // Exact distance when it is at most `limit`, otherwise some value above it.
    std::size_t levenshtein_within(std::string_view a, std::string_view b, std::size_t limit);
    // 1 - distance / max(len_a, len_b); two empty strings are identical.
    double similarity(std::string_view a, std::string_view b);

    inline constexpr double identity_threshold = 0.8;

    // Maps submitted cell texts to stable cell ids.
    class identity_map {
      public:
        struct match {
            std::string id;
            bool existing{false};
        };

        // Best match at or above the threshold, ties going to the most
        // recently executed cell. Does not modify the map.
        std::optional<std::string> lookup(std::string_view source) const;

        // lookup(), or a fresh id appended at the end. Records the text as the
        // cell's latest version and marks it as the most recent execution.
        match infer(const std::string& source);

        std::size_t size() const { return cells_.size(); }
        const std::string& text(const std::string& id) const;

      private:
        struct known {
            std::string id;
            std::string text;
            std::uint64_t last_run{0};
        };

        std::vector<known> cells_;
        std::uint64_t clock_{0};
    };

    // |N| / |H| when executed is in H, else 0.
    double predictive_power(const highlights::cell_set& h, const std::string& executed, std::size_t notebook_size);

    enum class family : std::uint8_t { stale, fresh, new_fresh, refresher, new_refresher, next, random };
    inline constexpr std::size_t family_count = 7;
    inline constexpr std::array<family, family_count> all_families{family::stale,     family::fresh,
                                                                    family::new_fresh, family::refresher,
                                                                    family::new_refresher, family::next,
                                                                    family::random};
    const char* family_name(family f);

    struct metrics_record {
        std::string session;
        std::size_t executions{0};
        std::size_t errors{0};
        std::size_t reexecutions{0};
        std::size_t safety_error_count{0};
        std::array<std::vector<double>, family_count> samples;

        const std::vector<double>& of(family f) const { return samples[static_cast<std::size_t>(f)]; }
        std::vector<double>& of(family f) { return samples[static_cast<std::size_t>(f)]; }
        std::optional<double> average(family f) const;
        // More than half of the executions failed.
        bool excluded() const { return executions > 0 && 2 * errors > executions; }

        std::string to_json() const;
        bool operator==(const metrics_record&) const = default;
    };

    struct replay_options {
        highlights::refresher_mode refresher{highlights::refresher_mode::fast};
        // Without tracing only the baselines are sampled and no highlights
        // are computed.
        bool trace{true};
        std::uint64_t seed{0};
    };

    metrics_record replay_session(const session_log& log, const replay_options& options = {});

    struct corpus_metrics {
        std::size_t sessions{0};
        std::size_t included_sessions{0};
        std::size_t sessions_with_safety_errors{0};
        std::size_t safety_error_count{0};
        std::size_t executions{0};
        // Mean of per-session means over included sessions that have samples.
        std::array<std::optional<double>, family_count> averages;
        // Mean over all samples of included sessions.
        std::array<std::optional<double>, family_count> pooled;
        std::array<std::size_t, family_count> sample_counts{};
        std::array<std::size_t, family_count> sessions_with_samples{};

        std::optional<double> average(family f) const { return averages[static_cast<std::size_t>(f)]; }
        std::optional<double> pooled_mean(family f) const { return pooled[static_cast<std::size_t>(f)]; }
        std::size_t samples(family f) const { return sample_counts[static_cast<std::size_t>(f)]; }

        std::string to_json() const;
    };

    corpus_metrics aggregate(const std::vector<metrics_record>& records);

}  // namespace cellguard::replay
