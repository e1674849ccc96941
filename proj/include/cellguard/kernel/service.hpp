#pragma once

#include "cellguard/highlights/report.hpp"
#include "cellguard/interp/notebook.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellguard::kernel {

    // Failure reported to clients as {"error": code, "detail": message}.
    class kernel_error : public std::runtime_error {
      public:
        kernel_error(std::string code, int status, const std::string& detail)
            : std::runtime_error(detail), code_(std::move(code)), status_(status) {}

        const std::string& code() const { return code_; }
        int status() const { return status_; }
        std::string to_json() const;

      private:
        std::string code_;
        int status_;
    };

    kernel_error not_found(const std::string& detail);
    kernel_error bad_request(const std::string& detail);

    // A run refused because the cell reads stale symbols.
    struct stale_warning {
        std::string cell;
        std::vector<std::string> symbols;

        std::string to_json() const;
    };

    struct run_outcome {
        std::optional<stale_warning> warning;
        interp::exec_result result;
        highlights::report report;

        bool rejected() const { return warning.has_value(); }
        // {"exec_result": ..., "report": ...}; the push payload as well.
        std::string to_json() const;
    };

    // A stale cell executed after explicit confirmation.
    struct safety_event {
        std::string cell;
        std::int64_t counter{0};
        std::vector<std::string> symbols;
    };

    class session_service {
      public:
        using subscriber = std::function<void(const std::string&)>;

        explicit session_service(highlights::refresher_mode mode = highlights::refresher_mode::fast);

        std::string create_session();
        bool has_session(const std::string& session) const;

        // Creates the cell (minting an id when none is given) or replaces its
        // text. The position only applies to new cells.
        std::string upsert_cell(const std::string& session,
                                const std::optional<std::string>& cell,
                                const std::string& source,
                                std::optional<std::size_t> position = {});

        run_outcome run_cell(const std::string& session, const std::string& cell, bool confirm_stale);
        highlights::report get_highlights(const std::string& session) const;

        std::vector<safety_event> audit_log(const std::string& session) const;
        std::vector<std::string> cell_ids(const std::string& session) const;
        std::string lineage_json(const std::string& session) const;
        // Counter, globals and lineage; equal dumps mean equal notebook state.
        std::string state_dump(const std::string& session) const;

        // Subscribers receive run_outcome::to_json() after every execution,
        // in execution order.
        std::uint64_t subscribe(const std::string& session, subscriber fn);
        void unsubscribe(const std::string& session, std::uint64_t token);

      private:
        struct session {
            mutable std::mutex mu;
            interp::notebook_state state;
            highlights::report latest;
            checker::analysis_cache cache;
            std::vector<safety_event> audit;
            std::map<std::uint64_t, subscriber> subscribers;
            std::uint64_t next_cell{1};
        };

        std::shared_ptr<session> find(const std::string& id) const;

        highlights::refresher_mode mode_;
        mutable std::shared_mutex mu_;
        std::map<std::string, std::shared_ptr<session>> sessions_;
        std::uint64_t next_session_{1};
        std::uint64_t next_token_{1};
    };

}  // namespace cellguard::kernel
