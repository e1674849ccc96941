#include "cellguard/kernel/service.hpp"

#include <nlohmann/json.hpp>

namespace cellguard::kernel {

    std::string kernel_error::to_json() const { return nlohmann::json{{"error", code_}, {"detail", what()}}.dump(); }

    kernel_error not_found(const std::string& detail) { return {"not_found", 404, detail}; }

    kernel_error bad_request(const std::string& detail) { return {"bad_request", 400, detail}; }

    std::string stale_warning::to_json() const {
        std::string detail = "cell " + cell + " reads stale symbols:";
        for (const auto& s : symbols) {
            detail += " " + s;
        }
        return nlohmann::json{{"error", "stale_warning"}, {"detail", detail}, {"cell", cell}, {"stale_symbols", symbols}}
                .dump();
    }

    std::string run_outcome::to_json() const {
        return nlohmann::json{{"exec_result", nlohmann::json::parse(result.to_json())},
                              {"report", nlohmann::json::parse(report.to_json())}}
                .dump();
    }

    session_service::session_service(highlights::refresher_mode mode) : mode_(mode) {}

    std::shared_ptr<session_service::session> session_service::find(const std::string& id) const {
        std::shared_lock lock(mu_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) {
            throw not_found("unknown session '" + id + "'");
        }
        return it->second;
    }

    std::string session_service::create_session() {
        std::unique_lock lock(mu_);
        std::string id = "s" + std::to_string(next_session_++);
        sessions_.emplace(id, std::make_shared<session>());
        return id;
    }

    bool session_service::has_session(const std::string& id) const {
        std::shared_lock lock(mu_);
        return sessions_.contains(id);
    }

    std::string session_service::upsert_cell(const std::string& id,
                                             const std::optional<std::string>& cell,
                                             const std::string& source,
                                             std::optional<std::size_t> position) {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        std::string cell_id = cell.value_or("");
        while (cell_id.empty() || (!cell && s->state.has_cell(cell_id))) {
            cell_id = "cell-" + std::to_string(s->next_cell++);
        }
        s->state.upsert_cell(cell_id, source, position);
        return cell_id;
    }

    run_outcome session_service::run_cell(const std::string& id, const std::string& cell, bool confirm_stale) {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        if (!s->state.has_cell(cell)) {
            throw not_found("unknown cell '" + cell + "'");
        }
        run_outcome out;
        std::vector<std::string> stale_symbols;
        bool stale = s->latest.stale.contains(cell);
        if (stale) {
            stale_symbols = s->latest.stale_symbols.at(cell);
            if (!confirm_stale) {
                out.warning = stale_warning{cell, stale_symbols};
                out.report = s->latest;
                return out;
            }
        }
        out.result = s->state.execute_cell(cell);
        if (stale) {
            s->audit.push_back({cell, out.result.counter, stale_symbols});
        }
        auto previous = std::move(s->latest);
        s->latest = highlights::compute_report(s->state, mode_, &previous, &s->cache);
        out.report = s->latest;
        if (!s->subscribers.empty()) {
            auto payload = out.to_json();
            for (const auto& [token, fn] : s->subscribers) {
                fn(payload);
            }
        }
        return out;
    }

    highlights::report session_service::get_highlights(const std::string& id) const {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        return s->latest;
    }

    std::vector<safety_event> session_service::audit_log(const std::string& id) const {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        return s->audit;
    }

    std::vector<std::string> session_service::cell_ids(const std::string& id) const {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        return s->state.cell_ids();
    }

    std::string session_service::lineage_json(const std::string& id) const {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        return s->state.lineage().dump_json();
    }

    std::string session_service::state_dump(const std::string& id) const {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        return "counter " + std::to_string(s->state.counter()) + "\n" + s->state.dump_globals() +
               s->state.lineage().dump_json();
    }

    std::uint64_t session_service::subscribe(const std::string& id, subscriber fn) {
        auto s = find(id);
        std::uint64_t token;
        {
            std::unique_lock lock(mu_);
            token = next_token_++;
        }
        std::lock_guard lock(s->mu);
        s->subscribers.emplace(token, std::move(fn));
        return token;
    }

    void session_service::unsubscribe(const std::string& id, std::uint64_t token) {
        auto s = find(id);
        std::lock_guard lock(s->mu);
        s->subscribers.erase(token);
    }

}  // namespace cellguard::kernel
