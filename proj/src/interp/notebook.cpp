#include "cellguard/interp/notebook.hpp"

#include <algorithm>
#include <functional>
#include <nlohmann/json.hpp>

namespace cellguard::interp {

    std::string exec_result::to_json() const {
        nlohmann::json events = nlohmann::json::array();
        for (const auto& e : lineage_events) {
            events.push_back({{"kind", lineage::to_string(e.what)},
                              {"symbol", e.symbol},
                              {"counter", e.counter},
                              {"parents", e.parents}});
        }
        nlohmann::json j{{"counter", counter},
                         {"status", ok ? "ok" : "error"},
                         {"stdout", output},
                         {"lineage_events", std::move(events)}};
        if (!ok) {
            j["error"] = {{"message", error}, {"statement_index", error_statement}};
        }
        return j.dump();
    }

    notebook_state::notebook_state() = default;

    std::uint32_t notebook_state::unit_for(const std::string& id, const std::string& source) {
        auto key = std::make_pair(id, std::hash<std::string>{}(source));
        auto [it, inserted] = units_.try_emplace(key, static_cast<std::uint32_t>(units_.size() + 1));
        return it->second;
    }

    void notebook_state::upsert_cell(const std::string& id,
                                     const std::string& source,
                                     std::optional<std::size_t> position) {
        auto& entry = cells_[id];
        if (std::find(order_.begin(), order_.end(), id) == order_.end()) {
            auto at = position ? std::min(*position, order_.size()) : order_.size();
            order_.insert(order_.begin() + static_cast<std::ptrdiff_t>(at), id);
        }
        if (entry.unit != 0 && entry.source == source) {
            return;
        }
        entry.source = source;
        entry.unit = unit_for(id, source);
        try {
            entry.program = std::make_shared<const lang::program>(lang::parse_cell(source));
            entry.graph = std::make_shared<const lang::cfg>(lang::build_cfg(*entry.program));
            entry.error.reset();
        }
        catch (const lang::syntax_error& e) {
            entry.program.reset();
            entry.graph.reset();
            entry.error = e;
        }
    }

    void notebook_state::remove_cell(const std::string& id) {
        if (cells_.erase(id) == 0) {
            throw std::out_of_range("unknown cell '" + id + "'");
        }
        order_.erase(std::remove(order_.begin(), order_.end(), id), order_.end());
        cell_ts_.erase(id);
    }

    const std::string& notebook_state::source(const std::string& id) const {
        auto it = cells_.find(id);
        if (it == cells_.end()) {
            throw std::out_of_range("unknown cell '" + id + "'");
        }
        return it->second.source;
    }

    std::shared_ptr<const lang::program> notebook_state::program_of(const std::string& id) const {
        auto it = cells_.find(id);
        if (it == cells_.end()) {
            throw std::out_of_range("unknown cell '" + id + "'");
        }
        return it->second.program;
    }

    std::shared_ptr<const lang::cfg> notebook_state::cfg_of(const std::string& id) const {
        auto it = cells_.find(id);
        if (it == cells_.end()) {
            throw std::out_of_range("unknown cell '" + id + "'");
        }
        return it->second.graph;
    }

    const std::optional<lang::syntax_error>& notebook_state::parse_error(const std::string& id) const {
        auto it = cells_.find(id);
        if (it == cells_.end()) {
            throw std::out_of_range("unknown cell '" + id + "'");
        }
        return it->second.error;
    }

    std::int64_t notebook_state::cell_timestamp(const std::string& id) const {
        auto it = cell_ts_.find(id);
        return it == cell_ts_.end() ? 0 : it->second;
    }

    std::string notebook_state::dump_globals() const {
        std::vector<std::string> names;
        names.reserve(globals_.size());
        for (const auto& [name, v] : globals_) {
            names.push_back(name);
        }
        std::sort(names.begin(), names.end());
        std::string out;
        for (const auto& name : names) {
            out += name + " = " + repr(globals_.at(name)) + "\n";
        }
        return out;
    }

    std::optional<value> notebook_state::peek_chain(const lang::expr& e) const {
        if (auto n = e.as<lang::name_expr>()) {
            if (auto it = globals_.find(n->id); it != globals_.end()) {
                return it->second;
            }
            if (auto b = find_builtin(n->id)) {
                return value{*b};
            }
            return std::nullopt;
        }
        if (auto a = e.as<lang::attribute_expr>()) {
            auto base = peek_chain(*a->object);
            if (!base) {
                return std::nullopt;
            }
            if (auto d = std::get_if<std::shared_ptr<dict_object>>(&*base)) {
                if (auto v = (*d)->find(a->name)) {
                    return *v;
                }
            }
            return std::nullopt;
        }
        if (auto s = e.as<lang::subscript_expr>()) {
            auto base = peek_chain(*s->object);
            if (!base) {
                return std::nullopt;
            }
            std::optional<value> index;
            if (auto lit = s->index->as<lang::literal_expr>()) {
                if (auto i = std::get_if<std::int64_t>(&lit->value)) {
                    index = *i;
                }
                else if (auto str = std::get_if<std::string>(&lit->value)) {
                    index = *str;
                }
            }
            else if (s->index->as<lang::name_expr>()) {
                index = peek_chain(*s->index);
            }
            if (!index) {
                return std::nullopt;
            }
            if (auto l = std::get_if<std::shared_ptr<list_object>>(&*base)) {
                auto i = std::get_if<std::int64_t>(&*index);
                if (!i) {
                    return std::nullopt;
                }
                auto n = static_cast<std::int64_t>((*l)->items.size());
                auto k = *i < 0 ? *i + n : *i;
                if (k < 0 || k >= n) {
                    return std::nullopt;
                }
                return (*l)->items[static_cast<std::size_t>(k)];
            }
            if (auto d = std::get_if<std::shared_ptr<dict_object>>(&*base)) {
                auto key = std::get_if<std::string>(&*index);
                if (key) {
                    if (auto v = (*d)->find(*key)) {
                        return *v;
                    }
                }
            }
            return std::nullopt;
        }
        return std::nullopt;
    }

}  // namespace cellguard::interp
