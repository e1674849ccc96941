#include "cellguard/lineage/graph.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>

namespace cellguard::lineage {

    unknown_object::unknown_object(object_id id)
        : std::runtime_error("internal error: object " + std::to_string(id) + " is not registered") {}

    unknown_symbol::unknown_symbol(const std::string& name) : std::runtime_error("name '" + name + "' is not defined") {}

    std::string_view to_string(update_event::kind k) {
        switch (k) {
            case update_event::kind::assign:
                return "assign";
            case update_event::kind::augment:
                return "augment";
            case update_event::kind::mutate:
                return "mutate";
            case update_event::kind::remove:
                return "remove";
        }
        return "?";
    }

    symbol& graph::get(symbol_id id) {
        auto it = symbols_.find(id);
        if (it == symbols_.end()) {
            throw std::out_of_range("unknown symbol id " + std::to_string(id));
        }
        return it->second;
    }

    const symbol& graph::at(symbol_id id) const {
        auto it = symbols_.find(id);
        if (it == symbols_.end()) {
            throw std::out_of_range("unknown symbol id " + std::to_string(id));
        }
        return it->second;
    }

    std::vector<symbol_id> graph::ids() const {
        std::vector<symbol_id> out;
        out.reserve(symbols_.size());
        for (const auto& [id, s] : symbols_) {
            out.push_back(id);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    symbol_id graph::create(qualified_name name) {
        symbol_id id = next_id_++;
        symbol s;
        s.id = id;
        s.name = std::move(name);
        symbols_.emplace(id, std::move(s));
        return id;
    }

    symbol_id graph::global(const std::string& name) {
        if (auto it = globals_.find(name); it != globals_.end()) {
            return it->second;
        }
        symbol_id id = create(qualified_name{name});
        globals_.emplace(name, id);
        return id;
    }

    std::optional<symbol_id> graph::find_global(const std::string& name) const {
        if (auto it = globals_.find(name); it != globals_.end()) {
            return it->second;
        }
        return std::nullopt;
    }

    symbol_id graph::member(object_id container, const lang::accessor& key, const qualified_name& display) {
        auto& slot = members_[container];
        auto k = key.to_string();
        if (auto it = slot.find(k); it != slot.end()) {
            return it->second;
        }
        symbol_id id = create(display);
        auto& s = get(id);
        s.container = container;
        s.member_key = k;
        slot.emplace(std::move(k), id);
        return id;
    }

    std::optional<symbol_id> graph::find_member(object_id container, const lang::accessor& key) const {
        auto it = members_.find(container);
        if (it == members_.end()) {
            return std::nullopt;
        }
        auto m = it->second.find(key.to_string());
        if (m == it->second.end()) {
            return std::nullopt;
        }
        return m->second;
    }

    symbol_id graph::materialize_member(object_id container,
                                        const lang::accessor& key,
                                        const qualified_name& display,
                                        symbol_id like) {
        if (auto existing = find_member(container, key)) {
            return *existing;
        }
        symbol_id id = member(container, key, display);
        symbol_set parents = at(like).parents;
        auto& s = get(id);
        set_parents(s, parents);
        s.ts = at(like).ts;
        refresh(id);
        return id;
    }

    std::vector<std::pair<std::string, symbol_id>> graph::members_of(object_id container) const {
        std::vector<std::pair<std::string, symbol_id>> out;
        if (auto it = members_.find(container); it != members_.end()) {
            out.assign(it->second.begin(), it->second.end());
        }
        return out;
    }

    std::optional<symbol_id> graph::resolve(const qualified_name& name) const {
        auto cur = find_global(name.base());
        for (const auto& step : name.path()) {
            if (!cur) {
                return std::nullopt;
            }
            const auto& s = at(*cur);
            if (!s.object) {
                return std::nullopt;
            }
            cur = find_member(*s.object, step);
        }
        return cur;
    }

    std::optional<symbol_id> graph::resolve_prefix(const qualified_name& name) const {
        auto cur = find_global(name.base());
        if (!cur) {
            return std::nullopt;
        }
        for (const auto& step : name.path()) {
            const auto& s = at(*cur);
            if (!s.object) {
                break;
            }
            auto next = find_member(*s.object, step);
            if (!next) {
                break;
            }
            cur = next;
        }
        return cur;
    }

    void graph::set_parents(symbol& s, const symbol_set& parents) {
        for (symbol_id p : s.parents) {
            get(p).children.erase(s.id);
        }
        s.parents.clear();
        for (symbol_id p : parents) {
            if (p == s.id || !contains(p)) {
                continue;
            }
            s.parents.insert(p);
            get(p).children.insert(s.id);
        }
    }

    void graph::emit(update_event::kind k, const symbol& s) {
        if (!events_) {
            return;
        }
        update_event e;
        e.what = k;
        e.symbol = s.name.str();
        e.counter = s.ts;
        for (symbol_id p : s.parents) {
            e.parents.push_back(at(p).name.str());
        }
        std::sort(e.parents.begin(), e.parents.end());
        events_->push_back(std::move(e));
    }

    void graph::assign(symbol_id target, const symbol_set& new_parents, std::int64_t counter) {
        auto& s = get(target);
        symbol_set parents = new_parents;
        if (parents.erase(target) > 0) {
            // Reading the old value keeps what the old value depended on.
            parents.insert(s.parents.begin(), s.parents.end());
        }
        set_parents(s, parents);
        s.ts = std::max(s.ts, counter);
        emit(update_event::kind::assign, s);
        refresh(target);
    }

    void graph::augment(symbol_id target, const symbol_set& extra, std::int64_t counter) {
        auto& s = get(target);
        symbol_set parents = s.parents;
        parents.insert(extra.begin(), extra.end());
        set_parents(s, parents);
        s.ts = std::max(s.ts, counter);
        emit(update_event::kind::augment, s);
        refresh(target);
    }

    symbol_set graph::record_mutation(object_id object, const symbol_set& extra_parents, std::int64_t counter) {
        if (!registry_.contains(object)) {
            throw unknown_object(object);
        }
        symbol_set bumped;
        std::set<object_id> visited{object};
        std::deque<object_id> queue{object};
        bool direct = true;
        while (!queue.empty()) {
            object_id obj = queue.front();
            queue.pop_front();
            auto it = registry_.find(obj);
            if (it == registry_.end()) {
                continue;
            }
            symbol_set aliases = it->second;
            for (symbol_id id : aliases) {
                auto& s = get(id);
                if (direct && !extra_parents.empty()) {
                    symbol_set parents = s.parents;
                    parents.insert(extra_parents.begin(), extra_parents.end());
                    set_parents(s, parents);
                }
                s.ts = std::max(s.ts, counter);
                bumped.insert(id);
                if (s.container && visited.insert(*s.container).second) {
                    queue.push_back(*s.container);
                }
            }
            direct = false;
        }
        for (symbol_id id : bumped) {
            emit(update_event::kind::mutate, at(id));
        }
        refresh(bumped);
        return bumped;
    }

    void graph::delete_symbol(const qualified_name& name) {
        auto id = resolve(name);
        if (!id) {
            throw unknown_symbol(name.str());
        }
        delete_symbol(*id);
    }

    void graph::delete_symbol(symbol_id id) {
        if (!contains(id)) {
            throw unknown_symbol("#" + std::to_string(id));
        }
        symbol_set touched;
        if (events_) {
            update_event e;
            e.what = update_event::kind::remove;
            e.symbol = at(id).name.str();
            events_->push_back(std::move(e));
        }
        remove(id, touched);
        refresh(touched);
    }

    void graph::remove(symbol_id id, symbol_set& touched) {
        auto it = symbols_.find(id);
        if (it == symbols_.end()) {
            return;
        }
        auto& s = it->second;
        for (symbol_id c : s.children) {
            get(c).parents.erase(id);
            touched.insert(c);
        }
        for (symbol_id p : s.parents) {
            get(p).children.erase(id);
        }
        auto object = s.object;
        auto container = s.container;
        auto key = s.member_key;
        bool is_global = !container;
        auto base = s.name.base();
        symbols_.erase(it);
        touched.erase(id);
        if (is_global) {
            globals_.erase(base);
        }
        else if (auto m = members_.find(*container); m != members_.end()) {
            m->second.erase(key);
            if (m->second.empty()) {
                members_.erase(m);
            }
        }
        if (object) {
            auto r = registry_.find(*object);
            if (r != registry_.end()) {
                r->second.erase(id);
                if (r->second.empty()) {
                    registry_.erase(r);
                    collect_members(*object, touched);
                }
            }
        }
    }

    void graph::collect_members(object_id object, symbol_set& touched) {
        auto it = members_.find(object);
        if (it == members_.end()) {
            return;
        }
        std::vector<symbol_id> doomed;
        for (const auto& [key, id] : it->second) {
            doomed.push_back(id);
        }
        for (symbol_id id : doomed) {
            remove(id, touched);
        }
        members_.erase(object);
    }

    void graph::bind_object(symbol_id id, std::optional<object_id> object) {
        auto& s = get(id);
        if (s.object == object) {
            return;
        }
        auto old = s.object;
        s.object = object;
        if (object) {
            registry_[*object].insert(id);
        }
        if (!old) {
            return;
        }
        auto r = registry_.find(*old);
        if (r == registry_.end()) {
            return;
        }
        r->second.erase(id);
        if (r->second.empty()) {
            registry_.erase(r);
            symbol_set touched;
            collect_members(*old, touched);
            refresh(touched);
        }
    }

    const symbol_set* graph::aliases(object_id object) const {
        auto it = registry_.find(object);
        return it == registry_.end() ? nullptr : &it->second;
    }

    void graph::refresh(symbol_id root) {
        auto it = symbols_.find(root);
        if (it == symbols_.end()) {
            return;
        }
        auto& s = it->second;
        if (!s.children.empty()) {
            refresh(symbol_set{root});
            return;
        }
        // A leaf is its own region.
        ++refresh_visits_;
        s.stale = std::any_of(s.parents.begin(), s.parents.end(), [&](symbol_id p) {
            const auto& ps = at(p);
            return ps.ts > s.ts || ps.stale;
        });
        refresh_visits_ += s.stale;
    }

    void graph::refresh(const symbol_set& roots) {
        // Descendant closure of the roots; flags outside it cannot change.
        std::vector<symbol_id> region;
        std::set<symbol_id> in_region;
        for (symbol_id r : roots) {
            if (contains(r) && in_region.insert(r).second) {
                region.push_back(r);
            }
        }
        for (std::size_t i = 0; i < region.size(); ++i) {
            ++refresh_visits_;
            for (symbol_id c : at(region[i]).children) {
                if (in_region.insert(c).second) {
                    region.push_back(c);
                }
            }
        }
        if (region.empty()) {
            return;
        }
        for (symbol_id id : region) {
            get(id).stale = false;
        }
        std::vector<symbol_id> work;
        for (symbol_id id : region) {
            const auto& s = at(id);
            for (symbol_id p : s.parents) {
                const auto& ps = at(p);
                if (ps.ts > s.ts || (ps.stale && !in_region.contains(p))) {
                    work.push_back(id);
                    break;
                }
            }
        }
        for (symbol_id id : work) {
            get(id).stale = true;
        }
        while (!work.empty()) {
            symbol_id id = work.back();
            work.pop_back();
            ++refresh_visits_;
            for (symbol_id c : at(id).children) {
                auto& cs = get(c);
                if (!cs.stale) {
                    cs.stale = true;
                    work.push_back(c);
                }
            }
        }
    }

    std::vector<symbol_id> graph::stale_symbols() const {
        std::vector<symbol_id> out;
        for (const auto& [id, s] : symbols_) {
            if (s.stale) {
                out.push_back(id);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool graph::consistent() const {
        for (const auto& [id, s] : symbols_) {
            for (symbol_id p : s.parents) {
                if (!contains(p) || !at(p).children.contains(id)) {
                    return false;
                }
            }
            for (symbol_id c : s.children) {
                if (!contains(c) || !at(c).parents.contains(id)) {
                    return false;
                }
            }
            if (s.object) {
                auto r = registry_.find(*s.object);
                if (r == registry_.end() || !r->second.contains(id)) {
                    return false;
                }
            }
        }
        for (const auto& [obj, set] : registry_) {
            if (set.empty()) {
                return false;
            }
            for (symbol_id id : set) {
                if (!contains(id) || at(id).object != obj) {
                    return false;
                }
            }
        }
        return true;
    }

    std::string graph::dump_json() const {
        std::vector<const symbol*> order;
        for (const auto& [id, s] : symbols_) {
            order.push_back(&s);
        }
        std::sort(order.begin(), order.end(), [](const symbol* a, const symbol* b) {
            return a->name != b->name ? a->name < b->name : a->id < b->id;
        });
        auto list = nlohmann::json::array();
        for (const symbol* s : order) {
            std::vector<std::string> parents;
            for (symbol_id p : s->parents) {
                parents.push_back(at(p).name.str());
            }
            std::sort(parents.begin(), parents.end());
            list.push_back({{"name", s->name.str()}, {"ts", s->ts}, {"stale", s->stale}, {"parents", parents}});
        }
        return nlohmann::json{{"symbols", list}}.dump();
    }

}  // namespace cellguard::lineage
