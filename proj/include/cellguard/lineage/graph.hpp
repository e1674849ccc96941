#pragma once

#include "cellguard/lang/qualified_name.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cellguard::lineage {

    using lang::qualified_name;
    using symbol_id = std::uint32_t;
    using object_id = std::uint64_t;
    using symbol_set = std::set<symbol_id>;

    class unknown_object : public std::runtime_error {
      public:
        explicit unknown_object(object_id id);
    };

    class unknown_symbol : public std::runtime_error {
      public:
        explicit unknown_symbol(const std::string& name);
    };

    struct symbol {
        symbol_id id{};
        qualified_name name;  // display name, fixed at creation
        std::int64_t ts{0};
        symbol_set parents;
        symbol_set children;
        bool stale{false};
        std::optional<object_id> object;
        // Set for namespace members such as `df.col` or `lst[3]`.
        std::optional<object_id> container;
        std::string member_key;
    };

    struct update_event {
        enum class kind : std::uint8_t { assign, augment, mutate, remove };

        kind what{kind::assign};
        std::string symbol;
        std::int64_t counter{0};
        std::vector<std::string> parents;
    };

    std::string_view to_string(update_event::kind k);

    // Shadow lineage for one notebook session: symbols, dependency edges,
    // staleness flags and the object alias registry.
    class graph {
      public:
        // Global symbol for `name`, created with ts 0 when absent.
        symbol_id global(const std::string& name);
        std::optional<symbol_id> find_global(const std::string& name) const;

        // Member symbol of a container object, created lazily.
        symbol_id member(object_id container, const lang::accessor& key, const qualified_name& display);
        std::optional<symbol_id> find_member(object_id container, const lang::accessor& key) const;
        // Member created on first traced access; it starts with the parents and
        // timestamp of `like` (normally the container's own symbol).
        symbol_id materialize_member(object_id container,
                                     const lang::accessor& key,
                                     const qualified_name& display,
                                     symbol_id like);
        // Member symbols of `container`; list members are keyed by index.
        std::vector<std::pair<std::string, symbol_id>> members_of(object_id container) const;

        // Follows a qualified name through the registry: `a.b` is the member
        // `b` of whatever object `a` is bound to.
        std::optional<symbol_id> resolve(const qualified_name& name) const;
        // Deepest existing symbol along the chain.
        std::optional<symbol_id> resolve_prefix(const qualified_name& name) const;

        bool contains(symbol_id id) const { return symbols_.contains(id); }
        const symbol& at(symbol_id id) const;
        std::size_t size() const { return symbols_.size(); }
        std::vector<symbol_id> ids() const;

        // parents := new_parents, ts := counter, staleness recomputed.
        void assign(symbol_id target, const symbol_set& new_parents, std::int64_t counter);
        // parents ∪= extra, ts := counter.
        void augment(symbol_id target, const symbol_set& extra, std::int64_t counter);
        // Bumps every alias of `object`; also bumps containers holding it.
        symbol_set record_mutation(object_id object, const symbol_set& extra_parents, std::int64_t counter);

        void delete_symbol(const qualified_name& name);
        void delete_symbol(symbol_id id);

        // Registry maintenance; an object left without aliases loses its members.
        void bind_object(symbol_id id, std::optional<object_id> object);
        const symbol_set* aliases(object_id object) const;
        std::size_t registry_size() const { return registry_.size(); }

        std::vector<symbol_id> stale_symbols() const;

        void set_event_sink(std::vector<update_event>* sink) { events_ = sink; }
        std::uint64_t refresh_visits() const { return refresh_visits_; }

        // Internal consistency: edge symmetry and registry membership.
        bool consistent() const;

        std::string dump_json() const;

      private:
        symbol& get(symbol_id id);
        symbol_id create(qualified_name name);
        void set_parents(symbol& s, const symbol_set& parents);
        void refresh(const symbol_set& roots);
        void refresh(symbol_id root);
        void remove(symbol_id id, symbol_set& touched);
        void collect_members(object_id object, symbol_set& touched);
        void emit(update_event::kind k, const symbol& s);

        std::unordered_map<symbol_id, symbol> symbols_;
        std::unordered_map<std::string, symbol_id> globals_;
        std::unordered_map<object_id, std::map<std::string, symbol_id>> members_;
        std::unordered_map<object_id, symbol_set> registry_;
        symbol_id next_id_{1};
        std::vector<update_event>* events_{nullptr};
        std::uint64_t refresh_visits_{0};
    };

}  // namespace cellguard::lineage
