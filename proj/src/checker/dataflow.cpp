#include "cellguard/checker/dataflow.hpp"

#include <deque>

namespace cellguard::checker {

    cofinite_set intersect(const cofinite_set& a, const cofinite_set& b) {
        if (a.complement && b.complement) {
            return {true, lang::set_union(a.items, b.items)};
        }
        if (a.complement) {
            return {false, lang::set_difference(b.items, a.items)};
        }
        if (b.complement) {
            return {false, lang::set_difference(a.items, b.items)};
        }
        return {false, lang::set_intersection(a.items, b.items)};
    }

    cofinite_set unite(const cofinite_set& a, const name_set& b) {
        if (a.complement) {
            return {true, lang::set_difference(a.items, b)};
        }
        return {false, lang::set_union(a.items, b)};
    }

    name_set effective_uses(const lang::cfg_node& n, const call_uses* calls) {
        if (!calls || n.calls.empty()) {
            return n.use_set;
        }
        name_set out = n.use_set;
        for (const auto* c : n.calls) {
            if (auto it = calls->find(c); it != calls->end()) {
                out.insert(it->second.begin(), it->second.end());
            }
        }
        return out;
    }

    namespace {

        class worklist {
          public:
            explicit worklist(std::size_t n) : queued_(n, false) {}

            void push(int id) {
                auto i = static_cast<std::size_t>(id);
                if (!queued_[i]) {
                    queued_[i] = true;
                    items_.push_back(id);
                }
            }

            bool empty() const { return items_.empty(); }

            int pop() {
                int id = items_.front();
                items_.pop_front();
                queued_[static_cast<std::size_t>(id)] = false;
                return id;
            }

          private:
            std::deque<int> items_;
            std::vector<bool> queued_;
        };

    }  // namespace

    liveness_result liveness(const lang::cfg& g, const call_uses* calls) {
        const auto n = g.size();
        liveness_result r;
        r.live_in.assign(n, {});
        r.live_out.assign(n, {});
        std::vector<name_set> uses(n);
        for (std::size_t i = 0; i < n; ++i) {
            uses[i] = effective_uses(g.nodes[i], calls);
        }
        worklist work(n);
        for (int id : g.post_order()) {
            work.push(id);
        }
        while (!work.empty()) {
            int id = work.pop();
            ++r.iterations;
            const auto& node = g.node(id);
            auto i = static_cast<std::size_t>(id);
            name_set out;
            for (int s : node.succ) {
                const auto& in = r.live_in[static_cast<std::size_t>(s)];
                out.insert(in.begin(), in.end());
            }
            name_set in = lang::set_union(uses[i], lang::set_difference(out, node.def_set));
            r.live_out[i] = std::move(out);
            if (in != r.live_in[i]) {
                r.live_in[i] = std::move(in);
                for (int p : node.pred) {
                    work.push(p);
                }
            }
        }
        r.live_at_top = r.live_in[static_cast<std::size_t>(g.entry)];
        return r;
    }

    dead_result dead(const lang::cfg& g, const call_uses* calls) {
        const auto n = g.size();
        dead_result r;
        r.dead_in.assign(n, cofinite_set::all());
        r.dead_out.assign(n, cofinite_set::all());
        std::vector<name_set> kills(n);
        name_set all_defs;
        for (std::size_t i = 0; i < n; ++i) {
            kills[i] = lang::set_difference(g.nodes[i].def_set, effective_uses(g.nodes[i], calls));
            all_defs.insert(g.nodes[i].def_set.begin(), g.nodes[i].def_set.end());
        }
        worklist work(n);
        for (int id : g.reverse_post_order()) {
            work.push(id);
        }
        while (!work.empty()) {
            int id = work.pop();
            ++r.iterations;
            const auto& node = g.node(id);
            auto i = static_cast<std::size_t>(id);
            cofinite_set in = id == g.entry ? cofinite_set::of({}) : cofinite_set::all();
            for (int p : node.pred) {
                in = intersect(in, r.dead_out[static_cast<std::size_t>(p)]);
            }
            cofinite_set out = unite(in, kills[i]);
            r.dead_in[i] = std::move(in);
            if (out != r.dead_out[i]) {
                r.dead_out[i] = std::move(out);
                for (int s : node.succ) {
                    work.push(s);
                }
            }
        }
        // An unreachable exit keeps a cofinite value; clamp it to defined names.
        const auto& bottom = r.dead_out[static_cast<std::size_t>(g.exit)];
        r.dead_at_bottom = bottom.complement ? lang::set_difference(all_defs, bottom.items) : bottom.items;
        return r;
    }

}  // namespace cellguard::checker
