#include "cellguard/lang/cfg.hpp"

#include <algorithm>

namespace cellguard::lang {

    std::string_view to_string(node_kind k) {
        switch (k) {
            case node_kind::entry:
                return "entry";
            case node_kind::exit:
                return "exit";
            case node_kind::statement:
                return "statement";
            case node_kind::branch:
                return "branch";
            case node_kind::loop_iter:
                return "loop_iter";
            case node_kind::loop_bind:
                return "loop_bind";
            case node_kind::join:
                return "join";
        }
        return "?";
    }

    namespace {

        class builder {
          public:
            cfg run(const block& stmts) {
                entry_ = add(node_kind::entry, nullptr);
                exit_ = add(node_kind::exit, nullptr);
                frontier_ = {entry_};
                build_block(stmts);
                link_frontier(exit_);
                return prune();
            }

          private:
            int add(node_kind kind, const stmt* source) {
                cfg_node n;
                n.id = static_cast<int>(g_.nodes.size());
                n.kind = kind;
                n.source = source;
                g_.nodes.push_back(std::move(n));
                return g_.nodes.back().id;
            }

            void edge(int from, int to) {
                auto& s = g_.nodes[static_cast<std::size_t>(from)].succ;
                if (std::find(s.begin(), s.end(), to) == s.end()) {
                    s.push_back(to);
                    g_.nodes[static_cast<std::size_t>(to)].pred.push_back(from);
                }
            }

            void link_frontier(int to) {
                for (int f : frontier_) {
                    edge(f, to);
                }
            }

            // Appends `id` after the current frontier.
            void append(int id) {
                link_frontier(id);
                frontier_ = {id};
            }

            void set_expr(int id, const expr& e) {
                auto& n = g_.nodes[static_cast<std::size_t>(id)];
                n.use_set = expr_uses(e);
                collect_calls(e, n.calls);
            }

            void build_block(const block& stmts) {
                for (const auto& s : stmts) {
                    build_stmt(*s);
                }
            }

            void build_stmt(const stmt& s) {
                if (auto i = s.as<if_stmt>()) {
                    std::vector<int> ends;
                    for (const auto& br : i->branches) {
                        int cond = add(node_kind::branch, &s);
                        set_expr(cond, *br.cond);
                        append(cond);
                        build_block(br.body);
                        ends.insert(ends.end(), frontier_.begin(), frontier_.end());
                        frontier_ = {cond};
                    }
                    if (i->orelse) {
                        build_block(*i->orelse);
                    }
                    ends.insert(ends.end(), frontier_.begin(), frontier_.end());
                    int join = add(node_kind::join, &s);
                    frontier_ = ends;
                    append(join);
                    return;
                }
                if (auto w = s.as<while_stmt>()) {
                    int cond = add(node_kind::branch, &s);
                    set_expr(cond, *w->cond);
                    append(cond);
                    build_block(w->body);
                    link_frontier(cond);
                    frontier_ = {cond};
                    append(add(node_kind::join, &s));
                    return;
                }
                if (auto f = s.as<for_stmt>()) {
                    int iter = add(node_kind::loop_iter, &s);
                    set_expr(iter, *f->iter);
                    append(iter);
                    int bind = add(node_kind::loop_bind, &s);
                    g_.nodes[static_cast<std::size_t>(bind)].def_set.insert(qualified_name{f->target});
                    append(bind);
                    build_block(f->body);
                    link_frontier(bind);
                    frontier_.push_back(iter);
                    append(add(node_kind::join, &s));
                    return;
                }
                int id = add(node_kind::statement, &s);
                auto& n = g_.nodes[static_cast<std::size_t>(id)];
                auto sets = use_def(s);
                n.use_set = std::move(sets.use_set);
                n.def_set = std::move(sets.def_set);
                std::visit(
                        [&](const auto& node) {
                            using T = std::decay_t<decltype(node)>;
                            if constexpr (std::is_same_v<T, assign_stmt> || std::is_same_v<T, aug_assign_stmt>) {
                                collect_calls(*node.target, n.calls);
                                collect_calls(*node.value, n.calls);
                            }
                            else if constexpr (std::is_same_v<T, expr_stmt>) {
                                collect_calls(*node.value, n.calls);
                            }
                            else if constexpr (std::is_same_v<T, return_stmt>) {
                                if (node.value) {
                                    collect_calls(*node.value, n.calls);
                                }
                            }
                            else if constexpr (std::is_same_v<T, del_stmt>) {
                                collect_calls(*node.target, n.calls);
                            }
                            else if constexpr (std::is_same_v<T, func_def_stmt>) {
                                n.body = std::make_shared<const cfg>(build_cfg(node.body));
                            }
                        },
                        s.node);
                append(id);
                if (s.as<return_stmt>()) {
                    link_frontier(exit_);
                    frontier_.clear();
                }
            }

            cfg prune() {
                std::vector<bool> seen(g_.nodes.size(), false);
                std::vector<int> stack{entry_};
                seen[static_cast<std::size_t>(entry_)] = true;
                while (!stack.empty()) {
                    int v = stack.back();
                    stack.pop_back();
                    for (int w : g_.nodes[static_cast<std::size_t>(v)].succ) {
                        if (!seen[static_cast<std::size_t>(w)]) {
                            seen[static_cast<std::size_t>(w)] = true;
                            stack.push_back(w);
                        }
                    }
                }
                // The exit node is kept even when every path returns early.
                seen[static_cast<std::size_t>(exit_)] = true;
                std::vector<int> remap(g_.nodes.size(), -1);
                cfg out;
                for (auto& n : g_.nodes) {
                    if (seen[static_cast<std::size_t>(n.id)]) {
                        remap[static_cast<std::size_t>(n.id)] = static_cast<int>(out.nodes.size());
                        out.nodes.push_back(std::move(n));
                    }
                }
                for (auto& n : out.nodes) {
                    n.id = remap[static_cast<std::size_t>(n.id)];
                    auto fix = [&](std::vector<int>& ids) {
                        std::vector<int> kept;
                        for (int i : ids) {
                            if (remap[static_cast<std::size_t>(i)] >= 0) {
                                kept.push_back(remap[static_cast<std::size_t>(i)]);
                            }
                        }
                        ids = std::move(kept);
                    };
                    fix(n.succ);
                    fix(n.pred);
                }
                out.entry = remap[static_cast<std::size_t>(entry_)];
                out.exit = remap[static_cast<std::size_t>(exit_)];
                return out;
            }

            cfg g_;
            int entry_{0};
            int exit_{0};
            std::vector<int> frontier_;
        };

    }  // namespace

    std::vector<int> cfg::post_order() const {
        std::vector<int> order;
        std::vector<bool> seen(nodes.size(), false);
        std::vector<std::pair<int, std::size_t>> stack{{entry, 0}};
        seen[static_cast<std::size_t>(entry)] = true;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            const auto& succ = nodes[static_cast<std::size_t>(v)].succ;
            if (next < succ.size()) {
                int w = succ[next++];
                if (!seen[static_cast<std::size_t>(w)]) {
                    seen[static_cast<std::size_t>(w)] = true;
                    stack.emplace_back(w, 0);
                }
            }
            else {
                order.push_back(v);
                stack.pop_back();
            }
        }
        for (const auto& n : nodes) {
            if (!seen[static_cast<std::size_t>(n.id)]) {
                order.push_back(n.id);
            }
        }
        return order;
    }

    std::vector<int> cfg::reverse_post_order() const {
        auto order = post_order();
        std::reverse(order.begin(), order.end());
        return order;
    }

    int cfg::branch_points() const {
        return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const cfg_node& n) {
            return n.succ.size() > 1;
        }));
    }

    std::vector<std::pair<int, int>> cfg::back_edges() const {
        auto rpo = reverse_post_order();
        std::vector<int> rank(nodes.size());
        for (std::size_t i = 0; i < rpo.size(); ++i) {
            rank[static_cast<std::size_t>(rpo[i])] = static_cast<int>(i);
        }
        std::vector<std::pair<int, int>> out;
        for (const auto& n : nodes) {
            for (int w : n.succ) {
                if (rank[static_cast<std::size_t>(w)] <= rank[static_cast<std::size_t>(n.id)]) {
                    out.emplace_back(n.id, w);
                }
            }
        }
        return out;
    }

    cfg build_cfg(const block& stmts) {
        return builder{}.run(stmts);
    }

    cfg build_cfg(const program& p) {
        return build_cfg(p.body);
    }

    cfg concat_cfg(const cfg& a, const cfg& b) {
        cfg out;
        out.nodes = a.nodes;
        int offset = static_cast<int>(a.nodes.size());
        for (const auto& n : b.nodes) {
            cfg_node copy = n;
            copy.id += offset;
            for (int& s : copy.succ) {
                s += offset;
            }
            for (int& p : copy.pred) {
                p += offset;
            }
            out.nodes.push_back(std::move(copy));
        }
        auto& seam = out.nodes[static_cast<std::size_t>(a.exit)];
        seam.kind = node_kind::join;
        int next = b.entry + offset;
        seam.succ.push_back(next);
        out.nodes[static_cast<std::size_t>(next)].kind = node_kind::join;
        out.nodes[static_cast<std::size_t>(next)].pred.push_back(a.exit);
        out.entry = a.entry;
        out.exit = b.exit + offset;
        return out;
    }

}  // namespace cellguard::lang
