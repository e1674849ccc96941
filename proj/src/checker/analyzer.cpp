#include "cellguard/checker/analyzer.hpp"

#include <algorithm>


namespace cellguard::checker {

    namespace {

        void collect_defs(const lang::cfg& g, std::map<std::string, name_set>& defs) {
            for (const auto& n : g.nodes) {
                if (!n.source) {
                    continue;
                }
                if (auto def = n.source->as<lang::func_def_stmt>()) {
                    defs[def->name].insert(def->free_names.begin(), def->free_names.end());
                }
            }
        }

    }  // namespace

    call_uses resolve_calls(const lang::cfg& g, const interp::notebook_state& state) {
        if (std::all_of(g.nodes.begin(), g.nodes.end(), [](const auto& n) { return n.calls.empty(); })) {
            return {};
        }
        std::map<std::string, name_set> local_defs;
        collect_defs(g, local_defs);
        call_uses out;
        for (const auto& n : g.nodes) {
            for (const auto* call : n.calls) {
                if (auto name = call->callee->as<lang::name_expr>()) {
                    if (auto it = local_defs.find(name->id); it != local_defs.end()) {
                        out[call] = it->second;
                        continue;
                    }
                }
                auto callee = state.peek_chain(*call->callee);
                if (!callee) {
                    continue;
                }
                if (auto f = std::get_if<std::shared_ptr<interp::function_object>>(&*callee)) {
                    out[call] = (*f)->free_names();
                }
            }
        }
        return out;
    }

    symbol_set resolve_live_symbols(const name_set& names, const lineage::graph& g) {
        symbol_set out;
        for (const auto& n : names) {
            if (auto id = g.resolve(n)) {
                out.insert(*id);
            }
        }
        return out;
    }

    analyzer::analyzer(const interp::notebook_state& state, analysis_cache* cache)
        : state_(state), cache_(cache ? cache : &own_), reuse_(cache != nullptr) {
        const auto& ids = state.cell_ids();
        views_.reserve(ids.size());
        auto generation = ++cache_->generation_;
        for (const auto& id : ids) {
            auto graph = state.cfg_of(id);
            if (!graph) {
                continue;
            }
            cell_view v;
            v.id = id;
            v.program = state.program_of(id);
            v.graph = std::move(graph);
            v.calls = resolve_calls(*v.graph, state);
            v.ts = state.cell_timestamp(id);
            auto& e = cache_->entries_[v.graph.get()];
            if (e.graph != v.graph || e.calls != v.calls) {
                e = {v.graph, v.calls, std::nullopt, std::nullopt, 0};
            }
            e.generation = generation;
            v.results = &e;
            index_.emplace(id, views_.size());
            order_.push_back(id);
            views_.push_back(std::move(v));
        }
        std::erase_if(cache_->entries_, [&](const auto& kv) { return kv.second.generation != generation; });
    }

    const analyzer::cell_view& analyzer::view(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) {
            throw std::out_of_range("cell '" + id + "' is not analyzable");
        }
        return views_[it->second];
    }

    const liveness_result& analyzer::live(const cell_view& v) const {
        auto& e = *v.results;
        if (!reuse_ || !e.live) {
            ++liveness_runs_;
            e.live = liveness(*v.graph, &v.calls);
        }
        return *e.live;
    }

    const dead_result& analyzer::dead_names(const cell_view& v) const {
        auto& e = *v.results;
        if (!reuse_ || !e.dead) {
            ++dead_runs_;
            e.dead = dead(*v.graph, &v.calls);
        }
        return *e.dead;
    }

    classification analyzer::classify(const name_set& live,
                                      std::int64_t cell_ts,
                                      std::map<lineage::symbol_id, name_set>* stale_names) const {
        classification c;
        const auto& g = state_.lineage();
        for (const auto& n : live) {
            auto id = g.resolve(n);
            if (!id) {
                continue;
            }
            const auto& s = g.at(*id);
            if (s.stale) {
                c.stale_syms.insert(*id);
                if (stale_names) {
                    (*stale_names)[*id].insert(n);
                }
            }
            else if (s.ts > cell_ts) {
                c.fresh_syms.insert(*id);
            }
        }
        return c;
    }

    classification analyzer::classify(const std::string& id) const {
        return classify(live(id).live_at_top, view(id).ts);
    }

    symbol_set analyzer::stale_of_concat(const std::string& first, const std::string& second) const {
        const auto& a = view(first);
        const auto& b = view(second);
        auto joined = lang::concat_cfg(*a.graph, *b.graph);
        call_uses calls = a.calls;
        calls.insert(b.calls.begin(), b.calls.end());
        ++liveness_runs_;
        auto live_names = liveness(joined, &calls).live_at_top;
        return classify(live_names, b.ts).stale_syms;
    }

}  // namespace cellguard::checker
