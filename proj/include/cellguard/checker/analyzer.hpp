#pragma once

#include "cellguard/checker/dataflow.hpp"
#include "cellguard/interp/notebook.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace cellguard::checker {

    using lineage::symbol_set;

    struct classification {
        symbol_set stale_syms;
        symbol_set fresh_syms;

        bool stale() const { return !stale_syms.empty(); }
        bool fresh() const { return stale_syms.empty() && !fresh_syms.empty(); }
    };

    // Names read by calls in `g`, resolved against the runtime values of the
    // callees. A callee defined by a `def` in the same cell uses that
    // definition's free names instead.
    call_uses resolve_calls(const lang::cfg& g, const interp::notebook_state& state);

    // Maps syntactic names to existing lineage symbols; unknown names drop out.
    symbol_set resolve_live_symbols(const name_set& names, const lineage::graph& g);

    // Per-cell analysis results reused across analyzers of successive states
    // of one notebook. An entry is valid while the cell's graph and its
    // resolved call uses are unchanged.
    class analysis_cache {
      public:
        std::size_t size() const { return entries_.size(); }

      private:
        friend class analyzer;

        struct entry {
            std::shared_ptr<const lang::cfg> graph;
            call_uses calls;
            std::optional<liveness_result> live;
            std::optional<dead_result> dead;
            std::uint64_t generation{0};
        };

        std::map<const lang::cfg*, entry> entries_;
        std::uint64_t generation_{0};
    };

    // Static view of one notebook state. Holds references into `state`, which
    // must not change while the analyzer is in use.
    class analyzer {
      public:
        struct cell_view {
            std::string id;
            std::shared_ptr<const lang::program> program;
            std::shared_ptr<const lang::cfg> graph;
            call_uses calls;
            std::int64_t ts{0};
            analysis_cache::entry* results{nullptr};
        };

        explicit analyzer(const interp::notebook_state& state, analysis_cache* cache = nullptr);

        // Cells whose current text parses, in notebook order.
        const std::vector<std::string>& cells() const { return order_; }
        const std::vector<cell_view>& views() const { return views_; }
        const cell_view& view(const std::string& id) const;

        // Without a cache every call recomputes. References stay valid until
        // the next call for the same cell.
        const liveness_result& live(const std::string& id) const { return live(view(id)); }
        const liveness_result& live(const cell_view& v) const;
        const dead_result& dead_names(const std::string& id) const { return dead_names(view(id)); }
        const dead_result& dead_names(const cell_view& v) const;

        classification classify(const std::string& id) const;
        // With `stale_names`, also records which live names reach each stale symbol.
        classification classify(const name_set& live,
                                std::int64_t cell_ts,
                                std::map<lineage::symbol_id, name_set>* stale_names = nullptr) const;

        // Live stale symbols of `first` followed by `second`, timed as `second`.
        symbol_set stale_of_concat(const std::string& first, const std::string& second) const;

        const interp::notebook_state& state() const { return state_; }

        // Analyses actually computed so far, cache hits excluded.
        std::size_t liveness_runs() const { return liveness_runs_; }
        std::size_t dead_runs() const { return dead_runs_; }

      private:
        const interp::notebook_state& state_;
        analysis_cache own_;
        analysis_cache* cache_;
        bool reuse_;
        std::vector<cell_view> views_;
        std::unordered_map<std::string, std::size_t> index_;
        std::vector<std::string> order_;
        mutable std::size_t liveness_runs_{0};
        mutable std::size_t dead_runs_{0};
    };

}  // namespace cellguard::checker
