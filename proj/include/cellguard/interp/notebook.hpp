#pragma once

#include "cellguard/interp/value.hpp"
#include "cellguard/lang/cfg.hpp"
#include "cellguard/lang/notebook_file.hpp"
#include "cellguard/lang/parser.hpp"
#include "cellguard/lineage/graph.hpp"

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cellguard::interp {

    // Activation record of a notebook function or lambda.
    struct frame {
        std::unordered_map<std::string, value> vars;
        // Lineage of each local's value, expressed in notebook symbols.
        std::unordered_map<std::string, lineage::symbol_set> deps;
        const std::set<std::string>* locals{nullptr};
        std::shared_ptr<frame> parent;
    };

    struct exec_result {
        std::int64_t counter{0};
        bool ok{true};
        std::string error;
        // 1-based top-level statement that failed; 0 for a syntax error.
        int error_statement{0};
        std::string output;
        std::vector<lineage::update_event> lineage_events;

        std::string to_json() const;
    };

    class notebook_state {
      public:
        notebook_state();

        // Cells ---------------------------------------------------------------
        void upsert_cell(const std::string& id, const std::string& source, std::optional<std::size_t> position = {});
        void remove_cell(const std::string& id);
        bool has_cell(const std::string& id) const { return cells_.contains(id); }
        const std::string& source(const std::string& id) const;
        const std::vector<std::string>& cell_ids() const { return order_; }
        // Parsed program, or null when the current text has a syntax error.
        std::shared_ptr<const lang::program> program_of(const std::string& id) const;
        const std::optional<lang::syntax_error>& parse_error(const std::string& id) const;
        // Control-flow graph of the parsed program, or null alongside it.
        std::shared_ptr<const lang::cfg> cfg_of(const std::string& id) const;

        // Execution -----------------------------------------------------------
        exec_result execute_cell(const std::string& id);
        std::int64_t counter() const { return counter_; }
        // 0 for cells that never ran.
        std::int64_t cell_timestamp(const std::string& id) const;
        const std::map<std::string, std::int64_t>& cell_timestamps() const { return cell_ts_; }

        bool tracing() const { return tracing_; }
        void set_tracing(bool on) { tracing_ = on; }
        void set_step_limit(std::uint64_t steps) { step_limit_ = steps; }
        // Off leaves exec_result::lineage_events empty; lineage is still tracked.
        void set_record_events(bool on) { record_events_ = on; }
        // Instruments every dynamic statement instead of only the first one.
        void set_instrument_all(bool on) { instrument_all_ = on; }

        // Runtime state ---------------------------------------------------------
        const std::unordered_map<std::string, value>& globals() const { return globals_; }
        const lineage::graph& lineage() const { return graph_; }
        lineage::graph& lineage() { return graph_; }
        std::string dump_globals() const;

        // Side-effect free evaluation of a call target made of names,
        // attributes and constant or name subscripts. Empty when it cannot be
        // evaluated without running code.
        std::optional<value> peek_chain(const lang::expr& e) const;

      private:
        friend class executor;

        struct cell_entry {
            std::string source;
            std::shared_ptr<const lang::program> program;
            std::shared_ptr<const lang::cfg> graph;
            std::optional<lang::syntax_error> error;
            std::uint32_t unit{0};
        };

        std::uint32_t unit_for(const std::string& id, const std::string& source);

        std::unordered_map<std::string, cell_entry> cells_;
        std::vector<std::string> order_;
        std::map<std::pair<std::string, std::size_t>, std::uint32_t> units_;
        std::int64_t counter_{0};
        std::map<std::string, std::int64_t> cell_ts_;
        std::unordered_map<std::string, value> globals_;
        lineage::graph graph_;
        object_id next_object_{1};
        bool tracing_{true};
        bool instrument_all_{false};
        bool record_events_{true};
        std::uint64_t step_limit_{20'000'000};

        // First-execution bookkeeping, scoped to one execute_cell call. Keys
        // combine (cell id, source hash) into a unit number with the
        // statement's pre-order index.
        std::unordered_set<std::uint64_t> statement_seen_;
        std::unordered_map<std::uint64_t, lineage::symbol_set> uses_cache_;
    };

}  // namespace cellguard::interp
