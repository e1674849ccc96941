#pragma once

#include "cellguard/lang/ast.hpp"
#include "cellguard/lang/use_def.hpp"

#include <memory>
#include <vector>

namespace cellguard::lang {

    struct cfg;

    enum class node_kind : std::uint8_t { entry, exit, statement, branch, loop_iter, loop_bind, join };

    std::string_view to_string(node_kind k);

    struct cfg_node {
        int id{0};
        node_kind kind{node_kind::statement};
        const stmt* source{nullptr};  // owning statement, null for entry/exit/join
        name_set use_set;
        name_set def_set;
        std::vector<const call_expr*> calls;
        std::vector<int> succ;
        std::vector<int> pred;
        std::shared_ptr<const cfg> body;  // function definitions only
    };

    struct cfg {
        std::vector<cfg_node> nodes;
        int entry{0};
        int exit{0};

        std::size_t size() const { return nodes.size(); }
        const cfg_node& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }

        std::vector<int> post_order() const;
        std::vector<int> reverse_post_order() const;
        // Nodes with more than one successor.
        int branch_points() const;
        // Edges whose target precedes their source in reverse post-order.
        std::vector<std::pair<int, int>> back_edges() const;
    };

    // Builds the graph for one cell. Function bodies get their own graph on the
    // definition node; nodes unreachable from entry are dropped.
    cfg build_cfg(const block& stmts);
    cfg build_cfg(const program& p);

    // `a` followed by `b`, connected through a join node.
    cfg concat_cfg(const cfg& a, const cfg& b);

}  // namespace cellguard::lang
