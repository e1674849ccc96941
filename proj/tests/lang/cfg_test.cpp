#include "cellguard/lang/cfg.hpp"
#include "cellguard/lang/parser.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

using namespace cellguard::lang;

namespace {

    std::size_t count_paths(const cfg& g) {
        std::function<std::size_t(int)> walk = [&](int v) -> std::size_t {
            if (v == g.exit) {
                return 1;
            }
            std::size_t total = 0;
            for (int w : g.node(v).succ) {
                total += walk(w);
            }
            return total;
        };
        return walk(g.entry);
    }

}  // namespace

TEST(Cfg, StraightLineChain) {
    auto p = parse_cell("a = 1\nb = a");
    auto g = build_cfg(p);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_EQ(g.node(g.entry).succ.size(), 1u);
    int n1 = g.node(g.entry).succ[0];
    ASSERT_EQ(g.node(n1).succ.size(), 1u);
    int n2 = g.node(n1).succ[0];
    EXPECT_EQ(g.node(n2).succ, std::vector<int>{g.exit});
    EXPECT_EQ(g.node(n1).source, p.body[0].get());
    EXPECT_EQ(g.node(n2).source, p.body[1].get());
}

TEST(Cfg, IfElseIsADiamond) {
    auto g = build_cfg(parse_cell("if c:\n    x = 1\nelse:\n    x = 2\nprint(x)"));
    EXPECT_EQ(g.branch_points(), 1);
    EXPECT_EQ(count_paths(g), 2u);
    EXPECT_TRUE(g.back_edges().empty());
    auto joins = std::count_if(g.nodes.begin(), g.nodes.end(), [](const cfg_node& n) {
        return n.kind == node_kind::join;
    });
    EXPECT_EQ(joins, 1);
}

TEST(Cfg, WhileHasBackEdgeAndBypass) {
    auto g = build_cfg(parse_cell("while c:\n    x = x + 1"));
    EXPECT_EQ(g.back_edges().size(), 1u);
    int cond = g.node(g.entry).succ[0];
    EXPECT_EQ(g.node(cond).kind, node_kind::branch);
    EXPECT_EQ(g.node(cond).succ.size(), 2u);
}

TEST(Cfg, ForHasBackEdgeAndBypass) {
    auto g = build_cfg(parse_cell("for i in xs:\n    t += i"));
    EXPECT_EQ(g.back_edges().size(), 1u);
    int iter = g.node(g.entry).succ[0];
    EXPECT_EQ(g.node(iter).kind, node_kind::loop_iter);
    ASSERT_EQ(g.node(iter).succ.size(), 2u);
    int bind = g.node(iter).succ[0];
    EXPECT_EQ(g.node(bind).kind, node_kind::loop_bind);
    EXPECT_EQ(to_strings(g.node(bind).def_set), std::vector<std::string>{"i"});
}

TEST(Cfg, FunctionBodiesAreSeparateGraphs) {
    auto g = build_cfg(parse_cell("def f(a):\n    if a:\n        return 1\n    return 2\ny = f(3)"));
    EXPECT_EQ(g.size(), 4u);
    int def = g.node(g.entry).succ[0];
    ASSERT_TRUE(g.node(def).body);
    const auto& body = *g.node(def).body;
    EXPECT_EQ(count_paths(body), 2u);
    int ret_edges = 0;
    for (const auto& n : body.nodes) {
        if (n.source && n.source->as<return_stmt>()) {
            EXPECT_EQ(n.succ, std::vector<int>{body.exit});
            ++ret_edges;
        }
    }
    EXPECT_EQ(ret_edges, 2);
    EXPECT_EQ(g.node(g.node(def).succ[0]).calls.size(), 1u);
}

TEST(Cfg, UnreachableAfterReturnIsPruned) {
    auto g = build_cfg(parse_cell("def f():\n    return 1\n    x = 2"));
    const auto& body = *g.node(g.node(g.entry).succ[0]).body;
    EXPECT_EQ(body.size(), 3u);
}

TEST(Cfg, ConcatenationJoinsCells) {
    auto a = build_cfg(parse_cell("if c:\n    x = 1"));
    auto b = build_cfg(parse_cell("y = x"));
    auto g = concat_cfg(a, b);
    EXPECT_EQ(g.size(), a.size() + b.size());
    EXPECT_EQ(count_paths(g), 2u);
}

TEST(CfgProperty, PathCountIsProductOfArities) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        std::string src;
        std::size_t expected = 1;
        int stmts = std::uniform_int_distribution<int>(1, 6)(rng);
        for (int i = 0; i < stmts; ++i) {
            int kind = std::uniform_int_distribution<int>(0, 2)(rng);
            if (kind == 0) {
                src += "v" + std::to_string(i) + " = " + std::to_string(i) + "\n";
                continue;
            }
            int elifs = std::uniform_int_distribution<int>(0, 2)(rng);
            src += "if c" + std::to_string(i) + ":\n    a = 1\n";
            for (int e = 0; e < elifs; ++e) {
                src += "elif d" + std::to_string(e) + ":\n    a = 2\n";
            }
            if (kind == 2) {
                src += "else:\n    a = 3\n";
            }
            expected *= static_cast<std::size_t>(elifs + 2);
        }
        auto g = build_cfg(parse_cell(src));
        EXPECT_EQ(count_paths(g), expected) << src;
    }
}
