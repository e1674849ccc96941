#include "cellguard/checker/analyzer.hpp"
#include "cellguard/lang/parser.hpp"

#include "support/ast_gen.hpp"
#include "support/branchy_gen.hpp"
#include "support/path_oracle.hpp"

#include <gtest/gtest.h>

using namespace cellguard;
using checker::analyzer;
using lang::name_set;
using lang::qualified_name;

namespace {

    std::vector<std::string> names(const name_set& s) { return lang::to_strings(s); }

    name_set live_of(const std::string& src) {
        auto p = lang::parse_cell(src);
        return checker::liveness(lang::build_cfg(p)).live_at_top;
    }

    name_set dead_of(const std::string& src) {
        auto p = lang::parse_cell(src);
        return checker::dead(lang::build_cfg(p)).dead_at_bottom;
    }

    std::vector<std::string> symbol_names(const interp::notebook_state& nb, const lineage::symbol_set& s) {
        std::vector<std::string> out;
        for (auto id : s) {
            out.push_back(nb.lineage().at(id).name.str());
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    void run(interp::notebook_state& nb, const std::string& id, const std::string& src) {
        nb.upsert_cell(id, src);
        auto r = nb.execute_cell(id);
        ASSERT_TRUE(r.ok) << id << ": " << r.error;
    }

    using strings = std::vector<std::string>;

}  // namespace

TEST(Liveness, SingleRead) {
    EXPECT_EQ(names(live_of("b = a")), strings{"a"});
}

TEST(Liveness, EveryArmAssignsBeforeUse) {
    auto live = live_of("if num > 0:\n    s = 1\nelif num < 0:\n    s = 2\nelse:\n    s = 0\nprint(s)\n");
    EXPECT_EQ(names(live), strings{"num"});
}

TEST(Liveness, WhileLoopReadsCarriedName) {
    const std::string loop = "while c:\n    x = x + 1\n";
    auto live = live_of(loop);
    EXPECT_EQ(names(live), (strings{"c", "x"}));
    // Unrolled to depth two, the acyclic oracle agrees.
    auto unrolled = lang::parse_cell("if c:\n    x = x + 1\n    if c:\n        x = x + 1\n");
    auto facts = cellguard::testing::enumerate_paths(lang::build_cfg(unrolled));
    EXPECT_EQ(facts.live, live);
}

TEST(Liveness, LoopTargetsAndLambdaParamsAreNotLive) {
    EXPECT_EQ(names(live_of("for i in xs:\n    total = i\n")), strings{"xs"});
    EXPECT_EQ(names(live_of("g = lambda v: v + k\n")), strings{"k"});
}

TEST(Dead, UnconditionalOverwrite) {
    EXPECT_EQ(names(dead_of("x = 5")), strings{"x"});
}

TEST(Dead, AugmentedAssignIsNotDead) {
    EXPECT_TRUE(dead_of("x += 1").empty());
}

TEST(Dead, OneArmedIfIsNotDead) {
    auto src = "if c:\n    y = 1\n";
    EXPECT_TRUE(dead_of(src).empty());
    auto facts = cellguard::testing::enumerate_paths(lang::build_cfg(lang::parse_cell(src)));
    EXPECT_TRUE(facts.dead.empty());
}

TEST(Dead, BothArmsAndLaterReads) {
    EXPECT_EQ(names(dead_of("if c:\n    y = 1\nelse:\n    y = 2\nz = y\n")), (strings{"y", "z"}));
    EXPECT_TRUE(dead_of("for i in xs:\n    t = i\n").empty());  // zero-trip path
}

TEST(Cofinite, SetAlgebra) {
    using checker::cofinite_set;
    name_set ab{qualified_name("a"), qualified_name("b")};
    name_set b{qualified_name("b")};
    auto all = cofinite_set::all();
    EXPECT_EQ(checker::intersect(all, cofinite_set::of(ab)), cofinite_set::of(ab));
    auto not_b = cofinite_set{true, b};
    EXPECT_EQ(checker::intersect(not_b, cofinite_set::of(ab)), cofinite_set::of({qualified_name("a")}));
    EXPECT_EQ(checker::unite(not_b, b), all);
    EXPECT_TRUE(not_b.contains(qualified_name("zzz")));
    EXPECT_FALSE(not_b.contains(qualified_name("b")));
}

TEST(Resolution, OnlyTheActualCalleeContributesFreeNames) {
    interp::notebook_state nb;
    run(nb, "c1", "x = 1\ndef f(y):\n    return x + y\nlst = [f, lambda t: t + 1]\n");
    nb.upsert_cell("c2", "print(lst[1](2))\n");
    nb.upsert_cell("c3", "print(f(2))\n");
    analyzer a(nb);
    EXPECT_EQ(names(a.live("c2").live_at_top), (strings{"lst", "lst[1]"}));
    auto live3 = a.live("c3").live_at_top;
    EXPECT_TRUE(live3.contains(qualified_name("x")));
    EXPECT_TRUE(live3.contains(qualified_name("f")));
}

TEST(Resolution, LiveFreeNameMattersAtRuntime) {
    interp::notebook_state nb;
    run(nb, "c1", "x = 1\ndef f(y):\n    return x + y\n");
    nb.upsert_cell("c3", "print(f(2))\n");
    auto before = nb.execute_cell("c3").output;
    run(nb, "c4", "x = 10\n");
    auto after = nb.execute_cell("c3").output;
    EXPECT_NE(before, after);
    analyzer a(nb);
    EXPECT_TRUE(a.live("c3").live_at_top.contains(qualified_name("x")));
}

TEST(Resolution, BuiltinsSeeNoNotebookState) {
    interp::notebook_state nb;
    run(nb, "c1", "xs = [3, 1]\nk = 2\n");
    nb.upsert_cell("c2", "print(len(xs), sample(xs, k))\n");
    analyzer a(nb);
    EXPECT_EQ(names(a.live("c2").live_at_top), (strings{"k", "xs"}));
    auto syms = checker::resolve_live_symbols(a.live("c2").live_at_top, nb.lineage());
    EXPECT_EQ(symbol_names(nb, syms), (strings{"k", "xs"}));
}

TEST(Resolution, SameCellDefinitionWins) {
    interp::notebook_state nb;
    run(nb, "c1", "w = 1\nz = 2\ndef f():\n    return w\n");
    nb.upsert_cell("c2", "def f():\n    return z\nprint(f())\n");
    analyzer a(nb);
    auto live = a.live("c2").live_at_top;
    EXPECT_TRUE(live.contains(qualified_name("z")));
    EXPECT_FALSE(live.contains(qualified_name("w")));
}

TEST(Resolution, UnknownNamesDropOut) {
    interp::notebook_state nb;
    run(nb, "c1", "a = 1\n");
    name_set live{qualified_name("a"), qualified_name("nope"), qualified_name("a").child(lang::accessor::attribute("b"))};
    EXPECT_EQ(symbol_names(nb, checker::resolve_live_symbols(live, nb.lineage())), strings{"a"});
}

TEST(Classify, ThreeCellExample) {
    interp::notebook_state nb;
    run(nb, "c1", "a = 4");
    run(nb, "c2", "b = a");
    run(nb, "c3", "c = a + b");
    run(nb, "c1", "a = 5");
    analyzer a(nb);
    auto c2 = a.classify("c2");
    auto c3 = a.classify("c3");
    EXPECT_TRUE(c3.stale());
    EXPECT_EQ(symbol_names(nb, c3.stale_syms), strings{"b"});
    EXPECT_TRUE(c2.fresh());
    EXPECT_EQ(symbol_names(nb, c2.fresh_syms), strings{"a"});
    EXPECT_FALSE(a.classify("c1").stale());
}

TEST(Classify, NothingExecuted) {
    interp::notebook_state nb;
    nb.upsert_cell("c1", "a = 1");
    nb.upsert_cell("c2", "b = a");
    analyzer a(nb);
    for (const auto& id : a.cells()) {
        auto c = a.classify(id);
        EXPECT_TRUE(c.stale_syms.empty());
        EXPECT_TRUE(c.fresh_syms.empty());
    }
}

TEST(Classify, IndependentSymbolStaysUsable) {
    interp::notebook_state nb;
    run(nb, "c1", "x = 0");
    run(nb, "c2", "y = 5\nprint(x)\n");
    run(nb, "c3", "print(y)");
    run(nb, "c1", "x = 1");
    analyzer a(nb);
    EXPECT_FALSE(a.classify("c3").stale());
    EXPECT_TRUE(a.classify("c2").fresh());
}

TEST(Classify, SyntaxErrorCellsAreSkipped) {
    interp::notebook_state nb;
    run(nb, "c1", "a = 1");
    nb.upsert_cell("c2", "b = = a");
    analyzer a(nb);
    EXPECT_EQ(a.cells(), strings{"c1"});
}

// ---- properties -------------------------------------------------------------

namespace {

    bool has_loop(const lang::block& b) {
        for (const auto& s : b) {
            if (s->as<lang::while_stmt>() || s->as<lang::for_stmt>()) {
                return true;
            }
            if (auto i = s->as<lang::if_stmt>()) {
                for (const auto& br : i->branches) {
                    if (has_loop(br.body)) {
                        return true;
                    }
                }
                if (i->orelse && has_loop(*i->orelse)) {
                    return true;
                }
            }
        }
        return false;
    }

    std::size_t name_universe(const lang::cfg& g) {
        name_set all;
        for (const auto& n : g.nodes) {
            all.insert(n.use_set.begin(), n.use_set.end());
            all.insert(n.def_set.begin(), n.def_set.end());
        }
        return all.size();
    }

}  // namespace

TEST(DataflowProperty, MatchesPathEnumerationOnAcyclicGraphs) {
    int checked = 0;
    int with_branches = 0;
    auto check = [&](const lang::program& p) {
        auto g = lang::build_cfg(p);
        ASSERT_TRUE(g.back_edges().empty());
        ASSERT_LE(g.branch_points(), 8);
        ++checked;
        with_branches += g.branch_points() > 0;
        auto facts = cellguard::testing::enumerate_paths(g);
        ASSERT_EQ(checker::liveness(g).live_at_top, facts.live) << lang::pretty_print(p);
        ASSERT_EQ(checker::dead(g).dead_at_bottom, facts.dead) << lang::pretty_print(p);
    };
    // Half from the general AST generator with loops filtered out, half from
    // the branch-heavy text generator.
    for (unsigned seed = 1; checked < 250; ++seed) {
        ASSERT_LT(seed, 20000u);
        cellguard::testing::ast_generator gen(seed);
        auto p = gen.program(8);
        if (has_loop(p.body) || lang::build_cfg(p).branch_points() > 8) {
            continue;
        }
        check(p);
    }
    for (unsigned seed = 1; checked < 500; ++seed) {
        cellguard::testing::branchy_generator gen(seed);
        auto p = lang::parse_cell(gen.cell(6, 8));
        check(p);
    }
    EXPECT_EQ(checked, 500);
    EXPECT_GT(with_branches, 200);
}

TEST(DataflowProperty, StraightLineDuality) {
    int checked = 0;
    for (unsigned seed = 1; checked < 300; ++seed) {
        cellguard::testing::ast_generator gen(seed);
        auto p = gen.program(8);
        auto g = lang::build_cfg(p);
        if (g.branch_points() > 0) {
            continue;
        }
        ++checked;
        name_set defs;
        name_set read_first;
        name_set written;
        name_set dead_expected;
        for (int id : g.reverse_post_order()) {
            const auto& n = g.node(id);
            for (const auto& u : n.use_set) {
                if (!written.contains(u)) {
                    read_first.insert(u);
                }
            }
            written.insert(n.def_set.begin(), n.def_set.end());
            defs.insert(n.def_set.begin(), n.def_set.end());
        }
        for (int id : g.reverse_post_order()) {
            auto k = lang::set_difference(g.node(id).def_set, g.node(id).use_set);
            dead_expected.insert(k.begin(), k.end());
        }
        auto dead = checker::dead(g).dead_at_bottom;
        ASSERT_EQ(dead, dead_expected) << lang::pretty_print(p);
        ASSERT_EQ(checker::liveness(g).live_at_top, read_first) << lang::pretty_print(p);
        // Away from names read before their first write, DEAD is every definition.
        ASSERT_EQ(lang::set_difference(dead, read_first), lang::set_difference(defs, read_first))
                << lang::pretty_print(p);
    }
}

TEST(DataflowProperty, IterationsBoundedByNodesTimesHeight) {
    for (unsigned seed = 1; seed <= 1000; ++seed) {
        cellguard::testing::ast_generator gen(seed);
        auto p = gen.program(8);
        auto g = lang::build_cfg(p);
        auto bound = g.size() * (name_universe(g) + 2);
        auto live = checker::liveness(g);
        auto dead = checker::dead(g);
        ASSERT_LE(live.iterations, bound) << lang::pretty_print(p);
        ASSERT_LE(dead.iterations, bound) << lang::pretty_print(p);
        name_set uses;
        name_set defs;
        for (const auto& n : g.nodes) {
            uses.insert(n.use_set.begin(), n.use_set.end());
            defs.insert(n.def_set.begin(), n.def_set.end());
        }
        ASSERT_TRUE(std::includes(uses.begin(), uses.end(), live.live_at_top.begin(), live.live_at_top.end()));
        ASSERT_TRUE(std::includes(defs.begin(), defs.end(), dead.dead_at_bottom.begin(), dead.dead_at_bottom.end()));
    }
}
