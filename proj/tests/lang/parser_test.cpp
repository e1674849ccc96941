#include "cellguard/lang/notebook_file.hpp"
#include "cellguard/lang/parser.hpp"
#include "support/ast_gen.hpp"

#include <gtest/gtest.h>

using namespace cellguard::lang;

TEST(Parser, SingleAssignment) {
    auto p = parse_cell("x = 1");
    ASSERT_EQ(p.body.size(), 1u);
    EXPECT_EQ(p.body[0]->kind(), stmt_kind::assign);
    EXPECT_EQ(to_sexpr(p), "(program (assign (name x) (lit 2 1)))");
}

TEST(Parser, EmptyCell) {
    EXPECT_TRUE(parse_cell("").body.empty());
    EXPECT_TRUE(parse_cell("\n\n# only a comment\n   \n").body.empty());
}

TEST(Parser, MalformedAssignmentReportsColumn) {
    try {
        parse_cell("x = = 1");
        FAIL() << "expected a syntax error";
    }
    catch (const syntax_error& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_EQ(e.column(), 5);
    }
}

TEST(Parser, RejectsTabsAndOddIndent) {
    EXPECT_THROW(parse_cell("if x:\n\ty = 1"), syntax_error);
    EXPECT_THROW(parse_cell("if x:\n  y = 1"), syntax_error);
    EXPECT_THROW(parse_cell("if x:\n        y = 1"), syntax_error);
}

TEST(Parser, RejectsTopLevelReturnAndBuiltinRebinding) {
    EXPECT_THROW(parse_cell("return 1"), syntax_error);
    EXPECT_THROW(parse_cell("len = 3"), syntax_error);
    EXPECT_THROW(parse_cell("for print in xs:\n    pass"), syntax_error);
    EXPECT_NO_THROW(parse_cell("def f():\n    return 1"));
}

TEST(Parser, RejectsUnsupportedSyntax) {
    EXPECT_THROW(parse_cell("x = [i for i in y]"), syntax_error);
    EXPECT_THROW(parse_cell("import os"), syntax_error);
    EXPECT_THROW(parse_cell("f(1) = 2"), syntax_error);
    EXPECT_THROW(parse_cell("x = (1"), syntax_error);
    EXPECT_THROW(parse_cell("x = 'abc"), syntax_error);
    EXPECT_THROW(parse_cell("a < b < c"), syntax_error);
}

TEST(Parser, PrecedenceFollowsPython) {
    auto v = [](const char* src) { return pretty_print(*parse_cell(src).body[0]->as<expr_stmt>()->value); };
    EXPECT_EQ(v("1 + 2 * 3"), "(1 + (2 * 3))");
    EXPECT_EQ(v("not a == b and c or d"), "(((not (a == b)) and c) or d)");
    EXPECT_EQ(v("-a.b[0](1) // 2 % 3"), "(((-a.b[0](1)) // 2) % 3)");
    EXPECT_EQ(v("lambda x, y: x + y * 2"), "(lambda x, y: (x + (y * 2)))");
    EXPECT_EQ(v("a - b - c"), "((a - b) - c)");
}

TEST(Parser, CompoundStatementsAndIndices) {
    auto p = parse_cell(
            "total = 0\n"
            "for i in range(3):\n"
            "    if i > 1:\n"
            "        total += i\n"
            "    elif i == 0:\n"
            "        pass\n"
            "    else:\n"
            "        total -= 1\n"
            "def f(a, b):\n"
            "    c = a + b\n"
            "    return c * k\n");
    ASSERT_EQ(p.body.size(), 3u);
    EXPECT_EQ(p.statement_count, 9);
    EXPECT_EQ(p.body[0]->index, 0);
    EXPECT_EQ(p.body[1]->index, 1);
    EXPECT_EQ(p.body[2]->index, 6);
    auto f = p.body[2]->as<func_def_stmt>();
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(f->locals, (std::set<std::string>{"a", "b", "c"}));
    EXPECT_EQ(to_strings(f->free_names), (std::vector<std::string>{"k"}));
}

TEST(Parser, LambdaFreeNamesSkipParametersAndEnclosingLocals) {
    auto p = parse_cell("g = lambda x: f(x) + y\ndef h(n):\n    return lambda m: m + n + z\n");
    auto lam = p.body[0]->as<assign_stmt>()->value->as<lambda_expr>();
    EXPECT_EQ(to_strings(lam->free_names), (std::vector<std::string>{"f", "y"}));
    auto h = p.body[1]->as<func_def_stmt>();
    EXPECT_EQ(to_strings(h->free_names), (std::vector<std::string>{"z"}));
    auto inner = h->body[0]->as<return_stmt>()->value->as<lambda_expr>();
    EXPECT_EQ(to_strings(inner->free_names), (std::vector<std::string>{"z"}));
}

TEST(Parser, StringEscapesAndFloats) {
    auto p = parse_cell("s = \"a\\n\\\"b\" + 'c'\nf = 1.5e2 + .25 + 3.");
    EXPECT_EQ(pretty_print(p), "s = (\"a\\n\\\"b\" + \"c\")\nf = ((150.0 + 0.25) + 3.0)\n");
    auto s = std::get<std::string>(
            p.body[0]->as<assign_stmt>()->value->as<binary_expr>()->lhs->as<literal_expr>()->value);
    EXPECT_EQ(s, "a\n\"b");
    auto f = std::get<double>(p.body[1]
                                      ->as<assign_stmt>()
                                      ->value->as<binary_expr>()
                                      ->lhs->as<binary_expr>()
                                      ->lhs->as<literal_expr>()
                                      ->value);
    EXPECT_DOUBLE_EQ(f, 150.0);
}

TEST(Parser, BracketsJoinLines) {
    auto p = parse_cell("d = {\n    \"a\": 1,\n    \"b\": [1,\n        2],\n}\nx = d.a");
    EXPECT_EQ(p.body.size(), 2u);
}

TEST(ParserProperty, PrettyPrintRoundTrips) {
    for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
        cellguard::testing::ast_generator gen(seed);
        auto original = gen.program(6);
        auto text = pretty_print(original);
        program reparsed;
        ASSERT_NO_THROW(reparsed = parse_cell(text)) << "seed " << seed << "\n" << text;
        ASSERT_EQ(to_sexpr(reparsed), to_sexpr(original)) << "seed " << seed << "\n" << text;
        EXPECT_EQ(pretty_print(reparsed), text);
    }
}

TEST(ParserProperty, ParsingIsDeterministic) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        cellguard::testing::ast_generator gen(seed);
        auto text = pretty_print(gen.program(6));
        EXPECT_EQ(to_sexpr(parse_cell(text)), to_sexpr(parse_cell(text)));
    }
}

TEST(NotebookFile, JsonForm) {
    auto cells = parse_notebook(R"({"cells": [{"id": "a", "source": "x = 1"}, {"id": "b", "source": "y = x"}]})");
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_EQ(cells[1].id, "b");
    EXPECT_EQ(cells[1].source, "y = x");
    EXPECT_EQ(parse_notebook(notebook_to_json(cells)), cells);
}

TEST(NotebookFile, PercentForm) {
    auto cells = parse_notebook("# %%\nx = 1\n\n# %% second\ny = x\nprint(y)\n");
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_EQ(cells[0].id, "c1");
    EXPECT_EQ(cells[0].source, "x = 1");
    EXPECT_EQ(cells[1].id, "c2");
    EXPECT_EQ(cells[1].source, "y = x\nprint(y)");
}
