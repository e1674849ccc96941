#include "cellguard/lang/parser.hpp"

#include "cellguard/lang/use_def.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <array>

namespace cellguard::lang {

    syntax_error::syntax_error(std::string message, int line, int column)
        : std::runtime_error("SyntaxError: " + message + " (line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ")"),
          message_(std::move(message)),
          line_(line),
          column_(column) {}

    namespace {

        using detail::token;
        using detail::token_kind;

        bool is_keyword(std::string_view s) {
            static constexpr std::array<std::string_view, 18> keywords = {
                    "if",   "elif",  "else", "while", "for",  "in",    "def",  "return", "del",
                    "pass", "lambda", "and", "or",    "not",  "True",  "False", "None",  "is"};
            return std::find(keywords.begin(), keywords.end(), s) != keywords.end();
        }

        class parser {
          public:
            explicit parser(std::vector<token> tokens) : toks_(std::move(tokens)) {}

            program parse_program() {
                program p;
                skip_newlines();
                while (!at_end()) {
                    p.body.push_back(parse_statement());
                    skip_newlines();
                }
                return p;
            }

          private:
            const token& cur() const { return toks_[pos_]; }
            const token& peek_tok(std::size_t ahead = 1) const {
                return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
            }
            bool at_end() const { return cur().kind == token_kind::end; }

            [[noreturn]] void fail(const token& t, const std::string& what) const {
                std::string found;
                switch (t.kind) {
                    case token_kind::newline:
                        found = "end of line";
                        break;
                    case token_kind::indent:
                        found = "indent";
                        break;
                    case token_kind::dedent:
                        found = "dedent";
                        break;
                    case token_kind::end:
                        found = "end of input";
                        break;
                    default:
                        found = "'" + t.text + "'";
                }
                throw syntax_error(what + ", found " + found, t.span.line, t.span.column);
            }

            bool is_op(std::string_view op) const { return cur().kind == token_kind::op && cur().text == op; }
            bool is_kw(std::string_view kw) const { return cur().kind == token_kind::name && cur().text == kw; }

            token take() { return toks_[pos_++]; }

            token expect_op(std::string_view op) {
                if (!is_op(op)) {
                    fail(cur(), "expected '" + std::string{op} + "'");
                }
                return take();
            }

            void expect_kw(std::string_view kw) {
                if (!is_kw(kw)) {
                    fail(cur(), "expected '" + std::string{kw} + "'");
                }
                take();
            }

            std::string expect_identifier(const char* what) {
                if (cur().kind != token_kind::name || is_keyword(cur().text)) {
                    fail(cur(), std::string{"expected "} + what);
                }
                return take().text;
            }

            std::string expect_bindable(const char* what) {
                const token& t = cur();
                auto name = expect_identifier(what);
                if (is_builtin_name(name)) {
                    throw syntax_error("cannot rebind builtin '" + name + "'", t.span.line, t.span.column);
                }
                return name;
            }

            void expect_newline() {
                if (cur().kind == token_kind::newline) {
                    take();
                    return;
                }
                if (cur().kind == token_kind::end || cur().kind == token_kind::dedent) {
                    return;
                }
                fail(cur(), "expected end of statement");
            }

            void skip_newlines() {
                while (cur().kind == token_kind::newline) {
                    take();
                }
            }

            block parse_block() {
                expect_op(":");
                if (cur().kind != token_kind::newline) {
                    fail(cur(), "expected a newline before an indented block");
                }
                take();
                skip_newlines();
                if (cur().kind != token_kind::indent) {
                    fail(cur(), "expected an indented block");
                }
                take();
                block body;
                skip_newlines();
                while (cur().kind != token_kind::dedent && !at_end()) {
                    body.push_back(parse_statement());
                    skip_newlines();
                }
                if (cur().kind == token_kind::dedent) {
                    take();
                }
                return body;
            }

            stmt_ptr make_stmt(stmt::node_type node, source_span span) {
                auto s = std::make_unique<stmt>();
                s->node = std::move(node);
                s->span = span;
                return s;
            }

            stmt_ptr parse_statement() {
                const token& t = cur();
                if (t.kind == token_kind::indent) {
                    fail(t, "unexpected indent");
                }
                if (t.kind == token_kind::name) {
                    if (t.text == "if") {
                        return parse_if();
                    }
                    if (t.text == "while") {
                        take();
                        auto cond = parse_expr();
                        auto body = parse_block();
                        return make_stmt(while_stmt{std::move(cond), std::move(body)}, t.span);
                    }
                    if (t.text == "for") {
                        take();
                        auto target = expect_bindable("loop variable");
                        expect_kw("in");
                        auto iter = parse_expr();
                        auto body = parse_block();
                        return make_stmt(for_stmt{std::move(target), std::move(iter), std::move(body)}, t.span);
                    }
                    if (t.text == "def") {
                        return parse_def();
                    }
                    if (t.text == "return") {
                        take();
                        if (function_depth_ == 0) {
                            throw syntax_error("'return' outside function", t.span.line, t.span.column);
                        }
                        expr_ptr value;
                        if (cur().kind != token_kind::newline && cur().kind != token_kind::end &&
                            cur().kind != token_kind::dedent) {
                            value = parse_expr();
                        }
                        expect_newline();
                        return make_stmt(return_stmt{std::move(value)}, t.span);
                    }
                    if (t.text == "del") {
                        take();
                        auto target = parse_expr();
                        check_target(*target, "delete");
                        expect_newline();
                        return make_stmt(del_stmt{std::move(target)}, t.span);
                    }
                    if (t.text == "pass") {
                        take();
                        expect_newline();
                        return make_stmt(pass_stmt{}, t.span);
                    }
                    if (t.text == "elif" || t.text == "else") {
                        fail(t, "unexpected '" + t.text + "'");
                    }
                }
                return parse_simple();
            }

            stmt_ptr parse_if() {
                source_span span = cur().span;
                take();
                if_stmt node;
                auto cond = parse_expr();
                node.branches.push_back(if_branch{std::move(cond), parse_block()});
                while (is_kw("elif")) {
                    take();
                    auto c = parse_expr();
                    node.branches.push_back(if_branch{std::move(c), parse_block()});
                }
                if (is_kw("else")) {
                    take();
                    node.orelse = parse_block();
                }
                return make_stmt(std::move(node), span);
            }

            stmt_ptr parse_def() {
                source_span span = cur().span;
                take();
                func_def_stmt node;
                node.name = expect_bindable("function name");
                expect_op("(");
                if (!is_op(")")) {
                    while (true) {
                        auto p = expect_bindable("parameter name");
                        if (std::find(node.params.begin(), node.params.end(), p) != node.params.end()) {
                            throw syntax_error("duplicate parameter '" + p + "'", span.line, span.column);
                        }
                        node.params.push_back(std::move(p));
                        if (is_op(",")) {
                            take();
                            if (is_op(")")) {
                                break;
                            }
                            continue;
                        }
                        break;
                    }
                }
                expect_op(")");
                ++function_depth_;
                node.body = parse_block();
                --function_depth_;
                return make_stmt(std::move(node), span);
            }

            void check_target(const expr& e, const char* verb) {
                if (auto n = e.as<name_expr>()) {
                    if (is_builtin_name(n->id)) {
                        throw syntax_error(std::string{"cannot "} + verb + " builtin '" + n->id + "'",
                                           e.span.line,
                                           e.span.column);
                    }
                    return;
                }
                if (e.as<attribute_expr>() || e.as<subscript_expr>()) {
                    return;
                }
                throw syntax_error(std::string{"cannot "} + verb + " this expression", e.span.line, e.span.column);
            }

            stmt_ptr parse_simple() {
                source_span span = cur().span;
                auto lhs = parse_expr();
                if (is_op("=")) {
                    check_target(*lhs, "assign to");
                    take();
                    auto value = parse_expr();
                    expect_newline();
                    return make_stmt(assign_stmt{std::move(lhs), std::move(value)}, span);
                }
                static constexpr std::array<std::pair<std::string_view, binary_op>, 4> aug = {
                        {{"+=", binary_op::add}, {"-=", binary_op::sub}, {"*=", binary_op::mul}, {"/=", binary_op::div}}};
                for (auto [text, op] : aug) {
                    if (is_op(text)) {
                        check_target(*lhs, "assign to");
                        take();
                        auto value = parse_expr();
                        expect_newline();
                        return make_stmt(aug_assign_stmt{std::move(lhs), op, std::move(value)}, span);
                    }
                }
                expect_newline();
                return make_stmt(expr_stmt{std::move(lhs)}, span);
            }

            expr_ptr make_expr(expr::node_type node, source_span span) {
                auto e = std::make_unique<expr>();
                e->node = std::move(node);
                e->span = span;
                return e;
            }

            expr_ptr parse_expr() {
                if (is_kw("lambda")) {
                    return parse_lambda();
                }
                return parse_or();
            }

            expr_ptr parse_lambda() {
                source_span span = cur().span;
                take();
                lambda_expr node;
                if (!is_op(":")) {
                    while (true) {
                        auto p = expect_bindable("lambda parameter");
                        if (std::find(node.params.begin(), node.params.end(), p) != node.params.end()) {
                            throw syntax_error("duplicate parameter '" + p + "'", span.line, span.column);
                        }
                        node.params.push_back(std::move(p));
                        if (is_op(",")) {
                            take();
                            continue;
                        }
                        break;
                    }
                }
                expect_op(":");
                node.body = parse_expr();
                return make_expr(std::move(node), span);
            }

            expr_ptr parse_or() {
                auto lhs = parse_and();
                while (is_kw("or")) {
                    source_span span = take().span;
                    auto rhs = parse_and();
                    lhs = make_expr(binary_expr{binary_op::logical_or, std::move(lhs), std::move(rhs)}, span);
                }
                return lhs;
            }

            expr_ptr parse_and() {
                auto lhs = parse_not();
                while (is_kw("and")) {
                    source_span span = take().span;
                    auto rhs = parse_not();
                    lhs = make_expr(binary_expr{binary_op::logical_and, std::move(lhs), std::move(rhs)}, span);
                }
                return lhs;
            }

            expr_ptr parse_not() {
                if (is_kw("not")) {
                    source_span span = take().span;
                    auto operand = parse_not();
                    return make_expr(unary_expr{unary_op::logical_not, std::move(operand)}, span);
                }
                return parse_comparison();
            }

            expr_ptr parse_comparison() {
                auto lhs = parse_additive();
                static constexpr std::array<std::pair<std::string_view, compare_op>, 6> ops = {{{"==", compare_op::eq},
                                                                                                {"!=", compare_op::ne},
                                                                                                {"<=", compare_op::le},
                                                                                                {">=", compare_op::ge},
                                                                                                {"<", compare_op::lt},
                                                                                                {">", compare_op::gt}}};
                for (auto [text, op] : ops) {
                    if (is_op(text)) {
                        source_span span = take().span;
                        auto rhs = parse_additive();
                        for (auto [t2, op2] : ops) {
                            (void)op2;
                            if (is_op(t2)) {
                                fail(cur(), "chained comparisons are not supported");
                            }
                        }
                        return make_expr(compare_expr{op, std::move(lhs), std::move(rhs)}, span);
                    }
                }
                return lhs;
            }

            expr_ptr parse_additive() {
                auto lhs = parse_term();
                while (is_op("+") || is_op("-")) {
                    auto t = take();
                    auto rhs = parse_term();
                    lhs = make_expr(binary_expr{t.text == "+" ? binary_op::add : binary_op::sub, std::move(lhs),
                                                std::move(rhs)},
                                    t.span);
                }
                return lhs;
            }

            expr_ptr parse_term() {
                auto lhs = parse_unary();
                while (is_op("*") || is_op("/") || is_op("//") || is_op("%")) {
                    auto t = take();
                    binary_op op = t.text == "*"    ? binary_op::mul
                                   : t.text == "/"  ? binary_op::div
                                   : t.text == "//" ? binary_op::floor_div
                                                    : binary_op::mod;
                    auto rhs = parse_unary();
                    lhs = make_expr(binary_expr{op, std::move(lhs), std::move(rhs)}, t.span);
                }
                return lhs;
            }

            expr_ptr parse_unary() {
                if (is_op("-")) {
                    source_span span = take().span;
                    auto operand = parse_unary();
                    return make_expr(unary_expr{unary_op::negate, std::move(operand)}, span);
                }
                return parse_postfix();
            }

            expr_ptr parse_postfix() {
                auto e = parse_atom();
                while (true) {
                    if (is_op("(")) {
                        source_span span = take().span;
                        call_expr call{std::move(e), {}};
                        if (!is_op(")")) {
                            while (true) {
                                call.args.push_back(parse_expr());
                                if (is_op(",")) {
                                    take();
                                    if (is_op(")")) {
                                        break;
                                    }
                                    continue;
                                }
                                break;
                            }
                        }
                        expect_op(")");
                        e = make_expr(std::move(call), span);
                    }
                    else if (is_op(".")) {
                        source_span span = take().span;
                        auto name = expect_identifier("attribute name");
                        e = make_expr(attribute_expr{std::move(e), std::move(name)}, span);
                    }
                    else if (is_op("[")) {
                        source_span span = take().span;
                        auto index = parse_expr();
                        expect_op("]");
                        e = make_expr(subscript_expr{std::move(e), std::move(index)}, span);
                    }
                    else {
                        return e;
                    }
                }
            }

            expr_ptr parse_atom() {
                const token& t = cur();
                switch (t.kind) {
                    case token_kind::integer:
                        take();
                        return make_expr(literal_expr{t.int_value}, t.span);
                    case token_kind::floating:
                        take();
                        return make_expr(literal_expr{t.float_value}, t.span);
                    case token_kind::string: {
                        auto tok = take();
                        return make_expr(literal_expr{std::move(tok.text)}, tok.span);
                    }
                    case token_kind::name: {
                        if (t.text == "True" || t.text == "False") {
                            take();
                            return make_expr(literal_expr{t.text == "True"}, t.span);
                        }
                        if (t.text == "None") {
                            take();
                            return make_expr(literal_expr{none_literal{}}, t.span);
                        }
                        if (is_keyword(t.text)) {
                            fail(t, "expected an expression");
                        }
                        auto tok = take();
                        return make_expr(name_expr{std::move(tok.text)}, tok.span);
                    }
                    case token_kind::op:
                        if (t.text == "(") {
                            take();
                            auto inner = parse_expr();
                            expect_op(")");
                            return inner;
                        }
                        if (t.text == "[") {
                            source_span span = take().span;
                            list_expr node;
                            while (!is_op("]")) {
                                node.items.push_back(parse_expr());
                                if (!is_op(",")) {
                                    break;
                                }
                                take();
                            }
                            expect_op("]");
                            return make_expr(std::move(node), span);
                        }
                        if (t.text == "{") {
                            source_span span = take().span;
                            dict_expr node;
                            while (!is_op("}")) {
                                auto key = parse_expr();
                                expect_op(":");
                                auto value = parse_expr();
                                node.entries.emplace_back(std::move(key), std::move(value));
                                if (!is_op(",")) {
                                    break;
                                }
                                take();
                            }
                            expect_op("}");
                            return make_expr(std::move(node), span);
                        }
                        break;
                    default:
                        break;
                }
                fail(t, "expected an expression");
            }

            std::vector<token> toks_;
            std::size_t pos_{0};
            int function_depth_{0};
        };

        // Numbers statements in pre-order and computes lambda/function scopes.
        class scope_pass {
          public:
            void run(program& p) {
                for (auto& s : p.body) {
                    visit(*s);
                }
                p.statement_count = next_index_;
            }

          private:
            void visit_block(block& b) {
                for (auto& s : b) {
                    visit(*s);
                }
            }

            void visit(stmt& s) {
                s.index = next_index_++;
                std::visit(
                        [&](auto& node) {
                            using T = std::decay_t<decltype(node)>;
                            if constexpr (std::is_same_v<T, assign_stmt>) {
                                visit_expr(*node.target);
                                visit_expr(*node.value);
                            }
                            else if constexpr (std::is_same_v<T, aug_assign_stmt>) {
                                visit_expr(*node.target);
                                visit_expr(*node.value);
                            }
                            else if constexpr (std::is_same_v<T, expr_stmt>) {
                                visit_expr(*node.value);
                            }
                            else if constexpr (std::is_same_v<T, if_stmt>) {
                                for (auto& br : node.branches) {
                                    visit_expr(*br.cond);
                                    visit_block(br.body);
                                }
                                if (node.orelse) {
                                    visit_block(*node.orelse);
                                }
                            }
                            else if constexpr (std::is_same_v<T, while_stmt>) {
                                visit_expr(*node.cond);
                                visit_block(node.body);
                            }
                            else if constexpr (std::is_same_v<T, for_stmt>) {
                                visit_expr(*node.iter);
                                visit_block(node.body);
                            }
                            else if constexpr (std::is_same_v<T, func_def_stmt>) {
                                node.locals.insert(node.params.begin(), node.params.end());
                                collect_bound(node.body, node.locals);
                                scopes_.push_back(node.locals);
                                visit_block(node.body);
                                scopes_.pop_back();
                                finish_function(node);
                            }
                            else if constexpr (std::is_same_v<T, return_stmt>) {
                                if (node.value) {
                                    visit_expr(*node.value);
                                }
                            }
                            else if constexpr (std::is_same_v<T, del_stmt>) {
                                visit_expr(*node.target);
                            }
                        },
                        s.node);
            }

            void visit_expr(expr& e) {
                std::visit(
                        [&](auto& node) {
                            using T = std::decay_t<decltype(node)>;
                            if constexpr (std::is_same_v<T, list_expr>) {
                                for (auto& i : node.items) {
                                    visit_expr(*i);
                                }
                            }
                            else if constexpr (std::is_same_v<T, dict_expr>) {
                                for (auto& [k, v] : node.entries) {
                                    visit_expr(*k);
                                    visit_expr(*v);
                                }
                            }
                            else if constexpr (std::is_same_v<T, attribute_expr>) {
                                visit_expr(*node.object);
                            }
                            else if constexpr (std::is_same_v<T, subscript_expr>) {
                                visit_expr(*node.object);
                                visit_expr(*node.index);
                            }
                            else if constexpr (std::is_same_v<T, call_expr>) {
                                visit_expr(*node.callee);
                                for (auto& a : node.args) {
                                    visit_expr(*a);
                                }
                            }
                            else if constexpr (std::is_same_v<T, lambda_expr>) {
                                scopes_.emplace_back(node.params.begin(), node.params.end());
                                visit_expr(*node.body);
                                scopes_.pop_back();
                                name_set inner = expr_uses(*node.body);
                                for (const auto& n : inner) {
                                    if (std::find(node.params.begin(), node.params.end(), n.base()) ==
                                                node.params.end() &&
                                        !bound_in_enclosing(n.base())) {
                                        node.free_names.insert(n);
                                    }
                                }
                            }
                            else if constexpr (std::is_same_v<T, unary_expr>) {
                                visit_expr(*node.operand);
                            }
                            else if constexpr (std::is_same_v<T, binary_expr>) {
                                visit_expr(*node.lhs);
                                visit_expr(*node.rhs);
                            }
                            else if constexpr (std::is_same_v<T, compare_expr>) {
                                visit_expr(*node.lhs);
                                visit_expr(*node.rhs);
                            }
                        },
                        e.node);
            }

            static void collect_bound(const block& b, std::set<std::string>& out) {
                for (const auto& s : b) {
                    std::visit(
                            [&](const auto& node) {
                                using T = std::decay_t<decltype(node)>;
                                if constexpr (std::is_same_v<T, assign_stmt> || std::is_same_v<T, aug_assign_stmt> ||
                                              std::is_same_v<T, del_stmt>) {
                                    if (auto n = node.target->template as<name_expr>()) {
                                        out.insert(n->id);
                                    }
                                }
                                else if constexpr (std::is_same_v<T, for_stmt>) {
                                    out.insert(node.target);
                                    collect_bound(node.body, out);
                                }
                                else if constexpr (std::is_same_v<T, func_def_stmt>) {
                                    out.insert(node.name);
                                }
                                else if constexpr (std::is_same_v<T, if_stmt>) {
                                    for (const auto& br : node.branches) {
                                        collect_bound(br.body, out);
                                    }
                                    if (node.orelse) {
                                        collect_bound(*node.orelse, out);
                                    }
                                }
                                else if constexpr (std::is_same_v<T, while_stmt>) {
                                    collect_bound(node.body, out);
                                }
                            },
                            s->node);
                }
            }

            static void collect_uses(const block& b, name_set& out) {
                for (const auto& s : b) {
                    std::visit(
                            [&](const auto& node) {
                                using T = std::decay_t<decltype(node)>;
                                if constexpr (std::is_same_v<T, if_stmt>) {
                                    for (const auto& br : node.branches) {
                                        auto u = expr_uses(*br.cond);
                                        out.insert(u.begin(), u.end());
                                        collect_uses(br.body, out);
                                    }
                                    if (node.orelse) {
                                        collect_uses(*node.orelse, out);
                                    }
                                }
                                else if constexpr (std::is_same_v<T, while_stmt>) {
                                    auto u = expr_uses(*node.cond);
                                    out.insert(u.begin(), u.end());
                                    collect_uses(node.body, out);
                                }
                                else if constexpr (std::is_same_v<T, for_stmt>) {
                                    auto u = expr_uses(*node.iter);
                                    out.insert(u.begin(), u.end());
                                    collect_uses(node.body, out);
                                }
                                else if constexpr (std::is_same_v<T, func_def_stmt>) {
                                    out.insert(node.free_names.begin(), node.free_names.end());
                                }
                                else if constexpr (std::is_same_v<T, return_stmt>) {
                                    if (node.value) {
                                        auto u = expr_uses(*node.value);
                                        out.insert(u.begin(), u.end());
                                    }
                                }
                                else {
                                    auto ud = use_def(*s);
                                    out.insert(ud.use_set.begin(), ud.use_set.end());
                                }
                            },
                            s->node);
                }
            }

            bool bound_in_enclosing(const std::string& base) const {
                for (const auto& scope : scopes_) {
                    if (scope.contains(base)) {
                        return true;
                    }
                }
                return false;
            }

            void finish_function(func_def_stmt& f) const {
                name_set uses;
                collect_uses(f.body, uses);
                for (const auto& n : uses) {
                    if (!f.locals.contains(n.base()) && !bound_in_enclosing(n.base())) {
                        f.free_names.insert(n);
                    }
                }
            }

            int next_index_{0};
            std::vector<std::set<std::string>> scopes_;
        };

    }  // namespace

    program parse_cell(std::string_view text) {
        parser p{detail::tokenize(text)};
        auto prog = p.parse_program();
        scope_pass{}.run(prog);
        return prog;
    }

}  // namespace cellguard::lang
