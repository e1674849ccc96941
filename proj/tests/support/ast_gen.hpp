#pragma once

#include "cellguard/lang/ast.hpp"

#include <random>
#include <string>
#include <vector>

namespace cellguard::testing {

    // Random syntax trees covering every node type. Trees are valid input to
    // the printer; they are not meant to run without errors.
    class ast_generator {
      public:
        explicit ast_generator(std::uint64_t seed) : rng_(seed) {}

        lang::program program(int max_stmts = 6) {
            lang::program p;
            int n = pick(0, max_stmts);
            for (int i = 0; i < n; ++i) {
                p.body.push_back(statement(2, false));
            }
            return p;
        }

        lang::expr_ptr expression(int depth) {
            using namespace lang;
            int choice = depth <= 0 ? pick(0, 1) : pick(0, 10);
            switch (choice) {
                case 0:
                    return make(name_expr{name()});
                case 1:
                    return make(literal_expr{literal_value()});
                case 2: {
                    list_expr l;
                    for (int i = pick(0, 3); i > 0; --i) {
                        l.items.push_back(expression(depth - 1));
                    }
                    return make(std::move(l));
                }
                case 3: {
                    dict_expr d;
                    for (int i = pick(0, 2); i > 0; --i) {
                        d.entries.emplace_back(make(literal_expr{lang::literal{name()}}), expression(depth - 1));
                    }
                    return make(std::move(d));
                }
                case 4:
                    return make(attribute_expr{expression(depth - 1), name()});
                case 5:
                    return make(subscript_expr{expression(depth - 1), expression(depth - 1)});
                case 6: {
                    call_expr c{expression(depth - 1), {}};
                    for (int i = pick(0, 2); i > 0; --i) {
                        c.args.push_back(expression(depth - 1));
                    }
                    return make(std::move(c));
                }
                case 7: {
                    lambda_expr l;
                    l.params = distinct_names(pick(0, 2));
                    l.body = expression(depth - 1);
                    return make(std::move(l));
                }
                case 8:
                    return make(unary_expr{pick(0, 1) ? unary_op::negate : unary_op::logical_not,
                                           expression(depth - 1)});
                case 9:
                    return make(binary_expr{static_cast<binary_op>(pick(0, 7)),
                                            expression(depth - 1),
                                            expression(depth - 1)});
                default:
                    return make(compare_expr{static_cast<compare_op>(pick(0, 5)),
                                             expression(depth - 1),
                                             expression(depth - 1)});
            }
        }

        lang::stmt_ptr statement(int depth, bool in_function) {
            using namespace lang;
            int top = depth <= 0 ? 3 : 8;
            int choice = pick(0, top);
            if (choice == 3 && !in_function) {
                choice = 0;
            }
            switch (choice) {
                case 0:
                    return make_stmt(assign_stmt{target(), expression(2)});
                case 1:
                    return make_stmt(aug_assign_stmt{target(), static_cast<binary_op>(pick(0, 3)), expression(2)});
                case 2:
                    return make_stmt(expr_stmt{expression(2)});
                case 3:
                    return make_stmt(return_stmt{pick(0, 1) ? expression(2) : nullptr});
                case 4: {
                    if_stmt s;
                    for (int i = pick(1, 3); i > 0; --i) {
                        s.branches.push_back(if_branch{expression(2), body(depth - 1, in_function)});
                    }
                    if (pick(0, 1)) {
                        s.orelse = body(depth - 1, in_function);
                    }
                    return make_stmt(std::move(s));
                }
                case 5:
                    return make_stmt(while_stmt{expression(2), body(depth - 1, in_function)});
                case 6:
                    return make_stmt(for_stmt{name(), expression(2), body(depth - 1, in_function)});
                case 7: {
                    func_def_stmt f;
                    f.name = name();
                    f.params = distinct_names(pick(0, 3));
                    f.body = body(depth - 1, true);
                    return make_stmt(std::move(f));
                }
                default:
                    return pick(0, 1) ? make_stmt(del_stmt{target()}) : make_stmt(pass_stmt{});
            }
        }

      private:
        int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

        std::string name() {
            static const char* names[] = {"a", "b", "xs", "df", "total", "f", "g", "item", "k", "_tmp"};
            return names[pick(0, 9)];
        }

        std::vector<std::string> distinct_names(int n) {
            std::vector<std::string> out;
            while (static_cast<int>(out.size()) < n) {
                auto s = name();
                if (std::find(out.begin(), out.end(), s) == out.end()) {
                    out.push_back(s);
                }
            }
            return out;
        }

        lang::literal literal_value() {
            switch (pick(0, 4)) {
                case 0:
                    return lang::none_literal{};
                case 1:
                    return pick(0, 1) == 1;
                case 2:
                    return static_cast<std::int64_t>(pick(0, 100000));
                case 3:
                    return pick(0, 4000) / 16.0;
                default: {
                    static const char* strings[] = {"", "abc", "two words", "q\"uote", "tab\there", "nl\n", "back\\"};
                    return std::string{strings[pick(0, 6)]};
                }
            }
        }

        lang::expr_ptr target() {
            using namespace lang;
            switch (pick(0, 2)) {
                case 0:
                    return make(name_expr{name()});
                case 1:
                    return make(attribute_expr{make(name_expr{name()}), name()});
                default:
                    return make(subscript_expr{make(name_expr{name()}), expression(1)});
            }
        }

        lang::block body(int depth, bool in_function) {
            lang::block b;
            for (int i = pick(1, 3); i > 0; --i) {
                b.push_back(statement(depth, in_function));
            }
            return b;
        }

        static lang::expr_ptr make(lang::expr::node_type node) {
            auto e = std::make_unique<lang::expr>();
            e->node = std::move(node);
            return e;
        }

        static lang::stmt_ptr make_stmt(lang::stmt::node_type node) {
            auto s = std::make_unique<lang::stmt>();
            s->node = std::move(node);
            return s;
        }

        std::mt19937_64 rng_;
    };

}  // namespace cellguard::testing
