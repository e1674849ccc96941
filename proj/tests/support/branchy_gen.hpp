#pragma once

#include <random>
#include <string>

namespace cellguard::testing {

    // Acyclic cells dominated by if/elif/else over a small set of plain and
    // qualified names.
    class branchy_generator {
      public:
        explicit branchy_generator(unsigned seed) : rng_(seed) {}

        std::string cell(int max_stmts, int max_branches) {
            branches_left_ = max_branches;
            std::string out;
            int n = pick(1, max_stmts);
            for (int i = 0; i < n; ++i) {
                out += statement(0);
            }
            return out;
        }

      private:
        int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

        std::string target() {
            static const char* names[] = {"a", "b", "c", "d.k", "xs[0]", "a", "b"};
            return names[pick(0, 6)];
        }

        std::string operand() {
            static const char* names[] = {"a", "b", "c", "d", "d.k", "xs", "xs[0]", "xs[i]", "1", "2"};
            return names[pick(0, 9)];
        }

        std::string expr() {
            switch (pick(0, 4)) {
                case 0:
                    return operand();
                case 1:
                    return operand() + " + " + operand();
                case 2:
                    return "len(" + operand() + ")";
                case 3:
                    return "f(" + operand() + ")";
                default:
                    return "lambda v: v + " + operand();
            }
        }

        std::string statement(int depth) {
            std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
            int roll = pick(0, 9);
            if (roll < 4 && branches_left_ > 0 && depth < 3) {
                --branches_left_;
                std::string s = pad + "if " + operand() + " > " + operand() + ":\n" + body(depth + 1);
                while (branches_left_ > 0 && pick(0, 2) == 0) {
                    --branches_left_;
                    s += pad + "elif " + operand() + ":\n" + body(depth + 1);
                }
                if (pick(0, 1)) {
                    s += pad + "else:\n" + body(depth + 1);
                }
                return s;
            }
            switch (roll) {
                case 4:
                    return pad + target() + " += " + operand() + "\n";
                case 5:
                    return pad + "print(" + expr() + ")\n";
                case 6:
                    return pad + "def f(p):\n" + pad + "    return p + " + operand() + "\n";
                default:
                    return pad + target() + " = " + expr() + "\n";
            }
        }

        std::string body(int depth) {
            std::string s;
            for (int i = pick(1, 2); i > 0; --i) {
                s += statement(depth);
            }
            return s;
        }

        std::mt19937 rng_;
        int branches_left_{0};
    };

}  // namespace cellguard::testing
