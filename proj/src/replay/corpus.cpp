#include "cellguard/replay/corpus.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <set>
#include <stdexcept>

namespace cellguard::replay {

    namespace {

        struct cell_model {
            std::string name;
            int kind{0};
            std::array<int, 2> refs{-1, -1};
            std::array<int, 2> literals{1, 1};
            int constant{1};
            std::string text;
        };

        class session_builder {
          public:
            session_builder(std::uint64_t seed, const corpus_params& p) : rng_(seed), params_(p) {}

            session_log build(std::string name) {
                log_.name = std::move(name);
                double revisit = std::clamp(params_.edit_rate, 0.0, 0.95);
                while (static_cast<int>(cells_.size()) < params_.cells) {
                    if (!cells_.empty() && chance(revisit)) {
                        revisit_cell();
                    }
                    else {
                        add_cell();
                    }
                }
                return std::move(log_);
            }

          private:
            bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

            int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

            std::string fresh_name() {
                static const std::set<std::string> reserved{"lambda", "return", "append", "sample", "elif",
                                                            "while", "print", "range", "False", "None"};
                for (;;) {
                    std::string s;
                    for (int i = 0; i < 6; ++i) {
                        s += static_cast<char>('a' + pick(0, 25));
                    }
                    if (!reserved.contains(s) && names_.insert(s).second) {
                        return s;
                    }
                }
            }

            std::string operand(const cell_model& c, int slot) const {
                auto i = static_cast<std::size_t>(slot);
                return c.refs[i] >= 0 ? cells_[static_cast<std::size_t>(c.refs[i])].name : std::to_string(c.literals[i]);
            }

            std::string render(const cell_model& c) const {
                const std::string& n = c.name;
                std::string a = operand(c, 0);
                std::string b = operand(c, 1);
                std::string k = std::to_string(c.constant);
                switch (c.kind) {
                    case 0:
                        return n + " = (" + a + " * " + k + " + " + b + ") % 1000\n";
                    case 1:
                        return n + " = 0\nfor i in range(" + std::to_string(params_.loop_iterations) + "):\n    " + n +
                               " = (" + n + " + " + a + " * i + " + k + ") % 1000\n";
                    case 2:
                        return "def " + n + "_fn(p):\n    return (p + " + a + " * " + k + ") % 1000\n" + n + " = " + n +
                               "_fn(" + b + ")\n";
                    case 3:
                        return n + "_xs = [" + a + ", " + b + ", " + k + "]\n" + n + " = (len(" + n + "_xs) + " + n +
                               "_xs[0] * " + n + "_xs[2]) % 1000\n";
                    default:
                        return "if " + a + " > " + b + ":\n    " + n + " = (" + a + " + " + k + ") % 1000\nelse:\n    " +
                               n + " = (" + b + " * " + k + ") % 1000\n";
                }
            }

            // True when `text` is below the identity threshold against every
            // cell other than `self`.
            bool distinct(const std::string& text, int self) const {
                for (std::size_t i = 0; i < cells_.size(); ++i) {
                    const auto& other = cells_[i].text;
                    auto [lo, hi] = std::minmax(text.size(), other.size());
                    if (static_cast<double>(lo) < identity_threshold * static_cast<double>(hi)) {
                        continue;
                    }
                    if (static_cast<int>(i) != self && similarity(text, other) >= identity_threshold) {
                        return false;
                    }
                }
                return true;
            }

            void emit(int index) {
                const auto& c = cells_[static_cast<std::size_t>(index)];
                auto m = ids_.infer(c.text);
                if (m.id != "c" + std::to_string(index + 1)) {
                    throw std::logic_error("generated cell text is ambiguous");
                }
                log_.entries.push_back({++counter_, c.text});
            }

            void add_cell() {
                int index = static_cast<int>(cells_.size());
                cell_model c;
                c.name = fresh_name();
                for (int attempt = 0;; ++attempt) {
                    c.kind = pick(0, 4);
                    for (std::size_t s = 0; s < 2; ++s) {
                        c.refs[s] = index > 0 && chance(params_.dependency_density) ? pick(0, index - 1) : -1;
                        c.literals[s] = pick(1, 9);
                    }
                    c.constant = pick(1, 9);
                    c.text = render(c);
                    if (distinct(c.text, -1)) {
                        break;
                    }
                    if (attempt == 1000) {
                        throw std::logic_error("cannot generate a distinct cell");
                    }
                }
                for (int r : c.refs) {
                    if (r >= 0) {
                        dependents_[static_cast<std::size_t>(r)].insert(index);
                    }
                }
                cells_.push_back(std::move(c));
                dependents_.emplace_back();
                emit(index);
            }

            // Prefers elements that themselves have dependents.
            int choose(const std::vector<int>& pool) {
                std::vector<int> deep;
                for (int i : pool) {
                    if (!dependents_[static_cast<std::size_t>(i)].empty()) {
                        deep.push_back(i);
                    }
                }
                const auto& from = deep.empty() ? pool : deep;
                return from[static_cast<std::size_t>(pick(0, static_cast<int>(from.size()) - 1))];
            }

            void revisit_cell() {
                std::vector<int> all(cells_.size());
                for (std::size_t i = 0; i < all.size(); ++i) {
                    all[i] = static_cast<int>(i);
                }
                int k = choose(all);
                auto& c = cells_[static_cast<std::size_t>(k)];
                if (chance(params_.edit_text_rate)) {
                    cell_model edited = c;
                    while (edited.constant == c.constant) {
                        edited.constant = pick(1, 9);
                    }
                    edited.text = render(edited);
                    if (distinct(edited.text, k) && similarity(edited.text, c.text) >= identity_threshold) {
                        c = std::move(edited);
                    }
                }
                emit(k);
                const auto& deps = dependents_[static_cast<std::size_t>(k)];
                if (!deps.empty() && chance(params_.refresher_rerun)) {
                    emit(choose(std::vector<int>(deps.begin(), deps.end())));
                }
                else {
                    emit(pick(0, static_cast<int>(cells_.size()) - 1));
                }
            }

            std::mt19937_64 rng_;
            corpus_params params_;
            std::vector<cell_model> cells_;
            std::vector<std::set<int>> dependents_;
            std::set<std::string> names_;
            identity_map ids_;
            session_log log_;
            std::int64_t counter_{0};
        };

    }  // namespace

    std::vector<session_log> generate_corpus(std::uint64_t seed, int sessions, const corpus_params& params) {
        std::vector<session_log> out;
        std::mt19937_64 seeds(seed);
        for (int i = 0; i < sessions; ++i) {
            session_builder b(seeds(), params);
            out.push_back(b.build("session-" + std::to_string(i + 1)));
        }
        return out;
    }

}  // namespace cellguard::replay
