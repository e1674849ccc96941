#include "cellguard/lang/parser.hpp"

#include <cstdio>
#include <sstream>

namespace cellguard::lang {

    namespace {

        std::string quote(const std::string& s) {
            std::string out = "\"";
            for (char c : s) {
                switch (c) {
                    case '\n':
                        out += "\\n";
                        break;
                    case '\t':
                        out += "\\t";
                        break;
                    case '\\':
                        out += "\\\\";
                        break;
                    case '"':
                        out += "\\\"";
                        break;
                    default:
                        out.push_back(c);
                }
            }
            out.push_back('"');
            return out;
        }

        std::string format_double(double v) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            std::string s = buf;
            if (s.find_first_of(".eEn") == std::string::npos) {
                s += ".0";
            }
            return s;
        }

        std::string literal_text(const literal& v) {
            return std::visit(
                    [](const auto& x) -> std::string {
                        using T = std::decay_t<decltype(x)>;
                        if constexpr (std::is_same_v<T, none_literal>) {
                            return "None";
                        }
                        else if constexpr (std::is_same_v<T, bool>) {
                            return x ? "True" : "False";
                        }
                        else if constexpr (std::is_same_v<T, std::int64_t>) {
                            return std::to_string(x);
                        }
                        else if constexpr (std::is_same_v<T, double>) {
                            return format_double(x);
                        }
                        else {
                            return quote(x);
                        }
                    },
                    v);
        }

        std::string join_params(const std::vector<std::string>& params) {
            std::string out;
            for (std::size_t i = 0; i < params.size(); ++i) {
                if (i) {
                    out += ", ";
                }
                out += params[i];
            }
            return out;
        }

        void print_expr(const expr& e, std::string& out);

        void print_list(const std::vector<expr_ptr>& items, std::string& out) {
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (i) {
                    out += ", ";
                }
                print_expr(*items[i], out);
            }
        }

        void print_expr(const expr& e, std::string& out) {
            std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, name_expr>) {
                            out += n.id;
                        }
                        else if constexpr (std::is_same_v<T, literal_expr>) {
                            out += literal_text(n.value);
                        }
                        else if constexpr (std::is_same_v<T, list_expr>) {
                            out += "[";
                            print_list(n.items, out);
                            out += "]";
                        }
                        else if constexpr (std::is_same_v<T, dict_expr>) {
                            out += "{";
                            for (std::size_t i = 0; i < n.entries.size(); ++i) {
                                if (i) {
                                    out += ", ";
                                }
                                print_expr(*n.entries[i].first, out);
                                out += ": ";
                                print_expr(*n.entries[i].second, out);
                            }
                            out += "}";
                        }
                        else if constexpr (std::is_same_v<T, attribute_expr>) {
                            bool wrap = n.object->template as<literal_expr>() != nullptr;
                            out += wrap ? "(" : "";
                            print_expr(*n.object, out);
                            out += wrap ? ")" : "";
                            out += ".";
                            out += n.name;
                        }
                        else if constexpr (std::is_same_v<T, subscript_expr>) {
                            print_expr(*n.object, out);
                            out += "[";
                            print_expr(*n.index, out);
                            out += "]";
                        }
                        else if constexpr (std::is_same_v<T, call_expr>) {
                            print_expr(*n.callee, out);
                            out += "(";
                            print_list(n.args, out);
                            out += ")";
                        }
                        else if constexpr (std::is_same_v<T, lambda_expr>) {
                            out += "(lambda";
                            if (!n.params.empty()) {
                                out += " " + join_params(n.params);
                            }
                            out += ": ";
                            print_expr(*n.body, out);
                            out += ")";
                        }
                        else if constexpr (std::is_same_v<T, unary_expr>) {
                            out += n.op == unary_op::negate ? "(-" : "(not ";
                            print_expr(*n.operand, out);
                            out += ")";
                        }
                        else if constexpr (std::is_same_v<T, binary_expr>) {
                            out += "(";
                            print_expr(*n.lhs, out);
                            out += " ";
                            out += to_string(n.op);
                            out += " ";
                            print_expr(*n.rhs, out);
                            out += ")";
                        }
                        else if constexpr (std::is_same_v<T, compare_expr>) {
                            out += "(";
                            print_expr(*n.lhs, out);
                            out += " ";
                            out += to_string(n.op);
                            out += " ";
                            print_expr(*n.rhs, out);
                            out += ")";
                        }
                    },
                    e.node);
        }

        void print_block(const block& b, int depth, std::string& out);

        void print_stmt(const stmt& s, int depth, std::string& out) {
            std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
            std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        out += pad;
                        if constexpr (std::is_same_v<T, assign_stmt>) {
                            print_expr(*n.target, out);
                            out += " = ";
                            print_expr(*n.value, out);
                            out += "\n";
                        }
                        else if constexpr (std::is_same_v<T, aug_assign_stmt>) {
                            print_expr(*n.target, out);
                            out += " ";
                            out += to_string(n.op);
                            out += "= ";
                            print_expr(*n.value, out);
                            out += "\n";
                        }
                        else if constexpr (std::is_same_v<T, expr_stmt>) {
                            print_expr(*n.value, out);
                            out += "\n";
                        }
                        else if constexpr (std::is_same_v<T, if_stmt>) {
                            for (std::size_t i = 0; i < n.branches.size(); ++i) {
                                if (i) {
                                    out += pad + "elif ";
                                }
                                else {
                                    out += "if ";
                                }
                                print_expr(*n.branches[i].cond, out);
                                out += ":\n";
                                print_block(n.branches[i].body, depth + 1, out);
                            }
                            if (n.orelse) {
                                out += pad + "else:\n";
                                print_block(*n.orelse, depth + 1, out);
                            }
                        }
                        else if constexpr (std::is_same_v<T, while_stmt>) {
                            out += "while ";
                            print_expr(*n.cond, out);
                            out += ":\n";
                            print_block(n.body, depth + 1, out);
                        }
                        else if constexpr (std::is_same_v<T, for_stmt>) {
                            out += "for " + n.target + " in ";
                            print_expr(*n.iter, out);
                            out += ":\n";
                            print_block(n.body, depth + 1, out);
                        }
                        else if constexpr (std::is_same_v<T, func_def_stmt>) {
                            out += "def " + n.name + "(" + join_params(n.params) + "):\n";
                            print_block(n.body, depth + 1, out);
                        }
                        else if constexpr (std::is_same_v<T, return_stmt>) {
                            out += "return";
                            if (n.value) {
                                out += " ";
                                print_expr(*n.value, out);
                            }
                            out += "\n";
                        }
                        else if constexpr (std::is_same_v<T, del_stmt>) {
                            out += "del ";
                            print_expr(*n.target, out);
                            out += "\n";
                        }
                        else {
                            out += "pass\n";
                        }
                    },
                    s.node);
        }

        void print_block(const block& b, int depth, std::string& out) {
            for (const auto& s : b) {
                print_stmt(*s, depth, out);
            }
        }

        void sexpr_expr(const expr& e, std::ostringstream& os);

        void sexpr_exprs(const std::vector<expr_ptr>& items, std::ostringstream& os) {
            for (const auto& i : items) {
                os << ' ';
                sexpr_expr(*i, os);
            }
        }

        void sexpr_expr(const expr& e, std::ostringstream& os) {
            std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, name_expr>) {
                            os << "(name " << n.id << ')';
                        }
                        else if constexpr (std::is_same_v<T, literal_expr>) {
                            os << "(lit " << n.value.index() << ' ' << literal_text(n.value) << ')';
                        }
                        else if constexpr (std::is_same_v<T, list_expr>) {
                            os << "(list";
                            sexpr_exprs(n.items, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, dict_expr>) {
                            os << "(dict";
                            for (const auto& [k, v] : n.entries) {
                                os << ' ';
                                sexpr_expr(*k, os);
                                os << ' ';
                                sexpr_expr(*v, os);
                            }
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, attribute_expr>) {
                            os << "(attr ";
                            sexpr_expr(*n.object, os);
                            os << ' ' << n.name << ')';
                        }
                        else if constexpr (std::is_same_v<T, subscript_expr>) {
                            os << "(sub ";
                            sexpr_expr(*n.object, os);
                            os << ' ';
                            sexpr_expr(*n.index, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, call_expr>) {
                            os << "(call ";
                            sexpr_expr(*n.callee, os);
                            sexpr_exprs(n.args, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, lambda_expr>) {
                            os << "(lambda (" << join_params(n.params) << ") ";
                            sexpr_expr(*n.body, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, unary_expr>) {
                            os << "(" << to_string(n.op) << ' ';
                            sexpr_expr(*n.operand, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, binary_expr>) {
                            os << "(" << to_string(n.op) << ' ';
                            sexpr_expr(*n.lhs, os);
                            os << ' ';
                            sexpr_expr(*n.rhs, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, compare_expr>) {
                            os << "(" << to_string(n.op) << ' ';
                            sexpr_expr(*n.lhs, os);
                            os << ' ';
                            sexpr_expr(*n.rhs, os);
                            os << ')';
                        }
                    },
                    e.node);
        }

        void sexpr_block(const block& b, std::ostringstream& os);

        void sexpr_stmt(const stmt& s, std::ostringstream& os) {
            std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, assign_stmt>) {
                            os << "(assign ";
                            sexpr_expr(*n.target, os);
                            os << ' ';
                            sexpr_expr(*n.value, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, aug_assign_stmt>) {
                            os << "(aug " << to_string(n.op) << ' ';
                            sexpr_expr(*n.target, os);
                            os << ' ';
                            sexpr_expr(*n.value, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, expr_stmt>) {
                            os << "(expr ";
                            sexpr_expr(*n.value, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, if_stmt>) {
                            os << "(if";
                            for (const auto& br : n.branches) {
                                os << " (branch ";
                                sexpr_expr(*br.cond, os);
                                sexpr_block(br.body, os);
                                os << ')';
                            }
                            if (n.orelse) {
                                os << " (else";
                                sexpr_block(*n.orelse, os);
                                os << ')';
                            }
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, while_stmt>) {
                            os << "(while ";
                            sexpr_expr(*n.cond, os);
                            sexpr_block(n.body, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, for_stmt>) {
                            os << "(for " << n.target << ' ';
                            sexpr_expr(*n.iter, os);
                            sexpr_block(n.body, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, func_def_stmt>) {
                            os << "(def " << n.name << " (" << join_params(n.params) << ")";
                            sexpr_block(n.body, os);
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, return_stmt>) {
                            os << "(return";
                            if (n.value) {
                                os << ' ';
                                sexpr_expr(*n.value, os);
                            }
                            os << ')';
                        }
                        else if constexpr (std::is_same_v<T, del_stmt>) {
                            os << "(del ";
                            sexpr_expr(*n.target, os);
                            os << ')';
                        }
                        else {
                            os << "(pass)";
                        }
                    },
                    s.node);
        }

        void sexpr_block(const block& b, std::ostringstream& os) {
            for (const auto& s : b) {
                os << ' ';
                sexpr_stmt(*s, os);
            }
        }

    }  // namespace

    std::string pretty_print(const program& p) {
        std::string out;
        print_block(p.body, 0, out);
        return out;
    }

    std::string pretty_print(const expr& e) {
        std::string out;
        print_expr(e, out);
        return out;
    }

    std::string to_sexpr(const program& p) {
        std::ostringstream os;
        os << "(program";
        sexpr_block(p.body, os);
        os << ')';
        return os.str();
    }

    std::string to_sexpr(const expr& e) {
        std::ostringstream os;
        sexpr_expr(e, os);
        return os.str();
    }

}  // namespace cellguard::lang
