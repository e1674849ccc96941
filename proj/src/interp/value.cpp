#include "cellguard/interp/value.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

namespace cellguard::interp {

    namespace {
        constexpr std::array<std::pair<std::string_view, builtin>, 7> builtin_table = {{
                {"print", builtin::print},
                {"len", builtin::len},
                {"range", builtin::range},
                {"map", builtin::map},
                {"list", builtin::list},
                {"sample", builtin::sample},
                {"fail", builtin::fail},
        }};
    }

    std::string_view to_string(builtin b) {
        for (auto [name, id] : builtin_table) {
            if (id == b) {
                return name;
            }
        }
        return "?";
    }

    std::optional<builtin> find_builtin(std::string_view name) {
        for (auto [n, id] : builtin_table) {
            if (n == name) {
                return id;
            }
        }
        return std::nullopt;
    }

    value* dict_object::find(const std::string& key) {
        for (auto& [k, v] : entries) {
            if (k == key) {
                return &v;
            }
        }
        return nullptr;
    }

    const value* dict_object::find(const std::string& key) const {
        for (const auto& [k, v] : entries) {
            if (k == key) {
                return &v;
            }
        }
        return nullptr;
    }

    void dict_object::set(const std::string& key, value v) {
        if (auto slot = find(key)) {
            *slot = std::move(v);
            return;
        }
        entries.emplace_back(key, std::move(v));
    }

    bool dict_object::erase(const std::string& key) {
        auto it = std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.first == key; });
        if (it == entries.end()) {
            return false;
        }
        entries.erase(it);
        return true;
    }

    std::optional<object_id> identity(const value& v) {
        if (auto l = std::get_if<std::shared_ptr<list_object>>(&v)) {
            return (*l)->id;
        }
        if (auto d = std::get_if<std::shared_ptr<dict_object>>(&v)) {
            return (*d)->id;
        }
        if (auto f = std::get_if<std::shared_ptr<function_object>>(&v)) {
            return (*f)->id;
        }
        return std::nullopt;
    }

    bool truthy(const value& v) {
        return std::visit(
                [](const auto& x) -> bool {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, none_value>) {
                        return false;
                    }
                    else if constexpr (std::is_same_v<T, bool>) {
                        return x;
                    }
                    else if constexpr (std::is_same_v<T, std::int64_t>) {
                        return x != 0;
                    }
                    else if constexpr (std::is_same_v<T, double>) {
                        return x != 0.0;
                    }
                    else if constexpr (std::is_same_v<T, std::string>) {
                        return !x.empty();
                    }
                    else if constexpr (std::is_same_v<T, std::shared_ptr<list_object>>) {
                        return !x->items.empty();
                    }
                    else if constexpr (std::is_same_v<T, std::shared_ptr<dict_object>>) {
                        return !x->entries.empty();
                    }
                    else {
                        return true;
                    }
                },
                v);
    }

    std::string type_name(const value& v) {
        static constexpr std::array<const char*, 9> names = {
                "NoneType", "bool", "int", "float", "str", "list", "dict", "function", "builtin"};
        return names[v.index()];
    }

    namespace {

        std::string float_text(double d) {
            if (std::isnan(d)) {
                return "nan";
            }
            if (std::isinf(d)) {
                return d > 0 ? "inf" : "-inf";
            }
            char buf[64];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
            std::string s(buf, end);
            if (s.find_first_of(".e") == std::string::npos) {
                s += ".0";
            }
            return s;
        }

        std::string quoted(const std::string& s) {
            const char q = s.find('\'') != std::string::npos && s.find('"') == std::string::npos ? '"' : '\'';
            std::string out(1, q);
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
                    default:
                        if (c == q) {
                            out.push_back('\\');
                        }
                        out.push_back(c);
                }
            }
            return out + q;
        }

        void render(const value& v, bool top, std::string& out, int depth) {
            if (depth > 64) {
                out += "...";
                return;
            }
            std::visit(
                    [&](const auto& x) {
                        using T = std::decay_t<decltype(x)>;
                        if constexpr (std::is_same_v<T, none_value>) {
                            out += "None";
                        }
                        else if constexpr (std::is_same_v<T, bool>) {
                            out += x ? "True" : "False";
                        }
                        else if constexpr (std::is_same_v<T, std::int64_t>) {
                            out += std::to_string(x);
                        }
                        else if constexpr (std::is_same_v<T, double>) {
                            out += float_text(x);
                        }
                        else if constexpr (std::is_same_v<T, std::string>) {
                            out += top ? x : quoted(x);
                        }
                        else if constexpr (std::is_same_v<T, std::shared_ptr<list_object>>) {
                            out += "[";
                            for (std::size_t i = 0; i < x->items.size(); ++i) {
                                if (i) {
                                    out += ", ";
                                }
                                render(x->items[i], false, out, depth + 1);
                            }
                            out += "]";
                        }
                        else if constexpr (std::is_same_v<T, std::shared_ptr<dict_object>>) {
                            out += "{";
                            for (std::size_t i = 0; i < x->entries.size(); ++i) {
                                if (i) {
                                    out += ", ";
                                }
                                out += quoted(x->entries[i].first) + ": ";
                                render(x->entries[i].second, false, out, depth + 1);
                            }
                            out += "}";
                        }
                        else if constexpr (std::is_same_v<T, std::shared_ptr<function_object>>) {
                            out += "<function " + x->name + ">";
                        }
                        else {
                            out += "<builtin " + std::string{to_string(x)} + ">";
                        }
                    },
                    v);
        }

    }  // namespace

    std::string repr(const value& v, bool top_level) {
        std::string out;
        render(v, top_level, out, 0);
        return out;
    }

    bool values_equal(const value& a, const value& b) {
        auto as_number = [](const value& v, double& out) {
            if (auto i = std::get_if<std::int64_t>(&v)) {
                out = static_cast<double>(*i);
                return true;
            }
            if (auto d = std::get_if<double>(&v)) {
                out = *d;
                return true;
            }
            if (auto b = std::get_if<bool>(&v)) {
                out = *b ? 1.0 : 0.0;
                return true;
            }
            return false;
        };
        if (a.index() == b.index()) {
            return std::visit(
                    [&](const auto& x) -> bool {
                        using T = std::decay_t<decltype(x)>;
                        const auto& y = std::get<T>(b);
                        if constexpr (std::is_same_v<T, std::shared_ptr<list_object>>) {
                            if (x == y) {
                                return true;
                            }
                            if (x->items.size() != y->items.size()) {
                                return false;
                            }
                            for (std::size_t i = 0; i < x->items.size(); ++i) {
                                if (!values_equal(x->items[i], y->items[i])) {
                                    return false;
                                }
                            }
                            return true;
                        }
                        else if constexpr (std::is_same_v<T, std::shared_ptr<dict_object>>) {
                            if (x == y) {
                                return true;
                            }
                            if (x->entries.size() != y->entries.size()) {
                                return false;
                            }
                            for (const auto& [k, v] : x->entries) {
                                auto other = y->find(k);
                                if (!other || !values_equal(v, *other)) {
                                    return false;
                                }
                            }
                            return true;
                        }
                        else {
                            return x == y;
                        }
                    },
                    a);
        }
        double x = 0;
        double y = 0;
        if (as_number(a, x) && as_number(b, y)) {
            if (auto ia = std::get_if<std::int64_t>(&a)) {
                if (auto ib = std::get_if<std::int64_t>(&b)) {
                    return *ia == *ib;
                }
            }
            return x == y;
        }
        return false;
    }

}  // namespace cellguard::interp
