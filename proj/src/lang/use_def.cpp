#include "cellguard/lang/use_def.hpp"

#include <stdexcept>

namespace cellguard::lang {

    std::optional<qualified_name> static_chain(const expr& e) {
        if (auto n = e.as<name_expr>()) {
            return qualified_name{n->id};
        }
        if (auto a = e.as<attribute_expr>()) {
            auto base = static_chain(*a->object);
            if (!base) {
                return std::nullopt;
            }
            return base->child(accessor::attribute(a->name));
        }
        if (auto s = e.as<subscript_expr>()) {
            auto base = static_chain(*s->object);
            if (!base) {
                return std::nullopt;
            }
            if (auto lit = s->index->as<literal_expr>()) {
                if (auto i = std::get_if<std::int64_t>(&lit->value)) {
                    return base->child(accessor::at(*i));
                }
                if (auto k = std::get_if<std::string>(&lit->value)) {
                    return base->child(accessor::string_key(*k));
                }
            }
        }
        return std::nullopt;
    }

    namespace {

        void add_uses(const expr& e, name_set& out);

        void add_chain(const qualified_name& chain, name_set& out) {
            if (is_builtin_name(chain.base())) {
                return;
            }
            for (auto& p : chain.prefixes()) {
                out.insert(std::move(p));
            }
        }

        void add_uses(const expr& e, name_set& out) {
            std::visit(
                    [&](const auto& n) {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, name_expr>) {
                            if (!is_builtin_name(n.id)) {
                                out.insert(qualified_name{n.id});
                            }
                        }
                        else if constexpr (std::is_same_v<T, list_expr>) {
                            for (const auto& i : n.items) {
                                add_uses(*i, out);
                            }
                        }
                        else if constexpr (std::is_same_v<T, dict_expr>) {
                            for (const auto& [k, v] : n.entries) {
                                add_uses(*k, out);
                                add_uses(*v, out);
                            }
                        }
                        else if constexpr (std::is_same_v<T, attribute_expr>) {
                            if (auto chain = static_chain(e)) {
                                add_chain(*chain, out);
                            }
                            else {
                                add_uses(*n.object, out);
                            }
                        }
                        else if constexpr (std::is_same_v<T, subscript_expr>) {
                            if (auto chain = static_chain(e)) {
                                add_chain(*chain, out);
                            }
                            else {
                                add_uses(*n.object, out);
                                add_uses(*n.index, out);
                            }
                        }
                        else if constexpr (std::is_same_v<T, call_expr>) {
                            auto attr = n.callee->template as<attribute_expr>();
                            if (attr && is_builtin_method(attr->name)) {
                                add_uses(*attr->object, out);
                            }
                            else {
                                add_uses(*n.callee, out);
                            }
                            for (const auto& a : n.args) {
                                add_uses(*a, out);
                            }
                        }
                        else if constexpr (std::is_same_v<T, lambda_expr>) {
                            out.insert(n.free_names.begin(), n.free_names.end());
                        }
                        else if constexpr (std::is_same_v<T, unary_expr>) {
                            add_uses(*n.operand, out);
                        }
                        else if constexpr (std::is_same_v<T, binary_expr> || std::is_same_v<T, compare_expr>) {
                            add_uses(*n.lhs, out);
                            add_uses(*n.rhs, out);
                        }
                    },
                    e.node);
        }

        // Target of an assignment or del: the defined chain plus what must be
        // read to locate it.
        void target_sets(const expr& target, bool reads_self, use_def_sets& out) {
            if (auto chain = static_chain(target)) {
                out.def_set.insert(*chain);
                auto prefixes = chain->prefixes();
                prefixes.pop_back();
                out.use_set.insert(prefixes.begin(), prefixes.end());
                if (reads_self) {
                    out.use_set.insert(*chain);
                }
                return;
            }
            if (auto s = target.as<subscript_expr>()) {
                add_uses(*s->object, out.use_set);
                add_uses(*s->index, out.use_set);
            }
            else if (auto a = target.as<attribute_expr>()) {
                add_uses(*a->object, out.use_set);
            }
        }

    }  // namespace

    name_set expr_uses(const expr& e) {
        name_set out;
        add_uses(e, out);
        return out;
    }

    use_def_sets use_def(const stmt& s) {
        use_def_sets out;
        std::visit(
                [&](const auto& n) {
                    using T = std::decay_t<decltype(n)>;
                    if constexpr (std::is_same_v<T, assign_stmt>) {
                        add_uses(*n.value, out.use_set);
                        target_sets(*n.target, false, out);
                    }
                    else if constexpr (std::is_same_v<T, aug_assign_stmt>) {
                        add_uses(*n.value, out.use_set);
                        target_sets(*n.target, true, out);
                    }
                    else if constexpr (std::is_same_v<T, expr_stmt>) {
                        add_uses(*n.value, out.use_set);
                    }
                    else if constexpr (std::is_same_v<T, func_def_stmt>) {
                        out.def_set.insert(qualified_name{n.name});
                    }
                    else if constexpr (std::is_same_v<T, return_stmt>) {
                        if (n.value) {
                            add_uses(*n.value, out.use_set);
                        }
                    }
                    else if constexpr (std::is_same_v<T, del_stmt>) {
                        target_sets(*n.target, false, out);
                    }
                    else if constexpr (std::is_same_v<T, pass_stmt>) {
                    }
                    else {
                        throw std::invalid_argument("use_def: compound statement must be split into CFG nodes");
                    }
                },
                s.node);
        return out;
    }

    void collect_calls(const expr& e, std::vector<const call_expr*>& out) {
        std::visit(
                [&](const auto& n) {
                    using T = std::decay_t<decltype(n)>;
                    if constexpr (std::is_same_v<T, list_expr>) {
                        for (const auto& i : n.items) {
                            collect_calls(*i, out);
                        }
                    }
                    else if constexpr (std::is_same_v<T, dict_expr>) {
                        for (const auto& [k, v] : n.entries) {
                            collect_calls(*k, out);
                            collect_calls(*v, out);
                        }
                    }
                    else if constexpr (std::is_same_v<T, attribute_expr>) {
                        collect_calls(*n.object, out);
                    }
                    else if constexpr (std::is_same_v<T, subscript_expr>) {
                        collect_calls(*n.object, out);
                        collect_calls(*n.index, out);
                    }
                    else if constexpr (std::is_same_v<T, call_expr>) {
                        collect_calls(*n.callee, out);
                        for (const auto& a : n.args) {
                            collect_calls(*a, out);
                        }
                        out.push_back(&n);
                    }
                    else if constexpr (std::is_same_v<T, unary_expr>) {
                        collect_calls(*n.operand, out);
                    }
                    else if constexpr (std::is_same_v<T, binary_expr> || std::is_same_v<T, compare_expr>) {
                        collect_calls(*n.lhs, out);
                        collect_calls(*n.rhs, out);
                    }
                },
                e.node);
    }

}  // namespace cellguard::lang
