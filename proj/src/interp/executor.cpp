#include "cellguard/interp/notebook.hpp"

#include <cmath>
#include <random>

namespace cellguard::interp {

    using lang::accessor;
    using lang::qualified_name;
    using lineage::symbol_id;
    using lineage::symbol_set;

    namespace {

        constexpr int max_call_depth = 300;
        constexpr std::size_t max_sequence = 10'000'000;

        [[noreturn]] void raise(const std::string& kind, const std::string& message) {
            throw runtime_error(kind + ": " + message);
        }

        enum class flow : std::uint8_t { normal, returned };

        struct call_context {
            std::shared_ptr<frame> env;  // null at top level
            std::uint32_t unit{0};
            std::shared_ptr<const lang::program> owner;
            value return_value{none_value{}};
            symbol_set return_uses;
        };

        struct chain_result {
            value v;
            std::optional<symbol_id> sym;
            const symbol_set* local_deps{nullptr};
        };

        bool is_number(const value& v) {
            return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v) ||
                   std::holds_alternative<bool>(v);
        }

        bool is_integral(const value& v) {
            return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<bool>(v);
        }

        std::int64_t as_int(const value& v) {
            if (auto b = std::get_if<bool>(&v)) {
                return *b ? 1 : 0;
            }
            return std::get<std::int64_t>(v);
        }

        double as_double(const value& v) {
            if (auto d = std::get_if<double>(&v)) {
                return *d;
            }
            return static_cast<double>(as_int(v));
        }

        std::int64_t checked(bool overflow, std::int64_t r) {
            if (overflow) {
                raise("OverflowError", "integer result out of range");
            }
            return r;
        }

        std::int64_t floor_div(std::int64_t a, std::int64_t b) {
            if (b == -1 && a == INT64_MIN) {
                raise("OverflowError", "integer result out of range");
            }
            std::int64_t q = a / b;
            if ((a % b != 0) && ((a < 0) != (b < 0))) {
                --q;
            }
            return q;
        }

        std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
            if (b == -1) {
                return 0;
            }
            std::int64_t r = a % b;
            if (r != 0 && ((r < 0) != (b < 0))) {
                r += b;
            }
            return r;
        }

        std::size_t list_index(const list_object& l, const value& idx) {
            if (!is_integral(idx)) {
                raise("TypeError", "list indices must be integers, not " + type_name(idx));
            }
            auto i = as_int(idx);
            auto n = static_cast<std::int64_t>(l.items.size());
            if (i < 0) {
                i += n;
            }
            if (i < 0 || i >= n) {
                raise("IndexError", "list index out of range");
            }
            return static_cast<std::size_t>(i);
        }

        const std::string& dict_key(const value& idx) {
            auto s = std::get_if<std::string>(&idx);
            if (!s) {
                raise("TypeError", "dict keys must be strings, not " + type_name(idx));
            }
            return *s;
        }

        std::vector<value> iterate(const value& v) {
            if (auto l = std::get_if<std::shared_ptr<list_object>>(&v)) {
                return (*l)->items;
            }
            if (auto d = std::get_if<std::shared_ptr<dict_object>>(&v)) {
                std::vector<value> keys;
                for (const auto& [k, x] : (*d)->entries) {
                    keys.emplace_back(k);
                }
                return keys;
            }
            if (auto s = std::get_if<std::string>(&v)) {
                std::vector<value> chars;
                for (char c : *s) {
                    chars.emplace_back(std::string(1, c));
                }
                return chars;
            }
            raise("TypeError", "'" + type_name(v) + "' object is not iterable");
        }

    }  // namespace

    class executor {
      public:
        executor(notebook_state& st, exec_result& res)
            : st_(st), res_(res), g_(st.tracing_ ? &st.graph_ : nullptr), counter_(st.counter_) {}

        void run(const std::shared_ptr<const lang::program>& program, std::uint32_t unit) {
            call_context cx;
            cx.unit = unit;
            cx.owner = program;
            if (g_) {
                g_->set_event_sink(st_.record_events_ ? &res_.lineage_events : nullptr);
            }
            int ordinal = 0;
            try {
                for (const auto& s : program->body) {
                    ++ordinal;
                    exec_stmt(*s, cx);
                }
            }
            catch (const runtime_error& e) {
                fail(e.what(), ordinal);
            }
            catch (const lineage::unknown_object& e) {
                fail(e.what(), ordinal);
            }
            catch (const lineage::unknown_symbol& e) {
                fail(std::string{"NameError: "} + e.what(), ordinal);
            }
            if (g_) {
                g_->set_event_sink(nullptr);
            }
        }

      private:
        // Collector stack: the top entry receives the symbols read by the
        // expression being evaluated, or is null when nothing is recorded.
        class collect_scope {
          public:
            collect_scope(executor& ex, symbol_set* target) : ex_(ex) { ex_.collectors_.push_back(target); }
            ~collect_scope() { ex_.collectors_.pop_back(); }
            collect_scope(const collect_scope&) = delete;
            collect_scope& operator=(const collect_scope&) = delete;

          private:
            executor& ex_;
        };

        void fail(const std::string& message, int ordinal) {
            res_.ok = false;
            res_.error = message;
            res_.error_statement = ordinal;
        }

        symbol_set* col() const { return collectors_.empty() ? nullptr : collectors_.back(); }
        bool traced() const { return g_ != nullptr && suspended_ == 0; }

        void tick() {
            if (++steps_ > st_.step_limit_) {
                raise("RuntimeError", "step limit exceeded");
            }
        }

        object_id next_object() { return st_.next_object_++; }

        // ---- statements -------------------------------------------------------

        flow exec_block(const lang::block& b, call_context& cx) {
            for (const auto& s : b) {
                if (exec_stmt(*s, cx) == flow::returned) {
                    return flow::returned;
                }
            }
            return flow::normal;
        }

        flow exec_stmt(const lang::stmt& s, call_context& cx) {
            tick();
            std::uint64_t key = (static_cast<std::uint64_t>(cx.unit) << 32) | static_cast<std::uint32_t>(s.index);
            bool first = traced() && (st_.statement_seen_.insert(key).second || st_.instrument_all_);
            symbol_set collected;
            symbol_set* target = first ? &collected : nullptr;
            auto uses_now = [&]() -> const symbol_set& {
                if (first) {
                    st_.uses_cache_[key] = collected;
                    return collected;
                }
                return st_.uses_cache_[key];
            };

            return std::visit(
                    [&](const auto& n) -> flow {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, lang::assign_stmt>) {
                            value v;
                            target_ref t;
                            {
                                collect_scope scope(*this, target);
                                v = eval(*n.value, cx);
                                t = resolve_target(*n.target, cx);
                            }
                            bind(t, std::move(v), cx, first, uses_now());
                        }
                        else if constexpr (std::is_same_v<T, lang::aug_assign_stmt>) {
                            value v;
                            target_ref t;
                            {
                                collect_scope scope(*this, target);
                                t = resolve_target(*n.target, cx);
                                value current = read_target(t, cx);
                                value rhs = eval(*n.value, cx);
                                v = binary(n.op, current, rhs);
                            }
                            bind(t, std::move(v), cx, first, uses_now());
                        }
                        else if constexpr (std::is_same_v<T, lang::expr_stmt>) {
                            collect_scope scope(*this, target);
                            eval(*n.value, cx);
                        }
                        else if constexpr (std::is_same_v<T, lang::if_stmt>) {
                            for (const auto& br : n.branches) {
                                bool taken = false;
                                {
                                    collect_scope scope(*this, target);
                                    taken = truthy(eval(*br.cond, cx));
                                }
                                if (taken) {
                                    return exec_block(br.body, cx);
                                }
                            }
                            if (n.orelse) {
                                return exec_block(*n.orelse, cx);
                            }
                        }
                        else if constexpr (std::is_same_v<T, lang::while_stmt>) {
                            bool header_first = first;
                            while (true) {
                                tick();
                                bool go = false;
                                {
                                    collect_scope scope(*this, header_first ? target : nullptr);
                                    go = truthy(eval(*n.cond, cx));
                                }
                                header_first = false;
                                if (!go) {
                                    break;
                                }
                                if (exec_block(n.body, cx) == flow::returned) {
                                    return flow::returned;
                                }
                            }
                        }
                        else if constexpr (std::is_same_v<T, lang::for_stmt>) {
                            value iterable;
                            {
                                collect_scope scope(*this, target);
                                iterable = eval(*n.iter, cx);
                            }
                            const symbol_set& bind_uses = uses_now();
                            bool first_bind = first;
                            auto step = [&](value item) -> flow {
                                tick();
                                bind_name(n.target, std::move(item), cx, first_bind, bind_uses);
                                first_bind = false;
                                return exec_block(n.body, cx);
                            };
                            if (auto l = std::get_if<std::shared_ptr<list_object>>(&iterable)) {
                                auto list = *l;
                                for (std::size_t i = 0; i < list->items.size(); ++i) {
                                    if (step(list->items[i]) == flow::returned) {
                                        return flow::returned;
                                    }
                                }
                            }
                            else {
                                for (auto& item : iterate(iterable)) {
                                    if (step(std::move(item)) == flow::returned) {
                                        return flow::returned;
                                    }
                                }
                            }
                        }
                        else if constexpr (std::is_same_v<T, lang::func_def_stmt>) {
                            auto f = std::make_shared<function_object>();
                            f->id = next_object();
                            f->name = n.name;
                            f->def = &n;
                            f->owner = cx.owner;
                            f->closure = cx.env;
                            f->unit = cx.unit;
                            static const symbol_set no_parents;
                            bind_name(n.name, value{std::move(f)}, cx, first, no_parents);
                        }
                        else if constexpr (std::is_same_v<T, lang::return_stmt>) {
                            value v{none_value{}};
                            {
                                collect_scope scope(*this, target);
                                if (n.value) {
                                    v = eval(*n.value, cx);
                                }
                            }
                            cx.return_value = std::move(v);
                            if (traced()) {
                                cx.return_uses = uses_now();
                            }
                            return flow::returned;
                        }
                        else if constexpr (std::is_same_v<T, lang::del_stmt>) {
                            target_ref t;
                            {
                                collect_scope scope(*this, target);
                                t = resolve_target(*n.target, cx);
                            }
                            erase(t, cx, first);
                        }
                        return flow::normal;
                    },
                    s.node);
        }

        // ---- assignment targets ---------------------------------------------

        struct target_ref {
            enum class kind : std::uint8_t { name, attribute, item };
            kind k{kind::name};
            std::string name;
            value container;
            std::optional<symbol_id> container_sym;
            value index;
        };

        target_ref resolve_target(const lang::expr& e, call_context& cx) {
            target_ref t;
            if (auto n = e.as<lang::name_expr>()) {
                t.name = n->id;
                return t;
            }
            if (auto a = e.as<lang::attribute_expr>()) {
                t.k = target_ref::kind::attribute;
                auto c = eval_chain(*a->object, cx);
                t.container = std::move(c.v);
                t.container_sym = c.sym;
                t.name = a->name;
                return t;
            }
            auto s = e.as<lang::subscript_expr>();
            t.k = target_ref::kind::item;
            auto c = eval_chain(*s->object, cx);
            t.container = std::move(c.v);
            t.container_sym = c.sym;
            t.index = eval(*s->index, cx);
            return t;
        }

        accessor member_key(const target_ref& t) const {
            if (t.k == target_ref::kind::attribute) {
                return accessor::attribute(t.name);
            }
            return key_for(t.container, t.index);
        }

        static accessor key_for(const value& container, const value& index) {
            if (auto l = std::get_if<std::shared_ptr<list_object>>(&container)) {
                return accessor::at(static_cast<std::int64_t>(list_index(**l, index)));
            }
            return accessor::string_key(dict_key(index));
        }

        value read_target(const target_ref& t, call_context& cx) {
            if (t.k == target_ref::kind::name) {
                return lookup(t.name, cx);
            }
            value v = t.k == target_ref::kind::attribute ? get_attr(t.container, t.name)
                                                         : get_item(t.container, t.index);
            if (col()) {
                auto m = member_symbol(t.container, t.container_sym, member_key(t));
                if (m) {
                    col()->insert(*m);
                }
                else if (t.container_sym) {
                    col()->insert(*t.container_sym);
                }
            }
            return v;
        }

        void bind(const target_ref& t, value v, call_context& cx, bool first, const symbol_set& uses) {
            if (t.k == target_ref::kind::name) {
                bind_name(t.name, std::move(v), cx, first, uses);
                return;
            }
            accessor key = t.k == target_ref::kind::attribute ? accessor::attribute(t.name) : accessor{};
            std::optional<object_id> value_id = identity(v);
            if (t.k == target_ref::kind::attribute) {
                auto d = std::get_if<std::shared_ptr<dict_object>>(&t.container);
                if (!d) {
                    raise("AttributeError", "cannot set attribute '" + t.name + "' on " + type_name(t.container));
                }
                (*d)->set(t.name, std::move(v));
            }
            else if (auto l = std::get_if<std::shared_ptr<list_object>>(&t.container)) {
                auto i = list_index(**l, t.index);
                (*l)->items[i] = std::move(v);
                key = accessor::at(static_cast<std::int64_t>(i));
            }
            else if (auto d = std::get_if<std::shared_ptr<dict_object>>(&t.container)) {
                const auto& k = dict_key(t.index);
                (*d)->set(k, std::move(v));
                key = accessor::string_key(k);
            }
            else {
                raise("TypeError", "'" + type_name(t.container) + "' object does not support item assignment");
            }
            if (!g_) {
                return;
            }
            auto obj = identity(t.container);
            if (!obj || !g_->aliases(*obj)) {
                return;
            }
            if (first) {
                auto holder = container_symbol(*obj, t.container_sym);
                symbol_id m = g_->member(*obj, key, g_->at(holder).name.child(key));
                g_->assign(m, uses, counter_);
                g_->bind_object(m, value_id);
                g_->record_mutation(*obj, {}, counter_);
            }
            else if (auto m = g_->find_member(*obj, key)) {
                g_->bind_object(*m, value_id);
            }
        }

        void bind_name(const std::string& name, value v, call_context& cx, bool first, const symbol_set& uses) {
            if (cx.env) {
                cx.env->vars[name] = std::move(v);
                if (traced()) {
                    cx.env->deps[name] = uses;
                }
                return;
            }
            auto id = identity(v);
            st_.globals_[name] = std::move(v);
            if (!g_) {
                return;
            }
            auto existing = g_->find_global(name);
            symbol_id sym = existing ? *existing : g_->global(name);
            if (first || !existing) {
                g_->assign(sym, uses, counter_);
            }
            g_->bind_object(sym, id);
        }

        void erase(const target_ref& t, call_context& cx, bool first) {
            if (t.k == target_ref::kind::name) {
                if (cx.env) {
                    if (cx.env->vars.erase(t.name) == 0) {
                        raise("NameError", "local variable '" + t.name + "' referenced before assignment");
                    }
                    cx.env->deps.erase(t.name);
                    return;
                }
                if (st_.globals_.erase(t.name) == 0) {
                    raise("NameError", "name '" + t.name + "' is not defined");
                }
                if (g_) {
                    if (auto sym = g_->find_global(t.name)) {
                        g_->delete_symbol(*sym);
                    }
                }
                return;
            }
            auto obj = identity(t.container);
            bool tracked = g_ && obj && g_->aliases(*obj);
            if (auto l = std::get_if<std::shared_ptr<list_object>>(&t.container);
                l && t.k == target_ref::kind::item) {
                auto& items = (*l)->items;
                auto i = list_index(**l, t.index);
                auto old_size = items.size();
                items.erase(items.begin() + static_cast<std::ptrdiff_t>(i));
                if (tracked) {
                    // Later elements shift down, so their member symbols go too.
                    for (auto j = i; j < old_size; ++j) {
                        if (auto m = g_->find_member(*obj, accessor::at(static_cast<std::int64_t>(j)))) {
                            g_->delete_symbol(*m);
                        }
                    }
                }
            }
            else if (auto d = std::get_if<std::shared_ptr<dict_object>>(&t.container)) {
                const std::string& k = t.k == target_ref::kind::attribute ? t.name : dict_key(t.index);
                if (!(*d)->erase(k)) {
                    raise("KeyError", "'" + k + "'");
                }
                if (tracked) {
                    if (auto m = g_->find_member(*obj, accessor::string_key(k))) {
                        g_->delete_symbol(*m);
                    }
                }
            }
            else {
                raise("TypeError", "'" + type_name(t.container) + "' object does not support deletion");
            }
            if (tracked && first && g_->aliases(*obj)) {
                g_->record_mutation(*obj, {}, counter_);
            }
        }

        // ---- lineage helpers ----------------------------------------------------

        symbol_id container_symbol(object_id obj, std::optional<symbol_id> hint) const {
            if (hint && g_->contains(*hint) && g_->at(*hint).object == obj) {
                return *hint;
            }
            return *g_->aliases(obj)->begin();
        }

        // Precise member symbol of a registered container, created on demand
        // while a statement is being traced.
        std::optional<symbol_id> member_symbol(const value& container,
                                               std::optional<symbol_id> container_sym,
                                               const accessor& key) {
            if (!g_ || !col()) {
                return std::nullopt;
            }
            auto obj = identity(container);
            if (!obj || !g_->aliases(*obj)) {
                return std::nullopt;
            }
            if (auto m = g_->find_member(*obj, key)) {
                return m;
            }
            auto holder = container_symbol(*obj, container_sym);
            return g_->materialize_member(*obj, key, g_->at(holder).name.child(key), holder);
        }

        void record(const chain_result& r) {
            auto c = col();
            if (!c) {
                return;
            }
            if (r.sym) {
                c->insert(*r.sym);
            }
            else if (r.local_deps) {
                c->insert(r.local_deps->begin(), r.local_deps->end());
            }
        }

        // ---- expressions ----------------------------------------------------------

        value lookup(const std::string& name, call_context& cx) {
            auto r = lookup_chain(name, cx);
            record(r);
            return std::move(r.v);
        }

        chain_result lookup_chain(const std::string& name, call_context& cx) {
            for (frame* f = cx.env.get(); f; f = f->parent.get()) {
                if (f->locals && f->locals->contains(name)) {
                    auto it = f->vars.find(name);
                    if (it == f->vars.end()) {
                        raise("NameError", "local variable '" + name + "' referenced before assignment");
                    }
                    chain_result r{it->second, std::nullopt, nullptr};
                    if (col()) {
                        auto d = f->deps.find(name);
                        if (d != f->deps.end()) {
                            r.local_deps = &d->second;
                        }
                    }
                    return r;
                }
            }
            if (auto it = st_.globals_.find(name); it != st_.globals_.end()) {
                chain_result r{it->second, std::nullopt, nullptr};
                if (g_ && col()) {
                    r.sym = g_->find_global(name);
                }
                return r;
            }
            if (auto b = find_builtin(name)) {
                return chain_result{*b, std::nullopt, nullptr};
            }
            raise("NameError", "name '" + name + "' is not defined");
        }

        // Evaluates names, attributes and subscripts, tracking the most
        // precise symbol without recording it.
        chain_result eval_chain(const lang::expr& e, call_context& cx) {
            if (auto n = e.as<lang::name_expr>()) {
                return lookup_chain(n->id, cx);
            }
            if (auto a = e.as<lang::attribute_expr>()) {
                auto base = eval_chain(*a->object, cx);
                chain_result r{get_attr(base.v, a->name), base.sym, base.local_deps};
                if (auto m = member_symbol(base.v, base.sym, accessor::attribute(a->name))) {
                    r.sym = m;
                }
                return r;
            }
            if (auto s = e.as<lang::subscript_expr>()) {
                auto base = eval_chain(*s->object, cx);
                value index = eval(*s->index, cx);
                chain_result r{get_item(base.v, index), base.sym, base.local_deps};
                if (col() && (std::holds_alternative<std::shared_ptr<list_object>>(base.v) ||
                              std::holds_alternative<std::shared_ptr<dict_object>>(base.v))) {
                    if (auto m = member_symbol(base.v, base.sym, key_for(base.v, index))) {
                        r.sym = m;
                    }
                }
                return r;
            }
            return chain_result{eval(e, cx), std::nullopt, nullptr};
        }

        value eval(const lang::expr& e, call_context& cx) {
            return std::visit(
                    [&](const auto& n) -> value {
                        using T = std::decay_t<decltype(n)>;
                        if constexpr (std::is_same_v<T, lang::name_expr>) {
                            return lookup(n.id, cx);
                        }
                        else if constexpr (std::is_same_v<T, lang::literal_expr>) {
                            return std::visit(
                                    [](const auto& lit) -> value {
                                        using L = std::decay_t<decltype(lit)>;
                                        if constexpr (std::is_same_v<L, lang::none_literal>) {
                                            return none_value{};
                                        }
                                        else {
                                            return lit;
                                        }
                                    },
                                    n.value);
                        }
                        else if constexpr (std::is_same_v<T, lang::list_expr>) {
                            auto l = std::make_shared<list_object>();
                            l->id = next_object();
                            l->items.reserve(n.items.size());
                            for (const auto& item : n.items) {
                                l->items.push_back(eval(*item, cx));
                            }
                            return l;
                        }
                        else if constexpr (std::is_same_v<T, lang::dict_expr>) {
                            auto d = std::make_shared<dict_object>();
                            d->id = next_object();
                            for (const auto& [k, v] : n.entries) {
                                value key = eval(*k, cx);
                                const auto& ks = dict_key(key);
                                d->set(ks, eval(*v, cx));
                            }
                            return d;
                        }
                        else if constexpr (std::is_same_v<T, lang::attribute_expr> ||
                                           std::is_same_v<T, lang::subscript_expr>) {
                            auto r = eval_chain(e, cx);
                            record(r);
                            return std::move(r.v);
                        }
                        else if constexpr (std::is_same_v<T, lang::call_expr>) {
                            return eval_call(n, cx);
                        }
                        else if constexpr (std::is_same_v<T, lang::lambda_expr>) {
                            auto f = std::make_shared<function_object>();
                            f->id = next_object();
                            f->name = "<lambda>";
                            f->lambda = &n;
                            f->lambda_params.insert(n.params.begin(), n.params.end());
                            f->owner = cx.owner;
                            f->closure = cx.env;
                            f->unit = cx.unit;
                            if (auto c = col(); c && g_) {
                                for (const auto& qn : n.free_names) {
                                    if (auto sym = g_->resolve_prefix(qn)) {
                                        c->insert(*sym);
                                    }
                                }
                            }
                            return f;
                        }
                        else if constexpr (std::is_same_v<T, lang::unary_expr>) {
                            value v = eval(*n.operand, cx);
                            if (n.op == lang::unary_op::logical_not) {
                                return !truthy(v);
                            }
                            if (is_integral(v)) {
                                auto x = as_int(v);
                                if (x == INT64_MIN) {
                                    raise("OverflowError", "integer result out of range");
                                }
                                return -x;
                            }
                            if (auto d = std::get_if<double>(&v)) {
                                return -*d;
                            }
                            raise("TypeError", "bad operand type for unary -: '" + type_name(v) + "'");
                        }
                        else if constexpr (std::is_same_v<T, lang::binary_expr>) {
                            value lhs = eval(*n.lhs, cx);
                            if (n.op == lang::binary_op::logical_and) {
                                return truthy(lhs) ? eval(*n.rhs, cx) : lhs;
                            }
                            if (n.op == lang::binary_op::logical_or) {
                                return truthy(lhs) ? lhs : eval(*n.rhs, cx);
                            }
                            value rhs = eval(*n.rhs, cx);
                            return binary(n.op, lhs, rhs);
                        }
                        else {
                            value lhs = eval(*n.lhs, cx);
                            value rhs = eval(*n.rhs, cx);
                            return compare(n.op, lhs, rhs);
                        }
                    },
                    e.node);
        }

        value eval_call(const lang::call_expr& c, call_context& cx) {
            value fn;
            if (auto attr = c.callee->as<lang::attribute_expr>()) {
                auto receiver = eval_chain(*attr->object, cx);
                record(receiver);
                if (attr->name == "append" && std::holds_alternative<std::shared_ptr<list_object>>(receiver.v)) {
                    return call_append(std::get<std::shared_ptr<list_object>>(receiver.v), c, cx);
                }
                chain_result method{get_attr(receiver.v, attr->name), receiver.sym, receiver.local_deps};
                if (auto m = member_symbol(receiver.v, receiver.sym, accessor::attribute(attr->name))) {
                    method.sym = m;
                }
                record(method);
                fn = std::move(method.v);
            }
            else {
                fn = eval(*c.callee, cx);
            }
            std::vector<value> args;
            args.reserve(c.args.size());
            for (const auto& a : c.args) {
                args.push_back(eval(*a, cx));
            }
            return call_value(fn, std::move(args), cx);
        }

        value call_append(const std::shared_ptr<list_object>& list, const lang::call_expr& c, call_context& cx) {
            if (c.args.size() != 1) {
                raise("TypeError", "append() takes exactly one argument");
            }
            symbol_set arg_uses;
            value item;
            {
                collect_scope scope(*this, col() ? &arg_uses : nullptr);
                item = eval(*c.args[0], cx);
            }
            list->items.push_back(std::move(item));
            if (auto outer = col()) {
                outer->insert(arg_uses.begin(), arg_uses.end());
                if (g_ && g_->aliases(list->id)) {
                    g_->record_mutation(list->id, arg_uses, counter_);
                }
            }
            return none_value{};
        }

        value call_value(const value& fn, std::vector<value> args, call_context& cx) {
            if (auto b = std::get_if<builtin>(&fn)) {
                // External code: nothing beneath this call is traced.
                ++suspended_;
                collect_scope scope(*this, nullptr);
                struct resume {
                    int& depth;
                    ~resume() { --depth; }
                } guard{suspended_};
                return call_builtin(*b, args, cx);
            }
            if (auto f = std::get_if<std::shared_ptr<function_object>>(&fn)) {
                return call_function(*f, std::move(args));
            }
            raise("TypeError", "'" + type_name(fn) + "' object is not callable");
        }

        value call_function(const std::shared_ptr<function_object>& f, std::vector<value> args) {
            tick();
            const auto& params = f->def ? f->def->params : f->lambda->params;
            if (params.size() != args.size()) {
                raise("TypeError",
                      f->name + "() takes " + std::to_string(params.size()) + " arguments but " +
                              std::to_string(args.size()) + " were given");
            }
            if (depth_ >= max_call_depth) {
                raise("RecursionError", "maximum recursion depth exceeded");
            }
            ++depth_;
            struct leave {
                int& depth;
                ~leave() { --depth; }
            } guard{depth_};

            call_context inner;
            inner.env = std::make_shared<frame>();
            inner.env->locals = &f->locals();
            inner.env->parent = f->closure;
            inner.unit = f->unit;
            inner.owner = f->owner;
            for (std::size_t i = 0; i < params.size(); ++i) {
                inner.env->vars[params[i]] = std::move(args[i]);
            }
            if (f->def) {
                exec_block(f->def->body, inner);
                if (auto c = col()) {
                    c->insert(inner.return_uses.begin(), inner.return_uses.end());
                }
                return std::move(inner.return_value);
            }
            return eval(*f->lambda->body, inner);
        }

        value call_builtin(builtin b, std::vector<value>& args, call_context& cx) {
            auto arity = [&](std::size_t lo, std::size_t hi) {
                if (args.size() < lo || args.size() > hi) {
                    raise("TypeError", std::string{to_string(b)} + "() got " + std::to_string(args.size()) +
                                               " arguments");
                }
            };
            switch (b) {
                case builtin::print: {
                    std::string line;
                    for (std::size_t i = 0; i < args.size(); ++i) {
                        if (i) {
                            line += ' ';
                        }
                        line += repr(args[i], true);
                    }
                    res_.output += line + "\n";
                    return none_value{};
                }
                case builtin::len: {
                    arity(1, 1);
                    const auto& v = args[0];
                    if (auto l = std::get_if<std::shared_ptr<list_object>>(&v)) {
                        return static_cast<std::int64_t>((*l)->items.size());
                    }
                    if (auto d = std::get_if<std::shared_ptr<dict_object>>(&v)) {
                        return static_cast<std::int64_t>((*d)->entries.size());
                    }
                    if (auto s = std::get_if<std::string>(&v)) {
                        return static_cast<std::int64_t>(s->size());
                    }
                    raise("TypeError", "object of type '" + type_name(v) + "' has no len()");
                }
                case builtin::range: {
                    arity(1, 3);
                    for (const auto& a : args) {
                        if (!is_integral(a)) {
                            raise("TypeError", "range() arguments must be integers");
                        }
                    }
                    std::int64_t start = args.size() == 1 ? 0 : as_int(args[0]);
                    std::int64_t stop = args.size() == 1 ? as_int(args[0]) : as_int(args[1]);
                    std::int64_t step = args.size() == 3 ? as_int(args[2]) : 1;
                    if (step == 0) {
                        raise("ValueError", "range() step must not be zero");
                    }
                    auto l = std::make_shared<list_object>();
                    l->id = next_object();
                    for (std::int64_t i = start; step > 0 ? i < stop : i > stop; i += step) {
                        if (l->items.size() >= max_sequence) {
                            raise("MemoryError", "range too large");
                        }
                        l->items.emplace_back(i);
                    }
                    return l;
                }
                case builtin::map: {
                    arity(2, 2);
                    auto items = iterate(args[1]);
                    auto l = std::make_shared<list_object>();
                    l->id = next_object();
                    l->items.reserve(items.size());
                    for (auto& item : items) {
                        std::vector<value> call_args;
                        call_args.push_back(std::move(item));
                        l->items.push_back(call_value(args[0], std::move(call_args), cx));
                    }
                    return l;
                }
                case builtin::list: {
                    arity(0, 1);
                    auto l = std::make_shared<list_object>();
                    l->id = next_object();
                    if (!args.empty()) {
                        l->items = iterate(args[0]);
                    }
                    return l;
                }
                case builtin::sample: {
                    arity(1, 2);
                    auto items = iterate(args[0]);
                    // Fixed seed: the same input always yields the same order.
                    std::mt19937_64 rng(0x5eed5eedULL);
                    for (std::size_t i = items.size(); i > 1; --i) {
                        std::size_t j = static_cast<std::size_t>(rng() % i);
                        std::swap(items[i - 1], items[j]);
                    }
                    if (args.size() == 2) {
                        if (!is_integral(args[1]) || as_int(args[1]) < 0) {
                            raise("ValueError", "sample size must be a non-negative integer");
                        }
                        auto k = static_cast<std::size_t>(as_int(args[1]));
                        if (k > items.size()) {
                            raise("ValueError", "sample larger than population");
                        }
                        items.resize(k);
                    }
                    auto l = std::make_shared<list_object>();
                    l->id = next_object();
                    l->items = std::move(items);
                    return l;
                }
                case builtin::fail:
                    arity(0, 1);
                    raise("Failure", args.empty() ? std::string{"fail() called"} : repr(args[0], true));
            }
            return none_value{};
        }

        static value get_attr(const value& v, const std::string& name) {
            if (auto d = std::get_if<std::shared_ptr<dict_object>>(&v)) {
                if (auto slot = (*d)->find(name)) {
                    return *slot;
                }
                raise("AttributeError", "dict has no attribute or key '" + name + "'");
            }
            raise("AttributeError", "'" + type_name(v) + "' object has no attribute '" + name + "'");
        }

        static value get_item(const value& v, const value& index) {
            if (auto l = std::get_if<std::shared_ptr<list_object>>(&v)) {
                return (*l)->items[list_index(**l, index)];
            }
            if (auto d = std::get_if<std::shared_ptr<dict_object>>(&v)) {
                const auto& k = dict_key(index);
                if (auto slot = (*d)->find(k)) {
                    return *slot;
                }
                raise("KeyError", "'" + k + "'");
            }
            if (auto s = std::get_if<std::string>(&v)) {
                if (!is_integral(index)) {
                    raise("TypeError", "string indices must be integers");
                }
                auto i = as_int(index);
                auto n = static_cast<std::int64_t>(s->size());
                if (i < 0) {
                    i += n;
                }
                if (i < 0 || i >= n) {
                    raise("IndexError", "string index out of range");
                }
                return std::string(1, (*s)[static_cast<std::size_t>(i)]);
            }
            raise("TypeError", "'" + type_name(v) + "' object is not subscriptable");
        }

        value repeat(const value& seq, std::int64_t times) {
            if (times < 0) {
                times = 0;
            }
            if (auto s = std::get_if<std::string>(&seq)) {
                if (s->size() * static_cast<std::size_t>(times) > max_sequence) {
                    raise("MemoryError", "repeated string too large");
                }
                std::string out;
                for (std::int64_t i = 0; i < times; ++i) {
                    out += *s;
                }
                return out;
            }
            const auto& l = std::get<std::shared_ptr<list_object>>(seq);
            if (l->items.size() * static_cast<std::size_t>(times) > max_sequence) {
                raise("MemoryError", "repeated list too large");
            }
            auto out = std::make_shared<list_object>();
            out->id = next_object();
            for (std::int64_t i = 0; i < times; ++i) {
                out->items.insert(out->items.end(), l->items.begin(), l->items.end());
            }
            return out;
        }

        value binary(lang::binary_op op, const value& a, const value& b) {
            using lang::binary_op;
            auto fail_types = [&]() -> value {
                raise("TypeError",
                      "unsupported operand types for " + std::string{lang::to_string(op)} + ": '" + type_name(a) +
                              "' and '" + type_name(b) + "'");
            };
            if (op == binary_op::add) {
                if (auto sa = std::get_if<std::string>(&a)) {
                    if (auto sb = std::get_if<std::string>(&b)) {
                        return *sa + *sb;
                    }
                    return fail_types();
                }
                if (auto la = std::get_if<std::shared_ptr<list_object>>(&a)) {
                    if (auto lb = std::get_if<std::shared_ptr<list_object>>(&b)) {
                        auto out = std::make_shared<list_object>();
                        out->id = next_object();
                        out->items = (*la)->items;
                        out->items.insert(out->items.end(), (*lb)->items.begin(), (*lb)->items.end());
                        return out;
                    }
                    return fail_types();
                }
            }
            if (op == binary_op::mul) {
                bool seq_a = std::holds_alternative<std::string>(a) ||
                             std::holds_alternative<std::shared_ptr<list_object>>(a);
                bool seq_b = std::holds_alternative<std::string>(b) ||
                             std::holds_alternative<std::shared_ptr<list_object>>(b);
                if (seq_a && is_integral(b)) {
                    return repeat(a, as_int(b));
                }
                if (seq_b && is_integral(a)) {
                    return repeat(b, as_int(a));
                }
            }
            if (!is_number(a) || !is_number(b)) {
                return fail_types();
            }
            if (is_integral(a) && is_integral(b)) {
                std::int64_t x = as_int(a);
                std::int64_t y = as_int(b);
                std::int64_t r = 0;
                switch (op) {
                    case binary_op::add:
                        {
                            bool overflow = __builtin_add_overflow(x, y, &r);
                            return checked(overflow, r);
                        }
                    case binary_op::sub:
                        {
                            bool overflow = __builtin_sub_overflow(x, y, &r);
                            return checked(overflow, r);
                        }
                    case binary_op::mul:
                        {
                            bool overflow = __builtin_mul_overflow(x, y, &r);
                            return checked(overflow, r);
                        }
                    case binary_op::div:
                        if (y == 0) {
                            raise("ZeroDivisionError", "division by zero");
                        }
                        return static_cast<double>(x) / static_cast<double>(y);
                    case binary_op::floor_div:
                        if (y == 0) {
                            raise("ZeroDivisionError", "integer division by zero");
                        }
                        return floor_div(x, y);
                    case binary_op::mod:
                        if (y == 0) {
                            raise("ZeroDivisionError", "integer modulo by zero");
                        }
                        return floor_mod(x, y);
                    default:
                        break;
                }
            }
            double x = as_double(a);
            double y = as_double(b);
            switch (op) {
                case binary_op::add:
                    return x + y;
                case binary_op::sub:
                    return x - y;
                case binary_op::mul:
                    return x * y;
                case binary_op::div:
                    if (y == 0.0) {
                        raise("ZeroDivisionError", "float division by zero");
                    }
                    return x / y;
                case binary_op::floor_div:
                    if (y == 0.0) {
                        raise("ZeroDivisionError", "float floor division by zero");
                    }
                    return std::floor(x / y);
                case binary_op::mod: {
                    if (y == 0.0) {
                        raise("ZeroDivisionError", "float modulo");
                    }
                    double r = std::fmod(x, y);
                    if (r != 0.0 && ((r < 0) != (y < 0))) {
                        r += y;
                    }
                    return r;
                }
                default:
                    return fail_types();
            }
        }

        static value compare(lang::compare_op op, const value& a, const value& b) {
            using lang::compare_op;
            if (op == compare_op::eq) {
                return values_equal(a, b);
            }
            if (op == compare_op::ne) {
                return !values_equal(a, b);
            }
            int c = 0;
            if (is_number(a) && is_number(b)) {
                if (is_integral(a) && is_integral(b)) {
                    auto x = as_int(a);
                    auto y = as_int(b);
                    c = x < y ? -1 : (x > y ? 1 : 0);
                }
                else {
                    double x = as_double(a);
                    double y = as_double(b);
                    if (std::isnan(x) || std::isnan(y)) {
                        return false;
                    }
                    c = x < y ? -1 : (x > y ? 1 : 0);
                }
            }
            else if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
                auto r = std::get<std::string>(a).compare(std::get<std::string>(b));
                c = r < 0 ? -1 : (r > 0 ? 1 : 0);
            }
            else {
                raise("TypeError",
                      "'" + std::string{lang::to_string(op)} + "' not supported between '" + type_name(a) +
                              "' and '" + type_name(b) + "'");
            }
            switch (op) {
                case compare_op::lt:
                    return c < 0;
                case compare_op::le:
                    return c <= 0;
                case compare_op::gt:
                    return c > 0;
                default:
                    return c >= 0;
            }
        }

        notebook_state& st_;
        exec_result& res_;
        lineage::graph* g_;
        std::int64_t counter_;
        std::vector<symbol_set*> collectors_;
        int suspended_{0};
        int depth_{0};
        std::uint64_t steps_{0};
    };

    exec_result notebook_state::execute_cell(const std::string& id) {
        auto it = cells_.find(id);
        if (it == cells_.end()) {
            throw std::out_of_range("unknown cell '" + id + "'");
        }
        exec_result res;
        res.counter = ++counter_;
        const auto& entry = it->second;
        if (!entry.program) {
            res.ok = false;
            res.error = entry.error ? entry.error->what() : "SyntaxError";
            res.error_statement = 0;
            return res;
        }
        cell_ts_[id] = counter_;
        statement_seen_.clear();
        uses_cache_.clear();
        auto program = entry.program;
        executor ex(*this, res);
        ex.run(program, entry.unit);
        return res;
    }

}  // namespace cellguard::interp
