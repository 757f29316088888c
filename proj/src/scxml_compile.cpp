#include "tpcs/scxml_compile.hpp"

#include "tpcs/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tpcs {

namespace {

constexpr ActionId kActionTau = 0;
constexpr ActionId kActionSample = 1;

constexpr std::int64_t kIntLo = -2147483648LL;
constexpr std::int64_t kIntHi = 2147483647LL;

std::string join_path(std::span<const std::string> path) {
    std::string out;
    for (const auto& p : path) out += (out.empty() ? "" : ".") + p;
    return out;
}

} // namespace

std::optional<std::uint32_t> EventCatalog::automaton_id(const std::string& name) const {
    for (std::size_t i = 0; i < automata.size(); ++i) {
        if (automata[i] == name) return static_cast<std::uint32_t>(i);
    }
    return std::nullopt;
}

std::optional<std::uint32_t> EventCatalog::event_id(const std::string& name) const {
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].name == name) return static_cast<std::uint32_t>(i);
    }
    return std::nullopt;
}

std::optional<std::int64_t> EventCatalog::string_id(const std::string& text) const {
    for (std::size_t i = 0; i < strings.size(); ++i) {
        if (strings[i] == text) return static_cast<std::int64_t>(i);
    }
    return std::nullopt;
}

std::int64_t EventCatalog::require_string(const std::string& text) const {
    auto id = string_id(text);
    if (!id) throw CatalogError("string '" + text + "' missing from the intern table");
    return *id;
}

// ---------------------------------------------------------------------------
// Catalog construction
// ---------------------------------------------------------------------------

namespace {

class CatalogBuilder {
public:
    explicit CatalogBuilder(std::span<const ScxmlAutomaton> automata) : automata_(automata) {}

    EventCatalog build() {
        for (const auto& a : automata_) {
            if (cat_.automaton_id(a.name))
                throw CatalogError("duplicate automaton name '" + a.name + "'");
            cat_.automata.push_back(a.name);
            intern(a.name);
        }
        var_types_.resize(automata_.size());
        for (std::size_t i = 0; i < automata_.size(); ++i) infer_datamodel(static_cast<std::uint32_t>(i));
        for (std::size_t i = 0; i < automata_.size(); ++i) walk_automaton(static_cast<std::uint32_t>(i));
        for (auto& e : cat_.events) {
            sort_unique(e.sources);
            sort_unique(e.targets);
        }
        return std::move(cat_);
    }

private:
    static void sort_unique(std::vector<std::uint32_t>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    void intern(const std::string& s) {
        if (!cat_.string_id(s)) cat_.strings.push_back(s);
    }

    void intern_strings_of(const SurfaceExpr& e) {
        if (e.kind == SurfaceExpr::Kind::StrLit) intern(e.text);
        for (const auto& k : e.kids) intern_strings_of(k);
    }

    std::uint32_t ensure_event(const std::string& name) {
        if (auto id = cat_.event_id(name)) return *id;
        EventCatalog::Event e;
        e.name = name;
        cat_.events.push_back(std::move(e));
        return static_cast<std::uint32_t>(cat_.events.size() - 1);
    }

    void lock_signature(std::uint32_t event, std::vector<EventCatalog::Param> params,
                        const std::string& where) {
        auto& e = cat_.events[event];
        if (!e.signature_known) {
            e.signature_known = true;
            e.params = std::move(params);
            return;
        }
        bool same = e.params.size() == params.size();
        for (std::size_t i = 0; same && i < params.size(); ++i)
            same = e.params[i].name == params[i].name && e.params[i].type == params[i].type;
        if (!same)
            throw CatalogError("event '" + e.name + "' is used with conflicting parameter lists (" +
                               where + ")");
    }

    void infer_datamodel(std::uint32_t ai) {
        for (const auto& d : automata_[ai].datamodel) {
            SurfaceExpr ast = parse_surface_expr(d.expr);
            intern_strings_of(ast);
            SurfaceType t = surface_type_of(ast, [](const std::string&) -> std::optional<SurfaceType> {
                return std::nullopt; // initializers are constant expressions
            });
            var_types_[ai][d.id] = t;
        }
    }

    SurfaceType type_of(std::uint32_t ai, const SurfaceExpr& e) {
        return surface_type_of(e, [&](const std::string& name) -> std::optional<SurfaceType> {
            auto it = var_types_[ai].find(name);
            if (it == var_types_[ai].end()) return std::nullopt;
            return it->second;
        });
    }

    void walk_expr(std::uint32_t ai, const std::string& text) {
        SurfaceExpr ast = parse_surface_expr(text);
        intern_strings_of(ast);
        (void)ai;
    }

    void walk_exec(std::uint32_t ai, const ExecContent& content) {
        for (const auto& node : content) {
            if (const auto* a = std::get_if<ExecAssign>(&node.item)) {
                walk_expr(ai, a->expr);
                continue;
            }
            if (const auto* r = std::get_if<ExecRaise>(&node.item)) {
                std::uint32_t e = ensure_event(r->event);
                lock_signature(e, {}, "raised by " + cat_.automata[ai]);
                cat_.events[e].sources.push_back(ai);
                cat_.events[e].targets.push_back(ai);
                continue;
            }
            if (const auto* s = std::get_if<ExecSend>(&node.item)) {
                std::uint32_t e = ensure_event(s->event);
                std::vector<EventCatalog::Param> params;
                for (const auto& p : s->params) {
                    SurfaceExpr ast = parse_surface_expr(p.expr);
                    intern_strings_of(ast);
                    params.push_back({p.name, type_of(ai, ast)});
                }
                lock_signature(e, std::move(params), "sent by " + cat_.automata[ai]);
                cat_.events[e].sources.push_back(ai);
                if (s->target) {
                    auto target = cat_.automaton_id(*s->target);
                    if (!target)
                        throw CatalogError("send of '" + s->event + "' targets unknown automaton '" +
                                           *s->target + "'");
                    cat_.events[e].targets.push_back(*target);
                } else {
                    walk_expr(ai, *s->targetexpr);
                    for (std::uint32_t t = 0; t < automata_.size(); ++t)
                        cat_.events[e].targets.push_back(t);
                }
                continue;
            }
            if (const auto* f = std::get_if<ExecIf>(&node.item)) {
                for (const auto& [guard, body] : f->branches) {
                    if (guard) walk_expr(ai, *guard);
                    walk_exec(ai, body);
                }
                continue;
            }
        }
    }

    void walk_automaton(std::uint32_t ai) {
        const auto& a = automata_[ai];
        for (const auto& s : a.states) {
            walk_exec(ai, s.onentry);
            walk_exec(ai, s.onexit);
            for (const auto& t : s.transitions) {
                if (t.event) ensure_event(*t.event);
                if (t.cond) walk_expr(ai, *t.cond);
                walk_exec(ai, t.body);
            }
        }
    }

    std::span<const ScxmlAutomaton> automata_;
    EventCatalog cat_;
    std::vector<std::map<std::string, SurfaceType>> var_types_;
};

} // namespace

EventCatalog build_catalog(std::span<const ScxmlAutomaton> automata) {
    return CatalogBuilder(automata).build();
}

// ---------------------------------------------------------------------------
// Channel layout
// ---------------------------------------------------------------------------

namespace {

struct ChannelLayout {
    std::vector<ChannelDecl> decls;
    std::vector<ChannelRole> roles;
    std::vector<ChannelId> q_int; // per automaton
    std::vector<ChannelId> q_ext;
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, ChannelId> params; // (recv,event,origin)
};

VarDomain domain_of_type(SurfaceType t, std::size_t string_count) {
    switch (t) {
    case SurfaceType::Bool: return VarDomain::boolean();
    case SurfaceType::Int: return VarDomain::bounded_int(kIntLo, kIntHi);
    case SurfaceType::Rat: return VarDomain::rational();
    case SurfaceType::Str:
        return VarDomain::bounded_int(0, std::max<std::int64_t>(1, static_cast<std::int64_t>(string_count)) - 1);
    }
    return VarDomain::rational();
}

VarDomain param_tuple_domain(const EventCatalog& cat, std::uint32_t event) {
    std::vector<VarDomain> parts;
    for (const auto& p : cat.events[event].params) parts.push_back(domain_of_type(p.type, cat.strings.size()));
    return VarDomain::tuple(std::move(parts));
}

ChannelLayout build_channel_layout(const EventCatalog& cat, const CompileOptions& opts) {
    ChannelLayout layout;
    const std::int64_t event_hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(cat.events.size())) - 1;
    const std::int64_t auto_hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(cat.automata.size())) - 1;
    for (std::uint32_t i = 0; i < cat.automata.size(); ++i) {
        ChannelDecl d;
        d.name = "q_int_" + cat.automata[i];
        d.sender = i;
        d.receiver = i;
        d.capacity = opts.queue_capacity;
        d.message_domain = VarDomain::bounded_int(0, event_hi);
        layout.q_int.push_back(static_cast<ChannelId>(layout.decls.size()));
        layout.decls.push_back(std::move(d));
        layout.roles.push_back({ChannelRole::Kind::InternalQueue, i, 0, 0});
    }
    for (std::uint32_t i = 0; i < cat.automata.size(); ++i) {
        ChannelDecl d;
        d.name = "q_ext_" + cat.automata[i];
        d.sender = std::nullopt; // any automaton may send here
        d.receiver = i;
        d.capacity = opts.queue_capacity;
        d.message_domain = VarDomain::tuple(
            {VarDomain::bounded_int(0, event_hi), VarDomain::bounded_int(0, auto_hi)});
        layout.q_ext.push_back(static_cast<ChannelId>(layout.decls.size()));
        layout.decls.push_back(std::move(d));
        layout.roles.push_back({ChannelRole::Kind::ExternalQueue, i, 0, 0});
    }
    // Parameter channels: one per (receiver, parameterized event, origin).
    // Parameters cannot ride the external queue (its messages are id pairs),
    // and sharing one channel among origins could reorder data relative to
    // the id pairs in q_ext.
    for (std::uint32_t recv = 0; recv < cat.automata.size(); ++recv) {
        for (std::uint32_t e = 0; e < cat.events.size(); ++e) {
            const auto& ev = cat.events[e];
            if (ev.params.empty()) continue;
            if (std::find(ev.targets.begin(), ev.targets.end(), recv) == ev.targets.end()) continue;
            for (std::uint32_t origin : ev.sources) {
                ChannelDecl d;
                d.name = "c_" + ev.name + "_" + cat.automata[origin] + "_to_" + cat.automata[recv];
                d.sender = origin;
                d.receiver = recv;
                d.capacity = opts.queue_capacity;
                d.message_domain = param_tuple_domain(cat, e);
                layout.params[{recv, e, origin}] = static_cast<ChannelId>(layout.decls.size());
                layout.decls.push_back(std::move(d));
                layout.roles.push_back({ChannelRole::Kind::ParamQueue, recv, e, origin});
            }
        }
    }
    return layout;
}

// ---------------------------------------------------------------------------
// Per-automaton compilation
// ---------------------------------------------------------------------------

Value default_value(const VarDomain& d) {
    switch (d.kind()) {
    case VarDomain::Kind::Boolean: return Value(false);
    case VarDomain::Kind::BoundedInt:
        return Value(d.lo() <= 0 && 0 <= d.hi() ? std::int64_t(0) : d.lo());
    case VarDomain::Kind::Rational: return Value(Rational(0));
    case VarDomain::Kind::Tuple: {
        std::vector<Value> parts;
        for (const auto& p : d.parts()) parts.push_back(default_value(p));
        return Value::tuple(std::move(parts));
    }
    }
    return Value(Rational(0));
}

class AutomatonCompiler {
public:
    AutomatonCompiler(const ScxmlAutomaton& a, std::uint32_t self, const EventCatalog& cat,
                      const ChannelLayout& layout, const CompileOptions& opts)
        : doc_(a), self_(self), cat_(cat), layout_(layout), opts_(opts) {}

    ProgramGraph build(std::vector<std::uint32_t>& location_owner,
                       std::vector<std::optional<SurfaceType>>& var_types) {
        pg_.name = doc_.name;
        pg_.actions = {"tau", "sample"};
        pg_.time_quantum = opts_.time_quantum;
        pg_.time_horizon = opts_.time_horizon;

        declare_variables();
        scan_random_locations();
        compile_states();

        pg_.initial_locations = {anchor_.at(doc_.initial)};
        pg_.initial_valuation = init_values_;
        location_owner = owners_;
        var_types = var_types_;
        return std::move(pg_);
    }

private:
    // --- variables -------------------------------------------------------

    VarId add_var(const std::string& name, VarDomain domain, Value init,
                  std::optional<SurfaceType> type = {}) {
        pg_.variables.push_back({name, domain});
        init_values_.push_back(std::move(init));
        var_types_.push_back(type);
        return static_cast<VarId>(pg_.variables.size() - 1);
    }

    bool receives(std::uint32_t event) const {
        const auto& t = cat_.events[event].targets;
        return std::find(t.begin(), t.end(), self_) != t.end();
    }

    void declare_variables() {
        const std::int64_t event_hi =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(cat_.events.size())) - 1;
        const std::int64_t auto_hi =
            std::max<std::int64_t>(1, static_cast<std::int64_t>(cat_.automata.size())) - 1;
        var_event_ = add_var("event", VarDomain::bounded_int(-1, event_hi), Value(std::int64_t(-1)),
                             SurfaceType::Int);
        var_origin_ = add_var("origin", VarDomain::bounded_int(-1, auto_hi), Value(std::int64_t(-1)),
                              SurfaceType::Int);
        VarDomain pair = VarDomain::tuple(
            {VarDomain::bounded_int(0, event_hi), VarDomain::bounded_int(0, auto_hi)});
        var_ext_ = add_var("__ext", pair, default_value(pair));

        for (std::uint32_t e = 0; e < cat_.events.size(); ++e) {
            if (cat_.events[e].params.empty() || !receives(e)) continue;
            VarDomain tup = param_tuple_domain(cat_, e);
            param_tuple_var_[e] = add_var("__params_" + cat_.events[e].name, tup, default_value(tup));
            for (std::size_t i = 0; i < cat_.events[e].params.size(); ++i) {
                const auto& p = cat_.events[e].params[i];
                VarDomain d = domain_of_type(p.type, cat_.strings.size());
                Value init = default_value(d);
                param_var_[{e, static_cast<std::uint32_t>(i)}] =
                    add_var("p_" + cat_.events[e].name + "_" + p.name, d, std::move(init), p.type);
                param_types_[{e, static_cast<std::uint32_t>(i)}] = p.type;
            }
        }

        for (const auto& d : doc_.datamodel) {
            if (d.id.rfind("__", 0) == 0)
                throw ParseError(doc_.name + ": datamodel ids starting with '__' are reserved");
            if (d.id == "event" || d.id == "origin")
                throw ParseError(doc_.name + ": datamodel id '" + d.id + "' collides with a system variable");
            SurfaceExpr ast = parse_surface_expr(d.expr);
            TranslateScope scope; // constants only
            scope.intern = [this](const std::string& s) { return cat_.string_id(s); };
            TranslatedExpr init = translate_surface(ast, scope);
            Value v = init.expr.eval({});
            VarDomain dom = domain_of_type(init.type, cat_.strings.size());
            datamodel_var_[d.id] = add_var(d.id, dom, std::move(v), init.type);
            datamodel_type_[d.id] = init.type;
        }
    }

    // --- Math.random() assigned-then-compared locations -------------------

    void for_each_expr(const ExecContent& content, const std::function<void(const std::string&)>& fn,
                       const std::function<void(const ExecAssign&)>& on_assign) {
        for (const auto& node : content) {
            if (const auto* a = std::get_if<ExecAssign>(&node.item)) {
                on_assign(*a);
                continue;
            }
            if (const auto* s = std::get_if<ExecSend>(&node.item)) {
                if (s->targetexpr) fn(*s->targetexpr);
                for (const auto& p : s->params) fn(p.expr);
                continue;
            }
            if (const auto* f = std::get_if<ExecIf>(&node.item)) {
                for (const auto& [guard, body] : f->branches) {
                    if (guard) fn(*guard);
                    for_each_expr(body, fn, on_assign);
                }
                continue;
            }
        }
    }

    void for_each_document_expr(const std::function<void(const std::string&)>& fn,
                                const std::function<void(const ExecAssign&)>& on_assign) {
        for (const auto& s : doc_.states) {
            for_each_expr(s.onentry, fn, on_assign);
            for_each_expr(s.onexit, fn, on_assign);
            for (const auto& t : s.transitions) {
                if (t.cond) fn(*t.cond);
                for_each_expr(t.body, fn, on_assign);
            }
        }
    }

    /// Finds datamodel locations assigned a bare Math.random() and collects
    /// the constants they are compared against; every other use of such a
    /// location is rejected. The draw is then discretized into the segments
    /// between the comparison constants.
    void scan_random_locations() {
        for_each_document_expr([](const std::string&) {},
                               [&](const ExecAssign& a) {
                                   SurfaceExpr ast = parse_surface_expr(a.expr);
                                   if (ast.is_bare_random()) random_locations_.insert(a.location);
                               });
        if (random_locations_.empty()) return;
        for (const auto& loc : random_locations_) {
            auto it = datamodel_type_.find(loc);
            if (it == datamodel_type_.end())
                throw ParseError(doc_.name + ": Math.random() assigned to unknown location '" + loc + "'");
            if (it->second != SurfaceType::Rat)
                throw ParseError(doc_.name + ": location '" + loc +
                                 "' holding Math.random() must be initialized with a number");
        }
        auto check = [&](const std::string& text) {
            SurfaceExpr ast = parse_surface_expr(text);
            collect_cutpoints(ast);
        };
        for_each_document_expr(check, [&](const ExecAssign& a) {
            SurfaceExpr ast = parse_surface_expr(a.expr);
            if (!ast.is_bare_random()) check(a.expr);
        });
    }

    static std::optional<Rational> const_of(const SurfaceExpr& e) {
        if (e.kind == SurfaceExpr::Kind::IntLit) return Rational(e.int_value);
        if (e.kind == SurfaceExpr::Kind::RatLit) return e.rat_value;
        if (e.kind == SurfaceExpr::Kind::Neg) {
            if (auto inner = const_of(e.kids[0])) return -*inner;
        }
        return std::nullopt;
    }

    bool is_random_ident(const SurfaceExpr& e) const {
        return e.kind == SurfaceExpr::Kind::Ident && random_locations_.count(e.text) > 0;
    }

    void collect_cutpoints(const SurfaceExpr& e) {
        if (e.kind == SurfaceExpr::Kind::Binary) {
            bool left_r = is_random_ident(e.kids[0]);
            bool right_r = is_random_ident(e.kids[1]);
            if (left_r || right_r) {
                const SurfaceExpr& other = e.kids[left_r ? 1 : 0];
                auto c = const_of(other);
                bool ordering = e.op == SurfaceExpr::BinOp::Lt || e.op == SurfaceExpr::BinOp::Le ||
                                e.op == SurfaceExpr::BinOp::Gt || e.op == SurfaceExpr::BinOp::Ge;
                if (!c || !ordering)
                    throw ParseError(doc_.name + ": a location holding Math.random() may only be "
                                                 "order-compared against numeric constants");
                const std::string& loc = (left_r ? e.kids[0] : e.kids[1]).text;
                if (Rational(0) < *c && *c < Rational(1)) cutpoints_[loc].insert(*c);
                collect_cutpoints(other);
                return;
            }
        }
        if (is_random_ident(e))
            throw ParseError(doc_.name + ": a location holding Math.random() may only be "
                                         "order-compared against numeric constants");
        for (const auto& k : e.kids) collect_cutpoints(k);
    }

    // --- location / transition plumbing ----------------------------------

    LocationId new_location(const std::string& name, std::uint32_t owner) {
        pg_.locations.push_back({name});
        owners_.push_back(owner);
        return static_cast<LocationId>(pg_.locations.size() - 1);
    }

    PgTransition& add_transition(LocationId from, LocationId to, Expr guard = Expr::bool_const(true)) {
        PgTransition t;
        t.source = from;
        t.target = to;
        t.action = kActionTau;
        t.guard = std::move(guard);
        pg_.transitions.push_back(std::move(t));
        return pg_.transitions.back();
    }

    // --- expression translation ------------------------------------------

    /// Scope for conds/assignments at a chain point; Math.random()
    /// comparisons insert a sampling pre-transition at *cur.
    TranslateScope make_scope(LocationId* cur, std::uint32_t owner,
                              std::optional<std::uint32_t> current_event) {
        TranslateScope scope;
        scope.ident = [this](const std::string& name) -> std::optional<TranslateScope::Resolved> {
            auto it = datamodel_var_.find(name);
            if (it == datamodel_var_.end()) return std::nullopt;
            return TranslateScope::Resolved{it->second, datamodel_type_.at(name)};
        };
        scope.member = [this, current_event](
                           std::span<const std::string> path) -> std::optional<TranslateScope::Resolved> {
            if (path.size() == 2 && path[0] == "_event" && path[1] == "origin")
                return TranslateScope::Resolved{var_origin_, SurfaceType::Int};
            if (path.size() == 3 && path[0] == "_event" && path[1] == "data") {
                if (!current_event)
                    throw ParseError(doc_.name + ": _event.data is only readable while "
                                                 "processing an eventful transition");
                const auto& params = cat_.events[*current_event].params;
                for (std::size_t i = 0; i < params.size(); ++i) {
                    if (params[i].name == path[2]) {
                        auto key = std::make_pair(*current_event, static_cast<std::uint32_t>(i));
                        return TranslateScope::Resolved{param_var_.at(key), param_types_.at(key)};
                    }
                }
                throw ParseError(doc_.name + ": event '" + cat_.events[*current_event].name +
                                 "' has no parameter '" + path[2] + "'");
            }
            if (!path.empty() && path[0] == "_event")
                throw ParseError(doc_.name + ": unsupported system variable '" + join_path(path) + "'");
            return std::nullopt;
        };
        scope.intern = [this](const std::string& s) { return cat_.string_id(s); };
        if (cur != nullptr) {
            scope.bernoulli = [this, cur, owner](const Rational& p) {
                VarId v = add_var("__rnd" + std::to_string(rnd_counter_++), VarDomain::boolean(),
                                  Value(false), SurfaceType::Bool);
                LocationId next = new_location(pg_.locations[*cur].name + "~rnd", owner);
                PgTransition& t = add_transition(*cur, next);
                t.action = kActionSample;
                t.effect = Effect::probabilistic(
                    {{p, {{v, Expr::bool_const(true)}}},
                     {Rational(1) - p, {{v, Expr::bool_const(false)}}}});
                *cur = next;
                return v;
            };
        }
        return scope;
    }

    TranslatedExpr translate_at(const std::string& text, LocationId* cur, std::uint32_t owner,
                                std::optional<std::uint32_t> current_event) {
        return translate_surface(parse_surface_expr(text), make_scope(cur, owner, current_event));
    }

    // --- executable content -----------------------------------------------

    LocationId lower_assign(const ExecAssign& a, LocationId cur, std::uint32_t owner,
                            std::optional<std::uint32_t> current_event) {
        auto it = datamodel_var_.find(a.location);
        if (it == datamodel_var_.end())
            throw ParseError(doc_.name + ": <assign> to unknown location '" + a.location + "'");
        VarId var = it->second;
        SurfaceType var_type = datamodel_type_.at(a.location);

        SurfaceExpr ast = parse_surface_expr(a.expr);
        if (ast.is_bare_random()) {
            // Discretized uniform draw: one branch per segment between the
            // comparison constants, holding the segment's midpoint.
            std::vector<Rational> cuts(cutpoints_[a.location].begin(), cutpoints_[a.location].end());
            std::vector<Rational> bounds;
            bounds.push_back(Rational(0));
            bounds.insert(bounds.end(), cuts.begin(), cuts.end());
            bounds.push_back(Rational(1));
            std::vector<EffectBranch> branches;
            for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
                Rational width = bounds[i + 1] - bounds[i];
                if (width.is_zero()) continue;
                Rational mid = (bounds[i] + bounds[i + 1]) * Rational(1, 2);
                branches.push_back({width, {{var, Expr::rat_const(mid)}}});
            }
            LocationId next = new_location(pg_.locations[cur].name + "~draw", owner);
            PgTransition& t = add_transition(cur, next);
            t.action = kActionSample;
            t.effect = branches.size() == 1 ? Effect::deterministic(branches.front().updates)
                                            : Effect::probabilistic(std::move(branches));
            return next;
        }

        TranslatedExpr rhs = translate_at(a.expr, &cur, owner, current_event);
        bool ok = rhs.type == var_type ||
                  (var_type == SurfaceType::Rat && rhs.type == SurfaceType::Int);
        if (!ok)
            throw ParseError(doc_.name + ": assigning " + surface_type_name(rhs.type) + " to '" +
                             a.location + "' of type " + surface_type_name(var_type));
        LocationId next = new_location(pg_.locations[cur].name + "~asgn", owner);
        PgTransition& t = add_transition(cur, next);
        t.effect = Effect::deterministic({{var, std::move(rhs.expr)}});
        return next;
    }

    LocationId lower_raise(const ExecRaise& r, LocationId cur, std::uint32_t owner) {
        auto e = cat_.event_id(r.event);
        if (!e) throw CatalogError(doc_.name + ": raise of unknown event '" + r.event + "'");
        LocationId next = new_location(pg_.locations[cur].name + "~raise", owner);
        PgTransition& t = add_transition(cur, next);
        t.comm = CommAction::send_const(layout_.q_int[self_], Value(static_cast<std::int64_t>(*e)));
        return next;
    }

    LocationId lower_send(const ExecSend& s, LocationId cur, std::uint32_t owner,
                          std::optional<std::uint32_t> current_event) {
        auto eid = cat_.event_id(s.event);
        if (!eid) throw CatalogError(doc_.name + ": send of unknown event '" + s.event + "'");
        const auto& ev = cat_.events[*eid];

        // Parameters are packed into a temporary tuple before the id pair is
        // enqueued, so they are evaluated exactly once per send.
        std::optional<VarId> send_tmp;
        if (!ev.params.empty()) {
            if (s.params.size() != ev.params.size())
                throw CatalogError(doc_.name + ": send of '" + s.event + "' with wrong parameter count");
            std::vector<Expr> elems;
            for (std::size_t i = 0; i < s.params.size(); ++i) {
                if (s.params[i].name != ev.params[i].name)
                    throw CatalogError(doc_.name + ": parameters of '" + s.event +
                                       "' must be ordered as first declared");
                TranslatedExpr te = translate_at(s.params[i].expr, &cur, owner, current_event);
                if (te.type != ev.params[i].type &&
                    !(ev.params[i].type == SurfaceType::Rat && te.type == SurfaceType::Int))
                    throw CatalogError(doc_.name + ": parameter '" + s.params[i].name + "' of '" +
                                       s.event + "' has inconsistent type");
                elems.push_back(std::move(te.expr));
            }
            VarDomain tup = param_tuple_domain(cat_, *eid);
            VarId tmp = add_var("__send" + std::to_string(send_counter_++), tup, default_value(tup));
            LocationId next = new_location(pg_.locations[cur].name + "~pack", owner);
            PgTransition& t = add_transition(cur, next);
            t.effect = Effect::deterministic({{tmp, Expr::make_tuple(std::move(elems))}});
            send_tmp = tmp;
            cur = next;
        }

        // A delayed send waits on a fresh clock and fires exactly at the
        // given number of time-units after the send was initiated.
        std::optional<ClockId> delay_clock;
        if (s.delay > 0) {
            ClockId clk = static_cast<ClockId>(pg_.clocks.size());
            pg_.clocks.push_back({"__delay" + std::to_string(delay_counter_++)});
            LocationId wait = new_location(pg_.locations[cur].name + "~wait", owner);
            PgTransition& t = add_transition(cur, wait);
            t.resets = {clk};
            cur = wait;
            delay_clock = clk;
        }

        // Static target: one send; dynamic targetexpr: one guarded replica
        // per possible receiver.
        std::vector<std::pair<Expr, std::uint32_t>> receivers;
        if (s.target) {
            auto target = cat_.automaton_id(*s.target);
            if (!target)
                throw CatalogError(doc_.name + ": send targets unknown automaton '" + *s.target + "'");
            receivers.emplace_back(Expr::bool_const(true), *target);
        } else {
            TranslatedExpr te = translate_at(*s.targetexpr, &cur, owner, current_event);
            if (te.type != SurfaceType::Str)
                throw ParseError(doc_.name + ": targetexpr must be a string expression");
            for (std::uint32_t b = 0; b < cat_.automata.size(); ++b) {
                Expr guard = Expr::eq(te.expr, Expr::int_const(cat_.require_string(cat_.automata[b])));
                receivers.emplace_back(std::move(guard), b);
            }
        }

        LocationId done = new_location(pg_.locations[cur].name + "~sent", owner);
        for (auto& [guard, b] : receivers) {
            Value pair = Value::tuple({Value(static_cast<std::int64_t>(*eid)),
                                       Value(static_cast<std::int64_t>(self_))});
            LocationId after_pair = send_tmp ? new_location(pg_.locations[cur].name + "~data", owner) : done;
            PgTransition& t = add_transition(cur, after_pair, std::move(guard));
            t.comm = CommAction::send_const(layout_.q_ext[b], std::move(pair));
            if (delay_clock)
                t.clock_guard = ClockConstraint::equals(*delay_clock, Rational(static_cast<std::int64_t>(s.delay)));
            if (send_tmp) {
                PgTransition& tp = add_transition(after_pair, done);
                tp.comm = CommAction::send_var(layout_.params.at({b, *eid, self_}), *send_tmp);
            }
        }
        return done;
    }

    LocationId lower_if(const ExecIf& f, LocationId cur, std::uint32_t owner,
                        std::optional<std::uint32_t> current_event) {
        // Translate all guards first (sampling pre-transitions attach before
        // the fan-out), then branch with mutually exclusive guards.
        std::vector<std::optional<Expr>> guards;
        for (const auto& [guard, body] : f.branches) {
            if (guard)
                guards.push_back(translate_at(*guard, &cur, owner, current_event).expr);
            else
                guards.push_back(std::nullopt);
        }
        LocationId join = new_location(pg_.locations[cur].name + "~fi", owner);
        Expr none_before = Expr::bool_const(true);
        bool has_else = false;
        for (std::size_t i = 0; i < f.branches.size(); ++i) {
            Expr full = guards[i] ? Expr::land(none_before, *guards[i]) : none_before;
            if (!guards[i]) has_else = true;
            LocationId body_start = new_location(pg_.locations[cur].name + "~b" + std::to_string(i), owner);
            add_transition(cur, body_start, std::move(full));
            LocationId body_end = lower_exec(f.branches[i].second, body_start, owner, current_event);
            add_transition(body_end, join);
            if (guards[i]) none_before = Expr::land(none_before, Expr::lnot(*guards[i]));
        }
        if (!has_else) add_transition(cur, join, std::move(none_before));
        return join;
    }

    LocationId lower_exec(const ExecContent& content, LocationId entry, std::uint32_t owner,
                          std::optional<std::uint32_t> current_event) {
        LocationId cur = entry;
        for (const auto& node : content) {
            if (const auto* a = std::get_if<ExecAssign>(&node.item)) {
                cur = lower_assign(*a, cur, owner, current_event);
            } else if (const auto* r = std::get_if<ExecRaise>(&node.item)) {
                cur = lower_raise(*r, cur, owner);
            } else if (const auto* s = std::get_if<ExecSend>(&node.item)) {
                cur = lower_send(*s, cur, owner, current_event);
            } else if (const auto* f = std::get_if<ExecIf>(&node.item)) {
                cur = lower_if(*f, cur, owner, current_event);
            }
        }
        return cur;
    }

    // --- states ------------------------------------------------------------

    Expr event_is(std::uint32_t event) const {
        return Expr::eq(Expr::var(var_event_), Expr::int_const(static_cast<std::int64_t>(event)));
    }

    void compile_states() {
        for (std::uint32_t si = 0; si < doc_.states.size(); ++si)
            anchor_[doc_.states[si].id] = new_location(doc_.states[si].id, si);

        for (std::uint32_t si = 0; si < doc_.states.size(); ++si) compile_state(si);
    }

    void compile_state(std::uint32_t si) {
        const ScxmlState& s = doc_.states[si];
        LocationId cur = lower_exec(s.onentry, anchor_.at(s.id), si, std::nullopt);

        std::vector<const ScxmlTransition*> eventless;
        std::vector<const ScxmlTransition*> eventful;
        for (const auto& t : s.transitions) (t.event ? eventful : eventless).push_back(&t);

        // Eventless transitions are tested once, in document order, before
        // any event is dequeued.
        for (std::size_t k = 0; k < eventless.size(); ++k) {
            const ScxmlTransition& t = *eventless[k];
            Expr g = t.cond ? translate_at(*t.cond, &cur, si, std::nullopt).expr : Expr::bool_const(true);
            LocationId hat = new_location(s.id + "#t" + std::to_string(k), si);
            LocationId nxt = new_location(
                k + 1 < eventless.size() ? s.id + "#try" + std::to_string(k + 1) : s.id + "#evt", si);
            add_transition(cur, hat, g);
            add_transition(cur, nxt, Expr::lnot(std::move(g)));
            LocationId end = lower_exec(s.onexit, hat, si, std::nullopt);
            end = lower_exec(t.body, end, si, std::nullopt);
            add_transition(end, anchor_.at(t.target));
            cur = nxt;
        }

        // Event-processing loop: dequeue from the internal queue if
        // non-empty, otherwise read (event, origin) from the external queue
        // plus, for parameterized events, the origin's data channel.
        LocationId p = cur;
        LocationId fstart = eventful.empty() ? p : new_location(s.id + "#on0", si);
        {
            PgTransition& t = add_transition(p, fstart);
            t.comm = CommAction::recv_var(layout_.q_int[self_], var_event_);
        }
        LocationId p1 = new_location(s.id + "#ext", si);
        {
            PgTransition& t = add_transition(p, p1);
            t.comm = CommAction::probe_empty(layout_.q_int[self_]);
        }
        LocationId p1b = new_location(s.id + "#ext_read", si);
        {
            PgTransition& t = add_transition(p1, p1b);
            t.comm = CommAction::recv_var(layout_.q_ext[self_], var_ext_);
        }
        LocationId p2 = new_location(s.id + "#dispatch", si);
        {
            PgTransition& t = add_transition(p1b, p2);
            t.effect = Effect::deterministic({{var_event_, Expr::proj(Expr::var(var_ext_), 0)},
                                              {var_origin_, Expr::proj(Expr::var(var_ext_), 1)}});
        }
        for (std::uint32_t e = 0; e < cat_.events.size(); ++e) {
            if (!receives(e)) continue;
            const auto& ev = cat_.events[e];
            if (ev.params.empty()) {
                add_transition(p2, fstart, event_is(e));
                continue;
            }
            for (std::uint32_t origin : ev.sources) {
                Expr guard = Expr::land(event_is(e),
                                        Expr::eq(Expr::var(var_origin_),
                                                 Expr::int_const(static_cast<std::int64_t>(origin))));
                LocationId load = new_location(s.id + "#load_" + ev.name + "_" + cat_.automata[origin], si);
                PgTransition& t = add_transition(p2, load, std::move(guard));
                t.comm = CommAction::recv_var(layout_.params.at({self_, e, origin}),
                                              param_tuple_var_.at(e));
                std::vector<Assignment> unpack;
                for (std::uint32_t i = 0; i < ev.params.size(); ++i)
                    unpack.push_back({param_var_.at({e, i}),
                                      Expr::proj(Expr::var(param_tuple_var_.at(e)), i)});
                PgTransition& tu = add_transition(load, fstart);
                tu.effect = Effect::deterministic(std::move(unpack));
            }
        }

        // Eventful transitions, in document order; the guard additionally
        // tests the id of the event being processed, and the final
        // fall-through returns to the event-reading location.
        LocationId floc = fstart;
        for (std::size_t k = 0; k < eventful.size(); ++k) {
            const ScxmlTransition& t = *eventful[k];
            auto eid = cat_.event_id(*t.event);
            if (!eid) throw CatalogError(doc_.name + ": transition on unknown event '" + *t.event + "'");
            Expr g = t.cond ? translate_at(*t.cond, &floc, si, *eid).expr : Expr::bool_const(true);
            Expr full = Expr::land(event_is(*eid), g);
            LocationId hat = new_location(s.id + "#f" + std::to_string(k), si);
            LocationId nxt =
                k + 1 < eventful.size() ? new_location(s.id + "#on" + std::to_string(k + 1), si) : p;
            add_transition(floc, hat, full);
            add_transition(floc, nxt, Expr::lnot(std::move(full)));
            LocationId end = lower_exec(s.onexit, hat, si, std::nullopt);
            end = lower_exec(t.body, end, si, *eid);
            add_transition(end, anchor_.at(t.target));
            floc = nxt;
        }
    }

    const ScxmlAutomaton& doc_;
    std::uint32_t self_;
    const EventCatalog& cat_;
    const ChannelLayout& layout_;
    const CompileOptions& opts_;

    ProgramGraph pg_;
    std::vector<Value> init_values_;
    std::vector<std::optional<SurfaceType>> var_types_;
    std::vector<std::uint32_t> owners_;
    std::map<std::string, LocationId> anchor_;

    VarId var_event_ = 0;
    VarId var_origin_ = 0;
    VarId var_ext_ = 0;
    std::map<std::string, VarId> datamodel_var_;
    std::map<std::string, SurfaceType> datamodel_type_;
    std::map<std::uint32_t, VarId> param_tuple_var_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, VarId> param_var_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, SurfaceType> param_types_;

    std::set<std::string> random_locations_;
    std::map<std::string, std::set<Rational>> cutpoints_;

    unsigned rnd_counter_ = 0;
    unsigned send_counter_ = 0;
    unsigned delay_counter_ = 0;
};

} // namespace

std::vector<LocationId> CompiledModel::locations_of_state(std::uint32_t pg,
                                                          const std::string& state) const {
    std::vector<LocationId> out;
    const auto& owners = location_owner.at(pg);
    const auto& names = state_names.at(pg);
    for (std::uint32_t l = 0; l < owners.size(); ++l) {
        if (names.at(owners[l]) == state) out.push_back(l);
    }
    return out;
}

CompiledModel compile(std::span<const ScxmlAutomaton> automata, const EventCatalog& catalog,
                      const CompileOptions& options) {
    if (automata.empty()) throw ParseError("no automata to compile");
    if (options.queue_capacity == 0) throw ParseError("queue capacity must be at least 1");
    ChannelLayout layout = build_channel_layout(catalog, options);

    std::vector<ProgramGraph> pgs;
    std::vector<std::vector<std::uint32_t>> owners(automata.size());
    std::vector<std::vector<std::string>> state_names(automata.size());
    std::vector<std::optional<SurfaceType>> var_types;
    for (std::uint32_t i = 0; i < automata.size(); ++i) {
        AutomatonCompiler compiler(automata[i], i, catalog, layout, options);
        std::vector<std::optional<SurfaceType>> pg_types;
        pgs.push_back(compiler.build(owners[i], pg_types));
        var_types.insert(var_types.end(), pg_types.begin(), pg_types.end());
        for (const auto& s : automata[i].states) state_names[i].push_back(s.id);
    }

    return CompiledModel{
        ChannelSystem(std::move(pgs), layout.decls, options.time_quantum, options.time_horizon),
        catalog,
        std::move(layout.roles),
        std::move(owners),
        std::move(state_names),
        std::move(var_types),
    };
}

CompiledModel compile(std::span<const ScxmlAutomaton> automata, const CompileOptions& options) {
    EventCatalog catalog = build_catalog(automata);
    return compile(automata, catalog, options);
}

} // namespace tpcs
