#include "tpcs/properties.hpp"

#include "tpcs/errors.hpp"
#include "tpcs/expr_parser.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tpcs {

namespace {

// --- s-expression reader ---------------------------------------------------

struct Sexpr {
    std::string atom; // empty for lists
    std::vector<Sexpr> items;
    bool is_list = false;
};

class SexprReader {
public:
    explicit SexprReader(std::string_view src) : src_(src) {}

    Sexpr read() {
        Sexpr e = read_one();
        skip_ws();
        if (i_ < src_.size()) fail("trailing input after formula");
        return e;
    }

private:
    void skip_ws() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw PropertyError("formula syntax: " + msg + " in '" + std::string(src_) + "'");
    }
    Sexpr read_one() {
        skip_ws();
        if (i_ >= src_.size()) fail("unexpected end");
        if (src_[i_] == '(') {
            ++i_;
            Sexpr list;
            list.is_list = true;
            for (;;) {
                skip_ws();
                if (i_ >= src_.size()) fail("missing ')'");
                if (src_[i_] == ')') {
                    ++i_;
                    return list;
                }
                list.items.push_back(read_one());
            }
        }
        if (src_[i_] == ')') fail("unexpected ')'");
        if (src_[i_] == '\'' || src_[i_] == '"') {
            char quote = src_[i_++];
            std::size_t start = i_;
            while (i_ < src_.size() && src_[i_] != quote) ++i_;
            if (i_ >= src_.size()) fail("unterminated string");
            Sexpr e;
            // NUL-prefixed marker distinguishes quoted strings from symbols
            e.atom = std::string("\0s", 2) + std::string(src_.substr(start, i_ - start));
            ++i_;
            return e;
        }
        std::size_t start = i_;
        while (i_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[i_])) &&
               src_[i_] != '(' && src_[i_] != ')')
            ++i_;
        Sexpr e;
        e.atom = std::string(src_.substr(start, i_ - start));
        return e;
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

bool is_string_atom(const Sexpr& e) { return !e.is_list && e.atom.size() >= 2 && e.atom[0] == '\0'; }
std::string string_atom_value(const Sexpr& e) { return e.atom.substr(2); }

// --- formula construction ---------------------------------------------------

class FormulaParser {
public:
    FormulaParser(PropertySet& set, const PropertyContext& ctx) : set_(set), ctx_(ctx) {
        if (!ctx_.cs) throw PropertyError("property parsing needs a model");
        for (std::uint32_t i = 0; i < set_.atoms.size(); ++i) known_[set_.atoms[i].name()] = i;
    }

    Formula parse(const std::string& text) { return formula(SexprReader(text).read()); }

private:
    [[noreturn]] void fail(const std::string& msg) { throw PropertyError("formula: " + msg); }

    const std::string& symbol(const Sexpr& e, const char* what) {
        if (e.is_list || is_string_atom(e)) fail(std::string("expected ") + what);
        return e.atom;
    }

    Rational rational_arg(const Sexpr& e, const char* what) {
        auto r = Rational::parse(symbol(e, what));
        if (!r) fail(std::string("bad ") + what + " '" + e.atom + "'");
        return *r;
    }

    Interval interval(const Sexpr& lo, const Sexpr& hi) {
        Rational l = rational_arg(lo, "interval bound");
        if (!hi.is_list && hi.atom == "inf") return Interval::unbounded(l);
        return Interval::bounded(l, rational_arg(hi, "interval bound"));
    }

    std::uint32_t intern_atom(AtomDef atom) {
        auto it = known_.find(atom.name());
        if (it != known_.end()) return it->second;
        atom.check(*ctx_.cs);
        set_.atoms.push_back(std::move(atom));
        std::uint32_t id = static_cast<std::uint32_t>(set_.atoms.size() - 1);
        known_[set_.atoms.back().name()] = id;
        return id;
    }

    Value literal(const Sexpr& e) {
        if (e.is_list) fail("expected a literal");
        if (is_string_atom(e)) {
            if (!ctx_.model) fail("string literals need a compiled model");
            auto id = ctx_.model->catalog.string_id(string_atom_value(e));
            if (!id) fail("unknown string literal '" + string_atom_value(e) + "'");
            return Value(*id);
        }
        if (e.atom == "true") return Value(true);
        if (e.atom == "false") return Value(false);
        auto r = Rational::parse(e.atom);
        if (!r) fail("bad literal '" + e.atom + "'");
        if (r->is_integer()) return Value(r->num());
        return Value(*r);
    }

    AtomDef::Cmp cmp_of(const std::string& s) {
        if (s == "=" || s == "==") return AtomDef::Cmp::Eq;
        if (s == "!=") return AtomDef::Cmp::Ne;
        if (s == "<") return AtomDef::Cmp::Lt;
        if (s == "<=") return AtomDef::Cmp::Le;
        if (s == ">") return AtomDef::Cmp::Gt;
        if (s == ">=") return AtomDef::Cmp::Ge;
        fail("unknown comparison '" + s + "'");
    }

    Formula event_atom(const Sexpr& e) {
        // (event CH) | (event CH CMP LIT) | (event CH IDX CMP LIT)
        const std::string& ch_name = symbol(e.items[1], "channel name");
        auto ch = ctx_.cs->find_channel(ch_name);
        if (!ch) fail("unknown channel '" + ch_name + "'");
        std::optional<std::uint32_t> element;
        std::optional<std::pair<AtomDef::Cmp, Value>> compare;
        std::string name = "event:" + ch_name;
        if (e.items.size() == 4) {
            compare = {cmp_of(symbol(e.items[2], "comparison")), literal(e.items[3])};
        } else if (e.items.size() == 5) {
            element = static_cast<std::uint32_t>(rational_arg(e.items[2], "payload index").num());
            compare = {cmp_of(symbol(e.items[3], "comparison")), literal(e.items[4])};
        } else if (e.items.size() != 2) {
            fail("(event …) takes 1, 3 or 4 arguments");
        }
        if (compare) {
            name += element ? "[" + std::to_string(*element) + "]" : "";
            name += symbol(e.items[e.items.size() - 2], "comparison") + compare->second.str();
        }
        return Formula::atom(intern_atom(AtomDef::event(name, *ch, element, compare)));
    }

    Formula loc_atom(const Sexpr& e) {
        if (e.items.size() != 3) fail("(loc PG STATE) takes 2 arguments");
        const std::string& pg_name = symbol(e.items[1], "automaton name");
        const std::string& state = symbol(e.items[2], "state name");
        auto pg = ctx_.cs->find_pg(pg_name);
        if (!pg) fail("unknown automaton '" + pg_name + "'");
        std::vector<LocationId> locs;
        if (ctx_.model) locs = ctx_.model->locations_of_state(*pg, state);
        if (locs.empty()) {
            // fall back to a raw location name (hand-built systems)
            const auto& infos = ctx_.cs->pgs()[*pg].locations;
            for (std::uint32_t l = 0; l < infos.size(); ++l) {
                if (infos[l].name == state) locs.push_back(l);
            }
        }
        if (locs.empty()) fail("automaton '" + pg_name + "' has no state '" + state + "'");
        return Formula::atom(intern_atom(AtomDef::location("loc:" + pg_name + "." + state, *pg, locs)));
    }

    Formula guard_atom(const Sexpr& e) {
        if (e.items.size() != 2 || !is_string_atom(e.items[1]))
            fail("(guard \"expr\") takes one quoted expression");
        std::string text = string_atom_value(e.items[1]);
        TranslateScope scope;
        scope.ident = [&](const std::string& name) -> std::optional<TranslateScope::Resolved> {
            // unqualified name: unique across all graphs
            std::optional<TranslateScope::Resolved> found;
            for (std::uint32_t pg = 0; pg < ctx_.cs->pgs().size(); ++pg) {
                if (auto v = ctx_.cs->find_var(ctx_.cs->pgs()[pg].name, name)) {
                    if (found) throw PropertyError("variable '" + name + "' is ambiguous; qualify it");
                    found = resolved(*v);
                }
            }
            return found;
        };
        scope.member = [&](std::span<const std::string> path) -> std::optional<TranslateScope::Resolved> {
            if (path.size() != 2) return std::nullopt;
            if (auto v = ctx_.cs->find_var(path[0], path[1])) return resolved(*v);
            return std::nullopt;
        };
        if (ctx_.model) {
            scope.intern = [&](const std::string& s) { return ctx_.model->catalog.string_id(s); };
        }
        TranslatedExpr te = translate_surface(parse_surface_expr(text), scope);
        if (te.type != SurfaceType::Bool) throw PropertyError("guard atom '" + text + "' is not boolean");
        return Formula::atom(intern_atom(AtomDef::guard("guard:" + text, std::move(te.expr))));
    }

    TranslateScope::Resolved resolved(VarId global) const {
        SurfaceType t = SurfaceType::Int;
        if (ctx_.model && global < ctx_.model->var_surface_types.size()) {
            const auto& tagged = ctx_.model->var_surface_types[global];
            if (!tagged) throw PropertyError("internal helper variables cannot appear in guard atoms");
            t = *tagged;
        } else {
            switch (ctx_.cs->global_domains()[global].kind()) {
            case VarDomain::Kind::Boolean: t = SurfaceType::Bool; break;
            case VarDomain::Kind::BoundedInt: t = SurfaceType::Int; break;
            case VarDomain::Kind::Rational: t = SurfaceType::Rat; break;
            case VarDomain::Kind::Tuple:
                throw PropertyError("tuple-typed variables cannot appear in guard atoms");
            }
        }
        return {global, t};
    }

    Formula formula(const Sexpr& e) {
        if (!e.is_list) {
            if (e.atom == "true") return Formula::truth(true);
            if (e.atom == "false") return Formula::truth(false);
            fail("bare symbol '" + e.atom + "' is not a formula");
        }
        if (e.items.empty()) fail("empty list");
        const std::string& head = symbol(e.items[0], "operator");

        auto args = [&](std::size_t n) {
            if (e.items.size() != n + 1)
                fail("(" + head + " …) takes " + std::to_string(n) + " arguments");
        };
        auto nary = [&](bool conj) {
            if (e.items.size() < 3) fail("(" + head + " …) takes at least 2 arguments");
            Formula acc = formula(e.items[1]);
            for (std::size_t i = 2; i < e.items.size(); ++i) {
                acc = conj ? Formula::conjunction(std::move(acc), formula(e.items[i]))
                           : Formula::disjunction(std::move(acc), formula(e.items[i]));
            }
            return acc;
        };

        if (head == "not") {
            args(1);
            return Formula::negation(formula(e.items[1]));
        }
        if (head == "and") return nary(true);
        if (head == "or") return nary(false);
        if (head == "implies") {
            args(2);
            return Formula::implication(formula(e.items[1]), formula(e.items[2]));
        }
        if (head == "until" || head == "since") {
            args(4);
            Interval I = interval(e.items[1], e.items[2]);
            Formula a = formula(e.items[3]);
            Formula b = formula(e.items[4]);
            return head == "until" ? Formula::until(I, std::move(a), std::move(b))
                                   : Formula::since(I, std::move(a), std::move(b));
        }
        if (head == "eventually" || head == "globally" || head == "once" || head == "historically") {
            args(3);
            Interval I = interval(e.items[1], e.items[2]);
            Formula f = formula(e.items[3]);
            if (head == "eventually") return Formula::eventually(I, std::move(f));
            if (head == "globally") return Formula::globally(I, std::move(f));
            if (head == "once") return Formula::once(I, std::move(f));
            return Formula::historically(I, std::move(f));
        }
        if (head == "event") return event_atom(e);
        if (head == "loc") return loc_atom(e);
        if (head == "guard") return guard_atom(e);
        fail("unknown operator '" + head + "'");
    }

    PropertySet& set_;
    const PropertyContext& ctx_;
    std::map<std::string, std::uint32_t> known_;
};

} // namespace

Formula parse_formula(const std::string& text, PropertySet& set, const PropertyContext& ctx) {
    return FormulaParser(set, ctx).parse(text);
}

PropertySet parse_properties_xml(const std::string& xml_text, const PropertyContext& ctx) {
    boost::property_tree::ptree doc;
    try {
        std::istringstream in(xml_text);
        boost::property_tree::read_xml(in, doc, boost::property_tree::xml_parser::trim_whitespace);
    } catch (const std::exception& e) {
        throw PropertyError(std::string("property XML syntax error: ") + e.what());
    }
    auto root = doc.get_child_optional("properties");
    if (!root) throw PropertyError("property document has no <properties> root");

    PropertySet set;
    for (const auto& [key, node] : *root) {
        if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
        if (key != "property") throw PropertyError("unsupported element <" + key + "> in properties");
        std::string name = node.get<std::string>("<xmlattr>.name", "");
        if (name.empty()) throw PropertyError("<property> needs a name");
        auto text = node.get_optional<std::string>("formula");
        if (!text || text->empty()) throw PropertyError("property '" + name + "' needs a <formula>");
        for (const auto& p : set.properties) {
            if (p.name == name) throw PropertyError("duplicate property name '" + name + "'");
        }
        set.properties.push_back({name, parse_formula(*text, set, ctx)});
    }
    if (set.properties.empty()) throw PropertyError("property document declares no properties");
    return set;
}

PropertySet parse_properties_file(const std::string& path, const PropertyContext& ctx) {
    std::ifstream in(path);
    if (!in) throw PropertyError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_properties_xml(buf.str(), ctx);
}

} // namespace tpcs
