#include "tpcs/scxml.hpp"

#include "tpcs/errors.hpp"
#include "tpcs/expr_parser.hpp"
#include "tpcs/rational.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace tpcs {

namespace {

using boost::property_tree::ptree;

[[noreturn]] void reject(const std::string& element, const std::string& why) {
    throw ParseError("<" + element + "> is not supported: " + why);
}

void reject_if_restricted(const std::string& element) {
    if (element == "parallel") reject(element, "parallel states are outside the supported subset");
    if (element == "final") reject(element, "final states (and <donedata>) are outside the supported subset");
    if (element == "history") reject(element, "history pseudo-states are outside the supported subset");
    if (element == "script") reject(element, "script blocks are outside the supported subset");
    if (element == "cancel") reject(element, "cancelling delayed events is outside the supported subset");
    if (element == "invoke") reject(element, "invoking external services is outside the supported subset");
    if (element == "content") reject(element, "content payloads are outside the supported subset");
    if (element == "donedata") reject(element, "done data is outside the supported subset");
}

std::string attr(const ptree& node, const std::string& name, const std::string& fallback = {}) {
    return node.get<std::string>("<xmlattr>." + name, fallback);
}

std::optional<std::string> opt_attr(const ptree& node, const std::string& name) {
    auto v = node.get_optional<std::string>("<xmlattr>." + name);
    if (!v) return std::nullopt;
    return *v;
}

bool is_meta(const std::string& key) { return key == "<xmlattr>" || key == "<xmlcomment>"; }

void check_expr_syntax(const std::string& text, const std::string& where) {
    try {
        parse_surface_expr(text);
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    }
}

/// "5" or "5s" → 5; "1500ms" → error (not a whole time-unit).
std::uint64_t parse_delay(const std::string& text) {
    std::string digits = text;
    Rational unit(1);
    if (digits.ends_with("ms")) {
        digits.resize(digits.size() - 2);
        unit = Rational(1, 1000);
    } else if (digits.ends_with("s")) {
        digits.resize(digits.size() - 1);
    }
    auto value = Rational::parse(digits);
    if (!value || value->is_negative()) throw ParseError("bad delay value '" + text + "'");
    Rational total = *value * unit;
    if (!total.is_integer())
        throw ParseError("delay '" + text + "' is not a whole number of time-units");
    return static_cast<std::uint64_t>(total.num());
}

ExecContent parse_exec(const ptree& node, const std::string& context);

ExecNode parse_exec_element(const std::string& key, const ptree& node, const std::string& context) {
    if (key == "assign") {
        ExecAssign a;
        a.location = attr(node, "location");
        a.expr = attr(node, "expr");
        if (a.location.empty()) throw ParseError(context + ": <assign> needs a location");
        if (a.expr.empty()) throw ParseError(context + ": <assign> needs an expr");
        check_expr_syntax(a.expr, context + " <assign>");
        return ExecNode{a};
    }
    if (key == "raise") {
        ExecRaise r;
        r.event = attr(node, "event");
        if (r.event.empty()) throw ParseError(context + ": <raise> needs an event");
        return ExecNode{r};
    }
    if (key == "send") {
        ExecSend s;
        s.event = attr(node, "event");
        if (s.event.empty()) throw ParseError(context + ": <send> needs an event");
        s.target = opt_attr(node, "target");
        s.targetexpr = opt_attr(node, "targetexpr");
        if (s.target && s.targetexpr)
            throw ParseError(context + ": <send> has both target and targetexpr");
        if (!s.target && !s.targetexpr)
            throw ParseError(context + ": <send> needs a target or targetexpr");
        if (s.targetexpr) check_expr_syntax(*s.targetexpr, context + " <send targetexpr>");
        if (auto d = opt_attr(node, "delay")) s.delay = parse_delay(*d);
        if (opt_attr(node, "delayexpr"))
            throw ParseError(context + ": dynamic delays (delayexpr) are not supported");
        for (const auto& [ckey, cnode] : node) {
            if (is_meta(ckey)) continue;
            if (ckey == "param") {
                ExecSendParam p;
                p.name = attr(cnode, "name");
                p.expr = attr(cnode, "expr");
                if (p.name.empty() || p.expr.empty())
                    throw ParseError(context + ": <param> needs name and expr");
                check_expr_syntax(p.expr, context + " <param>");
                s.params.push_back(std::move(p));
                continue;
            }
            reject_if_restricted(ckey);
            throw ParseError(context + ": unsupported element <" + ckey + "> inside <send>");
        }
        return ExecNode{s};
    }
    if (key == "if") {
        ExecIf branches;
        // <if cond> body [<elseif cond/> body]* [<else/> body] </if>:
        // elseif/else are markers between sibling executable elements.
        std::optional<std::string> guard = attr(node, "cond");
        if (guard->empty()) throw ParseError(context + ": <if> needs a cond");
        check_expr_syntax(*guard, context + " <if>");
        ExecContent body;
        bool saw_else = false;
        for (const auto& [ckey, cnode] : node) {
            if (is_meta(ckey)) continue;
            if (ckey == "elseif" || ckey == "else") {
                branches.branches.emplace_back(std::move(guard), std::move(body));
                body.clear();
                if (ckey == "elseif") {
                    if (saw_else) throw ParseError(context + ": <elseif> after <else>");
                    guard = attr(cnode, "cond");
                    if (guard->empty()) throw ParseError(context + ": <elseif> needs a cond");
                    check_expr_syntax(*guard, context + " <elseif>");
                } else {
                    if (saw_else) throw ParseError(context + ": repeated <else>");
                    saw_else = true;
                    guard = std::nullopt;
                }
                continue;
            }
            reject_if_restricted(ckey);
            body.push_back(parse_exec_element(ckey, cnode, context));
        }
        branches.branches.emplace_back(std::move(guard), std::move(body));
        return ExecNode{std::move(branches)};
    }
    reject_if_restricted(key);
    throw ParseError(context + ": unsupported executable element <" + key + ">");
}

ExecContent parse_exec(const ptree& node, const std::string& context) {
    ExecContent out;
    for (const auto& [key, child] : node) {
        if (is_meta(key)) continue;
        out.push_back(parse_exec_element(key, child, context));
    }
    return out;
}

ScxmlState parse_state(const ptree& node, const std::string& automaton) {
    ScxmlState state;
    state.id = attr(node, "id");
    if (state.id.empty()) throw ParseError(automaton + ": <state> without an id");
    const std::string context = automaton + "." + state.id;
    for (const auto& [key, child] : node) {
        if (is_meta(key)) continue;
        if (key == "state" || key == "parallel")
            reject(key, "hierarchical states are outside the supported subset (in state '" +
                            state.id + "')");
        reject_if_restricted(key);
        if (key == "onentry") {
            state.onentry = parse_exec(child, context + " <onentry>");
            continue;
        }
        if (key == "onexit") {
            state.onexit = parse_exec(child, context + " <onexit>");
            continue;
        }
        if (key == "transition") {
            ScxmlTransition t;
            t.event = opt_attr(child, "event");
            if (t.event && t.event->empty()) t.event = std::nullopt;
            t.cond = opt_attr(child, "cond");
            if (t.cond) check_expr_syntax(*t.cond, context + " <transition cond>");
            t.target = attr(child, "target");
            if (t.target.empty())
                throw ParseError(context + ": targetless transitions are not supported");
            t.body = parse_exec(child, context + " <transition>");
            state.transitions.push_back(std::move(t));
            continue;
        }
        throw ParseError(context + ": unsupported element <" + key + ">");
    }
    return state;
}

} // namespace

ScxmlAutomaton parse_scxml(const std::string& xml_text) {
    ptree doc;
    try {
        std::istringstream in(xml_text);
        boost::property_tree::read_xml(in, doc, boost::property_tree::xml_parser::trim_whitespace);
    } catch (const std::exception& e) {
        throw ParseError(std::string("XML syntax error: ") + e.what());
    }
    auto scxml = doc.get_child_optional("scxml");
    if (!scxml) throw ParseError("document has no <scxml> root");

    ScxmlAutomaton a;
    a.name = attr(*scxml, "name");
    if (a.name.empty()) throw ParseError("<scxml> needs a name attribute to identify the automaton");
    a.initial = attr(*scxml, "initial");

    for (const auto& [key, child] : *scxml) {
        if (is_meta(key)) continue;
        reject_if_restricted(key);
        if (key == "datamodel") {
            for (const auto& [dkey, dnode] : child) {
                if (is_meta(dkey)) continue;
                if (dkey != "data")
                    throw ParseError(a.name + ": unsupported element <" + dkey + "> in <datamodel>");
                DataDecl d;
                d.id = attr(dnode, "id");
                d.expr = attr(dnode, "expr");
                if (d.id.empty()) throw ParseError(a.name + ": <data> without an id");
                if (d.expr.empty())
                    throw ParseError(a.name + ": <data id='" + d.id + "'> needs an initial expr");
                check_expr_syntax(d.expr, a.name + " <data " + d.id + ">");
                a.datamodel.push_back(std::move(d));
            }
            continue;
        }
        if (key == "state") {
            a.states.push_back(parse_state(child, a.name));
            continue;
        }
        throw ParseError(a.name + ": unsupported element <" + key + "> under <scxml>");
    }

    if (a.states.empty()) throw ParseError(a.name + ": automaton has no states");
    if (a.initial.empty()) a.initial = a.states.front().id;
    if (!a.find_state(a.initial))
        throw ParseError(a.name + ": initial state '" + a.initial + "' is not declared");

    std::set<std::string> ids;
    for (const auto& s : a.states) {
        if (!ids.insert(s.id).second) throw ParseError(a.name + ": duplicate state id '" + s.id + "'");
    }
    for (const auto& s : a.states) {
        for (const auto& t : s.transitions) {
            if (!a.find_state(t.target))
                throw ParseError(a.name + ": transition in '" + s.id + "' targets unknown state '" +
                                 t.target + "'");
        }
    }
    std::set<std::string> data_ids;
    for (const auto& d : a.datamodel) {
        if (!data_ids.insert(d.id).second)
            throw ParseError(a.name + ": duplicate datamodel id '" + d.id + "'");
    }
    return a;
}

ScxmlAutomaton parse_scxml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scxml(buf.str());
}

} // namespace tpcs
