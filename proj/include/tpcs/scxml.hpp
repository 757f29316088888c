#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tpcs {

// Parsed restricted-SCXML documents. The supported subset has flat states
// only and the executable elements assign / if / raise / send; hierarchical
// states, <parallel>, <final>, <history>, <script>, <cancel>, <invoke>,
// <content> and <donedata> are rejected with a diagnostic naming the
// element.

struct ExecAssign {
    std::string location;
    std::string expr;
};

struct ExecRaise {
    std::string event;
};

struct ExecSendParam {
    std::string name;
    std::string expr;
};

struct ExecSend {
    std::string event;
    std::optional<std::string> target;     // static receiver name
    std::optional<std::string> targetexpr; // dynamic receiver expression
    std::vector<ExecSendParam> params;
    std::uint64_t delay = 0; // model time-units
};

struct ExecNode;
using ExecContent = std::vector<ExecNode>;

struct ExecIf {
    /// (guard, body) per branch; the final branch may have no guard (else).
    std::vector<std::pair<std::optional<std::string>, ExecContent>> branches;
};

struct ExecNode {
    std::variant<ExecAssign, ExecRaise, ExecSend, ExecIf> item;
};

struct ScxmlTransition {
    std::optional<std::string> event; // absent = eventless
    std::optional<std::string> cond;  // absent = true
    std::string target;
    ExecContent body;
};

struct ScxmlState {
    std::string id;
    ExecContent onentry;
    ExecContent onexit;
    std::vector<ScxmlTransition> transitions; // document order
};

struct DataDecl {
    std::string id;
    std::string expr; // constant initializer
};

struct ScxmlAutomaton {
    std::string name;
    std::string initial;
    std::vector<DataDecl> datamodel;
    std::vector<ScxmlState> states;

    const ScxmlState* find_state(const std::string& id) const {
        for (const auto& s : states) {
            if (s.id == id) return &s;
        }
        return nullptr;
    }
};

/// Parses and validates one document against the supported subset. Every
/// violation is reported as ParseError naming the offending element.
ScxmlAutomaton parse_scxml(const std::string& xml_text);
ScxmlAutomaton parse_scxml_file(const std::string& path);

} // namespace tpcs
