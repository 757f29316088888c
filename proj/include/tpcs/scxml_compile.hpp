#pragma once

#include "tpcs/channel_system.hpp"
#include "tpcs/expr_parser.hpp"
#include "tpcs/scxml.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tpcs {

/// Stable integer identifiers for automata, events and interned strings,
/// plus per-event parameter signatures and source/target sets. Automata are
/// numbered 0…n−1 in input order, events 0…m−1 in first-occurrence order of
/// a deterministic document walk.
class EventCatalog {
public:
    struct Param {
        std::string name;
        SurfaceType type = SurfaceType::Int;
    };
    struct Event {
        std::string name;
        std::vector<Param> params;
        bool signature_known = false;
        std::vector<std::uint32_t> sources; // automata that send or raise it
        std::vector<std::uint32_t> targets; // automata that may receive it
    };

    std::vector<std::string> automata;
    std::vector<Event> events;
    std::vector<std::string> strings; // intern table (includes automaton names)

    std::optional<std::uint32_t> automaton_id(const std::string& name) const;
    std::optional<std::uint32_t> event_id(const std::string& name) const;
    std::optional<std::int64_t> string_id(const std::string& text) const;
    std::int64_t require_string(const std::string& text) const;
};

/// Scans all automata and assigns ids; rejects events used with
/// inconsistent parameter signatures (CatalogError).
EventCatalog build_catalog(std::span<const ScxmlAutomaton> automata);

struct CompileOptions {
    std::size_t queue_capacity = 8; // q_int, q_ext and parameter channels
    Rational time_quantum = Rational(1);
    std::uint32_t time_horizon = 10000;
};

/// Role of a compiled channel, used to decode traces.
struct ChannelRole {
    enum class Kind { InternalQueue, ExternalQueue, ParamQueue };
    Kind kind = Kind::InternalQueue;
    std::uint32_t automaton = 0; // owner (receiver)
    std::uint32_t event = 0;     // ParamQueue only
    std::uint32_t origin = 0;    // ParamQueue only
};

/// Compiled system: one program graph per automaton plus the channels
/// realizing the internal/external event queues and per-(event, origin)
/// parameter delivery, with enough metadata to decode traces and resolve
/// property atoms.
struct CompiledModel {
    ChannelSystem cs;
    EventCatalog catalog;
    std::vector<ChannelRole> channel_roles;
    /// pg → location → index of the owning SCXML state.
    std::vector<std::vector<std::uint32_t>> location_owner;
    /// pg → SCXML state names, indexed by owner.
    std::vector<std::vector<std::string>> state_names;
    /// Surface type per global variable; empty for internal tuple helpers.
    std::vector<std::optional<SurfaceType>> var_surface_types;

    /// All compiled locations belonging to the given SCXML state.
    std::vector<LocationId> locations_of_state(std::uint32_t pg, const std::string& state) const;
};

/// Translates the automata into a timed probabilistic channel system.
/// Deterministic: identical inputs produce structurally identical output.
CompiledModel compile(std::span<const ScxmlAutomaton> automata, const EventCatalog& catalog,
                      const CompileOptions& options = {});

CompiledModel compile(std::span<const ScxmlAutomaton> automata, const CompileOptions& options = {});

} // namespace tpcs
