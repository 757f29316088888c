#pragma once

#include "tpcs/channel_system.hpp"
#include "tpcs/mtl.hpp"

#include <string>
#include <vector>

namespace tpcs {

/// Declared atomic proposition, evaluated after every step to produce the
/// label set of an observation. Event atoms predicate over the messages
/// exchanged on a channel; state atoms over locations or a boolean
/// expression on the global variables.
class AtomDef {
public:
    enum class Kind { Location, Guard, Event };
    enum class Cmp { Eq, Ne, Lt, Le, Gt, Ge };

    /// Holds when the graph's current location is one of `locs`.
    static AtomDef location(std::string name, std::uint32_t pg, std::vector<LocationId> locs);

    /// Holds when the boolean expression over the global variable table is
    /// true in the current state.
    static AtomDef guard(std::string name, Expr expr);

    /// Holds when the step's event touches `channel`; with a payload
    /// predicate, additionally compares the payload (or one tuple element
    /// of it) against a literal.
    static AtomDef event(std::string name, ChannelId channel,
                         std::optional<std::uint32_t> element = {},
                         std::optional<std::pair<Cmp, Value>> compare = {});

    const std::string& name() const { return name_; }
    Kind kind() const { return kind_; }

    bool eval(const ChannelSystem& cs, const CsState& state, const EventRecord& event) const;

    /// Type-checks a guard atom against the system's global domains.
    void check(const ChannelSystem& cs) const;

private:
    AtomDef(Kind k, std::string name) : kind_(k), name_(std::move(name)) {}

    Kind kind_;
    std::string name_;
    std::uint32_t pg_ = 0;
    std::vector<LocationId> locations_;
    Expr expr_ = Expr::bool_const(true);
    ChannelId channel_ = 0;
    std::optional<std::uint32_t> element_;
    std::optional<std::pair<Cmp, Value>> compare_;
};

/// Sorted ids of the atoms holding for (state, event).
std::vector<std::uint32_t> eval_labels(const ChannelSystem& cs, std::span<const AtomDef> atoms,
                                       const CsState& state, const EventRecord& event);

} // namespace tpcs
