#pragma once

#include "tpcs/rational.hpp"
#include "tpcs/value.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tpcs {

enum class EventKind { Internal, Send, Receive, Handshake };

/// What happened on one simulation step: an internal action or a
/// communication over a channel. Channel events carry the channel id and
/// payload; handshakes carry both participating program graph indices.
struct EventRecord {
    EventKind kind = EventKind::Internal;
    std::optional<std::uint32_t> channel;
    std::optional<Value> payload;
    std::optional<std::uint32_t> source_pg;
    std::optional<std::uint32_t> target_pg;
    std::optional<std::uint32_t> action;

    static EventRecord internal(std::uint32_t action, std::optional<std::uint32_t> pg = {}) {
        EventRecord e;
        e.kind = EventKind::Internal;
        e.action = action;
        e.source_pg = pg;
        return e;
    }

    friend bool operator==(const EventRecord& a, const EventRecord& b) {
        return a.kind == b.kind && a.channel == b.channel && a.payload == b.payload &&
               a.source_pg == b.source_pg && a.target_pg == b.target_pg && a.action == b.action;
    }
};

/// One observation of a state-event trace: the atomic propositions holding
/// after the step, the step's event and its timestamp.
struct Observation {
    std::vector<std::uint32_t> labels; // sorted ids of the atoms that hold
    EventRecord event;
    Rational timestamp;

    bool has_label(std::uint32_t atom) const {
        for (auto l : labels) {
            if (l == atom) return true;
            if (l > atom) break;
        }
        return false;
    }
};

/// Finite timed trace with monotonically non-decreasing timestamps.
/// Adjacent observations may share a timestamp (zero-delay steps).
class TimedTrace {
public:
    void append(Observation obs) {
        if (obs.timestamp.is_negative()) throw TraceError("observation timestamp must be non-negative");
        if (!obs_.empty() && obs.timestamp < obs_.back().timestamp)
            throw TraceError("observation timestamps must be non-decreasing");
        obs_.push_back(std::move(obs));
    }

    std::size_t size() const { return obs_.size(); }
    bool empty() const { return obs_.empty(); }
    const Observation& operator[](std::size_t i) const { return obs_[i]; }
    auto begin() const { return obs_.begin(); }
    auto end() const { return obs_.end(); }

private:
    std::vector<Observation> obs_;
};

} // namespace tpcs
