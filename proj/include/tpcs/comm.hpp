#pragma once

#include "tpcs/expr.hpp"
#include "tpcs/trace.hpp"
#include "tpcs/value.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tpcs {

using ChannelId = std::uint32_t;

/// Declared channel: a handshake rendezvous when capacity is 0, otherwise a
/// FIFO buffer of at most `capacity` messages from the declared domain.
/// `sender` may be empty for shared queues that several graphs write to.
struct ChannelDecl {
    std::string name;
    std::optional<std::uint32_t> sender;
    std::uint32_t receiver = 0;
    std::size_t capacity = 0;
    VarDomain message_domain = VarDomain::rational();

    bool is_handshake() const { return capacity == 0; }
};

/// Communication label on a transition: send/receive of a variable's value
/// or a fixed value, or a guard-only emptiness probe.
struct CommAction {
    enum class Kind { SendVar, SendConst, RecvVar, RecvConst, ProbeEmpty, ProbeNonEmpty };

    Kind kind;
    ChannelId channel = 0;
    VarId var = 0; // SendVar / RecvVar, local to the owning graph
    Value value;   // SendConst / RecvConst

    static CommAction send_var(ChannelId c, VarId x) { return {Kind::SendVar, c, x, {}}; }
    static CommAction send_const(ChannelId c, Value m) { return {Kind::SendConst, c, 0, std::move(m)}; }
    static CommAction recv_var(ChannelId c, VarId x) { return {Kind::RecvVar, c, x, {}}; }
    static CommAction recv_const(ChannelId c, Value m) { return {Kind::RecvConst, c, 0, std::move(m)}; }
    static CommAction probe_empty(ChannelId c) { return {Kind::ProbeEmpty, c, 0, {}}; }
    static CommAction probe_nonempty(ChannelId c) { return {Kind::ProbeNonEmpty, c, 0, {}}; }

    bool is_send() const { return kind == Kind::SendVar || kind == Kind::SendConst; }
    bool is_recv() const { return kind == Kind::RecvVar || kind == Kind::RecvConst; }
    bool is_probe() const { return kind == Kind::ProbeEmpty || kind == Kind::ProbeNonEmpty; }
};

/// ξ: current contents of every buffered channel, in FIFO order.
class ChannelEvaluation {
public:
    ChannelEvaluation() = default;
    explicit ChannelEvaluation(std::size_t channel_count) : contents_(channel_count) {}

    std::size_t channel_count() const { return contents_.size(); }
    const std::deque<Value>& at(ChannelId c) const { return contents_.at(c); }
    std::deque<Value>& at(ChannelId c) { return contents_.at(c); }
    bool all_empty() const {
        for (const auto& q : contents_) {
            if (!q.empty()) return false;
        }
        return true;
    }

    friend bool operator==(const ChannelEvaluation& a, const ChannelEvaluation& b) {
        return a.contents_ == b.contents_;
    }
    friend bool operator!=(const ChannelEvaluation& a, const ChannelEvaluation& b) { return !(a == b); }

private:
    std::vector<std::deque<Value>> contents_;
};

/// Enabledness of a buffered communication action: sends need a non-full
/// buffer, receives a non-empty one (with a matching front for the
/// fixed-value form), probes test emptiness. Handshake channels are not
/// handled here and raise ContractError.
bool comm_enabled(const CommAction& a, const ChannelEvaluation& xi, std::span<const Value> vars,
                  std::span<const ChannelDecl> channels);

/// Applies an enabled buffered action to ξ and the owning graph's variable
/// slice, returning the observable event. Probes change nothing.
EventRecord comm_effect(const CommAction& a, ChannelEvaluation& xi, std::span<Value> vars,
                        std::span<const ChannelDecl> channels, std::uint32_t acting_pg);

} // namespace tpcs
