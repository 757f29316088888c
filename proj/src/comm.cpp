#include "tpcs/comm.hpp"

#include "tpcs/errors.hpp"

namespace tpcs {

namespace {

const ChannelDecl& buffered_decl(const CommAction& a, std::span<const ChannelDecl> channels) {
    if (a.channel >= channels.size()) throw ModelError("communication on undeclared channel");
    const ChannelDecl& decl = channels[a.channel];
    if (decl.is_handshake())
        throw ContractError("buffered communication op applied to handshake channel " + decl.name);
    return decl;
}

Value send_payload(const CommAction& a, std::span<const Value> vars) {
    if (a.kind == CommAction::Kind::SendVar) {
        if (a.var >= vars.size()) throw ModelError("send of undeclared variable");
        return vars[a.var];
    }
    return a.value;
}

} // namespace

bool comm_enabled(const CommAction& a, const ChannelEvaluation& xi, std::span<const Value> vars,
                  std::span<const ChannelDecl> channels) {
    const ChannelDecl& decl = buffered_decl(a, channels);
    const auto& buf = xi.at(a.channel);
    switch (a.kind) {
    case CommAction::Kind::SendVar:
    case CommAction::Kind::SendConst:
        return buf.size() < decl.capacity;
    case CommAction::Kind::RecvVar:
        return !buf.empty();
    case CommAction::Kind::RecvConst:
        return !buf.empty() && buf.front() == a.value;
    case CommAction::Kind::ProbeEmpty:
        return buf.empty();
    case CommAction::Kind::ProbeNonEmpty:
        return !buf.empty();
    }
    (void)vars;
    return false;
}

EventRecord comm_effect(const CommAction& a, ChannelEvaluation& xi, std::span<Value> vars,
                        std::span<const ChannelDecl> channels, std::uint32_t acting_pg) {
    const ChannelDecl& decl = buffered_decl(a, channels);
    auto& buf = xi.at(a.channel);
    EventRecord ev;
    ev.channel = a.channel;
    switch (a.kind) {
    case CommAction::Kind::SendVar:
    case CommAction::Kind::SendConst: {
        Value payload = send_payload(a, vars);
        if (!decl.message_domain.contains(payload))
            throw ModelError("message " + payload.str() + " outside domain of channel " + decl.name);
        buf.push_back(payload);
        ev.kind = EventKind::Send;
        ev.payload = std::move(payload);
        ev.source_pg = acting_pg;
        ev.target_pg = decl.receiver;
        return ev;
    }
    case CommAction::Kind::RecvVar: {
        Value front = buf.front();
        buf.pop_front();
        if (a.var >= vars.size()) throw ModelError("receive into undeclared variable");
        vars[a.var] = front;
        ev.kind = EventKind::Receive;
        ev.payload = std::move(front);
        ev.source_pg = decl.sender;
        ev.target_pg = acting_pg;
        return ev;
    }
    case CommAction::Kind::RecvConst: {
        Value front = buf.front();
        buf.pop_front();
        ev.kind = EventKind::Receive;
        ev.payload = std::move(front);
        ev.source_pg = decl.sender;
        ev.target_pg = acting_pg;
        return ev;
    }
    case CommAction::Kind::ProbeEmpty:
    case CommAction::Kind::ProbeNonEmpty:
        ev.kind = EventKind::Internal;
        ev.source_pg = acting_pg;
        return ev;
    }
    throw ModelError("unhandled communication action");
}

} // namespace tpcs
