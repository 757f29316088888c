#include "tpcs/channel_system.hpp"

#include "tpcs/errors.hpp"

#include <algorithm>

namespace tpcs {

namespace {

/// dom(a) ⊇ dom(b), conservatively.
bool domain_superset(const VarDomain& a, const VarDomain& b) {
    if (a == b) return true;
    if (a.kind() == VarDomain::Kind::Rational &&
        (b.kind() == VarDomain::Kind::BoundedInt || b.kind() == VarDomain::Kind::Rational))
        return true;
    if (a.kind() == VarDomain::Kind::BoundedInt && b.kind() == VarDomain::Kind::BoundedInt)
        return a.lo() <= b.lo() && b.hi() <= a.hi();
    if (a.kind() == VarDomain::Kind::Tuple && b.kind() == VarDomain::Kind::Tuple) {
        if (a.parts().size() != b.parts().size()) return false;
        for (std::size_t i = 0; i < a.parts().size(); ++i) {
            if (!domain_superset(a.parts()[i], b.parts()[i])) return false;
        }
        return true;
    }
    return false;
}

bool clock_eval_offset(const ClockConstraint& c, const ClockValuation& nu, ClockId offset) {
    switch (c.kind()) {
    case ClockConstraint::Kind::AtMost:
        return nu.at(c.clock() + offset) <= c.bound();
    case ClockConstraint::Kind::AtLeast:
        return c.bound() <= nu.at(c.clock() + offset);
    case ClockConstraint::Kind::Not:
        return !clock_eval_offset(c.children().front(), nu, offset);
    case ClockConstraint::Kind::And:
        for (const auto& k : c.children()) {
            if (!clock_eval_offset(k, nu, offset)) return false;
        }
        return true;
    }
    return false;
}

} // namespace

ChannelSystem::ChannelSystem(std::vector<ProgramGraph> pgs, std::vector<ChannelDecl> channels,
                             Rational time_quantum, std::uint32_t time_horizon)
    : pgs_(std::move(pgs)), channels_(std::move(channels)), quantum_(std::move(time_quantum)),
      horizon_(time_horizon) {
    if (pgs_.empty()) throw ModelError("channel system needs at least one program graph");
    var_offset_.resize(pgs_.size());
    clock_offset_.resize(pgs_.size());
    for (std::size_t i = 0; i < pgs_.size(); ++i) {
        pgs_[i].validate();
        var_offset_[i] = total_vars_;
        clock_offset_[i] = total_clocks_;
        total_vars_ += pgs_[i].variables.size();
        total_clocks_ += pgs_[i].clocks.size();
        for (const auto& v : pgs_[i].variables) {
            global_domains_.push_back(v.domain);
            global_var_names_.push_back(pgs_[i].name + "." + v.name);
        }
    }
    validate();
}

void ChannelSystem::validate() {
    for (std::size_t i = 0; i < pgs_.size(); ++i) {
        for (std::size_t j = i + 1; j < pgs_.size(); ++j) {
            if (pgs_[i].name == pgs_[j].name)
                throw ModelError("duplicate program graph name '" + pgs_[i].name + "'");
        }
    }
    for (const auto& c : channels_) {
        if (c.receiver >= pgs_.size() || (c.sender && *c.sender >= pgs_.size()))
            throw ModelError("channel '" + c.name + "' references an unknown program graph");
    }
    for (std::size_t i = 0; i < pgs_.size(); ++i) {
        const auto& pg = pgs_[i];
        for (const auto& t : pg.transitions) {
            if (!t.comm) continue;
            const CommAction& a = *t.comm;
            if (a.channel >= channels_.size())
                throw ModelError("undeclared channel in transition of '" + pg.name + "'");
            const ChannelDecl& decl = channels_[a.channel];
            if (a.is_send() && decl.sender && *decl.sender != i)
                throw ModelError("'" + pg.name + "' is not the sender of channel " + decl.name);
            if (a.is_recv() && decl.receiver != i)
                throw ModelError("'" + pg.name + "' is not the receiver of channel " + decl.name);
            if (a.is_probe() && decl.is_handshake())
                throw ModelError("emptiness probe on handshake channel " + decl.name);
            if (!t.effect.is_deterministic() || !t.effect.branches().front().updates.empty())
                throw ModelError("communication transition in '" + pg.name +
                                 "' cannot carry variable updates");
            if (a.kind == CommAction::Kind::RecvVar &&
                !domain_superset(pg.variables.at(a.var).domain, decl.message_domain))
                throw ModelError("receive variable domain does not cover channel " + decl.name);
            if ((a.kind == CommAction::Kind::SendConst || a.kind == CommAction::Kind::RecvConst) &&
                !decl.message_domain.contains(a.value))
                throw ModelError("literal message outside domain of channel " + decl.name);
        }
    }
}

std::optional<VarId> ChannelSystem::find_var(const std::string& pg_name, const std::string& var_name) const {
    auto pg = find_pg(pg_name);
    if (!pg) return std::nullopt;
    const auto& vars = pgs_[*pg].variables;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        if (vars[i].name == var_name) return static_cast<VarId>(var_offset_[*pg] + i);
    }
    return std::nullopt;
}

std::optional<std::uint32_t> ChannelSystem::find_pg(const std::string& name) const {
    for (std::size_t i = 0; i < pgs_.size(); ++i) {
        if (pgs_[i].name == name) return static_cast<std::uint32_t>(i);
    }
    return std::nullopt;
}

std::optional<ChannelId> ChannelSystem::find_channel(const std::string& name) const {
    for (std::size_t i = 0; i < channels_.size(); ++i) {
        if (channels_[i].name == name) return static_cast<ChannelId>(i);
    }
    return std::nullopt;
}

bool ChannelSystem::clock_guard_holds(const ClockConstraint& c, const ClockValuation& global,
                                      std::uint32_t pg) const {
    return clock_eval_offset(c, global, static_cast<ClockId>(clock_offset_[pg]));
}

namespace {

Value handshake_payload(const ChannelSystem& cs, const CsState& s, std::uint32_t sender,
                        const CommAction& a) {
    if (a.kind == CommAction::Kind::SendConst) return a.value;
    return cs.pg_vars(s, sender)[a.var];
}

/// Enumerates moves; when `clocks` is null, clock guards are ignored (used
/// to decide whether waiting could ever help).
std::vector<Move> collect_moves(const ChannelSystem& cs, const CsState& s,
                                const ClockValuation* clocks) {
    std::vector<Move> moves;
    const auto& pgs = cs.pgs();
    auto clock_ok = [&](const ClockConstraint& c, std::uint32_t pg) {
        return clocks == nullptr || cs.clock_guard_holds(c, *clocks, pg);
    };
    // Interleaved internal transitions and buffered communication, per
    // graph in index order, transitions in declaration order.
    for (std::uint32_t i = 0; i < pgs.size(); ++i) {
        auto vars = cs.pg_vars(s, i);
        for (std::size_t j : pgs[i].outgoing(s.locations[i])) {
            const PgTransition& t = pgs[i].transitions[j];
            if (!eval_guard(t.guard, vars)) continue;
            if (!t.comm) {
                if (clock_ok(t.clock_guard, i)) moves.push_back({Move::Kind::Internal, i, j, 0, 0});
                continue;
            }
            const ChannelDecl& decl = cs.channels()[t.comm->channel];
            if (decl.is_handshake()) continue; // paired below
            if (comm_enabled(*t.comm, s.channels, vars, cs.channels()) && clock_ok(t.clock_guard, i))
                moves.push_back({Move::Kind::Comm, i, j, 0, 0});
        }
    }
    // Handshake pairs, sender-major order.
    for (std::uint32_t p = 0; p < pgs.size(); ++p) {
        auto sender_vars = cs.pg_vars(s, p);
        for (std::size_t j : pgs[p].outgoing(s.locations[p])) {
            const PgTransition& send = pgs[p].transitions[j];
            if (!send.comm || !send.comm->is_send()) continue;
            const ChannelDecl& decl = cs.channels()[send.comm->channel];
            if (!decl.is_handshake()) continue;
            if (!eval_guard(send.guard, sender_vars) || !clock_ok(send.clock_guard, p)) continue;
            std::uint32_t q = decl.receiver;
            if (q == p) continue;
            Value v = handshake_payload(cs, s, p, *send.comm);
            auto recv_vars = cs.pg_vars(s, q);
            for (std::size_t k : pgs[q].outgoing(s.locations[q])) {
                const PgTransition& recv = pgs[q].transitions[k];
                if (!recv.comm || !recv.comm->is_recv()) continue;
                if (recv.comm->channel != send.comm->channel) continue;
                if (recv.comm->kind == CommAction::Kind::RecvConst && !(recv.comm->value == v)) continue;
                if (!eval_guard(recv.guard, recv_vars) || !clock_ok(recv.clock_guard, q)) continue;
                moves.push_back({Move::Kind::Handshake, p, j, q, k});
            }
        }
    }
    return moves;
}

} // namespace

std::vector<Move> cs_enabled_moves(const ChannelSystem& cs, const CsState& s) {
    return collect_moves(cs, s, &s.clocks);
}

std::pair<CsState, EventRecord> cs_apply_move(const ChannelSystem& cs, const CsState& s, const Move& m,
                                              Rng& rng) {
    CsState out = s;
    const ProgramGraph& pg = cs.pgs()[m.pg];
    const PgTransition& t = pg.transitions[m.transition];
    auto apply_resets = [&](const std::vector<ClockId>& resets, std::uint32_t owner) {
        if (resets.empty()) return;
        std::vector<ClockId> global;
        global.reserve(resets.size());
        for (ClockId c : resets) global.push_back(c + static_cast<ClockId>(cs.clock_offset(owner)));
        out.clocks = out.clocks.reset(global);
    };

    switch (m.kind) {
    case Move::Kind::Internal: {
        std::size_t branch = t.effect.sample_branch(rng);
        auto pre = s.valuation; // simultaneous assignment reads the pre-state
        auto slice = cs.pg_vars(out, m.pg);
        std::span<const Value> pre_slice{pre.data() + cs.var_offset(m.pg), pg.variables.size()};
        for (const auto& upd : t.effect.branches()[branch].updates) {
            Value v = upd.value.eval(pre_slice);
            if (!pg.variables[upd.var].domain.contains(v))
                throw ModelError("update leaves domain of " + pg.name + "." + pg.variables[upd.var].name +
                                 " (" + v.str() + ")");
            slice[upd.var] = std::move(v);
        }
        apply_resets(t.resets, m.pg);
        out.locations[m.pg] = t.target;
        EventRecord ev = EventRecord::internal(t.action, m.pg);
        return {std::move(out), std::move(ev)};
    }
    case Move::Kind::Comm: {
        auto slice = cs.pg_vars(out, m.pg);
        EventRecord ev = comm_effect(*t.comm, out.channels, slice, cs.channels(), m.pg);
        apply_resets(t.resets, m.pg);
        out.locations[m.pg] = t.target;
        return {std::move(out), std::move(ev)};
    }
    case Move::Kind::Handshake: {
        const ProgramGraph& qg = cs.pgs()[m.partner_pg];
        const PgTransition& recv = qg.transitions[m.partner_transition];
        const ChannelDecl& decl = cs.channels()[t.comm->channel];
        Value v = handshake_payload(cs, s, m.pg, *t.comm);
        if (!decl.message_domain.contains(v))
            throw ModelError("handshake message " + v.str() + " outside domain of channel " + decl.name);
        if (recv.comm->kind == CommAction::Kind::RecvVar)
            cs.pg_vars(out, m.partner_pg)[recv.comm->var] = v;
        apply_resets(t.resets, m.pg);
        apply_resets(recv.resets, m.partner_pg);
        out.locations[m.pg] = t.target;
        out.locations[m.partner_pg] = recv.target;
        EventRecord ev;
        ev.kind = EventKind::Handshake;
        ev.channel = t.comm->channel;
        ev.payload = std::move(v);
        ev.source_pg = m.pg;
        ev.target_pg = m.partner_pg;
        return {std::move(out), std::move(ev)};
    }
    }
    throw ModelError("unhandled move kind");
}

CsStep cs_step(const ChannelSystem& cs, const CsState& s, const Rational& now, Rng& rng,
               const Resolver& resolver) {
    if (now.is_negative()) throw ArgumentError("simulation time must be non-negative");
    CsStep step;
    // Variable guards and channel contents are frozen while waiting, so if
    // no move passes them the state is terminal no matter how long we wait.
    if (collect_moves(cs, s, nullptr).empty()) {
        step.status = CsStep::Status::Terminal;
        step.now = now;
        return step;
    }
    Rational delta(0);
    for (std::uint32_t k = 0; k <= cs.time_horizon(); ++k) {
        ClockValuation advanced = s.clocks.advanced(delta);
        CsState probe = s;
        probe.clocks = advanced;
        std::vector<Move> enabled = collect_moves(cs, probe, &advanced);
        if (!enabled.empty()) {
            const Move& m = enabled[resolver(enabled.size(), rng)];
            auto [next, ev] = cs_apply_move(cs, probe, m, rng);
            step.status = CsStep::Status::Stepped;
            step.state = std::move(next);
            step.event = std::move(ev);
            step.now = now + delta;
            return step;
        }
        delta += cs.time_quantum();
    }
    step.status = CsStep::Status::TimeLocked;
    step.now = now;
    return step;
}

std::vector<CsState> cs_initial_states(const ChannelSystem& cs) {
    std::vector<std::vector<PgState>> per_pg;
    per_pg.reserve(cs.pgs().size());
    for (const auto& pg : cs.pgs()) per_pg.push_back(pg_initial_states(pg));

    std::vector<CsState> out;
    std::vector<std::size_t> pick(per_pg.size(), 0);
    for (;;) {
        CsState s;
        s.locations.resize(per_pg.size());
        s.valuation.resize(cs.total_vars());
        s.clocks = ClockValuation(cs.total_clocks());
        s.channels = ChannelEvaluation(cs.channels().size());
        for (std::size_t i = 0; i < per_pg.size(); ++i) {
            const PgState& local = per_pg[i][pick[i]];
            s.locations[i] = local.location;
            std::copy(local.valuation.begin(), local.valuation.end(),
                      s.valuation.begin() + static_cast<std::ptrdiff_t>(cs.var_offset(static_cast<std::uint32_t>(i))));
        }
        out.push_back(std::move(s));
        std::size_t i = per_pg.size();
        while (i > 0) {
            --i;
            if (++pick[i] < per_pg[i].size()) break;
            pick[i] = 0;
            if (i == 0) return out;
        }
    }
}

} // namespace tpcs
