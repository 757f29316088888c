#pragma once

#include "tpcs/program_graph.hpp"

#include <span>
#include <string>
#include <vector>

namespace tpcs {

/// Global state of a channel system: one location per program graph, the
/// union of all variable valuations, the global clock valuation (clocks of
/// all graphs advance at the same rate) and the channel contents.
struct CsState {
    std::vector<LocationId> locations;
    std::vector<Value> valuation;
    ClockValuation clocks;
    ChannelEvaluation channels;

    friend bool operator==(const CsState& a, const CsState& b) {
        return a.locations == b.locations && a.valuation == b.valuation && a.clocks == b.clocks &&
               a.channels == b.channels;
    }
    friend bool operator!=(const CsState& a, const CsState& b) { return !(a == b); }
};

/// One alternative of the global step relation: an interleaved internal
/// transition, a buffered communication, or a handshake pairing a send and
/// a complementary receive in two distinct graphs.
struct Move {
    enum class Kind { Internal, Comm, Handshake };
    Kind kind = Kind::Internal;
    std::uint32_t pg = 0;          // acting graph (sender for handshakes)
    std::size_t transition = 0;    // index into that graph's transition list
    std::uint32_t partner_pg = 0;  // receiver graph (handshake only)
    std::size_t partner_transition = 0;
};

/// Parallel composition [PG₁ | … | PGₙ] over declared channels. Variable
/// and clock namespaces are concatenated; expressions inside each graph keep
/// their local indices and are evaluated against that graph's slice of the
/// global valuation.
class ChannelSystem {
public:
    ChannelSystem(std::vector<ProgramGraph> pgs, std::vector<ChannelDecl> channels,
                  Rational time_quantum = Rational(1), std::uint32_t time_horizon = 10000);

    const std::vector<ProgramGraph>& pgs() const { return pgs_; }
    const std::vector<ChannelDecl>& channels() const { return channels_; }
    const Rational& time_quantum() const { return quantum_; }
    std::uint32_t time_horizon() const { return horizon_; }

    std::size_t var_offset(std::uint32_t pg) const { return var_offset_[pg]; }
    std::size_t clock_offset(std::uint32_t pg) const { return clock_offset_[pg]; }
    std::size_t total_vars() const { return total_vars_; }
    std::size_t total_clocks() const { return total_clocks_; }

    /// Qualified name "pg.var" → global index; empty optional if unknown.
    std::optional<VarId> find_var(const std::string& pg_name, const std::string& var_name) const;
    std::optional<std::uint32_t> find_pg(const std::string& name) const;
    std::optional<ChannelId> find_channel(const std::string& name) const;

    /// Domains of the concatenated global variable table.
    const std::vector<VarDomain>& global_domains() const { return global_domains_; }
    /// Qualified names of the global variable table ("pg.var").
    const std::vector<std::string>& global_var_names() const { return global_var_names_; }

    std::span<const Value> pg_vars(const CsState& s, std::uint32_t pg) const {
        return {s.valuation.data() + var_offset_[pg], pgs_[pg].variables.size()};
    }
    std::span<Value> pg_vars(CsState& s, std::uint32_t pg) const {
        return {s.valuation.data() + var_offset_[pg], pgs_[pg].variables.size()};
    }

    /// The graph's clock guard evaluated against its slice of the global
    /// clock valuation.
    bool clock_guard_holds(const ClockConstraint& c, const ClockValuation& global,
                           std::uint32_t pg) const;

private:
    void validate();

    std::vector<ProgramGraph> pgs_;
    std::vector<ChannelDecl> channels_;
    Rational quantum_;
    std::uint32_t horizon_;
    std::vector<std::size_t> var_offset_;
    std::vector<std::size_t> clock_offset_;
    std::size_t total_vars_ = 0;
    std::size_t total_clocks_ = 0;
    std::vector<VarDomain> global_domains_;
    std::vector<std::string> global_var_names_;
};

/// Every move enabled in s, in deterministic order: per graph in index
/// order, transitions in declaration order (internal and buffered
/// communication), then handshake pairs last.
std::vector<Move> cs_enabled_moves(const ChannelSystem& cs, const CsState& s);

/// Applies one enabled move, sampling probabilistic effects from rng.
/// Handshakes update both locations and perform the assignment x := v in a
/// single atomic step.
std::pair<CsState, EventRecord> cs_apply_move(const ChannelSystem& cs, const CsState& s, const Move& m,
                                              Rng& rng);

struct CsStep {
    enum class Status { Stepped, Terminal, TimeLocked };
    Status status = Status::Terminal;
    CsState state;
    EventRecord event;
    Rational now;
};

/// One global step at time `now`: advances time on the grid to the earliest
/// instant with an enabled move (all clocks advance uniformly), then fires
/// one move chosen by the resolver.
CsStep cs_step(const ChannelSystem& cs, const CsState& s, const Rational& now, Rng& rng,
               const Resolver& resolver);

/// I = {⟨l₁…lₙ, η, 0, ξ₀⟩}: product of per-graph initial locations and
/// valuations satisfying every gᵢ₀, with all clocks 0 and all channels
/// empty. Raises ModelError when the conjunction is unsatisfiable.
std::vector<CsState> cs_initial_states(const ChannelSystem& cs);

} // namespace tpcs
