#pragma once

#include "tpcs/channel_system.hpp"
#include "tpcs/labels.hpp"
#include "tpcs/mtl.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tpcs {

/// Precision/confidence budget of a statistical run: the estimate p̂ is
/// within epsilon of the true probability with confidence 1 − delta.
struct SmcConfig {
    double epsilon = 0.05; // required precision, in (0, 1/2)
    double delta = 0.05;   // 1 - confidence, in (0, 1)
    std::uint64_t max_samples = 1000000;
    std::uint32_t max_trace_length = 10000;
    std::uint64_t seed = 0;
    unsigned workers = 0; // 0 = all hardware threads

    void validate() const;
    unsigned resolved_workers() const;
};

struct NamedProperty {
    std::string name;
    Formula formula;
};

/// Declared atoms plus the properties predicating over them.
struct PropertySet {
    std::vector<AtomDef> atoms;
    std::vector<NamedProperty> properties;

    void check(const ChannelSystem& cs) const;
};

enum class TerminalReason { PropertyResolved, TraceComplete, LengthCap, TimeLock };

const char* terminal_reason_name(TerminalReason r);

/// Outcome of one simulated execution: a verdict per property and why the
/// trial stopped. Unknown verdicts occur only under the length cap or a
/// time-locked state.
struct TrialResult {
    std::vector<Verdict> verdicts;
    std::size_t trace_length = 0;
    TerminalReason reason = TerminalReason::TraceComplete;
};

struct PropertyReport {
    std::string name;
    std::uint64_t samples = 0;     // conclusive trials n
    std::uint64_t successes = 0;   // true verdicts k
    std::uint64_t inconclusive = 0;
    bool inconclusive_flagged = false; // more than 20% unknown
    bool bound_met = false;
    double estimate = 0.0;         // k / n
    double interval_lo = 0.0;      // clamped p̂ − ε
    double interval_hi = 0.0;      // clamped p̂ + ε
};

struct SmcReport {
    std::uint64_t seed = 0;
    double epsilon = 0.0;
    double delta = 0.0;
    double confidence = 0.0;
    std::uint64_t total_trials = 0;
    bool budget_exhausted = false;
    double wall_seconds = 0.0; // informational; not part of the stable report
    std::vector<PropertyReport> properties;
};

/// Number of samples needed for |p̂ − p| ≤ ε with confidence 1 − δ.
/// Without an estimate this is the distribution-free worst case
///   n = ⌈ln(2/δ) / (2ε²)⌉;
/// with a current estimate p̂ it is the variance-adaptive refinement
///   n = ⌈(2/ε²) · ln(2/δ) · (1/4 − (|p̂ − 1/2| − 2ε/3)²)⌉,
/// never exceeding the worst case.
std::uint64_t required_samples(double epsilon, double delta, std::optional<double> p_hat = {});

/// Simulates one execution with the trial's own child RNG stream, feeding
/// every observation to every property monitor. Stops as soon as all
/// properties are conclusive, the model reaches a terminal or time-locked
/// state, or the trace length cap is hit.
TrialResult run_trial(const ChannelSystem& cs, const PropertySet& props, const SmcConfig& cfg,
                      std::uint64_t trial_index);

/// Serial reference executor for a contiguous block of trials.
std::vector<TrialResult> run_trials_serial(const ChannelSystem& cs, const PropertySet& props,
                                           const SmcConfig& cfg, std::uint64_t first_trial,
                                           std::uint64_t count);

/// OpenMP executor; trial results are identical to the serial reference
/// regardless of scheduling, because each trial samples from its own
/// (seed, index)-derived stream.
std::vector<TrialResult> run_trials_parallel(const ChannelSystem& cs, const PropertySet& props,
                                             const SmcConfig& cfg, std::uint64_t first_trial,
                                             std::uint64_t count);

/// Full estimation run: dispatches batches of trials, recomputing the
/// adaptive sample bound from the running estimate after each batch, until
/// every property meets its bound or the sample budget is exhausted.
/// The report depends only on (model, properties, epsilon, delta, seed,
/// max_samples, max_trace_length), never on the worker count.
SmcReport estimate(const ChannelSystem& cs, const PropertySet& props, const SmcConfig& cfg);

} // namespace tpcs
