#include "tpcs/smc.hpp"

#include "tpcs/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tpcs {

namespace {

// Trials per adaptive recomputation. Constant so that the stopping point,
// and with it the whole report, is independent of the worker count.
constexpr std::uint64_t kBatchSize = 64;

} // namespace

void SmcConfig::validate() const {
    if (!(epsilon > 0.0) || !(epsilon < 0.5)) throw ArgumentError("epsilon must lie in (0, 1/2)");
    if (!(delta > 0.0) || !(delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
    if (max_samples == 0) throw ArgumentError("max-samples must be positive");
    if (max_trace_length == 0) throw ArgumentError("max trace length must be positive");
}

unsigned SmcConfig::resolved_workers() const {
    if (workers > 0) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void PropertySet::check(const ChannelSystem& cs) const {
    for (const auto& a : atoms) a.check(cs);
    for (const auto& p : properties) {
        if (p.formula.atom_count() > atoms.size())
            throw PropertyError("property '" + p.name + "' references an undeclared atom");
    }
}

const char* terminal_reason_name(TerminalReason r) {
    switch (r) {
    case TerminalReason::PropertyResolved: return "property-resolved";
    case TerminalReason::TraceComplete: return "trace-complete";
    case TerminalReason::LengthCap: return "length-cap";
    case TerminalReason::TimeLock: return "time-lock";
    }
    return "?";
}

std::uint64_t required_samples(double epsilon, double delta, std::optional<double> p_hat) {
    if (!(epsilon > 0.0) || !(epsilon < 0.5)) throw ArgumentError("epsilon must lie in (0, 1/2)");
    if (!(delta > 0.0) || !(delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
    const double log_term = std::log(2.0 / delta);
    const double worst = std::ceil(log_term / (2.0 * epsilon * epsilon));
    if (!p_hat) return static_cast<std::uint64_t>(worst);
    if (*p_hat < 0.0 || *p_hat > 1.0) throw ArgumentError("estimate must lie in [0, 1]");
    const double dev = std::abs(*p_hat - 0.5) - 2.0 * epsilon / 3.0;
    double n = std::ceil((2.0 / (epsilon * epsilon)) * log_term * (0.25 - dev * dev));
    n = std::max(n, 1.0);
    return static_cast<std::uint64_t>(std::min(n, worst));
}

namespace {

TrialResult run_trial_impl(const ChannelSystem& cs, const PropertySet& props, const SmcConfig& cfg,
                           std::span<const CsState> initials, std::uint64_t trial_index) {
    Rng rng = Rng::child(cfg.seed, trial_index);
    CsState state = initials[rng.next_below(initials.size())];
    Rational now(0);
    Resolver resolver = uniform_resolver();

    std::vector<OnlineMonitor> monitors;
    monitors.reserve(props.properties.size());
    for (const auto& p : props.properties) monitors.emplace_back(p.formula);

    auto observe = [&](const EventRecord& ev) {
        Observation obs;
        obs.labels = eval_labels(cs, props.atoms, state, ev);
        obs.event = ev;
        obs.timestamp = now;
        for (auto& m : monitors) m.update(obs);
    };
    auto all_conclusive = [&] {
        for (const auto& m : monitors) {
            if (m.current() == Verdict::Unknown) return false;
        }
        return true;
    };

    TrialResult result;
    observe(EventRecord{}); // the initial state is the first observation

    while (true) {
        if (all_conclusive()) {
            result.reason = TerminalReason::PropertyResolved;
            break;
        }
        if (result.trace_length >= cfg.max_trace_length) {
            result.reason = TerminalReason::LengthCap;
            break;
        }
        CsStep step = cs_step(cs, state, now, rng, resolver);
        if (step.status == CsStep::Status::Terminal) {
            for (auto& m : monitors) m.finish();
            result.reason = TerminalReason::TraceComplete;
            break;
        }
        if (step.status == CsStep::Status::TimeLocked) {
            result.reason = TerminalReason::TimeLock;
            break;
        }
        state = std::move(step.state);
        now = step.now;
        ++result.trace_length;
        observe(step.event);
    }

    result.verdicts.reserve(monitors.size());
    for (const auto& m : monitors) result.verdicts.push_back(m.current());
    return result;
}

std::vector<TrialResult> run_block(const ChannelSystem& cs, const PropertySet& props,
                                   const SmcConfig& cfg, std::span<const CsState> initials,
                                   std::uint64_t first_trial, std::uint64_t count, unsigned workers) {
    std::vector<TrialResult> out(count);
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < count; ++i)
            out[i] = run_trial_impl(cs, props, cfg, initials, first_trial + i);
        return out;
    }
    std::exception_ptr error;
    long long error_index = -1;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(workers))
#endif
    for (long long i = 0; i < static_cast<long long>(count); ++i) {
        try {
            out[static_cast<std::size_t>(i)] =
                run_trial_impl(cs, props, cfg, initials, first_trial + static_cast<std::uint64_t>(i));
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(tpcs_smc_error)
#endif
            {
                if (error_index < 0 || i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    }
    if (error) std::rethrow_exception(error);
    return out;
}

} // namespace

TrialResult run_trial(const ChannelSystem& cs, const PropertySet& props, const SmcConfig& cfg,
                      std::uint64_t trial_index) {
    cfg.validate();
    props.check(cs);
    auto initials = cs_initial_states(cs);
    return run_trial_impl(cs, props, cfg, initials, trial_index);
}

std::vector<TrialResult> run_trials_serial(const ChannelSystem& cs, const PropertySet& props,
                                           const SmcConfig& cfg, std::uint64_t first_trial,
                                           std::uint64_t count) {
    auto initials = cs_initial_states(cs);
    return run_block(cs, props, cfg, initials, first_trial, count, 1);
}

std::vector<TrialResult> run_trials_parallel(const ChannelSystem& cs, const PropertySet& props,
                                             const SmcConfig& cfg, std::uint64_t first_trial,
                                             std::uint64_t count) {
    auto initials = cs_initial_states(cs);
    return run_block(cs, props, cfg, initials, first_trial, count, cfg.resolved_workers());
}

SmcReport estimate(const ChannelSystem& cs, const PropertySet& props, const SmcConfig& cfg) {
    cfg.validate();
    props.check(cs);
    if (props.properties.empty()) throw ArgumentError("estimate needs at least one property");
    auto initials = cs_initial_states(cs);
    const unsigned workers = cfg.resolved_workers();
    const auto t0 = std::chrono::steady_clock::now();

    struct Counter {
        std::uint64_t k = 0;
        std::uint64_t n = 0;
        std::uint64_t inconclusive = 0;
        bool done = false;
    };
    std::vector<Counter> counters(props.properties.size());
    std::uint64_t total = 0;

    auto any_active = [&] {
        return std::any_of(counters.begin(), counters.end(), [](const Counter& c) { return !c.done; });
    };

    while (total < cfg.max_samples && any_active()) {
        const std::uint64_t m = std::min<std::uint64_t>(kBatchSize, cfg.max_samples - total);
        auto results = run_block(cs, props, cfg, initials, total, m, workers);
        for (const auto& r : results) {
            for (std::size_t p = 0; p < counters.size(); ++p) {
                Counter& c = counters[p];
                if (c.done) continue;
                switch (r.verdicts[p]) {
                case Verdict::True:
                    ++c.k;
                    ++c.n;
                    break;
                case Verdict::False:
                    ++c.n;
                    break;
                case Verdict::Unknown:
                    ++c.inconclusive;
                    break;
                }
            }
        }
        total += m;
        for (auto& c : counters) {
            if (c.done) continue;
            std::optional<double> p_hat;
            if (c.n > 0) p_hat = static_cast<double>(c.k) / static_cast<double>(c.n);
            c.done = c.n >= required_samples(cfg.epsilon, cfg.delta, p_hat);
        }
    }

    SmcReport report;
    report.seed = cfg.seed;
    report.epsilon = cfg.epsilon;
    report.delta = cfg.delta;
    report.confidence = 1.0 - cfg.delta;
    report.total_trials = total;
    report.budget_exhausted = any_active();
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (std::size_t p = 0; p < counters.size(); ++p) {
        const Counter& c = counters[p];
        PropertyReport pr;
        pr.name = props.properties[p].name;
        pr.samples = c.n;
        pr.successes = c.k;
        pr.inconclusive = c.inconclusive;
        pr.inconclusive_flagged =
            c.inconclusive * 5 > (c.n + c.inconclusive); // > 20% unknown outcomes
        pr.bound_met = c.done;
        pr.estimate = c.n > 0 ? static_cast<double>(c.k) / static_cast<double>(c.n) : 0.0;
        pr.interval_lo = std::max(0.0, pr.estimate - cfg.epsilon);
        pr.interval_hi = std::min(1.0, pr.estimate + cfg.epsilon);
        report.properties.push_back(std::move(pr));
    }
    return report;
}

} // namespace tpcs
