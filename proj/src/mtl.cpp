#include "tpcs/mtl.hpp"

#include "tpcs/errors.hpp"

#include <algorithm>

namespace tpcs {

const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::False: return "false";
    case Verdict::True: return "true";
    case Verdict::Unknown: return "unknown";
    }
    return "?";
}

Interval Interval::bounded(Rational lo, Rational hi) {
    if (lo.is_negative()) throw PropertyError("interval lower bound must be non-negative");
    if (hi < lo) throw PropertyError("interval upper bound below lower bound");
    return {std::move(lo), std::move(hi)};
}

Interval Interval::unbounded(Rational lo) {
    if (lo.is_negative()) throw PropertyError("interval lower bound must be non-negative");
    return {std::move(lo), std::nullopt};
}

std::string Interval::str() const {
    return "[" + lo.str() + "," + (hi ? hi->str() : "inf") + "]";
}

Formula Formula::make(Node n) {
    return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::truth(bool b) {
    Node n;
    n.op = b ? Op::True : Op::False;
    return make(std::move(n));
}

Formula Formula::atom(std::uint32_t atom_id) {
    Node n;
    n.op = Op::Atom;
    n.atom = atom_id;
    return make(std::move(n));
}

Formula Formula::negation(Formula f) {
    Node n;
    n.op = Op::Not;
    n.left = std::make_shared<const Formula>(std::move(f));
    return make(std::move(n));
}

Formula Formula::conjunction(Formula a, Formula b) {
    Node n;
    n.op = Op::And;
    n.left = std::make_shared<const Formula>(std::move(a));
    n.right = std::make_shared<const Formula>(std::move(b));
    return make(std::move(n));
}

Formula Formula::disjunction(Formula a, Formula b) {
    Node n;
    n.op = Op::Or;
    n.left = std::make_shared<const Formula>(std::move(a));
    n.right = std::make_shared<const Formula>(std::move(b));
    return make(std::move(n));
}

Formula Formula::implication(Formula a, Formula b) {
    Node n;
    n.op = Op::Implies;
    n.left = std::make_shared<const Formula>(std::move(a));
    n.right = std::make_shared<const Formula>(std::move(b));
    return make(std::move(n));
}

Formula Formula::until(Interval I, Formula a, Formula b) {
    Node n;
    n.op = Op::Until;
    n.interval = std::move(I);
    n.left = std::make_shared<const Formula>(std::move(a));
    n.right = std::make_shared<const Formula>(std::move(b));
    return make(std::move(n));
}

Formula Formula::since(Interval I, Formula a, Formula b) {
    Node n;
    n.op = Op::Since;
    n.interval = std::move(I);
    n.left = std::make_shared<const Formula>(std::move(a));
    n.right = std::make_shared<const Formula>(std::move(b));
    return make(std::move(n));
}

Formula Formula::eventually(Interval I, Formula f) {
    return until(std::move(I), truth(true), std::move(f));
}

Formula Formula::globally(Interval I, Formula f) {
    return negation(until(std::move(I), truth(true), negation(std::move(f))));
}

Formula Formula::once(Interval I, Formula f) {
    return since(std::move(I), truth(true), std::move(f));
}

Formula Formula::historically(Interval I, Formula f) {
    return negation(since(std::move(I), truth(true), negation(std::move(f))));
}

std::uint32_t Formula::atom_count() const {
    std::uint32_t n = 0;
    if (op() == Op::Atom) n = atom_id() + 1;
    if (has_left()) n = std::max(n, left().atom_count());
    if (has_right()) n = std::max(n, right().atom_count());
    return n;
}

std::string Formula::str(std::span<const std::string> atom_names) const {
    auto atom_name = [&](std::uint32_t id) {
        if (id < atom_names.size()) return atom_names[id];
        return "a" + std::to_string(id);
    };
    switch (op()) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Atom: return atom_name(atom_id());
    case Op::Not: return "(not " + left().str(atom_names) + ")";
    case Op::And: return "(and " + left().str(atom_names) + " " + right().str(atom_names) + ")";
    case Op::Or: return "(or " + left().str(atom_names) + " " + right().str(atom_names) + ")";
    case Op::Implies: return "(implies " + left().str(atom_names) + " " + right().str(atom_names) + ")";
    case Op::Until:
        return "(until " + interval().str() + " " + left().str(atom_names) + " " + right().str(atom_names) + ")";
    case Op::Since:
        return "(since " + interval().str() + " " + left().str(atom_names) + " " + right().str(atom_names) + ")";
    }
    return {};
}

// ---------------------------------------------------------------------------
// Evaluation engine
// ---------------------------------------------------------------------------

struct OnlineMonitor::Engine {
    struct NodeInfo {
        Formula::Op op;
        std::uint32_t atom = 0;
        Interval interval = Interval::unbounded();
        int left = -1;
        int right = -1;
    };

    std::vector<NodeInfo> nodes;
    int root = -1;
    bool closed = false;
    std::vector<Rational> times;
    // memo[n][i]: verdict of node n at position i; Unknown cells are
    // recomputed on demand, determined cells are final.
    std::vector<std::vector<Verdict>> memo;
    // For Until cells: first position whose subverdicts were not yet all
    // determined, so the resolved prefix is never rescanned.
    std::vector<std::unordered_map<std::size_t, std::size_t>> cursor;

    explicit Engine(const Formula& f) {
        root = flatten(f);
        memo.resize(nodes.size());
        cursor.resize(nodes.size());
    }

    int flatten(const Formula& f) {
        NodeInfo info;
        info.op = f.op();
        if (f.op() == Formula::Op::Atom) info.atom = f.atom_id();
        if (f.op() == Formula::Op::Until || f.op() == Formula::Op::Since) info.interval = f.interval();
        if (f.has_left()) info.left = flatten(f.left());
        if (f.has_right()) info.right = flatten(f.right());
        nodes.push_back(std::move(info));
        return static_cast<int>(nodes.size()) - 1;
    }

    void append(const Observation& obs) {
        if (!times.empty() && obs.timestamp < times.back())
            throw TraceError("out-of-order observation at t=" + obs.timestamp.str());
        if (obs.timestamp.is_negative()) throw TraceError("negative observation timestamp");
        times.push_back(obs.timestamp);
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            Verdict v = Verdict::Unknown;
            switch (nodes[n].op) {
            case Formula::Op::True: v = Verdict::True; break;
            case Formula::Op::False: v = Verdict::False; break;
            case Formula::Op::Atom:
                v = obs.has_label(nodes[n].atom) ? Verdict::True : Verdict::False;
                break;
            default: break;
            }
            memo[n].push_back(v);
        }
    }

    std::size_t size() const { return times.size(); }

    Verdict query(int n, std::size_t i) {
        Verdict cell = memo[n][i];
        if (cell != Verdict::Unknown) return cell;
        const NodeInfo& info = nodes[n];
        Verdict v = Verdict::Unknown;
        switch (info.op) {
        case Formula::Op::True:
        case Formula::Op::False:
        case Formula::Op::Atom:
            return cell; // filled at append time
        case Formula::Op::Not:
            v = not3(query(info.left, i));
            break;
        case Formula::Op::And:
            v = and3(query(info.left, i), query(info.right, i));
            break;
        case Formula::Op::Or:
            v = or3(query(info.left, i), query(info.right, i));
            break;
        case Formula::Op::Implies:
            v = or3(not3(query(info.left, i)), query(info.right, i));
            break;
        case Formula::Op::Until:
            v = query_until(n, i);
            break;
        case Formula::Op::Since:
            v = query_since(n, i);
            break;
        }
        if (v != Verdict::Unknown) memo[n][i] = v;
        return v;
    }

    /// φ₁ U[a,b] φ₂ at i: some j ≥ i with τⱼ−τᵢ ∈ [a,b] satisfies φ₂ while
    /// φ₁ holds at every position in [i, j).
    Verdict query_until(int n, std::size_t i) {
        const NodeInfo& info = nodes[n];
        const std::size_t N = size();
        const Rational ti = times[i];

        // Phase 1: extend the fully-determined frontier. Invariant for
        // positions before the cursor: φ₁ is determined-true and every
        // in-window φ₂ is determined-false.
        auto it = cursor[n].find(i);
        std::size_t j = (it == cursor[n].end()) ? i : it->second;
        for (; j < N; ++j) {
            Rational d = times[j] - ti;
            if (info.interval.above(d)) {
                memo[n][i] = Verdict::False; // window passed with no witness
                cursor[n].erase(i);
                return Verdict::False;
            }
            if (info.interval.contains(d)) {
                Verdict v2 = query(info.right, j);
                if (v2 == Verdict::True) {
                    memo[n][i] = Verdict::True;
                    cursor[n].erase(i);
                    return Verdict::True;
                }
                if (v2 == Verdict::Unknown) break;
            }
            Verdict v1 = query(info.left, j);
            if (v1 == Verdict::False) {
                memo[n][i] = Verdict::False; // obligation broken before any witness
                cursor[n].erase(i);
                return Verdict::False;
            }
            if (v1 == Verdict::Unknown) break;
        }
        cursor[n][i] = j;
        if (j >= N) {
            if (closed) {
                memo[n][i] = Verdict::False;
                return Verdict::False;
            }
            return Verdict::Unknown;
        }

        // Phase 2: three-valued scan over the undetermined tail.
        Verdict prefix = Verdict::True;
        bool saw_unknown = false;
        for (std::size_t k = j; k < N; ++k) {
            Rational d = times[k] - ti;
            if (info.interval.above(d)) {
                if (saw_unknown) return Verdict::Unknown;
                memo[n][i] = Verdict::False;
                return Verdict::False;
            }
            if (info.interval.contains(d)) {
                Verdict w = and3(prefix, query(info.right, k));
                if (w == Verdict::True) {
                    memo[n][i] = Verdict::True;
                    return Verdict::True;
                }
                if (w == Verdict::Unknown) saw_unknown = true;
            }
            prefix = and3(prefix, query(info.left, k));
            if (prefix == Verdict::False) {
                if (saw_unknown) return Verdict::Unknown;
                memo[n][i] = Verdict::False;
                return Verdict::False;
            }
        }
        if (closed) {
            // All subverdicts are definite on a completed trace, so reaching
            // the end without a witness refutes the formula.
            memo[n][i] = Verdict::False;
            return Verdict::False;
        }
        return Verdict::Unknown;
    }

    /// φ₁ S[a,b] φ₂ at i: some j ≤ i with τᵢ−τⱼ ∈ [a,b] satisfies φ₂ while
    /// φ₁ holds at every position in (j, i]. Needs no future observations.
    Verdict query_since(int n, std::size_t i) {
        const NodeInfo& info = nodes[n];
        const Rational ti = times[i];
        Verdict result = Verdict::False;
        Verdict prefix = Verdict::True;
        for (std::size_t jj = i + 1; jj-- > 0;) {
            Rational d = ti - times[jj];
            if (info.interval.above(d)) break;
            if (info.interval.contains(d)) {
                result = or3(result, and3(prefix, query(info.right, jj)));
                if (result == Verdict::True) return Verdict::True;
            }
            prefix = and3(prefix, query(info.left, jj));
            if (prefix == Verdict::False) break;
        }
        return result;
    }
};

OnlineMonitor::OnlineMonitor(Formula f) : engine_(std::make_unique<Engine>(f)) {}
OnlineMonitor::OnlineMonitor(const OnlineMonitor& o)
    : engine_(std::make_unique<Engine>(*o.engine_)), current_(o.current_) {}
OnlineMonitor::OnlineMonitor(OnlineMonitor&&) noexcept = default;
OnlineMonitor& OnlineMonitor::operator=(OnlineMonitor o) noexcept {
    std::swap(engine_, o.engine_);
    std::swap(current_, o.current_);
    return *this;
}
OnlineMonitor::~OnlineMonitor() = default;

Verdict OnlineMonitor::update(const Observation& obs) {
    if (current_ != Verdict::Unknown) return current_; // verdicts are monotone
    engine_->append(obs);
    current_ = engine_->query(engine_->root, 0);
    return current_;
}

Verdict OnlineMonitor::finish() {
    if (engine_->size() == 0) throw ContractError("end of trace before any observation");
    if (current_ != Verdict::Unknown) return current_;
    engine_->closed = true;
    current_ = engine_->query(engine_->root, 0);
    return current_;
}

std::size_t OnlineMonitor::observations() const { return engine_->size(); }

Verdict OnlineMonitor::at(std::size_t position) {
    if (position >= engine_->size()) throw ArgumentError("trace position out of range");
    return engine_->query(engine_->root, position);
}

namespace {

Verdict eval_impl(const Formula& f, const TimedTrace& trace, std::size_t position, bool closed) {
    if (position >= trace.size()) throw ArgumentError("trace position out of range");
    OnlineMonitor::Engine engine(f);
    engine.closed = closed;
    for (const auto& obs : trace) engine.append(obs);
    return engine.query(engine.root, position);
}

} // namespace

Verdict evaluate(const Formula& f, const TimedTrace& trace, std::size_t position) {
    return eval_impl(f, trace, position, false);
}

Verdict evaluate_complete(const Formula& f, const TimedTrace& trace, std::size_t position) {
    return eval_impl(f, trace, position, true);
}

} // namespace tpcs
