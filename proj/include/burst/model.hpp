#pragma once

#include <burst/error.hpp>
#include <burst/stream.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace burst {

using State = int;

// ---------------------------------------------------------------------------
// Automaton
// ---------------------------------------------------------------------------

/// k-state emission model for a stream of n gaps spanning T time units.
///
/// State 0 emits at the uniform rate n/T. Rates grow geometrically by the
/// scale factor s until the top state reaches the configured maximum rate.
class Automaton {
public:
    Automaton(std::size_t gap_count, double span, int states, double alpha_max, double gamma)
        : n_(gap_count), span_(span), k_(states), alpha_max_(alpha_max), gamma_(gamma) {
        if (gap_count < 1) {
            throw Error(ErrorKind::InvalidStream, "automaton needs at least one gap");
        }
        if (!(span > 0.0) || !std::isfinite(span)) {
            throw Error(ErrorKind::DegenerateSpan, "automaton needs a positive span");
        }
        if (states < 2) {
            throw Error(ErrorKind::Flag, "automaton needs at least two states");
        }
        if (!(gamma > 0.0) || !std::isfinite(gamma)) {
            throw Error(ErrorKind::Flag, "gamma must be positive");
        }
        alpha_0_ = static_cast<double>(gap_count) / span;
        if (!(alpha_max > alpha_0_) || !std::isfinite(alpha_max)) {
            throw Error(ErrorKind::Scale, "maximum rate " + detail::format_double(alpha_max) +
                                              " must exceed the uniform rate n/T = " +
                                              detail::format_double(alpha_0_));
        }
        const double top = static_cast<double>(states - 1);
        log_s_ = (std::log(alpha_max) - std::log(static_cast<double>(gap_count)) + std::log(span)) / top;
        s_ = std::exp(log_s_);
        alphas_.resize(static_cast<std::size_t>(states));
        neg_log_alphas_.resize(static_cast<std::size_t>(states));
        const double log_alpha_0 = std::log(alpha_0_);
        for (int i = 0; i < states; ++i) {
            const double log_alpha = log_alpha_0 + static_cast<double>(i) * log_s_;
            alphas_[static_cast<std::size_t>(i)] = std::exp(log_alpha);
            neg_log_alphas_[static_cast<std::size_t>(i)] = -log_alpha;
        }
        // Pin the endpoints so the ladder hits both rates exactly.
        alphas_.front() = alpha_0_;
        neg_log_alphas_.front() = -log_alpha_0;
        alphas_.back() = alpha_max;
        neg_log_alphas_.back() = -std::log(alpha_max);
    }

    int states() const noexcept { return k_; }
    std::size_t gap_count() const noexcept { return n_; }
    double span() const noexcept { return span_; }
    double alpha_0() const noexcept { return alpha_0_; }
    double alpha_max() const noexcept { return alpha_max_; }
    double scale() const noexcept { return s_; }
    double gamma() const noexcept { return gamma_; }
    std::span<const double> alphas() const noexcept { return alphas_; }
    double alpha(State i) const { return alphas_[static_cast<std::size_t>(i)]; }
    double neg_log_alpha(State i) const { return neg_log_alphas_[static_cast<std::size_t>(i)]; }
    bool contains(State i) const noexcept { return i >= 0 && i < k_; }

private:
    std::size_t n_;
    double span_;
    int k_;
    double alpha_max_;
    double gamma_;
    double alpha_0_ = 0.0;
    double s_ = 0.0;
    double log_s_ = 0.0;
    std::vector<double> alphas_;
    std::vector<double> neg_log_alphas_;
};

inline Automaton build_automaton(std::size_t gap_count, double span, int states, double alpha_max,
                                 double gamma) {
    return Automaton(gap_count, span, states, alpha_max, gamma);
}

inline Automaton build_automaton(const GapSequence &gaps, int states, double alpha_max, double gamma) {
    return Automaton(gaps.size(), gaps.span, states, alpha_max, gamma);
}

/// Cost of explaining gap `x` with the exponential density of `state`:
/// -ln(alpha e^{-alpha x}).
inline double gap_cost(const Automaton &a, State state, double x) {
    return a.neg_log_alpha(state) + a.alpha(state) * x;
}

// ---------------------------------------------------------------------------
// Transition costs
// ---------------------------------------------------------------------------

enum class CostVariant { a, b, c, d, e, f, g, h, two_state };

inline constexpr CostVariant all_cost_variants[] = {
    CostVariant::a, CostVariant::b, CostVariant::c, CostVariant::d, CostVariant::e,
    CostVariant::f, CostVariant::g, CostVariant::h, CostVariant::two_state};

class CostFunctionId {
public:
    constexpr CostFunctionId() = default;

    explicit CostFunctionId(CostVariant variant, std::optional<double> p = std::nullopt)
        : variant_(variant), p_(p) {
        if (variant == CostVariant::two_state) {
            if (!p || !(*p > 0.0 && *p < 1.0)) {
                throw Error(ErrorKind::Flag, "two-state cost needs 0 < p < 1");
            }
        } else if (p) {
            throw Error(ErrorKind::Flag, "p only applies to the two-state cost");
        }
    }

    CostVariant variant() const noexcept { return variant_; }
    std::optional<double> p() const noexcept { return p_; }

    friend bool operator==(const CostFunctionId &, const CostFunctionId &) = default;

private:
    CostVariant variant_ = CostVariant::g;
    std::optional<double> p_;
};

inline std::string_view to_string(CostVariant v) {
    switch (v) {
    case CostVariant::a: return "a";
    case CostVariant::b: return "b";
    case CostVariant::c: return "c";
    case CostVariant::d: return "d";
    case CostVariant::e: return "e";
    case CostVariant::f: return "f";
    case CostVariant::g: return "g";
    case CostVariant::h: return "h";
    case CostVariant::two_state: return "two-state";
    }
    return "?";
}

inline std::optional<CostVariant> parse_cost_variant(std::string_view s) {
    for (const auto v : all_cost_variants) {
        if (s == to_string(v)) {
            return v;
        }
    }
    if (s == "two_state") {
        return CostVariant::two_state;
    }
    return std::nullopt;
}

/// Zero-downward-cost variants; the others also charge for moving down.
inline bool is_upward_only(CostVariant v) {
    return v == CostVariant::a || v == CostVariant::c || v == CostVariant::e || v == CostVariant::g;
}

/// Penalty for moving from state i to state j. `state_count` is the total
/// number of automaton states (the E of the state-normalized variants).
inline double transition_cost(const CostFunctionId &cf, State i, State j, std::size_t gap_count,
                              int state_count, double gamma) {
    if (i == j) {
        return 0.0;
    }
    const double up = static_cast<double>(j - i);
    const double dist = std::abs(up);
    switch (cf.variant()) {
    case CostVariant::a:
        return j > i ? up * gamma * std::log(static_cast<double>(gap_count)) : 0.0;
    case CostVariant::b:
        return dist * gamma * std::log(static_cast<double>(gap_count));
    case CostVariant::c:
        return j > i ? gamma * std::log(up) : 0.0;
    case CostVariant::d:
        return gamma * std::log(dist);
    case CostVariant::e:
        return j > i ? gamma * std::sqrt(up) : 0.0;
    case CostVariant::f:
        return gamma * std::sqrt(dist);
    case CostVariant::g:
        return j > i ? up * gamma / std::log(static_cast<double>(state_count)) : 0.0;
    case CostVariant::h:
        return dist * gamma / std::log(static_cast<double>(state_count));
    case CostVariant::two_state: {
        const double p = *cf.p();
        return std::log((1.0 - p) / p);
    }
    }
    return 0.0;
}

inline double transition_cost(const Automaton &a, const CostFunctionId &cf, State i, State j) {
    return transition_cost(cf, i, j, a.gap_count(), a.states(), a.gamma());
}

/// Dense k x k table of transition costs for one automaton.
class TransitionTable {
public:
    TransitionTable(const Automaton &a, const CostFunctionId &cf)
        : k_(static_cast<std::size_t>(a.states())), costs_(k_ * k_) {
        for (std::size_t i = 0; i < k_; ++i) {
            for (std::size_t j = 0; j < k_; ++j) {
                costs_[i * k_ + j] =
                    transition_cost(a, cf, static_cast<State>(i), static_cast<State>(j));
            }
        }
    }

    double operator()(State i, State j) const {
        return costs_[static_cast<std::size_t>(i) * k_ + static_cast<std::size_t>(j)];
    }

    std::size_t states() const noexcept { return k_; }

private:
    std::size_t k_;
    std::vector<double> costs_;
};

// ---------------------------------------------------------------------------
// Fit
// ---------------------------------------------------------------------------

/// A block of consecutive gaps [first_gap, last_gap] explained by one state.
struct Run {
    State state = 0;
    std::size_t first_gap = 0;
    std::size_t last_gap = 0;

    std::size_t length() const noexcept { return last_gap - first_gap + 1; }

    friend bool operator==(const Run &, const Run &) = default;
};

/// Run-length encoded state sequence; runs tile [0, n) in order.
struct Fit {
    std::vector<Run> runs;

    std::size_t gap_count() const noexcept { return runs.empty() ? 0 : runs.back().last_gap + 1; }

    friend bool operator==(const Fit &, const Fit &) = default;
};

/// Throws a shape error unless `fit` tiles [0, gap_count) with states in [0, states).
inline void validate_fit(const Fit &fit, std::size_t gap_count, int states) {
    if (fit.runs.empty()) {
        throw Error(ErrorKind::Shape, "fit has no runs");
    }
    std::size_t next = 0;
    for (std::size_t r = 0; r < fit.runs.size(); ++r) {
        const auto &run = fit.runs[r];
        if (run.first_gap != next || run.last_gap < run.first_gap) {
            throw Error(ErrorKind::Shape, "run " + std::to_string(r) + " does not continue the tiling");
        }
        if (run.state < 0 || run.state >= states) {
            throw Error(ErrorKind::Shape, "run " + std::to_string(r) + " has state " +
                                              std::to_string(run.state) + " outside [0, " +
                                              std::to_string(states) + ")");
        }
        next = run.last_gap + 1;
    }
    if (next != gap_count) {
        throw Error(ErrorKind::Shape, "fit covers " + std::to_string(next) + " gaps, stream has " +
                                          std::to_string(gap_count));
    }
}

inline bool is_normalized(const Fit &fit) {
    for (std::size_t r = 1; r < fit.runs.size(); ++r) {
        if (fit.runs[r].state == fit.runs[r - 1].state) {
            return false;
        }
    }
    return true;
}

inline std::vector<State> expand(const Fit &fit) {
    std::vector<State> dense;
    dense.reserve(fit.gap_count());
    for (const auto &run : fit.runs) {
        dense.insert(dense.end(), run.length(), run.state);
    }
    return dense;
}

inline Fit compact(std::span<const State> dense) {
    Fit fit;
    for (std::size_t t = 0; t < dense.size(); ++t) {
        if (!fit.runs.empty() && fit.runs.back().state == dense[t]) {
            fit.runs.back().last_gap = t;
        } else {
            fit.runs.push_back({dense[t], t, t});
        }
    }
    return fit;
}

inline void normalize_in_place(Fit &fit) {
    if (fit.runs.empty()) {
        return;
    }
    std::size_t out = 0;
    for (std::size_t r = 1; r < fit.runs.size(); ++r) {
        if (fit.runs[r].state == fit.runs[out].state) {
            fit.runs[out].last_gap = fit.runs[r].last_gap;
        } else {
            fit.runs[++out] = fit.runs[r];
        }
    }
    fit.runs.resize(out + 1);
}

inline Fit normalize(Fit fit) {
    normalize_in_place(fit);
    return fit;
}

/// Fit that explains every gap with one state.
inline Fit uniform_fit(std::size_t gap_count, State state = 0) {
    return Fit{{Run{state, 0, gap_count - 1}}};
}

/// Number of adjacent state changes (excluding the implicit start state).
inline std::size_t state_changes(const Fit &fit) {
    const auto n = normalize(fit);
    return n.runs.empty() ? 0 : n.runs.size() - 1;
}

// ---------------------------------------------------------------------------
// Costs
// ---------------------------------------------------------------------------

/// Cost of a dense state sequence. The automaton starts in state 0, so the
/// move into the first state is charged. Accumulates gap by gap in the same
/// order as the dynamic program, which keeps the two bit-comparable.
inline double total_cost(const Automaton &a, const TransitionTable &tau, std::span<const State> dense,
                         const GapSequence &gaps) {
    if (dense.size() != gaps.size()) {
        throw Error(ErrorKind::Shape, "state sequence has " + std::to_string(dense.size()) +
                                          " entries for " + std::to_string(gaps.size()) + " gaps");
    }
    double cost = 0.0;
    State prev = 0;
    for (std::size_t t = 0; t < dense.size(); ++t) {
        const State q = dense[t];
        if (!a.contains(q)) {
            throw Error(ErrorKind::Shape, "state " + std::to_string(q) + " outside the automaton");
        }
        cost = (cost + tau(prev, q)) + gap_cost(a, q, gaps[t]);
        prev = q;
    }
    return cost;
}

inline double total_cost(const Automaton &a, const CostFunctionId &cf, std::span<const State> dense,
                         const GapSequence &gaps) {
    return total_cost(a, TransitionTable(a, cf), dense, gaps);
}

inline double total_cost(const Automaton &a, const CostFunctionId &cf, const Fit &fit,
                         const GapSequence &gaps) {
    validate_fit(fit, gaps.size(), a.states());
    const auto dense = expand(fit);
    return total_cost(a, cf, dense, gaps);
}

// ---------------------------------------------------------------------------
// Frequency curve
// ---------------------------------------------------------------------------

struct CurveStep {
    double time_start = 0.0;
    double time_end = 0.0;
    double rate = 0.0;
};

/// One step per run: the run's rate between the timestamps that bound its gaps.
inline std::vector<CurveStep> frequency_curve(const Automaton &a, const Fit &fit,
                                              const DocumentStream &stream) {
    if (stream.size() < 2) {
        throw Error(ErrorKind::Shape, "stream has no gaps");
    }
    validate_fit(fit, stream.size() - 1, a.states());
    const auto ts = stream.timestamps();
    std::vector<CurveStep> steps;
    steps.reserve(fit.runs.size());
    for (const auto &run : fit.runs) {
        steps.push_back({ts[run.first_gap], ts[run.last_gap + 1], a.alpha(run.state)});
    }
    return steps;
}

} // namespace burst
