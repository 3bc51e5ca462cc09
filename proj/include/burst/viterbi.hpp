#pragma once

#include <burst/error.hpp>
#include <burst/model.hpp>
#include <burst/stream.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace burst {

struct Solution {
    Fit fit;
    double cost = 0.0;
};

/// Row-major n x k dynamic-programming table.
///
/// best_cost(t, j) is the cheapest way to explain gaps 0..t ending in state j,
/// starting from state 0 before the first gap. back_pointer(t, j) is the
/// predecessor state realizing it (lowest index on ties).
class DPTable {
public:
    DPTable(std::size_t gap_count, std::size_t states)
        : n_(gap_count), k_(states), best_(gap_count * states), back_(gap_count * states) {}

    std::size_t gap_count() const noexcept { return n_; }
    std::size_t states() const noexcept { return k_; }

    double best_cost(std::size_t t, State j) const { return best_[t * k_ + static_cast<std::size_t>(j)]; }
    State back_pointer(std::size_t t, State j) const { return back_[t * k_ + static_cast<std::size_t>(j)]; }

    double &best_cost(std::size_t t, State j) { return best_[t * k_ + static_cast<std::size_t>(j)]; }
    State &back_pointer(std::size_t t, State j) { return back_[t * k_ + static_cast<std::size_t>(j)]; }

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<double> best_;
    std::vector<State> back_;
};

inline DPTable fill_table(const Automaton &a, const CostFunctionId &cf, const GapSequence &gaps) {
    if (gaps.size() != a.gap_count()) {
        throw Error(ErrorKind::Shape, "automaton built for " + std::to_string(a.gap_count()) +
                                          " gaps, sequence has " + std::to_string(gaps.size()));
    }
    const TransitionTable tau(a, cf);
    const auto n = gaps.size();
    const State k = a.states();
    DPTable table(n, static_cast<std::size_t>(k));

    for (State j = 0; j < k; ++j) {
        table.best_cost(0, j) = (0.0 + tau(0, j)) + gap_cost(a, j, gaps[0]);
        table.back_pointer(0, j) = 0;
    }
    for (std::size_t t = 1; t < n; ++t) {
        for (State j = 0; j < k; ++j) {
            double best = std::numeric_limits<double>::infinity();
            State arg = 0;
            for (State i = 0; i < k; ++i) {
                const double c = table.best_cost(t - 1, i) + tau(i, j);
                if (c < best) {
                    best = c;
                    arg = i;
                }
            }
            table.best_cost(t, j) = best + gap_cost(a, j, gaps[t]);
            table.back_pointer(t, j) = arg;
        }
    }
    return table;
}

/// Minimum-cost state sequence by dynamic programming, O(n k^2).
inline Solution viterbi(const Automaton &a, const CostFunctionId &cf, const GapSequence &gaps) {
    const auto table = fill_table(a, cf, gaps);
    const auto n = gaps.size();
    const State k = a.states();

    State last = 0;
    for (State j = 1; j < k; ++j) {
        if (table.best_cost(n - 1, j) < table.best_cost(n - 1, last)) {
            last = j;
        }
    }
    std::vector<State> dense(n);
    dense[n - 1] = last;
    for (std::size_t t = n - 1; t > 0; --t) {
        dense[t - 1] = table.back_pointer(t, dense[t]);
    }
    return {compact(dense), table.best_cost(n - 1, last)};
}

inline constexpr std::uint64_t brute_force_limit = 10'000'000;

/// Exhaustive search over all k^n dense sequences, visited in lexicographic
/// order so the first minimizer found is the lexicographically smallest.
inline Solution brute_force(const Automaton &a, const CostFunctionId &cf, const GapSequence &gaps) {
    if (gaps.size() != a.gap_count()) {
        throw Error(ErrorKind::Shape, "automaton built for " + std::to_string(a.gap_count()) +
                                          " gaps, sequence has " + std::to_string(gaps.size()));
    }
    const auto n = gaps.size();
    const auto k = static_cast<std::uint64_t>(a.states());
    std::uint64_t combos = 1;
    for (std::size_t t = 0; t < n; ++t) {
        combos *= k;
        if (combos > brute_force_limit) {
            throw Error(ErrorKind::Guard, "k^n exceeds " + std::to_string(brute_force_limit) +
                                              " sequences (k = " + std::to_string(k) +
                                              ", n = " + std::to_string(n) + ")");
        }
    }

    const TransitionTable tau(a, cf);
    std::vector<State> current(n, 0);
    std::vector<State> best_seq = current;
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t c = 0; c < combos; ++c) {
        const double cost = total_cost(a, tau, current, gaps);
        if (cost < best) {
            best = cost;
            best_seq = current;
        }
        // Odometer increment, last position fastest.
        for (std::size_t pos = n; pos-- > 0;) {
            if (++current[pos] < static_cast<State>(k)) {
                break;
            }
            current[pos] = 0;
        }
    }
    return {compact(best_seq), best};
}

} // namespace burst
