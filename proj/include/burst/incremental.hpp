#pragma once

#include <burst/error.hpp>
#include <burst/evolution.hpp>
#include <burst/model.hpp>
#include <burst/stream.hpp>

#include <chrono>
#include <cstdlib>
#include <string_view>
#include <vector>

namespace burst {

enum class Trend { Up, Down, Flat };

inline constexpr std::string_view to_string(Trend t) {
    switch (t) {
    case Trend::Up: return "UP";
    case Trend::Down: return "DOWN";
    case Trend::Flat: return "FLAT";
    }
    return "?";
}

inline Trend classify_trend(State old_state, State new_state) {
    if (new_state > old_state) {
        return Trend::Up;
    }
    return new_state < old_state ? Trend::Down : Trend::Flat;
}

struct TrendUpdate {
    State old_state = 0;
    State new_state = 0;
    Trend trend = Trend::Flat;
};

/// State that best explains one new gap given the state the fit ended in:
/// argmin over j of tau(old, j) - ln(alpha_j e^{-alpha_j x}). Ties go to the
/// state nearest `old_state`, then to the lower index.
inline TrendUpdate local_trend_update(const Automaton &a, const CostFunctionId &cf, State old_state, double x) {
    if (!a.contains(old_state)) {
        throw Error(ErrorKind::Flag, "state " + std::to_string(old_state) + " outside [0, " +
                                         std::to_string(a.states()) + ")");
    }
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw Error(ErrorKind::Flag, "gap must be finite and non-negative");
    }
    State best = old_state;
    double best_cost = transition_cost(a, cf, old_state, old_state) + gap_cost(a, old_state, x);
    for (State j = 0; j < a.states(); ++j) {
        const double c = transition_cost(a, cf, old_state, j) + gap_cost(a, j, x);
        const bool closer = std::abs(j - old_state) < std::abs(best - old_state) ||
                            (std::abs(j - old_state) == std::abs(best - old_state) && j < best);
        if (c < best_cost || (c == best_cost && closer)) {
            best = j;
            best_cost = c;
        }
    }
    return {old_state, best, classify_trend(old_state, best)};
}

/// Probability that a seeded mutant is mutated on its last run.
inline constexpr double seed_last_run_bias = 0.5;

/// Previous fit with its last run stretched over the new gaps.
inline Fit extend_seed(const Fit &previous, std::size_t gap_count, int states) {
    if (previous.runs.empty() || previous.gap_count() > gap_count) {
        throw Error(ErrorKind::Shape, "previous fit covers " + std::to_string(previous.gap_count()) +
                                          " gaps, extended stream has " + std::to_string(gap_count));
    }
    validate_fit(previous, previous.gap_count(), states);
    Fit seed = normalize(previous);
    seed.runs.back().last_gap = gap_count - 1;
    return seed;
}

/// Refits an extended stream starting from a previous fit.
///
/// The population holds the seed plus population_size - 1 single mutations
/// of it, each aimed at the last run with probability seed_last_run_bias.
/// The search then proceeds as in evolve().
inline EvolutionResult seeded_refit(const Fit &previous, const GapSequence &extended, const Automaton &automaton,
                                    const CostFunctionId &cf, const EAConfig &config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const auto seed = extend_seed(previous, extended.size(), automaton.states());
    const GapProfile profile(extended, config.gap_ratio_threshold);
    const FitnessModel model(automaton, cf, profile);
    Rng rng(config.rng_seed);

    std::vector<Individual> population;
    population.reserve(config.population_size);
    population.push_back(make_individual(seed, model));
    while (population.size() < config.population_size) {
        population.push_back(
            make_individual(mutate(seed, profile, automaton.states(), rng, seed_last_run_bias), model));
    }
    auto result = evolve_population(model, config, std::move(population), rng);
    result.stats.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace burst
