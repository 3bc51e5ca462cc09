#pragma once

#include <burst/error.hpp>
#include <burst/model.hpp>
#include <burst/stream.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace burst {

using Rng = std::mt19937_64;

/// True when one gap is at least (1 + ratio) times the other.
inline bool gaps_differ(double left, double right, double ratio) {
    const double lo = std::min(left, right);
    const double hi = std::max(left, right);
    return hi > lo && hi >= (1.0 + ratio) * lo;
}

/// Gap sequence plus the lookups the search operators need: prefix sums for
/// O(1) run emission costs, and the documents where a run may be split.
///
/// Document d (1 <= d < n) sits between gap d-1 and gap d. It is a split
/// point when those two gaps differ by the ratio rule.
class GapProfile {
public:
    GapProfile(const GapSequence &gaps, double ratio) : gaps_(gaps.gaps), ratio_(ratio) {
        if (gaps_.empty()) {
            throw Error(ErrorKind::InvalidStream, "empty gap sequence");
        }
        prefix_.resize(gaps_.size() + 1, 0.0);
        for (std::size_t t = 0; t < gaps_.size(); ++t) {
            prefix_[t + 1] = prefix_[t] + gaps_[t];
        }
        for (std::size_t d = 1; d < gaps_.size(); ++d) {
            if (gaps_differ(gaps_[d - 1], gaps_[d], ratio)) {
                split_points_.push_back(d);
            }
        }
    }

    std::size_t size() const noexcept { return gaps_.size(); }
    double gap(std::size_t t) const { return gaps_[t]; }
    double ratio() const noexcept { return ratio_; }
    std::span<const std::size_t> split_points() const noexcept { return split_points_; }

    double gap_sum(std::size_t first, std::size_t last) const { return prefix_[last + 1] - prefix_[first]; }

    bool comparable(std::size_t left_gap, std::size_t right_gap) const {
        return !gaps_differ(gaps_[left_gap], gaps_[right_gap], ratio_);
    }

    /// Split points strictly inside a run, i.e. documents d with first < d <= last.
    std::span<const std::size_t> interior_split_points(const Run &run) const {
        const auto lo = std::upper_bound(split_points_.begin(), split_points_.end(), run.first_gap);
        const auto hi = std::upper_bound(lo, split_points_.end(), run.last_gap);
        return {lo, hi};
    }

private:
    std::vector<double> gaps_;
    std::vector<double> prefix_;
    std::vector<std::size_t> split_points_;
    double ratio_;
};

/// Run-list cost evaluation against one automaton and transition function.
class FitnessModel {
public:
    FitnessModel(const Automaton &a, const CostFunctionId &cf, const GapProfile &profile)
        : automaton_(a), tau_(a, cf), profile_(profile) {
        if (profile.size() != a.gap_count()) {
            throw Error(ErrorKind::Shape, "automaton built for " + std::to_string(a.gap_count()) +
                                              " gaps, sequence has " + std::to_string(profile.size()));
        }
    }

    const Automaton &automaton() const noexcept { return automaton_; }
    const GapProfile &profile() const noexcept { return profile_; }
    int states() const noexcept { return automaton_.states(); }

    double run_cost(const Run &run) const {
        return static_cast<double>(run.length()) * automaton_.neg_log_alpha(run.state) +
               automaton_.alpha(run.state) * profile_.gap_sum(run.first_gap, run.last_gap);
    }

    double operator()(const Fit &fit) const {
        double cost = 0.0;
        State prev = 0;
        for (const auto &run : fit.runs) {
            cost += tau_(prev, run.state) + run_cost(run);
            prev = run.state;
        }
        return cost;
    }

private:
    const Automaton &automaton_;
    TransitionTable tau_;
    const GapProfile &profile_;
};

struct Individual {
    Fit fit;
    double fitness = 0.0;
};

inline Individual make_individual(Fit fit, const FitnessModel &model) {
    const double f = model(fit);
    return {std::move(fit), f};
}

struct EAConfig {
    std::size_t population_size = 200;
    std::size_t max_generations = 200;
    double crossover_rate = 0.40;
    double mutation_rate = 0.05;
    double convergence_threshold = 1e-6;
    std::size_t convergence_window = 20;
    std::uint64_t rng_seed = 1;
    double gap_ratio_threshold = 0.5;
    // Validate every individual after each generation (slow; for tests).
    bool check_invariants = false;

    void validate() const {
        if (population_size < 2) {
            throw Error(ErrorKind::Flag, "population size must be at least 2");
        }
        if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0) ||
            !(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
            throw Error(ErrorKind::Flag, "crossover and mutation rates must lie in [0, 1]");
        }
        if (convergence_window < 1 || !(convergence_threshold > 0.0)) {
            throw Error(ErrorKind::Flag, "convergence window must be >= 1 and threshold > 0");
        }
        if (!(gap_ratio_threshold >= 0.0) || !std::isfinite(gap_ratio_threshold)) {
            throw Error(ErrorKind::Flag, "gap ratio threshold must be non-negative");
        }
    }
};

struct RunStats {
    double best_cost = 0.0;
    double average_cost = 0.0;
    double std_dev_cost = 0.0;
    std::size_t generations_used = 0;
    double wall_time = 0.0;
    bool converged = false;
};

struct GenerationRecord {
    std::size_t generation = 0;
    double best_cost = 0.0;
    double average_cost = 0.0;
};

struct EvolutionResult {
    Fit fit;
    RunStats stats;
    std::vector<GenerationRecord> trace;
};

namespace detail {

inline std::size_t uniform_index(Rng &rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline bool coin(Rng &rng) { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; }

inline double unit(Rng &rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline State clamp_state(long long s, int k) {
    return static_cast<State>(std::clamp<long long>(s, 0, k - 1));
}

inline std::size_t run_containing(const Fit &fit, std::size_t gap) {
    const auto it = std::upper_bound(fit.runs.begin(), fit.runs.end(), gap,
                                     [](std::size_t g, const Run &r) { return g < r.first_gap; });
    return static_cast<std::size_t>(it - fit.runs.begin()) - 1;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Initial population
// ---------------------------------------------------------------------------

/// Random individual that only changes state at split points.
///
/// Each split point is kept with a per-individual probability. The first run
/// gets a uniform state; across each kept split the state rises by a random
/// step when the gap shortens and falls when it lengthens.
inline Fit heuristic_fit(const GapProfile &profile, int states, Rng &rng) {
    const auto n = profile.size();
    const double keep = detail::unit(rng);
    const long long max_step = std::max(1, (states - 1) / 2);
    std::uniform_int_distribution<long long> step_dist(1, max_step);

    Fit fit;
    State state = static_cast<State>(detail::uniform_index(rng, static_cast<std::size_t>(states)));
    std::size_t start = 0;
    for (const auto d : profile.split_points()) {
        if (detail::unit(rng) >= keep) {
            continue;
        }
        fit.runs.push_back({state, start, d - 1});
        start = d;
        const long long step = step_dist(rng);
        if (profile.gap(d) < profile.gap(d - 1)) {
            state = detail::clamp_state(state + step, states);
        } else {
            state = detail::clamp_state(state - step, states);
        }
    }
    fit.runs.push_back({state, start, n - 1});
    normalize_in_place(fit);
    return fit;
}

inline Individual heuristic_individual(const FitnessModel &model, Rng &rng) {
    return make_individual(heuristic_fit(model.profile(), model.states(), rng), model);
}

// ---------------------------------------------------------------------------
// Crossover
// ---------------------------------------------------------------------------

/// One-point crossover at document `cut` (1 <= cut < n): gaps before the cut
/// come from `left`, gaps from the cut onwards from `right`.
///
/// The run of `left` holding gap cut-1 and the run of `right` holding gap cut
/// together cover a substream. If the two gaps around the cut are comparable
/// the substream becomes one run with the state of a random one of those two
/// runs; otherwise it is split at the cut, each side keeping its parent's state.
inline Fit crossover(const Fit &left, const Fit &right, std::size_t cut, const GapProfile &profile,
                     Rng &rng) {
    const auto n = profile.size();
    if (n < 2 || cut == 0 || cut >= n) {
        return left;
    }
    const auto li = detail::run_containing(left, cut - 1);
    const auto ri = detail::run_containing(right, cut);
    const Run &l = left.runs[li];
    const Run &r = right.runs[ri];

    Fit child;
    child.runs.reserve(li + 2 + (right.runs.size() - ri));
    child.runs.insert(child.runs.end(), left.runs.begin(), left.runs.begin() + static_cast<std::ptrdiff_t>(li));
    if (l.last_gap == cut - 1 && r.first_gap == cut) {
        // The cut falls on a run boundary in both parents; nothing to resolve.
        child.runs.push_back(l);
        child.runs.push_back(r);
    } else if (profile.comparable(cut - 1, cut)) {
        const State s = detail::coin(rng) ? r.state : l.state;
        child.runs.push_back({s, l.first_gap, r.last_gap});
    } else {
        child.runs.push_back({l.state, l.first_gap, cut - 1});
        child.runs.push_back({r.state, cut, r.last_gap});
    }
    child.runs.insert(child.runs.end(), right.runs.begin() + static_cast<std::ptrdiff_t>(ri) + 1,
                      right.runs.end());
    normalize_in_place(child);
    return child;
}

inline Fit crossover(const Fit &left, const Fit &right, const GapProfile &profile, Rng &rng) {
    if (profile.size() < 2) {
        return left;
    }
    const std::size_t cut = 1 + detail::uniform_index(rng, profile.size() - 1);
    return crossover(left, right, cut, profile, rng);
}

// ---------------------------------------------------------------------------
// Mutation
// ---------------------------------------------------------------------------

enum class MutationKind { Shift, Join, Split };

/// Applies one mutation variant to run `target`, or returns nullopt when the
/// variant cannot act on it (no neighbor to join, no split point inside).
///
/// Shift moves the run's state one step up or down, clamped to the ladder.
/// Join merges the run with a random neighbor, keeping one of the two states.
/// Split cuts the run at a random interior split point; the right part moves
/// one state up when the gap left of the cut is the longer one, down otherwise.
inline std::optional<Fit> apply_mutation(const Fit &fit, MutationKind kind, std::size_t target,
                                         const GapProfile &profile, int states, Rng &rng) {
    Fit out = fit;
    switch (kind) {
    case MutationKind::Shift: {
        auto &run = out.runs[target];
        run.state = detail::clamp_state(run.state + (detail::coin(rng) ? 1 : -1), states);
        break;
    }
    case MutationKind::Join: {
        if (out.runs.size() < 2) {
            return std::nullopt;
        }
        std::size_t i = target;
        if (target + 1 == out.runs.size()) {
            i = target - 1;
        } else if (target > 0 && detail::coin(rng)) {
            i = target - 1;
        }
        const State s = detail::coin(rng) ? out.runs[i + 1].state : out.runs[i].state;
        out.runs[i] = {s, out.runs[i].first_gap, out.runs[i + 1].last_gap};
        out.runs.erase(out.runs.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        break;
    }
    case MutationKind::Split: {
        const Run run = out.runs[target];
        const auto points = profile.interior_split_points(run);
        if (points.empty()) {
            return std::nullopt;
        }
        const auto d = points[detail::uniform_index(rng, points.size())];
        const int delta = profile.gap(d - 1) > profile.gap(d) ? 1 : -1;
        const State right_state = detail::clamp_state(run.state + delta, states);
        out.runs[target] = {run.state, run.first_gap, d - 1};
        out.runs.insert(out.runs.begin() + static_cast<std::ptrdiff_t>(target) + 1,
                        Run{right_state, d, run.last_gap});
        break;
    }
    }
    normalize_in_place(out);
    return out;
}

/// Picks which run a mutation acts on. With `last_run_bias` > 0 the last run
/// is chosen with that probability and the others share the remainder.
inline std::size_t pick_mutation_target(const Fit &fit, double last_run_bias, Rng &rng) {
    const auto r = fit.runs.size();
    if (last_run_bias <= 0.0 || r == 1) {
        return detail::uniform_index(rng, r);
    }
    if (detail::unit(rng) < last_run_bias) {
        return r - 1;
    }
    return detail::uniform_index(rng, r - 1);
}

/// Applies one uniformly chosen mutation variant. Variants that cannot act
/// are dropped and another is drawn; Shift always applies.
inline Fit mutate(const Fit &fit, const GapProfile &profile, int states, Rng &rng,
                  double last_run_bias = 0.0) {
    std::vector<MutationKind> kinds{MutationKind::Shift, MutationKind::Join, MutationKind::Split};
    const bool biased = last_run_bias > 0.0;
    std::optional<std::size_t> target;
    if (biased) {
        target = pick_mutation_target(fit, last_run_bias, rng);
    }
    while (!kinds.empty()) {
        const auto pick = detail::uniform_index(rng, kinds.size());
        const auto kind = kinds[pick];
        std::size_t run = 0;
        if (target) {
            run = *target;
        } else if (kind == MutationKind::Split) {
            // Uniform over runs that can actually be split.
            std::vector<std::size_t> splittable;
            for (std::size_t i = 0; i < fit.runs.size(); ++i) {
                if (!profile.interior_split_points(fit.runs[i]).empty()) {
                    splittable.push_back(i);
                }
            }
            if (splittable.empty()) {
                kinds.erase(kinds.begin() + static_cast<std::ptrdiff_t>(pick));
                continue;
            }
            run = splittable[detail::uniform_index(rng, splittable.size())];
        } else {
            run = detail::uniform_index(rng, fit.runs.size());
        }
        if (auto out = apply_mutation(fit, kind, run, profile, states, rng)) {
            return std::move(*out);
        }
        kinds.erase(kinds.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Steady-state search
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t tournament(std::span<const Individual> pop, Rng &rng,
                              std::optional<std::size_t> exclude = std::nullopt) {
    const auto draw = [&]() {
        if (!exclude) {
            return uniform_index(rng, pop.size());
        }
        const auto i = uniform_index(rng, pop.size() - 1);
        return i >= *exclude ? i + 1 : i;
    };
    const auto a = draw();
    const auto b = draw();
    return pop[b].fitness < pop[a].fitness ? b : a;
}

inline void summarize(std::span<const Individual> pop, std::size_t &best_index, double &average) {
    best_index = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        sum += pop[i].fitness;
        if (pop[i].fitness < pop[best_index].fitness) {
            best_index = i;
        }
    }
    average = sum / static_cast<double>(pop.size());
}

} // namespace detail

/// Runs the steady-state search from a given initial population.
///
/// Each generation performs round(population_size * crossover_rate) crossover
/// events: two parents are drawn by binary tournament, both offspring are
/// built at one random cut, and the better offspring replaces the worse
/// parent. Then every individual is mutated with probability mutation_rate;
/// a mutant replaces its original unless it is worse. The best fitness never
/// increases. The search stops after max_generations, or once the relative
/// change of the average fitness stays below the threshold for
/// convergence_window consecutive generations.
inline EvolutionResult evolve_population(const FitnessModel &model, const EAConfig &config,
                                         std::vector<Individual> population, Rng &rng) {
    config.validate();
    if (population.size() != config.population_size) {
        throw Error(ErrorKind::Shape, "initial population has the wrong size");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto &profile = model.profile();
    const int k = model.states();
    const auto n = profile.size();
    const auto events = static_cast<std::size_t>(
        std::lround(static_cast<double>(config.population_size) * config.crossover_rate));

    EvolutionResult result;
    std::size_t best_index = 0;
    double average = 0.0;
    detail::summarize(population, best_index, average);
    result.trace.push_back({0, population[best_index].fitness, average});

    std::size_t stable = 0;
    std::size_t generation = 0;
    bool converged = false;
    while (generation < config.max_generations && !converged) {
        ++generation;
        for (std::size_t e = 0; e < events && n >= 2; ++e) {
            const auto i = detail::tournament(population, rng);
            const auto j = detail::tournament(population, rng, i);
            const std::size_t cut = 1 + detail::uniform_index(rng, n - 1);
            auto first = make_individual(crossover(population[i].fit, population[j].fit, cut, profile, rng), model);
            auto second = make_individual(crossover(population[j].fit, population[i].fit, cut, profile, rng), model);
            auto &child = second.fitness < first.fitness ? second : first;
            const auto worse = population[j].fitness > population[i].fitness ? j : i;
            population[worse] = std::move(child);
        }
        for (auto &ind : population) {
            if (detail::unit(rng) >= config.mutation_rate) {
                continue;
            }
            auto mutant = make_individual(mutate(ind.fit, profile, k, rng), model);
            if (mutant.fitness <= ind.fitness) {
                ind = std::move(mutant);
            }
        }
        if (config.check_invariants) {
            for (const auto &ind : population) {
                validate_fit(ind.fit, n, k);
            }
        }

        const double previous = average;
        detail::summarize(population, best_index, average);
        result.trace.push_back({generation, population[best_index].fitness, average});
        const double scale = std::max(std::abs(previous), std::numeric_limits<double>::min());
        if (std::abs(average - previous) / scale < config.convergence_threshold) {
            converged = ++stable >= config.convergence_window;
        } else {
            stable = 0;
        }
    }

    const auto &best = population[best_index];
    result.fit = normalize(best.fit);
    double variance = 0.0;
    for (const auto &ind : population) {
        variance += (ind.fitness - average) * (ind.fitness - average);
    }
    result.stats.best_cost = best.fitness;
    result.stats.average_cost = average;
    result.stats.std_dev_cost = std::sqrt(variance / static_cast<double>(population.size()));
    result.stats.generations_used = generation;
    result.stats.converged = converged;
    result.stats.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Cold-start search: population of heuristic individuals.
inline EvolutionResult evolve(const GapSequence &gaps, const Automaton &automaton, const CostFunctionId &cf,
                              const EAConfig &config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const GapProfile profile(gaps, config.gap_ratio_threshold);
    const FitnessModel model(automaton, cf, profile);
    Rng rng(config.rng_seed);
    std::vector<Individual> population;
    population.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i) {
        population.push_back(heuristic_individual(model, rng));
    }
    auto result = evolve_population(model, config, std::move(population), rng);
    result.stats.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

/// Best-of-R summary: best, mean and population standard deviation of the
/// per-run best costs; generations and wall time of the best run.
inline RunStats summarize_runs(std::span<const RunStats> runs) {
    if (runs.empty()) {
        return {};
    }
    RunStats out;
    std::size_t best = 0;
    double sum = 0.0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        sum += runs[r].best_cost;
        if (runs[r].best_cost < runs[best].best_cost) {
            best = r;
        }
    }
    const double mean = sum / static_cast<double>(runs.size());
    double variance = 0.0;
    for (const auto &r : runs) {
        variance += (r.best_cost - mean) * (r.best_cost - mean);
    }
    out.best_cost = runs[best].best_cost;
    out.average_cost = std::max(mean, out.best_cost);
    out.std_dev_cost = std::sqrt(variance / static_cast<double>(runs.size()));
    out.generations_used = runs[best].generations_used;
    out.wall_time = runs[best].wall_time;
    out.converged = runs[best].converged;
    return out;
}

} // namespace burst
