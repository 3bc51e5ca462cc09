#pragma once

#include <burst/detail/text.hpp>
#include <burst/error.hpp>
#include <burst/evolution.hpp>
#include <burst/fit_io.hpp>
#include <burst/incremental.hpp>
#include <burst/model.hpp>
#include <burst/stream.hpp>
#include <burst/viterbi.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

// Command implementations behind the burstfit tool. Each command reads its
// inputs, writes its artifact, prints a human-readable summary and returns
// the process exit status.
namespace burst::cli {

struct CommandConfig {
    std::string subcommand;

    std::filesystem::path spec_path;
    std::filesystem::path stream_path;
    std::filesystem::path fit_path;
    std::filesystem::path out_path;
    std::filesystem::path trace_path;

    std::string kind;             // generate: fixed | bernoulli
    std::string algo = "viterbi"; // fit: viterbi | ea | brute

    // Model flags. Unset values fall back to a fit file's header, then to defaults.
    std::optional<int> states;
    std::optional<double> alpha_max;
    std::optional<double> gamma;
    std::optional<std::string> cost;
    std::optional<double> p;

    EAConfig ea;
    std::size_t runs = 1;
    std::vector<int> state_counts{5, 10, 15, 20, 25};
    bool timing = true;

    // trend
    std::optional<int> last_state;
    std::optional<double> gap;
    std::optional<std::size_t> gap_count;
    std::optional<double> span;
};

inline ModelParams resolve_model(const CommandConfig &cfg, const std::optional<ModelParams> &from_file = {}) {
    ModelParams m = from_file.value_or(ModelParams{});
    if (cfg.states) {
        m.states = *cfg.states;
    }
    if (cfg.alpha_max) {
        m.alpha_max = *cfg.alpha_max;
    }
    if (cfg.gamma) {
        m.gamma = *cfg.gamma;
    }
    if (cfg.cost || cfg.p) {
        const auto name = cfg.cost.value_or(std::string(to_string(m.cost.variant())));
        const auto variant = parse_cost_variant(name);
        if (!variant) {
            throw Error(ErrorKind::Flag, "unknown cost function '" + name + "'");
        }
        std::optional<double> p = cfg.p;
        if (!p && *variant == CostVariant::two_state) {
            p = m.cost.p();
        }
        m.cost = CostFunctionId(*variant, *variant == CostVariant::two_state ? p : std::nullopt);
    }
    if (m.states < 2) {
        throw Error(ErrorKind::Flag, "--states must be at least 2");
    }
    return m;
}

inline std::string seconds(double s) { return burst::detail::format_fixed(s, 3); }

namespace detail {

inline void write_trace(const std::vector<GenerationRecord> &trace, const std::filesystem::path &path) {
    auto out = burst::detail::open_for_write(path);
    out << "# generation\tbest_cost\tavg_cost\n";
    for (const auto &g : trace) {
        out << g.generation << '\t' << burst::detail::format_double(g.best_cost) << '\t'
            << burst::detail::format_double(g.average_cost) << '\n';
    }
    burst::detail::finish_write(out, path);
}

inline void require(const std::filesystem::path &p, const char *flag) {
    if (p.empty()) {
        throw Error(ErrorKind::Flag, std::string(flag) + " is required");
    }
}

inline void print_stats(std::ostream &out, const RunStats &s) {
    out << "best_cost\t" << burst::detail::format_double(s.best_cost) << '\n'
        << "average_cost\t" << burst::detail::format_double(s.average_cost) << '\n'
        << "std_dev_cost\t" << burst::detail::format_double(s.std_dev_cost) << '\n'
        << "generations\t" << s.generations_used << (s.converged ? " (converged)" : "") << '\n';
}

} // namespace detail

inline int cmd_generate(const CommandConfig &cfg, std::ostream &out) {
    detail::require(cfg.spec_path, "--spec");
    detail::require(cfg.out_path, "--out");
    DocumentStream stream;
    if (cfg.kind == "fixed") {
        stream = generate_fixed_gap(read_fixed_gap_spec(cfg.spec_path));
    } else if (cfg.kind == "bernoulli") {
        stream = generate_bernoulli(read_bernoulli_spec(cfg.spec_path), cfg.ea.rng_seed);
    } else {
        throw Error(ErrorKind::Flag, "--kind must be 'fixed' or 'bernoulli'");
    }
    write_stream(stream, cfg.out_path);
    out << "documents\t" << stream.size() << '\n';
    return 0;
}

inline int cmd_fit(const CommandConfig &cfg, std::ostream &out) {
    detail::require(cfg.stream_path, "--stream");
    detail::require(cfg.out_path, "--out");
    const auto stream = read_stream(cfg.stream_path);
    const auto gaps = gaps_from_stream(stream);
    const auto model = resolve_model(cfg);
    const auto automaton = build_automaton(gaps, model.states, model.alpha_max, model.gamma);

    Fit fit;
    double elapsed = 0.0;
    std::optional<RunStats> stats;
    if (cfg.algo == "viterbi" || cfg.algo == "brute") {
        const auto start = std::chrono::steady_clock::now();
        const auto solution = cfg.algo == "viterbi" ? viterbi(automaton, model.cost, gaps)
                                                    : brute_force(automaton, model.cost, gaps);
        elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        fit = solution.fit;
    } else if (cfg.algo == "ea") {
        if (cfg.runs < 1) {
            throw Error(ErrorKind::Flag, "--runs must be at least 1");
        }
        std::vector<RunStats> per_run;
        std::optional<EvolutionResult> best;
        for (std::size_t r = 0; r < cfg.runs; ++r) {
            auto config = cfg.ea;
            config.rng_seed = cfg.ea.rng_seed + r;
            auto result = evolve(gaps, automaton, model.cost, config);
            per_run.push_back(result.stats);
            if (!best || result.stats.best_cost < best->stats.best_cost) {
                best = std::move(result);
            }
        }
        fit = best->fit;
        elapsed = best->stats.wall_time;
        stats = cfg.runs == 1 ? best->stats : summarize_runs(per_run);
        if (!cfg.trace_path.empty()) {
            detail::write_trace(best->trace, cfg.trace_path);
        }
    } else {
        throw Error(ErrorKind::Flag, "--algo must be viterbi, ea or brute");
    }

    write_fit(fit, automaton, model.cost, cfg.out_path);
    out << "cost\t" << burst::detail::format_double(total_cost(automaton, model.cost, fit, gaps)) << '\n';
    out << "runs\t" << fit.runs.size() << '\n';
    out << "time\t" << seconds(elapsed) << '\n';
    if (stats) {
        detail::print_stats(out, *stats);
    }
    return 0;
}

inline int cmd_compare(const CommandConfig &cfg, std::ostream &out) {
    detail::require(cfg.stream_path, "--stream");
    detail::require(cfg.out_path, "--out");
    if (cfg.runs < 1) {
        throw Error(ErrorKind::Flag, "--runs must be at least 1");
    }
    if (cfg.state_counts.empty()) {
        throw Error(ErrorKind::Flag, "--states needs at least one value");
    }
    const auto stream = read_stream(cfg.stream_path);
    const auto gaps = gaps_from_stream(stream);

    std::ostringstream table;
    table << "# states" << (cfg.timing ? "\tviterbi_time" : "") << "\tviterbi_cost"
          << (cfg.timing ? "\tea_time" : "") << "\tea_cost\tea_avg_cost\tea_std_dev\n";
    for (const int k : cfg.state_counts) {
        auto per_k = cfg;
        per_k.states = k;
        const auto model = resolve_model(per_k);
        const auto automaton = build_automaton(gaps, model.states, model.alpha_max, model.gamma);

        const auto start = std::chrono::steady_clock::now();
        const auto exact = viterbi(automaton, model.cost, gaps);
        const double viterbi_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::vector<RunStats> per_run;
        for (std::size_t r = 0; r < cfg.runs; ++r) {
            auto config = cfg.ea;
            config.rng_seed = cfg.ea.rng_seed + r;
            per_run.push_back(evolve(gaps, automaton, model.cost, config).stats);
        }
        const auto ea = summarize_runs(per_run);

        table << k;
        if (cfg.timing) {
            table << '\t' << seconds(viterbi_time);
        }
        table << '\t' << burst::detail::format_double(exact.cost);
        if (cfg.timing) {
            table << '\t' << seconds(ea.wall_time);
        }
        table << '\t' << burst::detail::format_double(ea.best_cost) << '\t'
              << burst::detail::format_double(ea.average_cost) << '\t'
              << burst::detail::format_double(ea.std_dev_cost) << '\n';
        out << "states " << k << ": viterbi " << burst::detail::format_double(exact.cost) << ", ea best "
            << burst::detail::format_double(ea.best_cost) << '\n';
    }
    auto file = burst::detail::open_for_write(cfg.out_path);
    file << table.str();
    burst::detail::finish_write(file, cfg.out_path);
    return 0;
}

inline int cmd_trend(const CommandConfig &cfg, std::ostream &out) {
    if (!cfg.gap) {
        throw Error(ErrorKind::Flag, "--gap is required");
    }
    if (!(*cfg.gap >= 0.0) || !std::isfinite(*cfg.gap)) {
        throw Error(ErrorKind::Flag, "--gap must be a finite non-negative number");
    }
    std::optional<FitFile> fit_file;
    if (!cfg.fit_path.empty()) {
        fit_file = read_fit(cfg.fit_path);
    }
    const auto model = resolve_model(cfg, fit_file ? fit_file->params : std::nullopt);

    std::size_t n = 0;
    double span = 0.0;
    if (!cfg.stream_path.empty()) {
        const auto gaps = gaps_from_stream(read_stream(cfg.stream_path));
        n = gaps.size();
        span = gaps.span;
    } else if (cfg.gap_count && cfg.span) {
        n = *cfg.gap_count;
        span = *cfg.span;
    } else {
        throw Error(ErrorKind::Flag, "give --stream, or both --n and --span");
    }
    const auto automaton = build_automaton(n, span, model.states, model.alpha_max, model.gamma);

    State old_state = 0;
    if (cfg.last_state) {
        old_state = *cfg.last_state;
    } else if (fit_file) {
        validate_fit(fit_file->fit, n, automaton.states());
        old_state = fit_file->fit.runs.back().state;
    } else {
        throw Error(ErrorKind::Flag, "give --fit or --last-state");
    }
    if (!automaton.contains(old_state)) {
        throw Error(ErrorKind::Flag, "state " + std::to_string(old_state) + " outside [0, " +
                                         std::to_string(automaton.states()) + ")");
    }
    const auto update = local_trend_update(automaton, model.cost, old_state, *cfg.gap);
    std::ostringstream line;
    line << update.old_state << '\t' << update.new_state << '\t' << to_string(update.trend) << '\n';
    if (!cfg.out_path.empty()) {
        auto file = burst::detail::open_for_write(cfg.out_path);
        file << line.str();
        burst::detail::finish_write(file, cfg.out_path);
    }
    out << line.str();
    return 0;
}

inline int cmd_refit(const CommandConfig &cfg, std::ostream &out) {
    detail::require(cfg.fit_path, "--fit");
    detail::require(cfg.stream_path, "--stream");
    detail::require(cfg.out_path, "--out");
    const auto previous = read_fit(cfg.fit_path);
    const auto gaps = gaps_from_stream(read_stream(cfg.stream_path));
    const auto model = resolve_model(cfg, previous.params);
    const auto automaton = build_automaton(gaps, model.states, model.alpha_max, model.gamma);

    const auto result = seeded_refit(previous.fit, gaps, automaton, model.cost, cfg.ea);
    write_fit(result.fit, automaton, model.cost, cfg.out_path);
    if (!cfg.trace_path.empty()) {
        detail::write_trace(result.trace, cfg.trace_path);
    }
    out << "cost\t" << burst::detail::format_double(total_cost(automaton, model.cost, result.fit, gaps)) << '\n';
    out << "new_gaps\t" << gaps.size() - previous.fit.gap_count() << '\n';
    out << "time\t" << seconds(result.stats.wall_time) << '\n';
    detail::print_stats(out, result.stats);
    return 0;
}

inline int cmd_curve(const CommandConfig &cfg, std::ostream &out) {
    detail::require(cfg.stream_path, "--stream");
    detail::require(cfg.fit_path, "--fit");
    detail::require(cfg.out_path, "--out");
    const auto stream = read_stream(cfg.stream_path);
    const auto fit_file = read_fit(cfg.fit_path);
    const auto gaps = gaps_from_stream(stream);
    const auto model = resolve_model(cfg, fit_file.params);
    const auto automaton = build_automaton(gaps, model.states, model.alpha_max, model.gamma);
    const auto steps = frequency_curve(automaton, fit_file.fit, stream);
    write_curve(steps, cfg.out_path);
    out << "steps\t" << steps.size() << '\n';
    return 0;
}

/// Runs one subcommand; library errors become a message on `err` and exit status 1.
inline int run(const CommandConfig &cfg, std::ostream &out, std::ostream &err) {
    try {
        if (cfg.subcommand == "generate") {
            return cmd_generate(cfg, out);
        }
        if (cfg.subcommand == "fit") {
            return cmd_fit(cfg, out);
        }
        if (cfg.subcommand == "compare") {
            return cmd_compare(cfg, out);
        }
        if (cfg.subcommand == "trend") {
            return cmd_trend(cfg, out);
        }
        if (cfg.subcommand == "refit") {
            return cmd_refit(cfg, out);
        }
        if (cfg.subcommand == "curve") {
            return cmd_curve(cfg, out);
        }
        throw Error(ErrorKind::Flag, "unknown subcommand '" + cfg.subcommand + "'");
    } catch (const Error &e) {
        err << "burstfit: " << e.what() << '\n';
        return 1;
    }
}

} // namespace burst::cli
