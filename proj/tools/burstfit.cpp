#include <burst/cli.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

using burst::cli::CommandConfig;

void add_model_flags(CLI::App &app, CommandConfig &cfg, bool single_state_count = true) {
    if (single_state_count) {
        app.add_option("--states", cfg.states, "Number of automaton states (default 10)")
            ->check(CLI::Range(2, 10000));
    }
    app.add_option("--alpha-max", cfg.alpha_max, "Rate of the top state, events per time unit (default 1)");
    app.add_option("--gamma", cfg.gamma, "Transition penalty weight (default 1)");
    app.add_option("--cost", cfg.cost, "Transition cost: a..h or two-state (default g)");
    app.add_option("--p", cfg.p, "State-change probability for the two-state cost");
}

void add_ea_flags(CLI::App &app, CommandConfig &cfg) {
    app.add_option("--pop", cfg.ea.population_size, "Population size")->capture_default_str();
    app.add_option("--gens", cfg.ea.max_generations, "Maximum generations")->capture_default_str();
    app.add_option("--xover", cfg.ea.crossover_rate, "Crossover rate")->capture_default_str();
    app.add_option("--mut", cfg.ea.mutation_rate, "Mutation rate")->capture_default_str();
    app.add_option("--conv-threshold", cfg.ea.convergence_threshold,
                   "Relative change of average fitness counted as stable")
        ->capture_default_str();
    app.add_option("--conv-window", cfg.ea.convergence_window, "Stable generations needed to stop")
        ->capture_default_str();
    app.add_option("--gap-ratio", cfg.ea.gap_ratio_threshold,
                   "Gaps differ when one is (1 + ratio) times the other")
        ->capture_default_str();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Burst detection in document streams: exact and evolutionary state fitting"};
    app.require_subcommand(1);
    CommandConfig cfg;

    auto *generate = app.add_subcommand("generate", "Generate an artificial stream");
    generate->add_option("--spec", cfg.spec_path, "Interval or segment spec file")->required();
    generate->add_option("--kind", cfg.kind, "fixed | bernoulli")
        ->required()
        ->check(CLI::IsMember({"fixed", "bernoulli"}));
    generate->add_option("--seed", cfg.ea.rng_seed, "Random seed")->capture_default_str();
    generate->add_option("--out", cfg.out_path, "Stream file to write")->required();

    auto *fit = app.add_subcommand("fit", "Fit a state sequence to a stream");
    fit->add_option("--stream", cfg.stream_path, "Stream file")->required();
    fit->add_option("--algo", cfg.algo, "viterbi | ea | brute")
        ->capture_default_str()
        ->check(CLI::IsMember({"viterbi", "ea", "brute"}));
    fit->add_option("--out", cfg.out_path, "Fit file to write")->required();
    fit->add_option("--trace", cfg.trace_path, "Per-generation trace file (ea)");
    fit->add_option("--seed", cfg.ea.rng_seed, "Random seed")->capture_default_str();
    fit->add_option("--runs", cfg.runs, "Independent EA runs; the best is kept")->capture_default_str();
    add_model_flags(*fit, cfg);
    add_ea_flags(*fit, cfg);

    auto *compare = app.add_subcommand("compare", "Tabulate Viterbi against the EA over state counts");
    compare->add_option("--stream", cfg.stream_path, "Stream file")->required();
    compare->add_option("--states", cfg.state_counts, "Comma-separated state counts")
        ->delimiter(',')
        ->capture_default_str();
    compare->add_option("--runs", cfg.runs, "EA runs per state count")->capture_default_str();
    compare->add_option("--seed", cfg.ea.rng_seed, "Seed of the first run")->capture_default_str();
    compare->add_option("--out", cfg.out_path, "Table file to write")->required();
    compare->add_flag("!--no-timing", cfg.timing, "Leave wall-time columns out of the table");
    add_model_flags(*compare, cfg, false);
    add_ea_flags(*compare, cfg);

    auto *trend = app.add_subcommand("trend", "Classify the state change implied by one new gap");
    trend->add_option("--gap", cfg.gap, "New gap")->required();
    trend->add_option("--fit", cfg.fit_path, "Previous fit; its last run gives the old state");
    trend->add_option("--last-state", cfg.last_state, "Old state, instead of --fit");
    trend->add_option("--stream", cfg.stream_path, "Previous stream (gives n and T)");
    trend->add_option("--n", cfg.gap_count, "Gap count of the previous stream, instead of --stream");
    trend->add_option("--span", cfg.span, "Span of the previous stream, instead of --stream");
    trend->add_option("--out", cfg.out_path, "Also write the trend line to this file");
    add_model_flags(*trend, cfg);

    auto *refit = app.add_subcommand("refit", "Refit an extended stream seeded by a previous fit");
    refit->add_option("--fit", cfg.fit_path, "Previous fit")->required();
    refit->add_option("--stream", cfg.stream_path, "Extended stream")->required();
    refit->add_option("--out", cfg.out_path, "Fit file to write")->required();
    refit->add_option("--trace", cfg.trace_path, "Per-generation trace file");
    refit->add_option("--seed", cfg.ea.rng_seed, "Random seed")->capture_default_str();
    add_model_flags(*refit, cfg);
    add_ea_flags(*refit, cfg);

    auto *curve = app.add_subcommand("curve", "Write the step curve of a fit");
    curve->add_option("--stream", cfg.stream_path, "Stream file")->required();
    curve->add_option("--fit", cfg.fit_path, "Fit file")->required();
    curve->add_option("--out", cfg.out_path, "Curve file to write")->required();
    add_model_flags(*curve, cfg);

    CLI11_PARSE(app, argc, argv);

    for (const auto *sub : app.get_subcommands()) {
        cfg.subcommand = sub->get_name();
    }
    return burst::cli::run(cfg, std::cout, std::cerr);
}
