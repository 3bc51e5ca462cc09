#pragma once

#include <burst/detail/text.hpp>
#include <burst/error.hpp>
#include <burst/model.hpp>
#include <burst/stream.hpp>

#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>

namespace burst {

/// Model settings a fit was produced under. Written into fit files as
/// `# key<TAB>value` lines so later commands can rebuild the automaton.
struct ModelParams {
    int states = 10;
    double alpha_max = 1.0;
    double gamma = 1.0;
    CostFunctionId cost{CostVariant::g};
};

struct FitFile {
    Fit fit;
    std::optional<ModelParams> params;
};

// Fit TSV: `first_gap last_gap state rate`, one row per run.
inline void format_fit(std::ostream &out, const Fit &fit, const Automaton &a, const CostFunctionId &cf) {
    out << "# states\t" << a.states() << '\n';
    out << "# alpha_max\t" << detail::format_double(a.alpha_max()) << '\n';
    out << "# gamma\t" << detail::format_double(a.gamma()) << '\n';
    out << "# cost\t" << to_string(cf.variant()) << '\n';
    if (cf.p()) {
        out << "# p\t" << detail::format_double(*cf.p()) << '\n';
    }
    out << "# first_gap\tlast_gap\tstate\trate\n";
    for (const auto &run : fit.runs) {
        out << run.first_gap << '\t' << run.last_gap << '\t' << run.state << '\t'
            << detail::format_double(a.alpha(run.state)) << '\n';
    }
}

inline void write_fit(const Fit &fit, const Automaton &a, const CostFunctionId &cf,
                      const std::filesystem::path &path) {
    auto out = detail::open_for_write(path);
    format_fit(out, fit, a, cf);
    detail::finish_write(out, path);
}

inline FitFile parse_fit(std::istream &in) {
    FitFile file;
    ModelParams params;
    bool have_states = false;
    std::optional<CostVariant> variant;
    std::optional<double> p;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '#') {
            const auto fields = detail::split_fields(t.substr(1));
            if (fields.size() != 2) {
                continue;
            }
            const auto key = fields[0];
            const auto value = fields[1];
            if (key == "states") {
                const auto v = detail::parse_int(value);
                if (!v) {
                    throw detail::parse_error(line_no, "bad states value");
                }
                params.states = static_cast<int>(*v);
                have_states = true;
            } else if (key == "alpha_max" || key == "gamma" || key == "p") {
                const auto v = detail::parse_double(value);
                if (!v) {
                    throw detail::parse_error(line_no, "bad " + std::string(key) + " value");
                }
                if (key == "alpha_max") {
                    params.alpha_max = *v;
                } else if (key == "gamma") {
                    params.gamma = *v;
                } else {
                    p = *v;
                }
            } else if (key == "cost") {
                variant = parse_cost_variant(value);
                if (!variant) {
                    throw detail::parse_error(line_no, "unknown cost '" + std::string(value) + "'");
                }
            }
            continue;
        }
        const auto fields = detail::split_fields(t);
        if (fields.size() < 3 || fields.size() > 4) {
            throw detail::parse_error(line_no, "expected 'first_gap last_gap state [rate]'");
        }
        const auto first = detail::parse_int(fields[0]);
        const auto last = detail::parse_int(fields[1]);
        const auto state = detail::parse_int(fields[2]);
        if (!first || !last || !state || *first < 0 || *last < *first) {
            throw detail::parse_error(line_no, "malformed run");
        }
        file.fit.runs.push_back(
            {static_cast<State>(*state), static_cast<std::size_t>(*first), static_cast<std::size_t>(*last)});
    }
    if (file.fit.runs.empty()) {
        throw Error(ErrorKind::Shape, "fit file has no runs");
    }
    if (have_states) {
        if (variant) {
            try {
                params.cost = CostFunctionId(*variant, *variant == CostVariant::two_state ? p : std::nullopt);
            } catch (const Error &e) {
                throw Error(ErrorKind::Parse, std::string("fit header: ") + e.what());
            }
        }
        file.params = params;
    }
    return file;
}

inline FitFile read_fit(const std::filesystem::path &path) {
    auto in = detail::open_for_read(path);
    return parse_fit(in);
}

// Curve TSV: `time_start time_end rate`, one row per step.
inline void format_curve(std::ostream &out, std::span<const CurveStep> steps) {
    out << "# time_start\ttime_end\trate\n";
    for (const auto &s : steps) {
        out << detail::format_double(s.time_start) << '\t' << detail::format_double(s.time_end) << '\t'
            << detail::format_double(s.rate) << '\n';
    }
}

inline void write_curve(std::span<const CurveStep> steps, const std::filesystem::path &path) {
    auto out = detail::open_for_write(path);
    format_curve(out, steps);
    detail::finish_write(out, path);
}

} // namespace burst
