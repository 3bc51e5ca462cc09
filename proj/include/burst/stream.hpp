#pragma once

#include <burst/detail/text.hpp>
#include <burst/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace burst {

/// Arrival times of the documents of one topic, in non-decreasing order.
///
/// A stream may hold fewer than two timestamps (a generator can emit one);
/// such a stream is rejected when gaps are derived from it.
class DocumentStream {
public:
    DocumentStream() = default;

    explicit DocumentStream(std::vector<double> timestamps) : timestamps_(std::move(timestamps)) {
        for (std::size_t i = 0; i < timestamps_.size(); ++i) {
            if (!std::isfinite(timestamps_[i])) {
                throw Error(ErrorKind::InvalidStream,
                            "timestamp " + std::to_string(i) + " is not finite");
            }
            if (i > 0 && timestamps_[i] < timestamps_[i - 1]) {
                throw Error(ErrorKind::Order, "timestamp " + std::to_string(i) +
                                                  " precedes its predecessor");
            }
        }
    }

    std::span<const double> timestamps() const noexcept { return timestamps_; }
    std::size_t size() const noexcept { return timestamps_.size(); }
    bool empty() const noexcept { return timestamps_.empty(); }
    double front() const { return timestamps_.front(); }
    double back() const { return timestamps_.back(); }

    /// First `count` documents, i.e. the stream truncated after gap `count - 2`.
    DocumentStream prefix(std::size_t count) const {
        count = std::min(count, timestamps_.size());
        return DocumentStream(std::vector<double>(timestamps_.begin(),
                                                  timestamps_.begin() + static_cast<std::ptrdiff_t>(count)));
    }

    friend bool operator==(const DocumentStream &, const DocumentStream &) = default;

private:
    std::vector<double> timestamps_;
};

/// Inter-arrival gaps x_1..x_n of a stream plus its span T.
struct GapSequence {
    std::vector<double> gaps;
    double span = 0.0;

    std::size_t size() const noexcept { return gaps.size(); }
    double operator[](std::size_t i) const { return gaps[i]; }
};

inline GapSequence gaps_from_stream(const DocumentStream &stream) {
    if (stream.size() < 2) {
        throw Error(ErrorKind::InvalidStream, "a stream needs at least two timestamps, got " +
                                                  std::to_string(stream.size()));
    }
    const auto ts = stream.timestamps();
    GapSequence out;
    out.gaps.reserve(ts.size() - 1);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        out.gaps.push_back(ts[i] - ts[i - 1]);
    }
    out.span = ts.back() - ts.front();
    if (!(out.span > 0.0)) {
        throw Error(ErrorKind::DegenerateSpan, "first and last timestamps coincide");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Artificial streams
// ---------------------------------------------------------------------------

struct FixedGapInterval {
    std::int64_t document_count = 0;
    double gap = 0.0;
};

/// Intervals of documents with a constant gap inside each interval.
struct FixedGapIntervalSpec {
    std::vector<FixedGapInterval> intervals;

    void validate() const {
        if (intervals.empty()) {
            throw Error(ErrorKind::EmptySpec, "fixed-gap spec has no intervals");
        }
        for (std::size_t i = 0; i < intervals.size(); ++i) {
            if (intervals[i].document_count < 1 || !(intervals[i].gap > 0.0) ||
                !std::isfinite(intervals[i].gap)) {
                throw Error(ErrorKind::InvalidSpec,
                            "interval " + std::to_string(i) + " needs count >= 1 and gap > 0");
            }
        }
    }
};

struct BernoulliSegment {
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
    double frequency = 0.0;
};

/// Contiguous integer time segments, each with a per-unit arrival probability.
struct BernoulliSegmentSpec {
    std::vector<BernoulliSegment> segments;

    void validate() const {
        if (segments.empty()) {
            throw Error(ErrorKind::EmptySpec, "bernoulli spec has no segments");
        }
        for (std::size_t i = 0; i < segments.size(); ++i) {
            const auto &s = segments[i];
            if (s.t_end < s.t_start) {
                throw Error(ErrorKind::InvalidSpec,
                            "segment " + std::to_string(i) + " ends before it starts");
            }
            if (!(s.frequency >= 0.0 && s.frequency <= 1.0)) {
                throw Error(ErrorKind::InvalidSpec,
                            "segment " + std::to_string(i) + " frequency outside [0, 1]");
            }
            if (i > 0 && s.t_start != segments[i - 1].t_end + 1) {
                throw Error(ErrorKind::InvalidSpec,
                            "segment " + std::to_string(i) + " does not follow its predecessor");
            }
        }
    }
};

/// Documents start at time 0. The first document of each later interval
/// arrives one of that interval's gaps after the previous document.
inline DocumentStream generate_fixed_gap(const FixedGapIntervalSpec &spec) {
    spec.validate();
    std::vector<double> ts;
    double t = 0.0;
    bool first = true;
    for (const auto &interval : spec.intervals) {
        for (std::int64_t d = 0; d < interval.document_count; ++d) {
            if (!first) {
                t += interval.gap;
            }
            ts.push_back(t);
            first = false;
        }
    }
    return DocumentStream(std::move(ts));
}

inline DocumentStream generate_bernoulli(const BernoulliSegmentSpec &spec, std::uint64_t seed) {
    spec.validate();
    std::mt19937_64 rng(seed);
    std::vector<double> ts;
    for (const auto &segment : spec.segments) {
        std::bernoulli_distribution arrives(segment.frequency);
        for (std::int64_t u = segment.t_start; u <= segment.t_end; ++u) {
            if (arrives(rng)) {
                ts.push_back(static_cast<double>(u));
            }
        }
    }
    return DocumentStream(std::move(ts));
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

namespace detail {

inline std::ifstream open_for_read(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    return in;
}

inline std::ofstream open_for_write(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Io, "cannot write " + path.string());
    }
    return out;
}

inline void finish_write(std::ofstream &out, const std::filesystem::path &path) {
    out.flush();
    if (!out) {
        throw Error(ErrorKind::Io, "write failed for " + path.string());
    }
}

inline Error parse_error(std::size_t line_no, const std::string &what) {
    return Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + what);
}

} // namespace detail

inline DocumentStream parse_stream(std::istream &in) {
    std::vector<double> ts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_skippable(line)) {
            continue;
        }
        const auto value = detail::parse_double(detail::trim(line));
        if (!value || !std::isfinite(*value)) {
            throw detail::parse_error(line_no, "expected one timestamp, got '" +
                                                   std::string(detail::trim(line)) + "'");
        }
        if (!ts.empty() && *value < ts.back()) {
            throw Error(ErrorKind::Order,
                        "line " + std::to_string(line_no) + ": timestamp decreases");
        }
        ts.push_back(*value);
    }
    return DocumentStream(std::move(ts));
}

inline DocumentStream read_stream(const std::filesystem::path &path) {
    auto in = detail::open_for_read(path);
    return parse_stream(in);
}

inline void format_stream(std::ostream &out, const DocumentStream &stream) {
    for (const double t : stream.timestamps()) {
        out << detail::format_double(t) << '\n';
    }
}

inline void write_stream(const DocumentStream &stream, const std::filesystem::path &path) {
    auto out = detail::open_for_write(path);
    format_stream(out, stream);
    detail::finish_write(out, path);
}

/// One `count gap` pair per line.
inline FixedGapIntervalSpec parse_fixed_gap_spec(std::istream &in) {
    FixedGapIntervalSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_skippable(line)) {
            continue;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 2) {
            throw detail::parse_error(line_no, "expected 'count gap', got " +
                                                   std::to_string(fields.size()) + " fields");
        }
        const auto count = detail::parse_int(fields[0]);
        const auto gap = detail::parse_double(fields[1]);
        if (!count || !gap) {
            throw detail::parse_error(line_no, "malformed 'count gap' pair");
        }
        if (*count < 1 || !(*gap > 0.0) || !std::isfinite(*gap)) {
            throw detail::parse_error(line_no, "count must be >= 1 and gap > 0");
        }
        spec.intervals.push_back({*count, *gap});
    }
    spec.validate();
    return spec;
}

/// One `t_start t_end frequency` triple per line.
inline BernoulliSegmentSpec parse_bernoulli_spec(std::istream &in) {
    BernoulliSegmentSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_skippable(line)) {
            continue;
        }
        const auto fields = detail::split_fields(line);
        if (fields.size() != 3) {
            throw detail::parse_error(line_no, "expected 't_start t_end frequency', got " +
                                                   std::to_string(fields.size()) + " fields");
        }
        const auto t_start = detail::parse_int(fields[0]);
        const auto t_end = detail::parse_int(fields[1]);
        const auto freq = detail::parse_double(fields[2]);
        if (!t_start || !t_end || !freq) {
            throw detail::parse_error(line_no, "malformed segment");
        }
        if (!spec.segments.empty() && *t_start != spec.segments.back().t_end + 1) {
            throw detail::parse_error(line_no, "segment does not follow the previous one");
        }
        if (*t_end < *t_start || !(*freq >= 0.0 && *freq <= 1.0)) {
            throw detail::parse_error(line_no, "need t_end >= t_start and frequency in [0, 1]");
        }
        spec.segments.push_back({*t_start, *t_end, *freq});
    }
    spec.validate();
    return spec;
}

inline FixedGapIntervalSpec read_fixed_gap_spec(const std::filesystem::path &path) {
    auto in = detail::open_for_read(path);
    return parse_fixed_gap_spec(in);
}

inline BernoulliSegmentSpec read_bernoulli_spec(const std::filesystem::path &path) {
    auto in = detail::open_for_read(path);
    return parse_bernoulli_spec(in);
}

} // namespace burst
