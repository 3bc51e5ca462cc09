#include <burst/stream.hpp>

#include <gtest/gtest.h>

#include "oracle.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace burst;

namespace {

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Io;
}

DocumentStream parse(const std::string &text) {
    std::istringstream in(text);
    return parse_stream(in);
}

} // namespace

TEST(GapsFromStream, DirectSubtraction) {
    const auto g = gaps_from_stream(DocumentStream({0, 10, 20}));
    EXPECT_EQ(g.gaps, (std::vector<double>{10, 10}));
    EXPECT_EQ(g.span, 20);
    EXPECT_EQ(g.size(), 2u);
}

TEST(GapsFromStream, DuplicateTimestampsGiveZeroGap) {
    const auto g = gaps_from_stream(DocumentStream({0, 0, 5}));
    EXPECT_EQ(g.gaps, (std::vector<double>{0, 5}));
    EXPECT_EQ(g.span, 5);
}

TEST(GapsFromStream, Errors) {
    EXPECT_EQ(kind_of([] { gaps_from_stream(DocumentStream({3})); }), ErrorKind::InvalidStream);
    EXPECT_EQ(kind_of([] { gaps_from_stream(DocumentStream()); }), ErrorKind::InvalidStream);
    EXPECT_EQ(kind_of([] { gaps_from_stream(DocumentStream({4, 4, 4})); }), ErrorKind::DegenerateSpan);
    EXPECT_EQ(kind_of([] { DocumentStream({1, 0}); }), ErrorKind::Order);
}

TEST(GapsFromStream, GapsSumToSpan) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> ts{std::uniform_real_distribution<double>(-1e3, 1e3)(rng)};
        const auto count = std::uniform_int_distribution<int>(1, 300)(rng);
        for (int i = 0; i < count; ++i) {
            ts.push_back(ts.back() + std::exp(std::uniform_real_distribution<double>(-5, 5)(rng)));
        }
        const auto g = gaps_from_stream(DocumentStream(ts));
        ASSERT_EQ(g.size(), ts.size() - 1);
        const double sum = std::accumulate(g.gaps.begin(), g.gaps.end(), 0.0);
        EXPECT_TRUE(oracle::close(sum, g.span, 1e-9)) << sum << " vs " << g.span;
        for (const double x : g.gaps) {
            EXPECT_GE(x, 0.0);
        }
    }
}

TEST(FixedGap, Examples) {
    EXPECT_EQ(generate_fixed_gap({{{3, 5.0}}}).timestamps().size(), 3u);
    EXPECT_EQ(generate_fixed_gap({{{3, 5.0}}}), DocumentStream({0, 5, 10}));
    EXPECT_EQ(generate_fixed_gap({{{2, 1.0}, {2, 10.0}}}), DocumentStream({0, 1, 11, 21}));
    EXPECT_EQ(generate_fixed_gap({{{1, 2.0}}}), DocumentStream({0}));
    EXPECT_EQ(kind_of([] { gaps_from_stream(generate_fixed_gap({{{1, 2.0}}})); }), ErrorKind::InvalidStream);
}

TEST(FixedGap, Errors) {
    EXPECT_EQ(kind_of([] { generate_fixed_gap({}); }), ErrorKind::EmptySpec);
    EXPECT_EQ(kind_of([] { generate_fixed_gap({{{0, 1.0}}}); }), ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { generate_fixed_gap({{{2, 0.0}}}); }), ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { generate_fixed_gap({{{2, -1.0}}}); }), ErrorKind::InvalidSpec);
}

TEST(FixedGap, CountAndSpan) {
    // Every document after the first sits one of its interval's gaps after its predecessor.
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        FixedGapIntervalSpec spec;
        const auto parts = std::uniform_int_distribution<int>(1, 6)(rng);
        for (int j = 0; j < parts; ++j) {
            spec.intervals.push_back({std::uniform_int_distribution<std::int64_t>(1, 50)(rng),
                                      static_cast<double>(std::uniform_int_distribution<int>(1, 64)(rng)) / 4.0});
        }
        const auto s = generate_fixed_gap(spec);
        std::int64_t count = 0;
        double span = -spec.intervals.front().gap;
        for (const auto &iv : spec.intervals) {
            count += iv.document_count;
            span += static_cast<double>(iv.document_count) * iv.gap;
        }
        ASSERT_EQ(static_cast<std::int64_t>(s.size()), count);
        EXPECT_EQ(s.front(), 0.0);
        EXPECT_EQ(s.back(), span);
    }
}

TEST(Bernoulli, ProbabilityOneAndZero) {
    const auto full = generate_bernoulli({{{0, 999, 1.0}}}, 5);
    ASSERT_EQ(full.size(), 1000u);
    for (std::size_t i = 0; i < full.size(); ++i) {
        EXPECT_EQ(full.timestamps()[i], static_cast<double>(i));
    }
    EXPECT_TRUE(generate_bernoulli({{{0, 999, 0.0}}}, 5).empty());
}

TEST(Bernoulli, TableOneCountsWithinFourSigma) {
    const BernoulliSegmentSpec spec{{{0, 1000, 0.002},
                                     {1001, 2000, 0.89},
                                     {2001, 3000, 0.004},
                                     {3001, 4000, 0.9},
                                     {4001, 5000, 0.001},
                                     {5001, 6000, 0.99}}};
    for (const std::uint64_t seed : {1u, 42u, 1234u}) {
        const auto s = generate_bernoulli(spec, seed);
        for (const auto &seg : spec.segments) {
            const double units = static_cast<double>(seg.t_end - seg.t_start + 1);
            double hits = 0;
            for (const double t : s.timestamps()) {
                hits += (t >= static_cast<double>(seg.t_start) && t <= static_cast<double>(seg.t_end)) ? 1 : 0;
            }
            const double mean = units * seg.frequency;
            const double sd = std::sqrt(units * seg.frequency * (1 - seg.frequency));
            EXPECT_LE(std::abs(hits - mean), 4 * sd + 1e-12) << "seed " << seed << " segment " << seg.t_start;
        }
    }
}

TEST(Bernoulli, SameSeedSameStream) {
    const BernoulliSegmentSpec spec{{{0, 4999, 0.3}, {5000, 9999, 0.7}}};
    EXPECT_EQ(generate_bernoulli(spec, 9), generate_bernoulli(spec, 9));
    EXPECT_NE(generate_bernoulli(spec, 9), generate_bernoulli(spec, 10));
}

TEST(Bernoulli, SpecValidation) {
    EXPECT_EQ(kind_of([] { generate_bernoulli({}, 1); }), ErrorKind::EmptySpec);
    EXPECT_EQ(kind_of([] { generate_bernoulli({{{0, 10, 1.5}}}, 1); }), ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { generate_bernoulli({{{0, 10, 0.5}, {12, 20, 0.5}}}, 1); }), ErrorKind::InvalidSpec);
    EXPECT_EQ(kind_of([] { generate_bernoulli({{{0, 10, 0.5}, {5, 20, 0.5}}}, 1); }), ErrorKind::InvalidSpec);
}

TEST(StreamFile, Examples) {
    EXPECT_EQ(parse("0\n10\n20\n"), DocumentStream({0, 10, 20}));
    EXPECT_EQ(parse("# comment\n5\n7\n"), DocumentStream({5, 7}));
    EXPECT_EQ(kind_of([] { parse("10\n5\n"); }), ErrorKind::Order);
}

TEST(StreamFile, ParseErrorCarriesLineNumber) {
    try {
        parse("1\n2\n\nabc\n");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
    EXPECT_EQ(kind_of([] { parse("1 2\n"); }), ErrorKind::Parse);
}

TEST(StreamFile, RoundTripIsExact) {
    const auto dir = oracle::scratch_dir("stream_roundtrip");
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> ts{std::uniform_real_distribution<double>(-1e6, 1e6)(rng)};
        for (int i = 0; i < 100; ++i) {
            ts.push_back(ts.back() + std::exp(std::uniform_real_distribution<double>(-20, 10)(rng)));
        }
        const DocumentStream s(ts);
        write_stream(s, dir / "s.txt");
        EXPECT_EQ(read_stream(dir / "s.txt"), s);
    }
}

TEST(StreamFile, MissingFileIsIoError) {
    EXPECT_EQ(kind_of([] { read_stream("/nonexistent/dir/stream.txt"); }), ErrorKind::Io);
}

TEST(SpecFiles, Parse) {
    std::istringstream fixed("# count gap\n3 5.0\n2\t1.5\n");
    const auto f = parse_fixed_gap_spec(fixed);
    ASSERT_EQ(f.intervals.size(), 2u);
    EXPECT_EQ(f.intervals[1].document_count, 2);
    EXPECT_EQ(f.intervals[1].gap, 1.5);

    std::istringstream bern("0 1000 0.002\n1001 2000 0.89\n");
    const auto b = parse_bernoulli_spec(bern);
    ASSERT_EQ(b.segments.size(), 2u);
    EXPECT_EQ(b.segments[1].t_start, 1001);
    EXPECT_EQ(b.segments[1].frequency, 0.89);

    std::istringstream wrong("0 1000 0.002\n");
    EXPECT_EQ(kind_of([&] { parse_fixed_gap_spec(wrong); }), ErrorKind::Parse);
}
