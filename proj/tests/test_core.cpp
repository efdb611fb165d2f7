#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "seqpat/core.hpp"

using namespace seqpat;

namespace {

LabeledDataset parse(const std::string& text, LabelMode mode = LabelMode::automatic) {
    std::istringstream in(text);
    return parse_dataset(in, mode);
}

}  // namespace

TEST(Contains, InterleavedRepeatsAfterPrefix) {
    const EventList g{10, 10, 2, 3, 2, 3, 2, 3, 2, 3, 2, 17};
    EXPECT_TRUE(contains(EventList{2, 3, 2}, g));
}

TEST(Contains, GapsAndOrder) {
    const EventList g{1, 2, 3, 2, 9};
    EXPECT_TRUE(contains(EventList{3, 2, 9}, g));
    EXPECT_FALSE(contains(EventList{9, 3}, g));
    EXPECT_TRUE(contains(EventList{}, g));
}

TEST(Contains, MaxGap) {
    const EventList g{1, 5, 5, 2};
    EXPECT_TRUE(contains(EventList{1, 2}, g, 2));
    EXPECT_FALSE(contains(EventList{1, 2}, g, 1));
    // greedy earliest match would fail here; the gap-aware search must not
    EXPECT_TRUE(contains(EventList{1, 2}, EventList{1, 7, 7, 7, 1, 2}, 0));
}

TEST(Contains, MatchesExhaustiveOracle) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> e(1, 3);
    for (int trial = 0; trial < 3000; ++trial) {
        EventList g(rng() % 8 + 1), q(rng() % 5);
        for (auto& v : g) v = e(rng);
        for (auto& v : q) v = e(rng);
        ASSERT_EQ(contains(q, g), oracle::contains(q, g));
    }
}

TEST(Contains, ReflexiveAndPrefixClosed) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        auto d = oracle::random_dataset(rng, 1, 4, 6, false);
        const auto& g = d.sequences[0].events;
        EXPECT_TRUE(contains(g, g));
        EventList q{static_cast<EventId>(rng() % 4 + 1), static_cast<EventId>(rng() % 4 + 1)};
        if (contains(q, g)) {
            EXPECT_TRUE(contains(std::span(q).first(1), g));
        }
    }
}

TEST(Support, AntiMonotoneExhaustive) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const auto d = oracle::random_dataset(rng, 8, 4, 6, false);
        const auto all = oracle::all_subsequences(d, 6);
        for (const auto& [q, sup] : all) {
            ASSERT_EQ(support(q, d), sup);
            // every single-deletion subsequence has at least this support
            for (std::size_t k = 0; k < q.size() && q.size() > 1; ++k) {
                EventList sub = q;
                sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(k));
                ASSERT_GE(support(sub, d), sup);
            }
        }
    }
}

TEST(Support, CountsSequencesNotEmbeddings) {
    LabeledDataset d;
    d.sequences = {{{2, 3, 2, 3}}, {{2}}};
    EXPECT_EQ(support(EventList{2, 3}, d), 1u);
    EXPECT_EQ(support(EventList{2}, d), 2u);
}

TEST(LoadDataset, LabeledLines) {
    const auto d = parse("1 8 11 2 6\n-1 20 21\n-1 22 22 17\n");
    ASSERT_TRUE(d.is_labeled());
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ((*d.labels)[0], 1);
    EXPECT_EQ(d.sequences[0].events, (EventList{8, 11, 2, 6}));
    EXPECT_EQ((*d.labels)[1], -1);
    EXPECT_EQ(d.sequences[1].events, (EventList{20, 21}));
    EXPECT_EQ(d.n_positive(), 1u);
    EXPECT_EQ(d.n_negative(), 2u);
}

TEST(LoadDataset, UnlabeledWhenAnyLineLacksLabel) {
    const auto d = parse("# comment\n5 6 7\n1 2\n\n");
    EXPECT_FALSE(d.is_labeled());
    EXPECT_EQ(d.size(), 2u);
    EXPECT_EQ(d.sequences[1].events, (EventList{1, 2}));
}

TEST(LoadDataset, Errors) {
    EXPECT_THROW(parse("1 2 3\n-1 4 x\n"), ParseError);
    EXPECT_THROW(parse("1\n"), ParseError);          // label only: empty sequence
    EXPECT_THROW(parse("1 2 3\n-1\n"), ParseError);
    EXPECT_THROW(parse("1 2 3\n0 2\n"), ParseError);  // event id 0
    try {
        parse("1 2 3\n-1 4 x\n");
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(LoadDataset, MixedLabeledAndUnlabeledIsAnError) {
    EXPECT_THROW(parse("1 2 3\n-1 4 5\n7 8 9\n", LabelMode::labeled), ParseError);
}

TEST(LoadDataset, RoundTripIsBitIdentical) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = oracle::random_dataset(rng, 20, 24, 12, trial % 2 == 0);
        std::ostringstream a;
        write_dataset(a, d);
        const auto back = parse(a.str());
        EXPECT_EQ(back, d);
        std::ostringstream b;
        write_dataset(b, back);
        EXPECT_EQ(a.str(), b.str());
    }
}

TEST(Alphabet, RugbyNames) {
    const auto a = EventAlphabet::rugby();
    EXPECT_EQ(a.size(), 24u);
    EXPECT_EQ(a.at(12).name, "linebreak");
    EXPECT_EQ(a.at(24).name, "O-linebreak");
    EXPECT_EQ(a.at(20).name, "O-lineout");
    EXPECT_EQ(a.at(15).side, Side::opposition);
    EXPECT_EQ(a.find_name("phase"), 2);
}

TEST(Alphabet, RejectsDuplicateAndNonPositiveIds) {
    EXPECT_THROW(EventAlphabet({{1, "a", Side::team}, {1, "b", Side::team}}), std::invalid_argument);
    EXPECT_THROW(EventAlphabet({{0, "a", Side::team}}), std::invalid_argument);
}

TEST(Alphabet, CsvRoundTripAndCoverage) {
    std::ostringstream out;
    write_alphabet(out, EventAlphabet::rugby());
    std::istringstream in(out.str());
    const auto back = parse_alphabet(in);
    EXPECT_EQ(back.size(), 24u);
    EXPECT_EQ(back.at(13).name, "O-restart received");
    LabeledDataset d;
    d.sequences = {{{1, 25}}};
    EXPECT_THROW(check_alphabet(d, back), std::invalid_argument);
}

TEST(Stats, SingleSequence) {
    LabeledDataset d;
    d.sequences = {{{1, 2, 3, 4, 5}}};
    const auto s = compute_stats(d);
    EXPECT_EQ(s.mean, 5);
    EXPECT_EQ(s.std, 0);
    EXPECT_EQ(s.skewness, 0);
}

TEST(Stats, MatchesIndependentRecomputation) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        auto d = oracle::random_dataset(rng, 20, 5, 40, true);
        while (d.size() < 20) d = oracle::random_dataset(rng, 20, 5, 40, true);
        std::vector<double> len;
        for (const auto& s : d.sequences) len.push_back(static_cast<double>(s.size()));
        const auto o = oracle::stats(len);
        const auto s = compute_stats(d);
        EXPECT_NEAR(s.mean, o.mean, 1e-9);
        EXPECT_NEAR(s.std, o.std, 1e-9);
        EXPECT_NEAR(s.skewness, o.skew, 1e-9);
        EXPECT_NEAR(s.p25, o.p25, 1e-9);
        EXPECT_NEAR(s.median, o.median, 1e-9);
        EXPECT_NEAR(s.p75, o.p75, 1e-9);
        EXPECT_EQ(s.min, o.min);
        EXPECT_EQ(s.max, o.max);
        EXPECT_LE(s.min, s.p25);
        EXPECT_LE(s.p25, s.median);
        EXPECT_LE(s.median, s.p75);
        EXPECT_LE(s.p75, s.max);
        EXPECT_EQ(s.n_positive + s.n_negative, s.n);
    }
}

TEST(SplitByLabel, PartitionPreservesOrder) {
    const auto d = parse("1 1 2\n-1 3\n1 4\n-1 5 6\n");
    const auto [pos, neg] = split_by_label(d);
    ASSERT_EQ(pos.size(), 2u);
    EXPECT_EQ(pos.sequences[1].events, (EventList{4}));
    EXPECT_EQ(neg.sequences[0].events, (EventList{3}));
    EXPECT_THROW(split_by_label(parse("1 2\n3 4\n")), std::invalid_argument);
    const auto all_pos = split_by_label(parse("1 2\n1 4\n"));
    EXPECT_TRUE(all_pos.negative.empty());
}

TEST(Hash, Fnv1aKnownVectors) {
    // published FNV-1a 64-bit test vectors
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(hex64(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
}
