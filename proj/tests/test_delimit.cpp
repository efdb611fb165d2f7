#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "seqpat/delimit.hpp"

using namespace seqpat;

namespace {

std::vector<EventList> cut(EventList events) {
    std::vector<EventList> out;
    for (auto& p : delimit_match({"m", std::move(events)})) out.push_back(p.events);
    return out;
}

}  // namespace

TEST(Delimit, ScrumResetStaysInOnePassage) {
    EXPECT_EQ(cut({10, 10, 2, 3, 17}), (std::vector<EventList>{{10, 10, 2, 3, 17}}));
}

TEST(Delimit, TryEndsPassage) {
    EXPECT_EQ(cut({8, 2, 11, 2, 3}), (std::vector<EventList>{{8, 2, 11}, {2, 3}}));
}

TEST(Delimit, NoStartEvent) { EXPECT_EQ(cut({2, 3}), (std::vector<EventList>{{2, 3}})); }

TEST(Delimit, StartEventsOpenPassages) {
    EXPECT_EQ(cut({2, 8, 3, 13, 4, 22, 10, 2}), (std::vector<EventList>{{2}, {8, 3}, {13, 4}, {22, 10, 2}}));
}

TEST(Delimit, SuppressionCanBeTurnedOff) {
    DelimitConfig cfg;
    cfg.scrum_reset_suppression = false;
    const auto p = delimit_match({"m", {10, 10, 2}}, cfg);
    ASSERT_EQ(p.size(), 2u);
    EXPECT_EQ(p[1].events, (EventList{10, 2}));
}

TEST(Delimit, QuickTapIsNotAStart) { EXPECT_EQ(cut({2, 7, 3}), (std::vector<EventList>{{2, 7, 3}})); }

TEST(Delimit, KickAtGoalThenRestart) {
    EXPECT_EQ(cut({5, 6, 13, 14}), (std::vector<EventList>{{5, 6}, {13, 14}}));
}

TEST(Delimit, UnknownIdNamesPosition) {
    try {
        cut({2, 3, 99});
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("position 2"), std::string::npos);
    }
}

TEST(Delimit, OverlappingConfigRejected) {
    DelimitConfig cfg;
    cfg.post_boundary_events.insert(8);
    EXPECT_THROW(delimit_match({"m", {1}}, cfg), std::invalid_argument);
}

TEST(Delimit, ConcatenationReproducesStream) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        EventList s(rng() % 60 + 1);
        for (auto& e : s) e = static_cast<EventId>(rng() % 24 + 1);
        EventList joined;
        for (const auto& p : cut(s)) {
            ASSERT_FALSE(p.empty());
            joined.insert(joined.end(), p.begin(), p.end());
        }
        EXPECT_EQ(joined, s);
    }
}

TEST(Outcome, ScoringListingExamples) {
    const auto d = build_outcome_dataset({{{8, 11, 2, 6}}, {{20, 21}}}, Perspective::scoring).dataset;
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ((*d.labels)[0], 1);
    EXPECT_EQ(d.sequences[0].events, (EventList{8, 2}));
    EXPECT_EQ((*d.labels)[1], -1);
    EXPECT_EQ(d.sequences[1].events, (EventList{20, 21}));
}

TEST(Outcome, ConcedingIgnoresTeamScores) {
    const auto d = build_outcome_dataset({{{8, 11, 2, 6}}, {{20, 23, 18}}}, Perspective::conceding);
    EXPECT_EQ((*d.dataset.labels)[0], -1);
    EXPECT_EQ(d.dataset.sequences[0].events, (EventList{8, 11, 2, 6}));
    EXPECT_EQ((*d.dataset.labels)[1], 1);
    EXPECT_EQ(d.dataset.sequences[1].events, (EventList{20}));
}

TEST(Outcome, EmptyAfterDeletionIsDropped) {
    const auto d = build_outcome_dataset({{{11}}, {{2}}}, Perspective::scoring);
    EXPECT_EQ(d.dropped_empty, 1u);
    EXPECT_EQ(d.dataset.size(), 1u);
}

TEST(Outcome, OutcomeIdsAbsentAndIdempotent) {
    std::mt19937_64 rng(2);
    std::vector<Sequence> passages;
    for (int k = 0; k < 200; ++k) {
        Sequence s;
        s.events.resize(rng() % 10 + 1);
        for (auto& e : s.events) e = static_cast<EventId>(rng() % 24 + 1);
        passages.push_back(s);
    }
    for (auto p : {Perspective::scoring, Perspective::conceding}) {
        const auto once = build_outcome_dataset(passages, p).dataset;
        for (const auto& s : once.sequences)
            for (EventId e : s.events) ASSERT_EQ(outcome_events(p).count(e), 0u);
        const auto twice = build_outcome_dataset(once.sequences, p).dataset;
        EXPECT_EQ(twice.sequences, once.sequences);
        EXPECT_EQ(twice.n_positive(), 0u);
    }
}

TEST(EventStream, ParsesContiguousMatches) {
    std::istringstream in("match_id,seq_no,event_id\na,1,8\na,2,2\nb,1,10\nb,5,11\n");
    const auto m = parse_event_stream(in);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0].match_id, "a");
    EXPECT_EQ(m[1].events, (EventList{10, 11}));
}

TEST(EventStream, RejectsDisorder) {
    std::istringstream a("a,2,8\na,1,2\n");
    EXPECT_THROW(parse_event_stream(a), ParseError);
    std::istringstream b("a,1,8\nb,1,2\na,2,3\n");
    EXPECT_THROW(parse_event_stream(b), ParseError);
    std::istringstream c("a,1,x\n");
    EXPECT_THROW(parse_event_stream(c), ParseError);
}
