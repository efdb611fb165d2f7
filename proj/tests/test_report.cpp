#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "seqpat/io.hpp"
#include "seqpat/report.hpp"

using namespace seqpat;

namespace {

const EventAlphabet& rugby() {
    static const auto a = EventAlphabet::rugby();
    return a;
}

}  // namespace

TEST(Render, CollapsesRepeatedBlocks) {
    EXPECT_EQ(render_pattern(EventList{2, 3, 2, 3, 2, 3, 2, 3, 4}, rugby()), "[phase, breakdown]x4, kick in play");
    EXPECT_EQ(render_pattern(EventList{15, 14, 15, 14, 15, 14, 15, 14, 15, 14, 15, 14, 15}, rugby()),
              "[O-breakdown, O-phase]x6, O-breakdown");
    EXPECT_EQ(render_pattern(EventList{12}, rugby()), "linebreak");
}

TEST(Render, NoCollapseForSingleRepeatsOrRuns) {
    EXPECT_EQ(render_pattern(EventList{2, 3, 4}, rugby()), "phase, breakdown, kick in play");
    EXPECT_EQ(render_pattern(EventList{2, 2, 2}, rugby()), "phase, phase, phase");
    EXPECT_EQ(render_pattern(EventList{2, 3, 2, 3}, EventAlphabet{}), "[2, 3]x2");
}

TEST(Render, UnknownIdIsAnError) { EXPECT_THROW(render_pattern(EventList{99}, rugby()), std::out_of_range); }

TEST(Render, ExpansionInvertsRendering) {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 3000; ++trial) {
        EventList p(rng() % 14 + 1);
        const int alpha = static_cast<int>(rng() % 3) + 2;
        for (auto& e : p) e = static_cast<EventId>(rng() % alpha + 1);
        const auto text = render_pattern(p, rugby());
        ASSERT_EQ(expand_rendering(text, rugby()), p) << text;
        ASSERT_EQ(expand_rendering(render_pattern(p, EventAlphabet{}), EventAlphabet{}), p);
    }
}

TEST(RankPositive, OddsRatios) {
    PatternModel m;
    m.patterns = {{{12}, 30}, {{24}, 12}};
    m.weights = {0.919, 0.613};
    const auto rows = rank_positive(m, nullptr, rugby());
    ASSERT_EQ(rows.size(), 2u);
    // the published weights carry three decimals, so exp() is only known to
    // within exp(w) * 5e-4 of the printed odds ratio
    EXPECT_NEAR(rows[0].odds_ratio, 2.506, 2.506 * 5e-4 + 5e-4);
    EXPECT_NEAR(rows[1].odds_ratio, 1.846, 1.846 * 5e-4 + 5e-4);
    EXPECT_EQ(rows[0].description, "linebreak");
    EXPECT_EQ(rows[1].description, "O-linebreak");
    for (const auto& r : rows) EXPECT_NEAR(r.odds_ratio, std::exp(r.weight), 1e-12 * r.odds_ratio);
}

TEST(RankPositive, FiltersSortsAndTruncates) {
    PatternModel m;
    m.patterns = {{{1}, 10}, {{2}, 10}, {{3}, 4}, {{4}, 20}, {{5}, 9}, {{6}, 8}, {{7}, 7}, {{8}, 6}, {{9}, 5}};
    m.weights = {0.0, -0.5, 3.0, 0.2, 0.2, 0.9, 0.4, 0.3, 0.1};
    const auto rows = rank_positive(m, nullptr, rugby(), 5, 5);
    ASSERT_EQ(rows.size(), 5u);
    std::vector<EventId> order;
    for (const auto& r : rows) order.push_back(r.pattern.events[0]);
    // 3 has support 4 < 5; ties at 0.2 go to higher support
    EXPECT_EQ(order, (std::vector<EventId>{6, 7, 8, 4, 5}));
    EXPECT_EQ(rank_positive(m, nullptr, rugby(), 5, 100).size(), 6u);
}

TEST(RankPositive, RecountsSupportOnDataset) {
    LabeledDataset d;
    d.sequences = {{{12}}, {{2, 12}}, {{3}}};
    PatternModel m;
    m.patterns = {{{12}, 99}};
    m.weights = {1.0};
    const auto rows = rank_positive(m, &d, rugby(), 2, 5);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].pattern.support, 2u);
    EXPECT_TRUE(rank_positive(m, &d, rugby(), 3, 5).empty());
}

TEST(Writers, RankedCsvColumns) {
    PatternModel m;
    m.patterns = {{{2, 3, 2, 3}, 7}};
    m.weights = {0.5};
    std::ostringstream out;
    write_ranked_csv(out, rank_positive(m, nullptr, rugby()));
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "pattern_ids,description,support,weight,odds_ratio");
    EXPECT_NE(out.str().find("2 3 2 3,\"[phase, breakdown]x2\",7,0.5,"), std::string::npos);
    const auto j = ranked_to_json(rank_positive(m, nullptr, rugby()));
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["description"], "[phase, breakdown]x2");
    EXPECT_EQ(j[0]["pattern_ids"], "2 3 2 3");
}

TEST(Writers, LengthHistogram) {
    LabeledDataset d;
    d.sequences = {{{1}}, {{1, 2}}, {{3}}};
    std::ostringstream a;
    write_length_histogram(a, d);
    EXPECT_EQ(a.str(), "length,count\n1,2\n2,1\n");
    d.labels = std::vector<int>{1, -1, -1};
    std::ostringstream b;
    write_length_histogram(b, d);
    EXPECT_EQ(b.str(), "length,positive,negative\n1,1,1\n2,0,1\n");
}

TEST(ModelJson, RoundTrip) {
    PatternModel m;
    m.patterns = {{{12}, 30}, {{2, 3}, 8}};
    m.weights = {0.919, -0.25};
    m.bias = -0.6;
    m.lambda = 0.3;
    const auto j = model_to_json(m, rugby());
    EXPECT_EQ(j["format"], "seqpat-model/1");
    EXPECT_EQ(j["alphabet_hash"], alphabet_hash(rugby()));
    const auto back = model_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.patterns, m.patterns);
    EXPECT_EQ(back.weights, m.weights);
    EXPECT_EQ(back.bias, m.bias);
    EXPECT_EQ(back.lambda, m.lambda);
    EXPECT_THROW(model_from_json(nlohmann::json::parse("{\"format\":\"x\"}")), std::runtime_error);
}
