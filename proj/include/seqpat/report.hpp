#pragma once

// Ranking trained patterns and rendering them as result tables.

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "core.hpp"
#include "mine.hpp"
#include "model.hpp"

namespace seqpat {

struct RankedPattern {
    Pattern pattern;
    std::string description;
    double weight = 0;
    double odds_ratio = 1;  // exp(weight)
};

namespace detail {

inline bool is_power_of_smaller_block(std::span<const EventId> block) {
    const std::size_t n = block.size();
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d) continue;
        bool periodic = true;
        for (std::size_t k = d; k < n && periodic; ++k) periodic = block[k] == block[k - d];
        if (periodic) return true;
    }
    return false;
}

inline std::string event_name(EventId id, const EventAlphabet& alphabet) {
    return alphabet.empty() ? std::to_string(id) : alphabet.at(id).name;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

/// Event names joined by ", ". A run of a block of two or more events that
/// repeats back to back is written "[block]xN". Scanning left to right, the
/// run covering the most events wins, then the longer block; blocks that are
/// themselves repetitions are not considered, so 2 3 2 3 2 3 2 3 reads as
/// "[phase, breakdown]x4".
inline std::string render_pattern(std::span<const EventId> events, const EventAlphabet& alphabet) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    const std::size_t n = events.size();
    while (i < n) {
        std::size_t best_len = 0, best_reps = 0;
        for (std::size_t len = 2; i + 2 * len <= n; ++len) {
            const auto block = events.subspan(i, len);
            if (detail::is_power_of_smaller_block(block)) continue;
            std::size_t reps = 1;
            while (i + (reps + 1) * len <= n &&
                   std::equal(block.begin(), block.end(), events.begin() + static_cast<std::ptrdiff_t>(i + reps * len)))
                ++reps;
            if (reps < 2) continue;
            if (len * reps > best_len * best_reps || (len * reps == best_len * best_reps && len > best_len)) {
                best_len = len;
                best_reps = reps;
            }
        }
        if (best_reps >= 2) {
            std::string block = "[";
            for (std::size_t k = 0; k < best_len; ++k) {
                if (k) block += ", ";
                block += detail::event_name(events[i + k], alphabet);
            }
            parts.push_back(block + "]x" + std::to_string(best_reps));
            i += best_len * best_reps;
        } else {
            parts.push_back(detail::event_name(events[i], alphabet));
            ++i;
        }
    }
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += ", ";
        out += parts[k];
    }
    return out;
}

/// Inverse of render_pattern.
inline EventList expand_rendering(std::string_view text, const EventAlphabet& alphabet) {
    auto lookup = [&](std::string_view name) -> EventId {
        if (alphabet.empty()) {
            auto v = detail::parse_int(name);
            if (!v) throw std::invalid_argument("bad event id '" + std::string(name) + "'");
            return static_cast<EventId>(*v);
        }
        auto id = alphabet.find_name(name);
        if (!id) throw std::invalid_argument("unknown event name '" + std::string(name) + "'");
        return *id;
    };
    auto split_names = [](std::string_view s) {
        std::vector<std::string_view> out;
        std::size_t start = 0;
        for (std::size_t p; (p = s.find(", ", start)) != std::string_view::npos; start = p + 2) out.push_back(s.substr(start, p - start));
        out.push_back(s.substr(start));
        return out;
    };
    EventList out;
    std::size_t k = 0;
    while (k < text.size()) {
        if (text[k] == '[') {
            const auto close = text.find("]x", k);
            if (close == std::string_view::npos) throw std::invalid_argument("unterminated block");
            std::size_t end = close + 2;
            while (end < text.size() && text[end] >= '0' && text[end] <= '9') ++end;
            const auto reps = detail::parse_int(text.substr(close + 2, end - close - 2));
            if (!reps || *reps < 1) throw std::invalid_argument("bad repeat count");
            EventList block;
            for (auto name : split_names(text.substr(k + 1, close - k - 1))) block.push_back(lookup(name));
            for (long long r = 0; r < *reps; ++r) out.insert(out.end(), block.begin(), block.end());
            k = end;
        } else {
            auto end = text.find(", ", k);
            if (end == std::string_view::npos) end = text.size();
            out.push_back(lookup(text.substr(k, end - k)));
            k = end;
        }
        if (k < text.size()) {
            if (text.substr(k, 2) != ", ") throw std::invalid_argument("expected ', '");
            k += 2;
        }
    }
    return out;
}

/// Patterns with support >= min_support and positive weight, by descending
/// weight (then higher support, then lexicographic ids), at most k rows.
/// Supports are recounted on `dataset` when given.
inline std::vector<RankedPattern> rank_positive(const PatternModel& model, const LabeledDataset* dataset,
                                                const EventAlphabet& alphabet, std::size_t min_support = 5,
                                                std::size_t k = 5) {
    std::vector<RankedPattern> rows;
    for (std::size_t j = 0; j < model.patterns.size(); ++j) {
        if (!(model.weights[j] > 0)) continue;
        Pattern p = model.patterns[j];
        if (dataset) p.support = support(p.events, *dataset);
        if (p.support < min_support) continue;
        rows.push_back({p, render_pattern(p.events, alphabet), model.weights[j], std::exp(model.weights[j])});
    }
    std::sort(rows.begin(), rows.end(), [](const RankedPattern& a, const RankedPattern& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.pattern.support != b.pattern.support) return a.pattern.support > b.pattern.support;
        return a.pattern.events < b.pattern.events;
    });
    if (rows.size() > k) rows.resize(k);
    return rows;
}

inline void write_ranked_csv(std::ostream& out, const std::vector<RankedPattern>& rows) {
    out << "pattern_ids,description,support,weight,odds_ratio\n";
    for (const auto& r : rows)
        out << join_ids(r.pattern.events) << ',' << detail::csv_field(r.description) << ',' << r.pattern.support << ','
            << detail::format_double(r.weight) << ',' << detail::format_double(r.odds_ratio) << '\n';
}

inline void write_mining_csv(std::ostream& out, const std::vector<Pattern>& patterns, const EventAlphabet& alphabet) {
    out << "pattern,support" << (alphabet.empty() ? "" : ",names") << '\n';
    for (const auto& p : patterns) {
        out << join_ids(p.events) << ',' << p.support;
        if (!alphabet.empty()) out << ',' << detail::csv_field(render_pattern(p.events, alphabet));
        out << '\n';
    }
}

/// Sequence-length histogram (length, count) for external plotting.
inline void write_length_histogram(std::ostream& out, const LabeledDataset& data) {
    std::map<std::size_t, std::array<std::size_t, 2>> counts;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const bool pos = data.labels && (*data.labels)[i] > 0;
        ++counts[data.sequences[i].size()][pos ? 0 : 1];
    }
    if (!data.is_labeled()) {
        out << "length,count\n";
        for (const auto& [len, c] : counts) out << len << ',' << c[1] << '\n';
        return;
    }
    out << "length,positive,negative\n";
    for (const auto& [len, c] : counts) out << len << ',' << c[0] << ',' << c[1] << '\n';
}

}  // namespace seqpat
