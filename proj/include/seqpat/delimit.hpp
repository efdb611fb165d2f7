#pragma once

// Splitting per-match event streams into passages of play and labelling the
// passages from the scoring or conceding perspective.

#include <set>
#include <string>
#include <vector>

#include "core.hpp"

namespace seqpat {

struct MatchStream {
    std::string match_id;
    EventList events;
};

struct DelimitConfig {
    /// Restart receptions, lineouts and scrums of both sides.
    std::set<EventId> start_events{1, 8, 10, 13, 20, 22};
    /// Kicks at goal and tries of both sides; the passage ends after them.
    std::set<EventId> post_boundary_events{6, 11, 18, 23};
    std::set<EventId> scrum_events{10, 22};
    bool scrum_reset_suppression = true;
    EventAlphabet alphabet = EventAlphabet::rugby();

    void validate() const {
        for (EventId e : start_events)
            if (post_boundary_events.count(e))
                throw std::invalid_argument("event " + std::to_string(e) +
                                            " is both a start and a post-boundary event");
    }
};

/// Cuts one match into passages. Every event lands in exactly one passage and
/// concatenating the passages gives back the stream.
inline std::vector<Sequence> delimit_match(const MatchStream& stream, const DelimitConfig& config = {}) {
    config.validate();
    std::vector<Sequence> passages;
    Sequence current;
    auto flush = [&] {
        if (!current.events.empty()) passages.push_back(std::move(current));
        current = {};
    };
    const auto& ev = stream.events;
    for (std::size_t t = 0; t < ev.size(); ++t) {
        const EventId e = ev[t];
        if (!config.alphabet.empty() && !config.alphabet.contains(e))
            throw std::invalid_argument("match '" + stream.match_id + "' position " + std::to_string(t) +
                                        ": unknown event id " + std::to_string(e));
        bool starts = config.start_events.count(e) > 0;
        if (starts && config.scrum_reset_suppression && t > 0 && config.scrum_events.count(e) &&
            config.scrum_events.count(ev[t - 1]))
            starts = false;  // scrum reset
        if (starts) flush();
        current.events.push_back(e);
        if (config.post_boundary_events.count(e)) flush();
    }
    flush();
    return passages;
}

inline std::vector<Sequence> delimit_matches(const std::vector<MatchStream>& streams,
                                             const DelimitConfig& config = {}) {
    std::vector<Sequence> all;
    for (const auto& s : streams) {
        auto p = delimit_match(s, config);
        all.insert(all.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    }
    return all;
}

enum class Perspective { scoring, conceding };

/// Event ids whose presence makes a passage positive for `p`; they are removed
/// from the labelled sequences.
inline std::set<EventId> outcome_events(Perspective p) {
    return p == Perspective::scoring ? std::set<EventId>{6, 11} : std::set<EventId>{18, 23};
}

struct OutcomeDataset {
    LabeledDataset dataset;
    std::size_t dropped_empty = 0;  // passages left with no events after deletion
};

inline OutcomeDataset build_outcome_dataset(const std::vector<Sequence>& passages, Perspective perspective) {
    const auto outcome = outcome_events(perspective);
    OutcomeDataset out;
    out.dataset.labels.emplace();
    for (const auto& p : passages) {
        Sequence kept;
        bool positive = false;
        for (EventId e : p.events) {
            if (outcome.count(e)) positive = true;
            else kept.events.push_back(e);
        }
        if (kept.events.empty()) {
            ++out.dropped_empty;
            continue;
        }
        out.dataset.sequences.push_back(std::move(kept));
        out.dataset.labels->push_back(positive ? 1 : -1);
    }
    return out;
}

/// Reads `match_id,seq_no,event_id` rows. Rows of a match must be contiguous
/// with increasing seq_no; matches keep file order.
inline std::vector<MatchStream> parse_event_stream(std::istream& in) {
    std::vector<MatchStream> matches;
    std::set<std::string> finished;
    long long last_seq = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || detail::is_blank_or_comment(line)) continue;
        auto c1 = line.find(',');
        auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
            throw ParseError("expected match_id,seq_no,event_id", line_no);
        std::string id = line.substr(0, c1);
        auto seq_no = detail::parse_int(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
        auto event = detail::parse_int(std::string_view(line).substr(c2 + 1));
        if (!seq_no) {
            if (matches.empty()) continue;  // header
            throw ParseError("malformed seq_no", line_no);
        }
        if (!event || *event <= 0) throw ParseError("malformed event id", line_no);
        if (matches.empty() || matches.back().match_id != id) {
            if (!matches.empty()) finished.insert(matches.back().match_id);
            if (finished.count(id)) throw ParseError("rows of match '" + id + "' are not contiguous", line_no);
            matches.push_back({id, {}});
        } else if (*seq_no <= last_seq) {
            throw ParseError("seq_no not increasing within match '" + id + "'", line_no);
        }
        last_seq = *seq_no;
        matches.back().events.push_back(static_cast<EventId>(*event));
    }
    return matches;
}

inline std::vector<MatchStream> load_event_stream(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event stream '" + path + "'");
    return parse_event_stream(in);
}

}  // namespace seqpat
