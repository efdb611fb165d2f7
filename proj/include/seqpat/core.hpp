#pragma once

// Sequence/pattern data model, containment, native dataset I/O and
// descriptive statistics.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqpat {

using EventId = std::int32_t;
using EventList = std::vector<EventId>;

/// Thrown for malformed input files; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

enum class Side { team, opposition };

inline std::string_view to_string(Side side) { return side == Side::team ? "team" : "opposition"; }

struct EventInfo {
    EventId id = 0;
    std::string name;
    Side side = Side::team;
};

/// Maps event ids to display names and the side that performs them.
class EventAlphabet {
public:
    EventAlphabet() = default;

    explicit EventAlphabet(std::vector<EventInfo> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(),
                  [](const EventInfo& a, const EventInfo& b) { return a.id < b.id; });
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            if (entries_[k].id <= 0)
                throw std::invalid_argument("alphabet ids must be positive, got " +
                                            std::to_string(entries_[k].id));
            if (k > 0 && entries_[k].id == entries_[k - 1].id)
                throw std::invalid_argument("duplicate alphabet id " + std::to_string(entries_[k].id));
        }
    }

    const std::vector<EventInfo>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const EventInfo* find(EventId id) const noexcept {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                                   [](const EventInfo& e, EventId v) { return e.id < v; });
        return (it != entries_.end() && it->id == id) ? &*it : nullptr;
    }

    bool contains(EventId id) const noexcept { return find(id) != nullptr; }

    const EventInfo& at(EventId id) const {
        if (const auto* e = find(id)) return *e;
        throw std::out_of_range("event id " + std::to_string(id) + " is not in the alphabet");
    }

    std::optional<EventId> find_name(std::string_view name) const {
        for (const auto& e : entries_)
            if (e.name == name) return e.id;
        return std::nullopt;
    }

    /// The 24 rugby union events (12 per side) with the short names used in
    /// result tables.
    static EventAlphabet rugby() {
        const char* names[12] = {"restart received", "phase",   "breakdown",  "kick in play",
                                 "penalty conceded", "kick at goal", "quick tap", "lineout",
                                 "error",            "scrum",   "try scored", "linebreak"};
        std::vector<EventInfo> entries;
        for (int k = 0; k < 12; ++k) entries.push_back({k + 1, names[k], Side::team});
        for (int k = 0; k < 12; ++k)
            entries.push_back({k + 13, std::string("O-") + names[k], Side::opposition});
        return EventAlphabet(std::move(entries));
    }

private:
    std::vector<EventInfo> entries_;
};

struct Sequence {
    EventList events;

    std::size_t size() const noexcept { return events.size(); }
    friend bool operator==(const Sequence&, const Sequence&) = default;
};

/// An ordered list of events with its document support in some dataset.
struct Pattern {
    EventList events;
    std::size_t support = 0;

    std::size_t length() const noexcept { return events.size(); }
    friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Sequences with optional +1/-1 labels.
struct LabeledDataset {
    std::vector<Sequence> sequences;
    std::optional<std::vector<int>> labels;

    std::size_t size() const noexcept { return sequences.size(); }
    bool empty() const noexcept { return sequences.empty(); }
    bool is_labeled() const noexcept { return labels.has_value(); }

    std::size_t count_label(int y) const {
        if (!labels) return 0;
        return static_cast<std::size_t>(std::count(labels->begin(), labels->end(), y));
    }
    std::size_t n_positive() const { return count_label(1); }
    std::size_t n_negative() const { return count_label(-1); }

    const std::vector<int>& label_vector() const {
        if (!labels) throw std::invalid_argument("dataset is unlabeled");
        return *labels;
    }

    void validate() const {
        if (labels && labels->size() != sequences.size())
            throw std::invalid_argument("label count does not match sequence count");
        if (labels)
            for (int y : *labels)
                if (y != 1 && y != -1) throw std::invalid_argument("labels must be +1 or -1");
        for (std::size_t i = 0; i < sequences.size(); ++i) {
            if (sequences[i].events.empty())
                throw std::invalid_argument("sequence " + std::to_string(i) + " is empty");
            for (EventId e : sequences[i].events)
                if (e <= 0)
                    throw std::invalid_argument("sequence " + std::to_string(i) +
                                                " has a non-positive event id");
        }
    }

    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

// ---------------------------------------------------------------------------
// containment

/// True iff `pattern` embeds in `sequence` at strictly increasing positions.
/// With `max_gap`, consecutive matched positions may be at most max_gap + 1
/// apart (max_gap = 0 means contiguous).
inline bool contains(std::span<const EventId> pattern, std::span<const EventId> sequence,
                     std::optional<std::size_t> max_gap = std::nullopt) {
    if (pattern.empty()) return true;
    if (!max_gap) {
        std::size_t k = 0;
        for (EventId e : sequence)
            if (e == pattern[k] && ++k == pattern.size()) return true;
        return false;
    }
    // reachable[t]: pattern[0..k] can end at position t
    const std::size_t gap = *max_gap;
    std::vector<char> reachable(sequence.size(), 0), next(sequence.size(), 0);
    for (std::size_t t = 0; t < sequence.size(); ++t) reachable[t] = sequence[t] == pattern[0];
    for (std::size_t k = 1; k < pattern.size(); ++k) {
        std::fill(next.begin(), next.end(), 0);
        std::size_t last = sequence.size();  // most recent reachable position
        for (std::size_t t = 0; t < sequence.size(); ++t) {
            if (last != sequence.size() && sequence[t] == pattern[k] && t - last <= gap + 1)
                next[t] = 1;
            if (reachable[t]) last = t;
        }
        reachable.swap(next);
    }
    return std::any_of(reachable.begin(), reachable.end(), [](char c) { return c != 0; });
}

inline bool contains(const Pattern& pattern, const Sequence& sequence,
                     std::optional<std::size_t> max_gap = std::nullopt) {
    return contains(pattern.events, sequence.events, max_gap);
}

/// Number of sequences containing `pattern` (each sequence counted once).
inline std::size_t support(std::span<const EventId> pattern, const LabeledDataset& data) {
    std::size_t count = 0;
    for (const auto& s : data.sequences) count += contains(pattern, s.events) ? 1 : 0;
    return count;
}

/// Space-joined ids, e.g. "2 3 2".
inline std::string join_ids(std::span<const EventId> events, std::string_view sep = " ") {
    std::string out;
    for (std::size_t k = 0; k < events.size(); ++k) {
        if (k) out += sep;
        out += std::to_string(events[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// native dataset format: one sequence per line, optional leading label

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t k = 0;
    while (k < line.size()) {
        while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r')) ++k;
        std::size_t start = k;
        while (k < line.size() && line[k] != ' ' && line[k] != '\t' && line[k] != '\r') ++k;
        if (k > start) out.push_back(line.substr(start, k - start));
    }
    return out;
}

inline std::optional<long long> parse_int(std::string_view token) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
    return v;
}

inline bool is_label_token(std::string_view t) { return t == "1" || t == "-1" || t == "+1"; }

inline bool is_blank_or_comment(std::string_view line) {
    auto pos = line.find_first_not_of(" \t\r");
    return pos == std::string_view::npos || line[pos] == '#';
}

}  // namespace detail

enum class LabelMode { automatic, labeled, unlabeled };

inline LabeledDataset parse_dataset(std::istream& in, LabelMode mode = LabelMode::automatic) {
    struct Row {
        std::size_t line_no;
        std::vector<std::string_view> tokens;
    };
    std::vector<std::string> lines;
    std::vector<Row> rows;
    {
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    for (std::size_t k = 0; k < lines.size(); ++k) {
        if (detail::is_blank_or_comment(lines[k])) continue;
        rows.push_back({k + 1, detail::split_ws(lines[k])});
    }

    bool labeled = mode == LabelMode::labeled;
    if (mode == LabelMode::automatic && !rows.empty()) {
        std::size_t with_label = 0, signed_label = 0;
        for (const auto& r : rows) {
            if (!r.tokens.empty() && detail::is_label_token(r.tokens.front())) {
                ++with_label;
                if (r.tokens.front() != "1") ++signed_label;
            }
        }
        labeled = with_label == rows.size();
        if (!labeled && signed_label > 0) {
            for (const auto& r : rows)
                if (r.tokens.empty() || !detail::is_label_token(r.tokens.front()))
                    throw ParseError("unlabeled line in a labeled dataset", r.line_no);
        }
    }

    LabeledDataset data;
    if (labeled) data.labels.emplace();
    for (const auto& r : rows) {
        std::size_t first = 0;
        if (labeled) {
            if (r.tokens.empty() || !detail::is_label_token(r.tokens.front()))
                throw ParseError("expected a label (1 or -1)", r.line_no);
            data.labels->push_back(r.tokens.front() == "-1" ? -1 : 1);
            first = 1;
        }
        Sequence seq;
        for (std::size_t t = first; t < r.tokens.size(); ++t) {
            auto v = detail::parse_int(r.tokens[t]);
            if (!v || *v <= 0 || *v > INT32_MAX)
                throw ParseError("malformed event id '" + std::string(r.tokens[t]) + "'", r.line_no);
            seq.events.push_back(static_cast<EventId>(*v));
        }
        if (seq.events.empty()) throw ParseError("empty sequence", r.line_no);
        data.sequences.push_back(std::move(seq));
    }
    return data;
}

inline LabeledDataset load_dataset(const std::string& path, LabelMode mode = LabelMode::automatic) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
    return parse_dataset(in, mode);
}

inline void write_dataset(std::ostream& out, const LabeledDataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels) out << ((*data.labels)[i] > 0 ? "1" : "-1") << '\t';
        out << join_ids(data.sequences[i].events, "\t") << '\n';
    }
}

inline void save_dataset(const std::string& path, const LabeledDataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset '" + path + "'");
    write_dataset(out, data);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// alphabet CSV: id,name,side

inline EventAlphabet parse_alphabet(std::istream& in) {
    std::vector<EventInfo> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || detail::is_blank_or_comment(line)) continue;
        auto c1 = line.find(',');
        auto c2 = line.rfind(',');
        if (c1 == std::string::npos || c1 == c2) throw ParseError("expected id,name,side", line_no);
        auto id = detail::parse_int(std::string_view(line).substr(0, c1));
        if (!id) {
            if (entries.empty() && line_no == 1) continue;  // header
            throw ParseError("malformed event id", line_no);
        }
        std::string side = line.substr(c2 + 1);
        Side s;
        if (side == "team") s = Side::team;
        else if (side == "opposition") s = Side::opposition;
        else throw ParseError("side must be 'team' or 'opposition'", line_no);
        entries.push_back({static_cast<EventId>(*id), line.substr(c1 + 1, c2 - c1 - 1), s});
    }
    try {
        return EventAlphabet(std::move(entries));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line_no);
    }
}

inline EventAlphabet load_alphabet(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open alphabet '" + path + "'");
    return parse_alphabet(in);
}

inline void write_alphabet(std::ostream& out, const EventAlphabet& alphabet) {
    out << "id,name,side\n";
    for (const auto& e : alphabet.entries()) out << e.id << ',' << e.name << ',' << to_string(e.side) << '\n';
}

/// Throws if some event id of `data` is missing from `alphabet`.
inline void check_alphabet(const LabeledDataset& data, const EventAlphabet& alphabet) {
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t t = 0; t < data.sequences[i].size(); ++t)
            if (!alphabet.contains(data.sequences[i].events[t]))
                throw std::invalid_argument("sequence " + std::to_string(i) + " position " +
                                            std::to_string(t) + ": event id " +
                                            std::to_string(data.sequences[i].events[t]) +
                                            " is not in the alphabet");
}

/// 64-bit FNV-1a; used as a content fingerprint in manifests and models.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int k = 15; k >= 0; --k, v >>= 4) s[k] = digits[v & 0xF];
    return s;
}

// ---------------------------------------------------------------------------
// descriptive statistics

struct DatasetStats {
    std::size_t n = 0, n_positive = 0, n_negative = 0;
    double mean = 0, std = 0, min = 0, p25 = 0, median = 0, p75 = 0, max = 0, skewness = 0;
};

namespace detail {

/// Linear interpolation between closest ranks over sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// Sequence-length statistics. `std` uses the n-1 denominator; skewness is the
/// adjusted Fisher-Pearson coefficient, reported as 0 when undefined.
inline DatasetStats compute_stats(const LabeledDataset& data) {
    if (data.empty()) throw std::invalid_argument("compute_stats requires a nonempty dataset");
    std::vector<double> len;
    len.reserve(data.size());
    for (const auto& s : data.sequences) len.push_back(static_cast<double>(s.size()));
    std::sort(len.begin(), len.end());

    DatasetStats st;
    st.n = len.size();
    st.n_positive = data.n_positive();
    st.n_negative = data.n_negative();
    const double n = static_cast<double>(st.n);
    double sum = 0;
    for (double v : len) sum += v;
    st.mean = sum / n;
    double m2 = 0, m3 = 0;
    for (double v : len) {
        const double d = v - st.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    st.std = st.n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0;
    m2 /= n;
    m3 /= n;
    if (st.n > 2 && m2 > 0) st.skewness = std::sqrt(n * (n - 1)) / (n - 2) * m3 / std::pow(m2, 1.5);
    st.min = len.front();
    st.max = len.back();
    st.p25 = detail::quantile_sorted(len, 0.25);
    st.median = detail::quantile_sorted(len, 0.5);
    st.p75 = detail::quantile_sorted(len, 0.75);
    return st;
}

struct LabelSplit {
    LabeledDataset positive, negative;
};

inline LabelSplit split_by_label(const LabeledDataset& data) {
    const auto& y = data.label_vector();
    LabelSplit out;
    out.positive.labels.emplace();
    out.negative.labels.emplace();
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto& part = y[i] > 0 ? out.positive : out.negative;
        part.sequences.push_back(data.sequences[i]);
        part.labels->push_back(y[i]);
    }
    return out;
}

}  // namespace seqpat
