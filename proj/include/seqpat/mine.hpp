#pragma once

// Frequent sequential pattern mining over single-event sequences.
//
// Support is document support: the number of sequences that contain the
// pattern at least once. Only s-extensions exist since every timestep holds a
// single event. All miners return the same pattern set, sorted canonically
// (descending support, then lexicographic ids).

#include <bit>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace seqpat {

enum class Algorithm { prefixspan, cm_spam, cm_spade, bruteforce };

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::prefixspan: return "prefixspan";
        case Algorithm::cm_spam: return "cm-spam";
        case Algorithm::cm_spade: return "cm-spade";
        case Algorithm::bruteforce: return "bruteforce";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (auto a : {Algorithm::prefixspan, Algorithm::cm_spam, Algorithm::cm_spade, Algorithm::bruteforce})
        if (to_string(a) == name) return a;
    return std::nullopt;
}

struct MiningConfig {
    std::size_t min_support = 1;
    std::size_t max_length = 20;
    Algorithm algorithm = Algorithm::prefixspan;
    /// Co-occurrence map pruning for CM-SPAM / CM-SPADE.
    bool use_cmap = true;

    void validate() const {
        if (min_support < 1) throw std::invalid_argument("min_support must be >= 1");
        if (max_length < 1) throw std::invalid_argument("max_length must be >= 1");
    }
};

struct MiningResult {
    std::vector<Pattern> patterns;
    Algorithm algorithm = Algorithm::prefixspan;
    MiningConfig config;
    /// Support evaluations performed; a measure of search effort.
    std::size_t candidates = 0;
    double elapsed_seconds = 0;
};

/// Descending support, then lexicographic event ids.
inline bool canonical_less(const Pattern& a, const Pattern& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.events < b.events;
}

inline void sort_canonical(std::vector<Pattern>& patterns) {
    std::sort(patterns.begin(), patterns.end(), canonical_less);
}

namespace detail {

/// Dataset re-encoded over dense item indices 0..m-1 (ascending id order).
struct DenseDatabase {
    std::vector<EventId> ids;  // dense index -> event id
    std::vector<std::vector<std::uint32_t>> seqs;

    explicit DenseDatabase(const LabeledDataset& data) {
        for (const auto& s : data.sequences) ids.insert(ids.end(), s.events.begin(), s.events.end());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        seqs.reserve(data.size());
        for (const auto& s : data.sequences) {
            std::vector<std::uint32_t> enc;
            enc.reserve(s.size());
            for (EventId e : s.events)
                enc.push_back(static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), e) - ids.begin()));
            seqs.push_back(std::move(enc));
        }
    }

    std::size_t items() const noexcept { return ids.size(); }

    EventList decode(std::span<const std::uint32_t> pattern) const {
        EventList out;
        out.reserve(pattern.size());
        for (auto k : pattern) out.push_back(ids[k]);
        return out;
    }
};

/// cmap[a * m + b] = number of sequences in which b occurs after a.
inline std::vector<std::size_t> co_occurrence_map(const DenseDatabase& db) {
    const std::size_t m = db.items();
    std::vector<std::size_t> cmap(m * m, 0);
    std::vector<std::size_t> stamp(m * m, SIZE_MAX);
    std::vector<std::size_t> seen_stamp(m, SIZE_MAX);
    std::vector<std::uint32_t> seen;
    for (std::size_t s = 0; s < db.seqs.size(); ++s) {
        seen.clear();
        for (auto b : db.seqs[s]) {
            for (auto a : seen) {
                auto& st = stamp[a * m + b];
                if (st != s) {
                    st = s;
                    ++cmap[a * m + b];
                }
            }
            if (seen_stamp[b] != s) {
                seen_stamp[b] = s;
                seen.push_back(b);
            }
        }
    }
    return cmap;
}

struct Projection {
    std::uint32_t seq;
    std::uint32_t offset;  // first suffix position after the matched prefix
};

using ProjectedDatabase = std::vector<Projection>;

class PrefixSpanMiner {
public:
    PrefixSpanMiner(const DenseDatabase& db, const MiningConfig& cfg, MiningResult& out)
        : db_(db), cfg_(cfg), out_(out), stamp_(db.items(), UINT32_MAX) {}

    void run() {
        ProjectedDatabase root;
        for (std::uint32_t s = 0; s < db_.seqs.size(); ++s) root.push_back({s, 0});
        grow(root);
    }

private:
    void grow(const ProjectedDatabase& pdb) {
        if (prefix_.size() >= cfg_.max_length) return;
        std::vector<ProjectedDatabase> ext(db_.items());
        std::vector<std::uint32_t> touched;
        for (const auto& p : pdb) {
            const auto& seq = db_.seqs[p.seq];
            for (std::uint32_t t = p.offset; t < seq.size(); ++t) {
                const auto e = seq[t];
                if (stamp_[e] == p.seq) continue;
                stamp_[e] = p.seq;
                if (ext[e].empty()) touched.push_back(e);
                ext[e].push_back({p.seq, t + 1});
            }
        }
        // stamps are per sequence index; reset so the next level can reuse them
        for (auto e : touched) stamp_[e] = UINT32_MAX;
        std::sort(touched.begin(), touched.end());
        for (auto e : touched) {
            ++out_.candidates;
            if (ext[e].size() < cfg_.min_support) continue;
            prefix_.push_back(e);
            out_.patterns.push_back({db_.decode(prefix_), ext[e].size()});
            grow(ext[e]);
            prefix_.pop_back();
        }
    }

    const DenseDatabase& db_;
    const MiningConfig& cfg_;
    MiningResult& out_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> prefix_;
};

/// Vertical bitmap: one bit per (sequence, position); each sequence owns a
/// word-aligned segment.
class SequenceBitmaps {
public:
    explicit SequenceBitmaps(const DenseDatabase& db) : lengths_() {
        std::size_t w = 0;
        for (const auto& s : db.seqs) {
            first_word_.push_back(w);
            lengths_.push_back(s.size());
            w += (s.size() + 63) / 64;
        }
        words_ = w;
    }

    std::size_t words() const noexcept { return words_; }
    std::size_t sequences() const noexcept { return lengths_.size(); }

    std::vector<std::uint64_t> item_bitmap(const DenseDatabase& db, std::uint32_t item) const {
        std::vector<std::uint64_t> bits(words_, 0);
        for (std::size_t s = 0; s < db.seqs.size(); ++s)
            for (std::size_t t = 0; t < db.seqs[s].size(); ++t)
                if (db.seqs[s][t] == item) bits[first_word_[s] + t / 64] |= std::uint64_t{1} << (t % 64);
        return bits;
    }

    /// Sets, within each segment, every bit strictly after the first set bit.
    std::vector<std::uint64_t> s_step(const std::vector<std::uint64_t>& bits) const {
        std::vector<std::uint64_t> out(words_, 0);
        for (std::size_t s = 0; s < lengths_.size(); ++s) {
            const std::size_t w0 = first_word_[s], nw = (lengths_[s] + 63) / 64;
            std::size_t k = 0;
            while (k < nw && bits[w0 + k] == 0) ++k;
            if (k == nw) continue;
            const int first = std::countr_zero(bits[w0 + k]);
            out[w0 + k] = first == 63 ? 0 : (~std::uint64_t{0} << (first + 1));
            for (std::size_t j = k + 1; j < nw; ++j) out[w0 + j] = ~std::uint64_t{0};
            const std::size_t tail = lengths_[s] % 64;
            if (tail) out[w0 + nw - 1] &= (std::uint64_t{1} << tail) - 1;
        }
        return out;
    }

    std::size_t support(const std::vector<std::uint64_t>& bits) const {
        std::size_t count = 0;
        for (std::size_t s = 0; s < lengths_.size(); ++s) {
            const std::size_t w0 = first_word_[s], nw = (lengths_[s] + 63) / 64;
            for (std::size_t k = 0; k < nw; ++k)
                if (bits[w0 + k]) {
                    ++count;
                    break;
                }
        }
        return count;
    }

private:
    std::vector<std::size_t> first_word_;
    std::vector<std::size_t> lengths_;
    std::size_t words_ = 0;
};

class CmSpamMiner {
public:
    CmSpamMiner(const DenseDatabase& db, const MiningConfig& cfg, MiningResult& out)
        : db_(db), cfg_(cfg), out_(out), bitmaps_(db) {}

    void run() {
        if (cfg_.use_cmap) cmap_ = co_occurrence_map(db_);
        items_.resize(db_.items());
        std::vector<std::uint32_t> frequent;
        for (std::uint32_t e = 0; e < db_.items(); ++e) {
            items_[e] = bitmaps_.item_bitmap(db_, e);
            ++out_.candidates;
            if (bitmaps_.support(items_[e]) >= cfg_.min_support) frequent.push_back(e);
        }
        for (auto e : frequent) {
            prefix_.assign(1, e);
            out_.patterns.push_back({db_.decode(prefix_), bitmaps_.support(items_[e])});
            dfs(items_[e], frequent);
        }
    }

private:
    void dfs(const std::vector<std::uint64_t>& bits, const std::vector<std::uint32_t>& candidates) {
        if (prefix_.size() >= cfg_.max_length) return;
        const auto last = prefix_.back();
        const auto shifted = bitmaps_.s_step(bits);
        std::vector<std::uint32_t> kept;
        std::vector<std::pair<std::vector<std::uint64_t>, std::size_t>> children;
        for (auto e : candidates) {
            if (cfg_.use_cmap && cmap_[last * db_.items() + e] < cfg_.min_support) continue;
            ++out_.candidates;
            std::vector<std::uint64_t> child(shifted.size());
            for (std::size_t w = 0; w < child.size(); ++w) child[w] = shifted[w] & items_[e][w];
            const auto sup = bitmaps_.support(child);
            if (sup < cfg_.min_support) continue;
            kept.push_back(e);
            children.emplace_back(std::move(child), sup);
        }
        for (std::size_t k = 0; k < kept.size(); ++k) {
            prefix_.push_back(kept[k]);
            out_.patterns.push_back({db_.decode(prefix_), children[k].second});
            dfs(children[k].first, kept);
            prefix_.pop_back();
        }
    }

    const DenseDatabase& db_;
    const MiningConfig& cfg_;
    MiningResult& out_;
    SequenceBitmaps bitmaps_;
    std::vector<std::vector<std::uint64_t>> items_;
    std::vector<std::size_t> cmap_;
    std::vector<std::uint32_t> prefix_;
};

/// Id-list of a pattern: (sequence, position of the last matched event) for
/// every embedding end, sorted.
struct IdList {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries;

    std::size_t support() const {
        std::size_t count = 0;
        for (std::size_t k = 0; k < entries.size(); ++k)
            if (k == 0 || entries[k].first != entries[k - 1].first) ++count;
        return count;
    }
};

/// Temporal join: ends of `right` that come after the earliest end of `left`
/// in the same sequence. With left = P.x and right = P.y this is P.x.y.
inline IdList temporal_join(const IdList& left, const IdList& right) {
    IdList out;
    std::size_t a = 0, b = 0;
    while (a < left.entries.size() && b < right.entries.size()) {
        const auto sl = left.entries[a].first, sr = right.entries[b].first;
        if (sl < sr) {
            ++a;
        } else if (sr < sl) {
            ++b;
        } else {
            const auto first_end = left.entries[a].second;
            while (a < left.entries.size() && left.entries[a].first == sl) ++a;
            for (; b < right.entries.size() && right.entries[b].first == sr; ++b)
                if (right.entries[b].second > first_end) out.entries.push_back(right.entries[b]);
        }
    }
    return out;
}

class CmSpadeMiner {
public:
    CmSpadeMiner(const DenseDatabase& db, const MiningConfig& cfg, MiningResult& out)
        : db_(db), cfg_(cfg), out_(out) {}

    void run() {
        if (cfg_.use_cmap) cmap_ = co_occurrence_map(db_);
        std::vector<IdList> lists(db_.items());
        for (std::uint32_t s = 0; s < db_.seqs.size(); ++s)
            for (std::uint32_t t = 0; t < db_.seqs[s].size(); ++t) lists[db_.seqs[s][t]].entries.push_back({s, t});
        std::vector<Member> klass;
        for (std::uint32_t e = 0; e < db_.items(); ++e) {
            ++out_.candidates;
            const auto sup = lists[e].support();
            if (sup >= cfg_.min_support) klass.push_back({e, std::move(lists[e]), sup});
        }
        enumerate(klass);
    }

private:
    struct Member {
        std::uint32_t item;
        IdList list;
        std::size_t support;
    };

    /// `klass` holds the frequent one-event extensions P.x of the current prefix P.
    void enumerate(const std::vector<Member>& klass) {
        for (const auto& xi : klass) {
            prefix_.push_back(xi.item);
            out_.patterns.push_back({db_.decode(prefix_), xi.support});
            if (prefix_.size() < cfg_.max_length) {
                std::vector<Member> next;
                for (const auto& xj : klass) {
                    if (cfg_.use_cmap && cmap_[xi.item * db_.items() + xj.item] < cfg_.min_support) continue;
                    ++out_.candidates;
                    auto joined = temporal_join(xi.list, xj.list);
                    const auto sup = joined.support();
                    if (sup >= cfg_.min_support) next.push_back({xj.item, std::move(joined), sup});
                }
                enumerate(next);
            }
            prefix_.pop_back();
        }
    }

    const DenseDatabase& db_;
    const MiningConfig& cfg_;
    MiningResult& out_;
    std::vector<std::size_t> cmap_;
    std::vector<std::uint32_t> prefix_;
};

}  // namespace detail

/// Exhaustive enumeration of every event tuple up to max_length, support by
/// `contains`. Test oracle for tiny inputs.
inline MiningResult brute_force_mine(const LabeledDataset& data, MiningConfig config) {
    config.validate();
    config.algorithm = Algorithm::bruteforce;
    const auto start = std::chrono::steady_clock::now();
    MiningResult out;
    out.algorithm = Algorithm::bruteforce;
    out.config = config;

    EventList items;
    for (const auto& s : data.sequences) items.insert(items.end(), s.events.begin(), s.events.end());
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    if (items.empty()) return out;

    double space = 0, power = 1;
    for (std::size_t len = 1; len <= config.max_length; ++len) space += (power *= static_cast<double>(items.size()));
    if (space > 5e7) throw std::invalid_argument("candidate space too large for brute-force mining");

    EventList tuple;
    for (std::size_t len = 1; len <= config.max_length; ++len) {
        std::vector<std::size_t> digit(len, 0);
        tuple.assign(len, items[0]);
        while (true) {
            ++out.candidates;
            const auto sup = support(tuple, data);
            if (sup >= config.min_support) out.patterns.push_back({tuple, sup});
            std::size_t k = len;
            while (k > 0 && ++digit[k - 1] == items.size()) {
                digit[k - 1] = 0;
                tuple[k - 1] = items[0];
                --k;
            }
            if (k == 0) break;
            tuple[k - 1] = items[digit[k - 1]];
        }
    }
    sort_canonical(out.patterns);
    out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

/// The complete set of patterns with support >= min_support and length <=
/// max_length. `min_support > n` yields an empty result.
inline MiningResult mine(const LabeledDataset& data, const MiningConfig& config) {
    config.validate();
    if (config.algorithm == Algorithm::bruteforce) return brute_force_mine(data, config);
    if (data.empty()) throw std::invalid_argument("mine requires a nonempty dataset");
    const auto start = std::chrono::steady_clock::now();
    MiningResult out;
    out.algorithm = config.algorithm;
    out.config = config;
    const detail::DenseDatabase db(data);
    switch (config.algorithm) {
        case Algorithm::prefixspan: detail::PrefixSpanMiner(db, config, out).run(); break;
        case Algorithm::cm_spam: detail::CmSpamMiner(db, config, out).run(); break;
        case Algorithm::cm_spade: detail::CmSpadeMiner(db, config, out).run(); break;
        case Algorithm::bruteforce: break;
    }
    sort_canonical(out.patterns);
    out.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

/// First k patterns in canonical order.
inline std::vector<Pattern> top_k_by_support(const MiningResult& result, std::size_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    const auto n = std::min(k, result.patterns.size());
    return {result.patterns.begin(), result.patterns.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace seqpat
