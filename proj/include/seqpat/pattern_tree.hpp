#pragma once

// Lazily grown PrefixSpan tree over every pattern occurring in a dataset,
// with the anti-monotone score bound used for safe subtree pruning.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "core.hpp"
#include "mine.hpp"

namespace seqpat {

struct PatternTreeNode {
    EventList pattern;
    /// Sequences containing the pattern (ascending) and, per sequence, the
    /// suffix start after its first embedding.
    std::vector<std::uint32_t> seqs;
    std::vector<std::uint32_t> offsets;
    /// Sorted by extension event id once expanded.
    std::vector<std::unique_ptr<PatternTreeNode>> children;
    bool expanded = false;
    /// Set when the last screening traversal skipped this node's subtree.
    bool pruned = false;

    std::size_t support() const noexcept { return seqs.size(); }
};

/// Per-sequence dual weights v_i = alpha_i y_i.
struct NodeScore {
    double score = 0;  // sum of v_i over the occurrence list
    double bound = 0;  // max(positive part, negative part); dominates every descendant |score|
};

inline NodeScore score_node(const PatternTreeNode& node, std::span<const double> v) {
    double pos = 0, neg = 0;
    for (auto i : node.seqs) {
        if (v[i] > 0) pos += v[i];
        else neg -= v[i];
    }
    return {pos - neg, std::max(pos, neg)};
}

struct TraversalStats {
    std::size_t visited = 0;
    std::size_t pruned = 0;  // subtrees skipped

    TraversalStats& operator+=(const TraversalStats& o) {
        visited += o.visited;
        pruned += o.pruned;
        return *this;
    }
};

class PatternTree {
public:
    PatternTree(const LabeledDataset& data, std::size_t max_length)
        : db_(data), max_length_(max_length), stamp_(db_.items(), UINT32_MAX) {
        if (max_length_ < 1) throw std::invalid_argument("max_length must be >= 1");
        root_.expanded = false;
        for (std::uint32_t s = 0; s < db_.seqs.size(); ++s) {
            root_.seqs.push_back(s);
            root_.offsets.push_back(0);
        }
    }

    PatternTree(const PatternTree&) = delete;
    PatternTree& operator=(const PatternTree&) = delete;

    const PatternTreeNode& root() const noexcept { return root_; }
    std::size_t rows() const noexcept { return db_.seqs.size(); }
    std::size_t max_length() const noexcept { return max_length_; }
    /// Nodes materialized so far, excluding the root.
    std::size_t size() const noexcept { return materialized_; }

    /// Children of `node`, grown on first access; empty at max_length.
    const std::vector<std::unique_ptr<PatternTreeNode>>& children(PatternTreeNode& node) {
        if (!node.expanded) expand(node);
        return node.children;
    }

    /// Largest |score| over all patterns, by branch and bound on the score bound.
    double max_abs_score(std::span<const double> v, TraversalStats* stats = nullptr) {
        double best = 0;
        TraversalStats st;
        for (const auto& child : children(root_)) max_search(*child, v, best, st);
        if (stats) *stats += st;
        return best;
    }

    /// Depth-first safe screening for a dual point `v` with sphere radius
    /// `radius`. A subtree is skipped when bound + radius * sqrt(support) <
    /// lambda; a node survives when |score| + radius * sqrt(support) >= lambda.
    std::vector<PatternTreeNode*> screen(std::span<const double> v, double radius, double lambda,
                                         TraversalStats* stats = nullptr) {
        std::vector<PatternTreeNode*> survivors;
        TraversalStats st;
        for (const auto& child : children(root_)) screen_search(*child, v, radius, lambda, survivors, st);
        if (stats) *stats += st;
        return survivors;
    }

    /// Every pattern in the tree (up to max_length); for tests and tiny inputs.
    std::vector<PatternTreeNode*> enumerate_all() {
        std::vector<PatternTreeNode*> out;
        for (const auto& child : children(root_)) collect(*child, out);
        return out;
    }

private:
    void expand(PatternTreeNode& node) {
        node.expanded = true;
        if (node.pattern.size() >= max_length_) return;
        std::map<std::uint32_t, std::unique_ptr<PatternTreeNode>> ext;
        for (std::size_t k = 0; k < node.seqs.size(); ++k) {
            const auto s = node.seqs[k];
            const auto& seq = db_.seqs[s];
            for (std::uint32_t t = node.offsets[k]; t < seq.size(); ++t) {
                const auto e = seq[t];
                if (stamp_[e] == s) continue;
                stamp_[e] = s;
                auto& child = ext[e];
                if (!child) {
                    child = std::make_unique<PatternTreeNode>();
                    child->pattern = node.pattern;
                    child->pattern.push_back(db_.ids[e]);
                }
                child->seqs.push_back(s);
                child->offsets.push_back(t + 1);
            }
        }
        for (auto& [e, child] : ext) {
            stamp_[e] = UINT32_MAX;
            node.children.push_back(std::move(child));
        }
        materialized_ += node.children.size();
    }

    void max_search(PatternTreeNode& node, std::span<const double> v, double& best, TraversalStats& st) {
        ++st.visited;
        const auto sc = score_node(node, v);
        if (sc.bound <= best) {
            ++st.pruned;
            return;
        }
        best = std::max(best, std::abs(sc.score));
        for (const auto& child : children(node)) max_search(*child, v, best, st);
    }

    void screen_search(PatternTreeNode& node, std::span<const double> v, double radius, double lambda,
                       std::vector<PatternTreeNode*>& out, TraversalStats& st) {
        ++st.visited;
        const auto sc = score_node(node, v);
        const double slack = radius * std::sqrt(static_cast<double>(node.support()));
        node.pruned = sc.bound + slack < lambda;
        if (node.pruned) {
            ++st.pruned;
            return;
        }
        if (std::abs(sc.score) + slack >= lambda) out.push_back(&node);
        for (const auto& child : children(node)) screen_search(*child, v, radius, lambda, out, st);
    }

    void collect(PatternTreeNode& node, std::vector<PatternTreeNode*>& out) {
        out.push_back(&node);
        for (const auto& child : children(node)) collect(*child, out);
    }

    detail::DenseDatabase db_;
    std::size_t max_length_;
    std::vector<std::uint32_t> stamp_;
    PatternTreeNode root_;
    std::size_t materialized_ = 0;
};

}  // namespace seqpat
