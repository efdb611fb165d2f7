#pragma once

// Safe pattern pruning: fits the L1 squared-hinge pattern classifier along a
// decreasing lambda path without enumerating the pattern space. At each gap
// evaluation the dual point alpha is made feasible over ALL patterns (its
// largest pattern score is found by branch and bound on the tree), and the
// gap-safe sphere of radius 2 sqrt(gap) screens patterns and whole subtrees
// whose optimal weight is provably zero.

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "model.hpp"
#include "modelsel.hpp"
#include "pattern_tree.hpp"
#include "solver.hpp"

namespace seqpat {

struct SppConfig {
    std::size_t max_length = 20;
    /// Only used when reporting patterns.
    std::size_t min_support_report = 5;
    std::size_t grid_size = 50;
    /// lambda_min / lambda_max.
    double grid_ratio = 0.01;
    double tol = 1e-6;
    std::size_t gap_every = 10;
    std::size_t max_epochs = 100000;

    void validate() const {
        if (max_length < 1) throw std::invalid_argument("max_length must be >= 1");
        if (grid_size < 1) throw std::invalid_argument("grid size must be >= 1");
        if (!(grid_ratio > 0 && grid_ratio < 1)) throw std::invalid_argument("grid ratio must be in (0, 1)");
        if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
    }
};

struct StepStats {
    std::size_t nodes_visited = 0;
    std::size_t nodes_pruned = 0;      // subtrees skipped by the bound
    std::size_t initial_survivors = 0; // distinct features after the first screening
    std::size_t features_screened = 0; // dropped from the working set afterwards
    std::size_t traversals = 0;
};

struct PathStep {
    double lambda = 0;
    PatternModel model;  // nonzero weights only
    double duality_gap = 0;
    double primal = 0;
    bool converged = false;
    std::size_t epochs = 0;
    /// Patterns still in the working set when the step finished.
    std::vector<EventList> working_set;
    StepStats stats;
};

struct PathResult {
    double lambda_max = 0;
    std::vector<PathStep> steps;
    std::size_t tree_nodes = 0;

    std::vector<double> lambdas() const {
        std::vector<double> out;
        for (const auto& s : steps) out.push_back(s.lambda);
        return out;
    }
};

/// lambda_max * ratio^(k / (count - 1)), k = 0..count-1.
inline std::vector<double> lambda_grid(double lambda_max, std::size_t count, double ratio) {
    if (!(lambda_max > 0)) throw std::invalid_argument("lambda_max must be positive");
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k)
        grid[k] = count == 1 ? lambda_max
                             : lambda_max * std::pow(ratio, static_cast<double>(k) / static_cast<double>(count - 1));
    return grid;
}

/// Upper bound on |sum_i alpha_i y_i x_it'| over every descendant t' of `node`.
inline double subtree_bound(const PatternTreeNode& node, std::span<const double> alpha, std::span<const int> y) {
    std::vector<double> v(alpha.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = alpha[i] * y[i];
    return score_node(node, v).bound;
}

/// Patterns that may have a nonzero optimal weight at `lambda`, given a
/// feasible dual point `alpha` within `radius` of the optimum.
inline std::vector<PatternTreeNode*> safe_prune_traverse(PatternTree& tree, std::span<const double> alpha,
                                                         std::span<const int> y, double radius, double lambda,
                                                         TraversalStats* stats = nullptr) {
    std::vector<double> v(alpha.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = alpha[i] * y[i];
    return tree.screen(v, radius, lambda, stats);
}

namespace detail {

inline bool pattern_rank_less(const EventList& a, const EventList& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

/// Keeps one node per distinct occurrence set (identical feature columns):
/// the shortest, then lexicographically smallest pattern. Input order is kept.
inline std::vector<PatternTreeNode*> distinct_columns(const std::vector<PatternTreeNode*>& nodes) {
    std::map<std::vector<std::uint32_t>, std::size_t> rep;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        auto [it, fresh] = rep.try_emplace(nodes[k]->seqs, k);
        if (!fresh && pattern_rank_less(nodes[k]->pattern, nodes[it->second]->pattern)) it->second = k;
    }
    std::vector<char> keep(nodes.size(), 0);
    for (const auto& [occ, k] : rep) keep[k] = 1;
    std::vector<PatternTreeNode*> out;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        if (keep[k]) out.push_back(nodes[k]);
    return out;
}

class PathSolver {
public:
    PathSolver(const LabeledDataset& data, const SppConfig& cfg)
        : cfg_(cfg), y_(data.label_vector()), tree_(data, cfg.max_length) {
        bias_ = intercept_only_bias(y_);
    }

    double lambda_max() {
        std::vector<double> v(y_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = 2.0 * std::max(0.0, 1.0 - y_[i] * bias_) * y_[i];
        return tree_.max_abs_score(v);
    }

    PathStep step(double lambda) {
        PathStep out;
        out.lambda = lambda;
        auto& st = out.stats;

        auto cert = certify_full(current_decision(), l1(warm_), lambda, st);
        const bool done = converged(cert);
        auto survivors = screen_tree(cert, lambda, st);
        auto working = distinct_columns(survivors);
        st.initial_survivors = working.size();

        std::map<const PatternTreeNode*, double> warm(warm_.begin(), warm_.end());
        std::vector<double> w(working.size(), 0.0);
        for (std::size_t j = 0; j < working.size(); ++j)
            if (auto it = warm.find(working[j]); it != warm.end()) w[j] = it->second;

        FeatureMatrix x;
        x.rows = y_.size();
        for (auto* node : working) x.columns.push_back(node->seqs);
        std::optional<CoordinateDescent> cd;
        cd.emplace(x, y_, lambda, w, bias_);

        std::size_t epochs = 0;
        bool ok = done;
        while (!ok && epochs < cfg_.max_epochs) {
            for (std::size_t e = 0; e < cfg_.gap_every && epochs < cfg_.max_epochs; ++e, ++epochs) cd->epoch();
            cert = certify_full(cd->decision(), l1(cd->weights()), lambda, st);
            if (converged(cert)) {
                ok = true;
                break;
            }
            // re-screen the working set with the tighter sphere
            const double radius = 2.0 * std::sqrt(cert.gap);
            std::vector<PatternTreeNode*> kept;
            std::vector<double> kept_w;
            for (std::size_t j = 0; j < working.size(); ++j) {
                double score = 0;
                for (auto i : working[j]->seqs) score += cert.alpha[i] * y_[i];
                if (std::abs(score) + radius * std::sqrt(static_cast<double>(working[j]->support())) >= lambda) {
                    kept.push_back(working[j]);
                    kept_w.push_back(cd->weights()[j]);
                }
            }
            if (kept.size() < working.size()) {
                st.features_screened += working.size() - kept.size();
                const double b = cd->bias();
                working = std::move(kept);
                x.columns.clear();
                for (auto* node : working) x.columns.push_back(node->seqs);
                cd.emplace(x, y_, lambda, std::move(kept_w), b);
            }
        }

        warm_.clear();
        const auto& wf = cd->weights();
        bias_ = cd->bias();
        out.model.bias = bias_;
        out.model.lambda = lambda;
        for (std::size_t j = 0; j < working.size(); ++j) {
            out.working_set.push_back(working[j]->pattern);
            if (wf[j] != 0) {
                warm_.emplace_back(working[j], wf[j]);
                out.model.patterns.push_back({working[j]->pattern, working[j]->support()});
                out.model.weights.push_back(wf[j]);
            }
        }
        out.duality_gap = cert.gap;
        out.primal = cert.primal;
        out.converged = ok;
        out.epochs = epochs;
        return out;
    }

    std::size_t tree_size() const { return tree_.size(); }

private:
    std::vector<double> current_decision() const {
        std::vector<double> f(y_.size(), bias_);
        for (const auto& [node, w] : warm_)
            for (auto i : node->seqs) f[i] += w;
        return f;
    }

    static double l1(const std::vector<std::pair<PatternTreeNode*, double>>& ws) {
        double s = 0;
        for (const auto& p : ws) s += std::abs(p.second);
        return s;
    }
    static double l1(const std::vector<double>& ws) { return l1_norm(ws); }

    GapCertificate certify_full(const std::vector<double>& f, double l1w, double lambda, StepStats& st) {
        auto alpha = centered_dual(f, y_);
        std::vector<double> v(alpha.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = alpha[i] * y_[i];
        TraversalStats ts;
        const double max_score = tree_.max_abs_score(v, &ts);
        st.nodes_visited += ts.visited;
        st.nodes_pruned += ts.pruned;
        ++st.traversals;
        return certify(std::move(alpha), max_score, loss(f, y_) + lambda * l1w, lambda);
    }

    std::vector<PatternTreeNode*> screen_tree(const GapCertificate& cert, double lambda, StepStats& st) {
        TraversalStats ts;
        auto out = safe_prune_traverse(tree_, cert.alpha, y_, 2.0 * std::sqrt(cert.gap), lambda, &ts);
        st.nodes_visited += ts.visited;
        st.nodes_pruned += ts.pruned;
        ++st.traversals;
        return out;
    }

    bool converged(const GapCertificate& c) const { return c.gap <= cfg_.tol * std::max(1.0, c.primal); }

    const SppConfig& cfg_;
    std::span<const int> y_;
    PatternTree tree_;
    double bias_ = 0;
    std::vector<std::pair<PatternTreeNode*, double>> warm_;
};

}  // namespace detail

/// Regularization path from lambda_max (w = 0, b = label mean) down the grid,
/// each step warm-started from the previous one. Every step's gap is
/// certified against the full pattern space.
inline PathResult fit_path(const LabeledDataset& data, const SppConfig& cfg,
                           const std::optional<std::vector<double>>& grid = std::nullopt) {
    cfg.validate();
    data.validate();
    if (!data.is_labeled()) throw std::invalid_argument("fit_path requires a labeled dataset");
    if (data.n_positive() == 0 || data.n_negative() == 0)
        throw std::invalid_argument("fit_path requires both classes to be present");

    detail::PathSolver solver(data, cfg);
    PathResult result;
    result.lambda_max = solver.lambda_max();
    std::vector<double> lambdas;
    if (grid) {
        lambdas = *grid;
        for (std::size_t k = 0; k < lambdas.size(); ++k)
            if (!(lambdas[k] > 0) || (k && lambdas[k] >= lambdas[k - 1]))
                throw std::invalid_argument("lambda grid must be positive and strictly decreasing");
    } else {
        if (!(result.lambda_max > 0)) throw std::runtime_error("lambda_max is zero: no pattern correlates with the labels");
        lambdas = lambda_grid(result.lambda_max, cfg.grid_size, cfg.grid_ratio);
    }
    for (double lambda : lambdas) result.steps.push_back(solver.step(lambda));
    result.tree_nodes = solver.tree_size();
    return result;
}

struct CvFit {
    double best_lambda = 0;
    std::size_t best_index = 0;
    PatternModel model;  // refit on the full dataset at best_lambda
    CvTable table;
    PathResult path;     // full-data path over the grid
};

/// Chooses lambda by repeated stratified k-fold CV over the full-data grid.
inline CvFit fit_cv(const LabeledDataset& data, const SppConfig& cfg, const CvConfig& cv, std::size_t threads = 1) {
    CvFit out;
    out.path = fit_path(data, cfg);
    const auto grid = out.path.lambdas();
    out.table = cross_validate(
        data, grid, cv,
        [&cfg](const LabeledDataset& train, const std::vector<double>& g) {
            const auto path = fit_path(train, cfg, g);
            std::vector<PatternModel> models;
            for (const auto& s : path.steps) models.push_back(s.model);
            return models;
        },
        threads);
    out.best_index = out.table.best;
    out.best_lambda = grid[out.best_index];
    out.model = out.path.steps[out.best_index].model;
    return out;
}

}  // namespace seqpat
