#pragma once

// L1-regularized squared-hinge classification over binary features:
//
//   min_{w,b}  sum_i max(0, 1 - y_i (w'x_i + b))^2 + lambda ||w||_1
//
// solved by cyclic coordinate descent with exact one-dimensional
// minimization. The dual is
//
//   max_{alpha >= 0}  sum_i (alpha_i - alpha_i^2 / 4)
//   s.t. sum_i alpha_i y_i = 0,  |sum_i alpha_i y_i x_ij| <= lambda  for all j
//
// which is 1/2-strongly concave; the gap between the two certifies
// solutions and sizes the safe screening sphere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace seqpat {

/// Binary n x d design stored by column: column j lists the rows (sorted,
/// unique) where feature j is 1.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::vector<std::vector<std::uint32_t>> columns;

    std::size_t cols() const noexcept { return columns.size(); }

    void validate() const {
        for (std::size_t j = 0; j < columns.size(); ++j)
            for (std::size_t k = 0; k < columns[j].size(); ++k) {
                if (columns[j][k] >= rows) throw std::invalid_argument("feature row index out of range");
                if (k && columns[j][k] <= columns[j][k - 1])
                    throw std::invalid_argument("feature rows must be sorted and unique");
            }
    }
};

struct SolverOptions {
    double tol = 1e-6;
    std::size_t max_epochs = 100000;
    /// Epochs between duality-gap evaluations.
    std::size_t gap_every = 10;
};

struct ModelSolution {
    std::vector<double> weights;  // one per feature column
    double bias = 0;
    double lambda = 0;
    double duality_gap = 0;
    double primal = 0;
    double dual = 0;
    std::size_t iterations = 0;
    bool converged = false;

    std::size_t nnz() const {
        return static_cast<std::size_t>(std::count_if(weights.begin(), weights.end(), [](double w) { return w != 0; }));
    }
};

/// A feasible dual point and the gap it certifies.
struct GapCertificate {
    double gap = 0;
    double primal = 0;
    double dual = 0;
    double max_score = 0;   // max_j |sum_i alpha_i y_i x_ij| before scaling
    double scale = 1;       // min(1, lambda / max_score)
    std::vector<double> alpha;  // feasible (centred and scaled)
};

namespace detail {

/// argmin_t  sum_k max(0, c_k - s_k t)^2 + lambda |t|,  s_k in {-1, +1}.
/// The smooth part has a nondecreasing piecewise-linear derivative, so the
/// root of the subgradient is found exactly by sweeping its breakpoints.
inline double minimize_coordinate(std::span<const double> c, std::span<const int> s, double lambda) {
    double g0 = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] > 0) g0 -= 2.0 * s[k] * c[k];
    if (std::abs(g0) <= lambda) return 0.0;
    const double dir = g0 < 0 ? 1.0 : -1.0;  // search t = dir * u, u > 0

    // On u > 0 a term k is active iff c_k - s'_k u > 0, with s' = dir * s.
    // Its derivative contribution is -2 s'_k c_k + 2u.
    double a = lambda;  // G(u) = a + 2 n u
    std::size_t n = 0;
    // (position, +1 activates / -1 deactivates); usually only a few lie
    // before the root, so they are popped from a heap rather than sorted
    thread_local std::vector<std::pair<double, int>> events;
    events.clear();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double sk = dir * s[k];
        if (sk > 0) {
            if (c[k] > 0) {
                a -= 2.0 * c[k];
                ++n;
                events.emplace_back(c[k], -static_cast<int>(k) - 1);
            }
        } else {
            if (c[k] >= 0) {
                a += 2.0 * c[k];
                ++n;
            } else {
                events.emplace_back(-c[k], static_cast<int>(k) + 1);
            }
        }
    }
    constexpr auto later = std::greater<std::pair<double, int>>{};
    std::make_heap(events.begin(), events.end(), later);
    double cur = 0;
    for (auto end = events.end(); end != events.begin(); --end) {
        std::pop_heap(events.begin(), end, later);
        const auto [pos, tag] = *(end - 1);
        if (n > 0) {
            const double root = -a / (2.0 * static_cast<double>(n));
            if (root <= pos) return dir * std::max(root, cur);
        }
        const std::size_t k = static_cast<std::size_t>(std::abs(tag) - 1);
        if (tag < 0) {
            a += 2.0 * c[k];
            --n;
        } else {
            a += 2.0 * c[k];
            ++n;
        }
        cur = pos;
    }
    if (n == 0) return dir * cur;
    return dir * std::max(-a / (2.0 * static_cast<double>(n)), cur);
}

/// Euclidean projection of alpha >= 0 onto {alpha >= 0, sum alpha_i y_i = 0}:
/// alpha_i <- max(0, alpha_i - tau y_i) for the tau that balances the classes.
inline void center_dual(std::vector<double>& alpha, std::span<const int> y) {
    double h0 = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) h0 += alpha[i] * y[i];
    if (h0 == 0) return;
    const int dir = h0 > 0 ? 1 : -1;  // shift the over-weighted class down
    // h(u) = sum_{major, alpha > u} (alpha - u) - sum_{minor} (alpha + u), u >= 0
    std::vector<double> major;
    double minor_sum = 0;
    std::size_t minor_count = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (y[i] == dir) major.push_back(alpha[i]);
        else {
            minor_sum += alpha[i];
            ++minor_count;
        }
    }
    std::sort(major.begin(), major.end());
    // sweep segments [major[k-1], major[k]]; active majors are those above
    double upper_sum = std::accumulate(major.begin(), major.end(), 0.0);
    std::size_t upper_count = major.size();
    double lo = 0, tau = 0;
    std::size_t k = 0;
    while (k < major.size() && major[k] <= 0) {
        upper_sum -= major[k];
        --upper_count;
        ++k;
    }
    bool found = false;
    for (; k <= major.size(); ++k) {
        const double hi = k < major.size() ? major[k] : INFINITY;
        const double denom = static_cast<double>(upper_count + minor_count);
        if (denom > 0) {
            const double root = (upper_sum - minor_sum) / denom;
            if (root <= hi) {
                tau = std::max(root, lo);
                found = true;
                break;
            }
        }
        if (k < major.size()) {
            upper_sum -= major[k];
            --upper_count;
            lo = hi;
        }
    }
    if (!found) tau = lo;
    for (std::size_t i = 0; i < alpha.size(); ++i) alpha[i] = std::max(0.0, alpha[i] - tau * dir * y[i]);
}

/// alpha_i = 2 max(0, 1 - y_i f_i), centred onto sum alpha_i y_i = 0.
inline std::vector<double> centered_dual(std::span<const double> f, std::span<const int> y) {
    std::vector<double> alpha(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) alpha[i] = 2.0 * std::max(0.0, 1.0 - y[i] * f[i]);
    center_dual(alpha, y);
    return alpha;
}

inline double column_score(const std::vector<std::uint32_t>& col, std::span<const double> alpha, std::span<const int> y) {
    double s = 0;
    for (auto i : col) s += alpha[i] * y[i];
    return s;
}

inline double loss(std::span<const double> f, std::span<const int> y) {
    double l = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double m = std::max(0.0, 1.0 - y[i] * f[i]);
        l += m * m;
    }
    return l;
}

inline double l1_norm(std::span<const double> w) {
    double s = 0;
    for (double v : w) s += std::abs(v);
    return s;
}

inline std::vector<double> decision_values(const FeatureMatrix& x, std::span<const double> w, double b) {
    std::vector<double> f(x.rows, b);
    for (std::size_t j = 0; j < x.cols(); ++j)
        if (w[j] != 0)
            for (auto i : x.columns[j]) f[i] += w[j];
    return f;
}

/// Scales a centred alpha into the dual feasible set given the largest
/// feature score and evaluates the gap against `primal`.
inline GapCertificate certify(std::vector<double> alpha, double max_score, double primal, double lambda) {
    GapCertificate cert;
    cert.primal = primal;
    cert.max_score = max_score;
    cert.scale = max_score > lambda ? lambda / max_score : 1.0;
    double dual = 0;
    for (auto& a : alpha) {
        a *= cert.scale;
        dual += a - a * a / 4.0;
    }
    cert.dual = dual;
    cert.gap = std::max(0.0, primal - dual);
    cert.alpha = std::move(alpha);
    return cert;
}

inline void check_labels(std::span<const int> y) {
    for (int v : y)
        if (v != 1 && v != -1) throw std::invalid_argument("labels must be +1 or -1");
}

/// Coordinate-descent state over a fixed set of columns. Margins
/// m_i = 1 - y_i f_i are kept incrementally and refreshed on demand.
class CoordinateDescent {
public:
    CoordinateDescent(const FeatureMatrix& x, std::span<const int> y, double lambda, std::vector<double> w, double b)
        : x_(x), y_(y), lambda_(lambda), w_(std::move(w)), b_(b) {
        refresh();
    }

    void refresh() {
        const auto f = decision_values(x_, w_, b_);
        margins_.resize(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) margins_[i] = 1.0 - y_[i] * f[i];
    }

    void epoch() {
        for (std::size_t j = 0; j < x_.cols(); ++j) {
            const auto& col = x_.columns[j];
            if (col.empty()) continue;
            c_.resize(col.size());
            s_.resize(col.size());
            for (std::size_t k = 0; k < col.size(); ++k) {
                const auto i = col[k];
                c_[k] = margins_[i] + y_[i] * w_[j];
                s_[k] = y_[i];
            }
            const double t = minimize_coordinate(c_, s_, lambda_);
            const double delta = t - w_[j];
            if (delta == 0) continue;
            w_[j] = t;
            for (auto i : col) margins_[i] -= y_[i] * delta;
        }
        c_.resize(margins_.size());
        for (std::size_t i = 0; i < margins_.size(); ++i) c_[i] = margins_[i] + y_[i] * b_;
        const double nb = minimize_coordinate(c_, y_, 0.0);
        const double delta = nb - b_;
        if (delta != 0) {
            b_ = nb;
            for (std::size_t i = 0; i < margins_.size(); ++i) margins_[i] -= y_[i] * delta;
        }
    }

    std::vector<double> decision() const { return decision_values(x_, w_, b_); }
    double primal() const { return loss(decision(), y_) + lambda_ * l1_norm(w_); }

    const std::vector<double>& weights() const noexcept { return w_; }
    double bias() const noexcept { return b_; }

private:
    const FeatureMatrix& x_;
    std::span<const int> y_;
    double lambda_;
    std::vector<double> w_;
    double b_;
    std::vector<double> margins_;
    std::vector<double> c_;
    std::vector<int> s_;
};

}  // namespace detail

/// Minimizer of sum_i max(0, 1 - y_i b)^2; equals the label mean when both
/// classes are present.
inline double intercept_only_bias(std::span<const int> y) {
    detail::check_labels(y);
    std::vector<double> ones(y.size(), 1.0);
    return detail::minimize_coordinate(ones, y, 0.0);
}

/// Smallest lambda at which w = 0 is optimal.
inline double lambda_max(const FeatureMatrix& x, std::span<const int> y) {
    detail::check_labels(y);
    if (std::all_of(x.columns.begin(), x.columns.end(), [](const auto& c) { return c.empty(); }))
        throw std::invalid_argument("lambda_max requires at least one nonempty feature column");
    const double b = intercept_only_bias(y);
    std::vector<double> alpha(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) alpha[i] = 2.0 * std::max(0.0, 1.0 - y[i] * b);
    double best = 0;
    for (const auto& col : x.columns) best = std::max(best, std::abs(detail::column_score(col, alpha, y)));
    return best;
}

/// Primal objective, a feasible dual point built from the residuals, and the
/// gap between them.
inline GapCertificate duality_gap(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b,
                                  double lambda) {
    const auto f = detail::decision_values(x, w, b);
    auto alpha = detail::centered_dual(f, y);
    double max_score = 0;
    for (const auto& col : x.columns) max_score = std::max(max_score, std::abs(detail::column_score(col, alpha, y)));
    return detail::certify(std::move(alpha), max_score, detail::loss(f, y) + lambda * detail::l1_norm(w), lambda);
}

/// Solves to gap <= tol * max(1, primal). Warm-starts from `init` when given,
/// otherwise from w = 0 and the intercept-only bias. Hitting max_epochs
/// returns the last iterate with converged = false.
inline ModelSolution solve(const FeatureMatrix& x, std::span<const int> y, double lambda,
                           const std::optional<ModelSolution>& init = std::nullopt, const SolverOptions& opt = {}) {
    if (!(lambda > 0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive and finite");
    if (!(opt.tol > 0)) throw std::invalid_argument("tol must be positive");
    if (y.size() != x.rows) throw std::invalid_argument("label count does not match feature rows");
    detail::check_labels(y);
    x.validate();

    std::vector<double> w(x.cols(), 0.0);
    double b = intercept_only_bias(y);
    if (init) {
        if (init->weights.size() != x.cols()) throw std::invalid_argument("warm start has wrong dimension");
        for (double v : init->weights)
            if (!std::isfinite(v)) throw std::invalid_argument("warm start weights must be finite");
        if (!std::isfinite(init->bias)) throw std::invalid_argument("warm start bias must be finite");
        w = init->weights;
        b = init->bias;
    }

    detail::CoordinateDescent cd(x, y, lambda, std::move(w), b);
    ModelSolution sol;
    sol.lambda = lambda;
    const std::size_t every = std::max<std::size_t>(1, opt.gap_every);
    for (std::size_t epoch = 0;; ++epoch) {
        if (epoch % every == 0 || epoch == opt.max_epochs) {
            cd.refresh();
            const auto cert = duality_gap(x, y, cd.weights(), cd.bias(), lambda);
            sol.duality_gap = cert.gap;
            sol.primal = cert.primal;
            sol.dual = cert.dual;
            sol.iterations = epoch;
            if (cert.gap <= opt.tol * std::max(1.0, cert.primal)) {
                sol.converged = true;
                break;
            }
            if (epoch == opt.max_epochs) break;
        }
        cd.epoch();
    }
    sol.weights = cd.weights();
    sol.bias = cd.bias();
    return sol;
}

}  // namespace seqpat
