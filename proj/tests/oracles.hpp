#pragma once

// Slow reference implementations used only by tests. None of these call into
// the library routines they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "seqpat/core.hpp"
#include "seqpat/solver.hpp"

namespace oracle {

using seqpat::EventId;
using seqpat::EventList;
using seqpat::LabeledDataset;

/// Tries every strictly increasing index tuple.
inline bool contains(const EventList& q, const EventList& g) {
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t from) {
        if (k == q.size()) return true;
        for (std::size_t t = from; t < g.size(); ++t)
            if (g[t] == q[k] && rec(k + 1, t + 1)) return true;
        return false;
    };
    return rec(0, 0);
}

/// Every distinct subsequence of every sequence (length 1..max_len) with its
/// document support, found by expanding index subsets.
inline std::map<EventList, std::size_t> all_subsequences(const LabeledDataset& data, std::size_t max_len) {
    std::map<EventList, std::size_t> out;
    for (const auto& s : data.sequences) {
        std::set<EventList> mine;
        const auto& g = s.events;
        EventList cur;
        std::function<void(std::size_t)> rec = [&](std::size_t from) {
            if (!cur.empty()) mine.insert(cur);
            if (cur.size() == max_len) return;
            for (std::size_t t = from; t < g.size(); ++t) {
                cur.push_back(g[t]);
                rec(t + 1);
                cur.pop_back();
            }
        };
        rec(0);
        for (const auto& p : mine) ++out[p];
    }
    return out;
}

struct Stats {
    double mean, std, min, p25, median, p75, max, skew;
};

/// Textbook formulas; quantiles by the (n-1)p rank rule written out by hand.
inline Stats stats(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double mean = 0;
    for (double v : x) mean += v / n;
    double s2 = 0, s3 = 0;
    for (double v : x) {
        s2 += std::pow(v - mean, 2);
        s3 += std::pow(v - mean, 3);
    }
    auto q = [&](double p) {
        const double h = (n - 1) * p;
        const double lo = std::floor(h);
        const double hi = std::ceil(h);
        return x[static_cast<std::size_t>(lo)] + (h - lo) * (x[static_cast<std::size_t>(hi)] - x[static_cast<std::size_t>(lo)]);
    };
    double skew = 0;
    if (x.size() > 2 && s2 > 0) {
        const double sd = std::sqrt(s2 / (n - 1));
        skew = n / ((n - 1) * (n - 2)) * s3 / std::pow(sd, 3);
    }
    return {mean, x.size() > 1 ? std::sqrt(s2 / (n - 1)) : 0.0, x.front(), q(0.25), q(0.5), q(0.75), x.back(), skew};
}

inline LabeledDataset random_dataset(std::mt19937_64& rng, std::size_t n_max, int alphabet, std::size_t len_max,
                                     bool labeled) {
    std::uniform_int_distribution<std::size_t> nd(1, n_max), ld(1, len_max);
    std::uniform_int_distribution<int> ed(1, alphabet);
    LabeledDataset d;
    const std::size_t n = nd(rng);
    for (std::size_t i = 0; i < n; ++i) {
        seqpat::Sequence s;
        const auto len = ld(rng);
        for (std::size_t t = 0; t < len; ++t) s.events.push_back(ed(rng));
        d.sequences.push_back(s);
    }
    if (labeled) {
        d.labels.emplace();
        for (std::size_t i = 0; i < n; ++i) d.labels->push_back(rng() % 2 ? 1 : -1);
    }
    return d;
}

/// Labeled instance with at least two examples of each class.
inline LabeledDataset random_labeled(std::mt19937_64& rng, std::size_t n_max, int alphabet, std::size_t len_max) {
    for (;;) {
        auto d = random_dataset(rng, n_max, alphabet, len_max, true);
        if (d.n_positive() >= 2 && d.n_negative() >= 2) return d;
    }
}

inline double objective(const seqpat::FeatureMatrix& x, const std::vector<int>& y, const std::vector<double>& w,
                        double b, double lambda) {
    std::vector<double> f(x.rows, b);
    for (std::size_t j = 0; j < x.cols(); ++j)
        for (auto i : x.columns[j]) f[i] += w[j];
    double p = 0;
    for (std::size_t i = 0; i < f.size(); ++i) p += std::pow(std::max(0.0, 1.0 - y[i] * f[i]), 2);
    for (double v : w) p += lambda * std::abs(v);
    return p;
}

struct Fit {
    std::vector<double> w;
    double b;
    double objective;
};

/// Accelerated proximal gradient (FISTA with restart) on the full problem.
inline Fit proximal_gradient(const seqpat::FeatureMatrix& x, const std::vector<int>& y, double lambda,
                             std::size_t iters = 200000) {
    const std::size_t d = x.cols(), n = x.rows;
    // Lipschitz constant of the smooth gradient: 2 * ||[X 1]||_F^2 is an upper bound on 2 sigma_max^2
    double fro = static_cast<double>(n);
    for (const auto& c : x.columns) fro += static_cast<double>(c.size());
    const double step = 1.0 / (2.0 * fro);
    std::vector<double> w(d, 0.0), wz = w, wprev = w;
    double b = 0, bz = 0, bprev = 0, t = 1;
    auto grad = [&](const std::vector<double>& ww, double bb, std::vector<double>& gw, double& gb) {
        std::vector<double> f(n, bb);
        for (std::size_t j = 0; j < d; ++j)
            for (auto i : x.columns[j]) f[i] += ww[j];
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = -2.0 * y[i] * std::max(0.0, 1.0 - y[i] * f[i]);
        gw.assign(d, 0.0);
        for (std::size_t j = 0; j < d; ++j)
            for (auto i : x.columns[j]) gw[j] += r[i];
        gb = 0;
        for (double v : r) gb += v;
    };
    std::vector<double> gw;
    double gb;
    double prev_obj = objective(x, y, w, b, lambda);
    for (std::size_t it = 0; it < iters; ++it) {
        grad(wz, bz, gw, gb);
        wprev = w;
        bprev = b;
        for (std::size_t j = 0; j < d; ++j) {
            const double u = wz[j] - step * gw[j];
            w[j] = std::copysign(std::max(0.0, std::abs(u) - step * lambda), u);
        }
        b = bz - step * gb;
        const double obj = objective(x, y, w, b, lambda);
        double tn = (1 + std::sqrt(1 + 4 * t * t)) / 2;
        if (obj > prev_obj) tn = 1;  // restart
        const double mom = (t - 1) / tn;
        for (std::size_t j = 0; j < d; ++j) wz[j] = w[j] + mom * (w[j] - wprev[j]);
        bz = b + mom * (b - bprev);
        t = tn;
        prev_obj = obj;
    }
    return {w, b, objective(x, y, w, b, lambda)};
}

/// Plain subgradient descent with diminishing steps, tracking the best iterate.
inline double subgradient_objective(const seqpat::FeatureMatrix& x, const std::vector<int>& y, double lambda,
                                    std::size_t iters = 2000000) {
    const std::size_t d = x.cols(), n = x.rows;
    std::vector<double> w(d, 0.0);
    double b = 0;
    double best = objective(x, y, w, b, lambda);
    for (std::size_t it = 0; it < iters; ++it) {
        std::vector<double> f(n, b);
        for (std::size_t j = 0; j < d; ++j)
            for (auto i : x.columns[j]) f[i] += w[j];
        std::vector<double> gw(d, 0.0);
        double gb = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = -2.0 * y[i] * std::max(0.0, 1.0 - y[i] * f[i]);
            gb += r;
            for (std::size_t j = 0; j < d; ++j)
                if (std::binary_search(x.columns[j].begin(), x.columns[j].end(), static_cast<std::uint32_t>(i)))
                    gw[j] += r;
        }
        for (std::size_t j = 0; j < d; ++j) gw[j] += lambda * (w[j] > 0 ? 1.0 : w[j] < 0 ? -1.0 : 0.0);
        const double eta = 0.05 / std::sqrt(1.0 + static_cast<double>(it));
        for (std::size_t j = 0; j < d; ++j) w[j] -= eta * gw[j];
        b -= eta * gb;
        best = std::min(best, objective(x, y, w, b, lambda));
    }
    return best;
}

}  // namespace oracle
