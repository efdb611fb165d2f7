#pragma once

// Repeated stratified k-fold cross-validation over a lambda grid.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "core.hpp"
#include "model.hpp"
#include "parallel.hpp"

namespace seqpat {

struct CvConfig {
    std::size_t folds = 10;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (folds < 2) throw std::invalid_argument("folds must be >= 2");
        if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
    }
};

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Stratified partition into cfg.folds folds; deterministic in (seed, repeat).
/// Each class is shuffled and dealt round-robin, so per-fold class counts
/// differ by at most one.
inline std::vector<Fold> make_folds(std::span<const int> labels, const CvConfig& cfg, std::size_t repeat) {
    cfg.validate();
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] > 0 ? pos : neg).push_back(i);
    for (const auto* cls : {&pos, &neg})
        if (cls->size() < cfg.folds)
            throw std::invalid_argument("a class has " + std::to_string(cls->size()) + " examples but " +
                                        std::to_string(cfg.folds) + " folds were requested; use fewer folds");
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(repeat)};
    std::mt19937_64 rng(seq);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    std::vector<std::size_t> fold_of(labels.size());
    // negatives continue the deal where positives stopped to even out fold sizes
    std::size_t k = 0;
    for (auto i : pos) fold_of[i] = k++ % cfg.folds;
    for (auto i : neg) fold_of[i] = k++ % cfg.folds;

    std::vector<Fold> folds(cfg.folds);
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t f = 0; f < cfg.folds; ++f) (f == fold_of[i] ? folds[f].validation : folds[f].train).push_back(i);
    return folds;
}

inline LabeledDataset subset(const LabeledDataset& data, std::span<const std::size_t> idx) {
    LabeledDataset out;
    if (data.labels) out.labels.emplace();
    for (auto i : idx) {
        out.sequences.push_back(data.sequences[i]);
        if (data.labels) out.labels->push_back((*data.labels)[i]);
    }
    return out;
}

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    double accuracy() const { return total() ? static_cast<double>(tp + tn) / static_cast<double>(total()) : 0.0; }

    Confusion& operator+=(const Confusion& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }
};

inline Confusion confusion(const PatternModel& model, const LabeledDataset& slice) {
    const auto& y = slice.label_vector();
    Confusion c;
    for (std::size_t i = 0; i < slice.size(); ++i) {
        const int p = model.predict(slice.sequences[i]);
        if (p > 0) (y[i] > 0 ? c.tp : c.fp)++;
        else (y[i] < 0 ? c.tn : c.fn)++;
    }
    return c;
}

/// Fraction of sequences with sign(f) = y (sign(0) counts as +1).
inline double evaluate(const PatternModel& model, const LabeledDataset& slice) {
    return confusion(model, slice).accuracy();
}

struct CvRow {
    double lambda = 0;
    double mean_acc = 0;
    double std_acc = 0;
    double mean_nnz = 0;
    Confusion confusion;  // summed over all validation folds
};

struct CvTable {
    std::vector<CvRow> rows;
    std::size_t best = 0;
};

/// Index of the best mean accuracy; ties go to the larger lambda (earlier row
/// of a decreasing grid).
inline std::size_t select_best(const std::vector<CvRow>& rows) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (rows[k].mean_acc > rows[best].mean_acc + 1e-12) best = k;
    return best;
}

/// Cross-validates a path fitter. `fit(train, grid)` must return one model per
/// grid value. Fold fits run on up to `threads` workers; aggregation happens
/// in (repeat, fold) order.
template <class PathFitter>
CvTable cross_validate(const LabeledDataset& data, const std::vector<double>& grid, const CvConfig& cfg,
                       PathFitter&& fit, std::size_t threads = 1) {
    cfg.validate();
    const auto& y = data.label_vector();
    std::vector<Fold> all;
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        auto f = make_folds(y, cfg, r);
        all.insert(all.end(), f.begin(), f.end());
    }
    struct FoldResult {
        std::vector<Confusion> conf;
        std::vector<std::size_t> nnz;
    };
    std::vector<FoldResult> results(all.size());
    parallel_for(all.size(), threads, [&](std::size_t k) {
        const auto train = subset(data, all[k].train);
        const auto valid = subset(data, all[k].validation);
        const std::vector<PatternModel> models = fit(train, grid);
        if (models.size() != grid.size()) throw std::logic_error("path fitter returned the wrong number of models");
        auto& out = results[k];
        for (const auto& m : models) {
            out.conf.push_back(confusion(m, valid));
            out.nnz.push_back(m.nnz());
        }
    });

    CvTable table;
    const double count = static_cast<double>(all.size());
    for (std::size_t l = 0; l < grid.size(); ++l) {
        CvRow row;
        row.lambda = grid[l];
        double sum = 0, nnz = 0;
        for (const auto& r : results) {
            sum += r.conf[l].accuracy();
            nnz += static_cast<double>(r.nnz[l]);
            row.confusion += r.conf[l];
        }
        row.mean_acc = sum / count;
        row.mean_nnz = nnz / count;
        double ss = 0;
        for (const auto& r : results) ss += (r.conf[l].accuracy() - row.mean_acc) * (r.conf[l].accuracy() - row.mean_acc);
        row.std_acc = all.size() > 1 ? std::sqrt(ss / (count - 1)) : 0.0;
        table.rows.push_back(row);
    }
    table.best = select_best(table.rows);
    return table;
}

/// lambda, mean_acc, std_acc, mean_nnz, then the summed confusion counts.
inline void write_cv_table(std::ostream& out, const CvTable& table) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "lambda,mean_acc,std_acc,mean_nnz,tp,fp,tn,fn,selected\n";
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& r = table.rows[k];
        out << num(r.lambda) << ',' << num(r.mean_acc) << ',' << num(r.std_acc) << ',' << num(r.mean_nnz) << ','
            << r.confusion.tp << ',' << r.confusion.fp << ',' << r.confusion.tn << ',' << r.confusion.fn << ','
            << (k == table.best ? 1 : 0) << '\n';
    }
}

}  // namespace seqpat
