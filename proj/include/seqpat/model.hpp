#pragma once

// A trained sparse linear model over patterns:
//   f(g) = b + sum_j w_j [q_j is contained in g]

#include <vector>

#include "core.hpp"

namespace seqpat {

struct PatternModel {
    std::vector<Pattern> patterns;
    std::vector<double> weights;
    double bias = 0;
    double lambda = 0;

    double decision(const Sequence& s) const {
        double f = bias;
        for (std::size_t j = 0; j < patterns.size(); ++j)
            if (weights[j] != 0 && contains(patterns[j].events, s.events)) f += weights[j];
        return f;
    }

    /// sign(f), with sign(0) = +1.
    int predict(const Sequence& s) const { return decision(s) >= 0 ? 1 : -1; }

    std::size_t nnz() const {
        std::size_t k = 0;
        for (double w : weights) k += w != 0 ? 1 : 0;
        return k;
    }
};

}  // namespace seqpat
