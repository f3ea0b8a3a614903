#pragma once

// Textbook Welch / Cohen formulas, with the t tail from Boost. Kept separate
// from the library's own incomplete-beta implementation.

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <vector>

namespace stats_oracle {

struct Result {
    double t, df, p, d;
};

inline double mean(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

inline double var(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

// Both samples need at least two values and a nonzero combined variance.
inline Result welch_cohen(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = var(a), vb = var(b);
    const double se2 = va / na + vb / nb;
    const double t = (mean(a) - mean(b)) / std::sqrt(se2);
    const double df = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
    const boost::math::students_t dist(df);
    const double p = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
    const double pooled = std::sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2));
    return {t, df, p, (mean(a) - mean(b)) / pooled};
}

}  // namespace stats_oracle
