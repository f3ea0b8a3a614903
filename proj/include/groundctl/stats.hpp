#pragma once

#include <optional>
#include <vector>

namespace groundctl::stats {

double mean(const std::vector<double>& xs);
// Sample standard deviation (n - 1); absent for n < 2.
std::optional<double> sample_std(const std::vector<double>& xs);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of Student's t with df degrees of freedom.
double two_sided_p(double t, double df);

struct WelchResult {
    double t = 0.0;
    std::optional<double> df;  // absent when both variances are zero
    double p = 1.0;
};

// Welch's unequal-variance t-test of a against b. Absent when either sample
// has fewer than two values. Zero variance on both sides gives t = 0, p = 1
// for equal means and t = +-inf, p = 0 otherwise.
std::optional<WelchResult> welch_t_test(const std::vector<double>& a, const std::vector<double>& b);

// (mean(a) - mean(b)) / pooled sd. Absent when the pooled sd is zero and the
// means differ, or when either sample has fewer than two values.
std::optional<double> cohens_d(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace groundctl::stats
