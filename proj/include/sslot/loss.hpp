#pragma once

#include <vector>

namespace sslot {

double normal_pdf(double z);
double normal_cdf(double z);
/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// First order loss E[max(w - x, 0)] for w ~ N(mean, std_dev^2). A zero
/// std_dev gives the deterministic value max(mean - x, 0).
double loss(double x, double mean, double std_dev);

/// Complementary first order loss E[max(x - w, 0)]; equals
/// x - mean + loss(x, mean, std_dev).
double complementary_loss(double x, double mean, double std_dev);

enum class PartitionStrategy {
    equal_probability,
    /// Cell boundaries chosen so every cell contributes the same maximal
    /// Jensen gap, which minimises the overall approximation error.
    minimax,
};

/// Partition of the standard normal support into consecutive cells.
struct Partition {
    std::vector<double> probabilities;      // p_i
    std::vector<double> conditional_means;  // E[Z | cell i]
    std::vector<double> boundaries;         // interior boundaries, size segments()-1

    int segments() const { return static_cast<int>(probabilities.size()); }
};

Partition make_partition(int segments,
                         PartitionStrategy strategy = PartitionStrategy::equal_probability);

/// Checks the Partition invariants (probabilities sum to one, increasing
/// conditional means, zero overall mean). Throws ValidationError.
void validate(const Partition &partition);

/// Maximal gap, for the standard normal, between the complementary loss and
/// its Jensen lower bound built on `partition`.
double approximation_error(const Partition &partition);

/// Piecewise-linear approximation of complementary_loss(x, mean, std_dev) in
/// the slope/breakpoint/anchor form of an OPL `piecewise` expression.
///
/// With N cells there are N breakpoints (the conditional means, scaled) and
/// N + 1 slopes rising from 0 to 1. `lower` is the Jensen lower bound, and
/// `upper` = `lower` + `error_bound` over-estimates the true loss everywhere.
/// The penalty side (expected back-orders) is `upper(x) - (x - mean)`, whose
/// slopes are {-1 + l_i}.
struct PiecewiseLoss {
    std::vector<double> slopes;
    std::vector<double> breakpoints;
    std::vector<double> probabilities;
    double mean = 0.0;
    double std_dev = 0.0;
    /// Value of the upper approximation at x = mean, from the closed form
    /// for symmetric partitions.
    double anchor_value = 0.0;
    /// e_W scaled to the units of the random variable.
    double error_bound = 0.0;

    int segments() const { return static_cast<int>(slopes.size()); }

    double lower(double x) const;
    double upper(double x) const { return lower(x) + error_bound; }
    double upper_penalty(double x) const { return upper(x) - (x - mean); }

    /// Evaluates the upper approximation the way `piecewise` does: start at
    /// the anchor and integrate the slopes.
    double evaluate_from_anchor(double x) const;

    /// Intercepts a_i such that upper(x) = max_i(slopes[i] * x + a_i).
    std::vector<double> intercepts() const;
};

PiecewiseLoss piecewise_loss(const Partition &partition, double mean, double std_dev);
/// Same, with approximation_error(partition) supplied by the caller.
PiecewiseLoss piecewise_loss(const Partition &partition, double mean, double std_dev,
                             double e_w);

/// Anchor value at the mean for a standard normal and a symmetric partition,
/// before the error shift (the odd/even closed form).
double symmetric_anchor(const Partition &partition);

}  // namespace sslot
