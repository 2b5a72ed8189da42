#include "sslot/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "sslot/core.hpp"

namespace sslot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Partial expectation E[Z; a < Z < b] for the standard normal.
double partial_mean(double a, double b) { return normal_pdf(a) - normal_pdf(b); }

double cell_probability(double a, double b) {
    // Use the upper tail on the right half to keep precision.
    if (a >= 0.0) return normal_cdf(-a) - normal_cdf(-b);
    return normal_cdf(b) - normal_cdf(a);
}

// Jensen gap contributed by the cell (a, b) at its own conditional mean:
// p * E[max(X - Z, 0) | a < Z < b] with X the conditional mean.
double cell_gap(double a, double b) {
    const double p = cell_probability(a, b);
    const double x = partial_mean(a, b) / p;
    return x * (normal_cdf(x) - normal_cdf(a)) + normal_pdf(x) - normal_pdf(a);
}

Partition from_boundaries(std::vector<double> boundaries) {
    Partition out;
    out.boundaries = std::move(boundaries);
    const int n = static_cast<int>(out.boundaries.size()) + 1;
    for (int i = 0; i < n; ++i) {
        const double a = i == 0 ? -kInf : out.boundaries[i - 1];
        const double b = i == n - 1 ? kInf : out.boundaries[i];
        const double p = cell_probability(a, b);
        out.probabilities.push_back(p);
        out.conditional_means.push_back(partial_mean(a, b) / p);
    }
    return out;
}

// Walks left to right placing each boundary so that the cell gap equals
// `target`; returns the gap left over for the final (right tail) cell.
double place_boundaries(int segments, double target, std::vector<double> &boundaries) {
    boundaries.clear();
    double a = -kInf;
    for (int i = 0; i + 1 < segments; ++i) {
        double lo = std::isinf(a) ? -12.0 : a;
        double hi = 12.0;
        if (cell_gap(a, hi) < target) {
            boundaries.push_back(hi);
            a = hi;
            continue;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (cell_gap(a, mid) < target ? lo : hi) = mid;
        }
        a = 0.5 * (lo + hi);
        boundaries.push_back(a);
    }
    return cell_gap(a, kInf);
}

Partition minimax_partition(int segments) {
    std::vector<double> boundaries;
    double lo = 0.0;
    double hi = cell_gap(-kInf, kInf);
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double target = 0.5 * (lo + hi);
        const double last = place_boundaries(segments, target, boundaries);
        (last > target ? lo : hi) = target;
    }
    place_boundaries(segments, hi, boundaries);
    // The optimum is symmetric; average mirrored boundaries to remove the
    // residual drift of the left-to-right sweep.
    const std::size_t m = boundaries.size();
    for (std::size_t i = 0; i < m / 2; ++i) {
        const double half = 0.5 * (boundaries[m - 1 - i] - boundaries[i]);
        boundaries[i] = -half;
        boundaries[m - 1 - i] = half;
    }
    if (m % 2 == 1) boundaries[m / 2] = 0.0;
    return from_boundaries(std::move(boundaries));
}

double jensen_standard(const Partition &partition, double z) {
    double value = 0.0;
    for (int i = 0; i < partition.segments(); ++i) {
        value += partition.probabilities[i] * std::max(z - partition.conditional_means[i], 0.0);
    }
    return value;
}

}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal_quantile: p must lie in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double loss(double x, double mean, double std_dev) {
    if (std_dev == 0.0) return std::max(mean - x, 0.0);
    const double z = (x - mean) / std_dev;
    return std_dev * (normal_pdf(z) - z * normal_cdf(-z));
}

double complementary_loss(double x, double mean, double std_dev) {
    if (std_dev == 0.0) return std::max(x - mean, 0.0);
    const double z = (x - mean) / std_dev;
    return std_dev * (normal_pdf(z) + z * normal_cdf(z));
}

Partition make_partition(int segments, PartitionStrategy strategy) {
    if (segments < 2) throw ValidationError("a partition needs at least 2 segments");
    if (strategy == PartitionStrategy::minimax) return minimax_partition(segments);
    std::vector<double> boundaries;
    for (int i = 1; i < segments; ++i) {
        boundaries.push_back(normal_quantile(static_cast<double>(i) / segments));
    }
    // Exact symmetry about zero.
    const std::size_t m = boundaries.size();
    for (std::size_t i = 0; i < m / 2; ++i) boundaries[m - 1 - i] = -boundaries[i];
    if (m % 2 == 1) boundaries[m / 2] = 0.0;
    Partition out = from_boundaries(std::move(boundaries));
    std::fill(out.probabilities.begin(), out.probabilities.end(), 1.0 / segments);
    return out;
}

void validate(const Partition &partition) {
    const int n = partition.segments();
    if (n < 2) throw ValidationError("partition: fewer than 2 segments");
    if (static_cast<int>(partition.conditional_means.size()) != n) {
        throw ValidationError("partition: conditional means do not match probabilities");
    }
    double total = 0.0;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(partition.probabilities[i] > 0.0)) {
            throw ValidationError("partition: non-positive cell probability");
        }
        if (i > 0 && !(partition.conditional_means[i] > partition.conditional_means[i - 1])) {
            throw ValidationError("partition: conditional means not strictly increasing");
        }
        total += partition.probabilities[i];
        mean += partition.probabilities[i] * partition.conditional_means[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("partition: probabilities do not sum to 1");
    if (std::abs(mean) > 1e-9) throw ValidationError("partition: overall mean is not zero");
}

double approximation_error(const Partition &partition) {
    double worst = 0.0;
    auto probe = [&](double z) {
        worst = std::max(worst, complementary_loss(z, 0.0, 1.0) - jensen_standard(partition, z));
    };
    constexpr int kGrid = 10001;
    for (int i = 0; i < kGrid; ++i) probe(-8.0 + 16.0 * i / (kGrid - 1));
    // The gap is convex between consecutive breakpoints, so its maximum sits
    // on a breakpoint.
    for (double x : partition.conditional_means) probe(x);
    return worst;
}

double symmetric_anchor(const Partition &partition) {
    const int n = partition.segments();
    const int w = n - 1;
    auto head = [&](int count) {
        double s = 0.0;
        for (int k = 0; k < count; ++k) {
            s += partition.probabilities[k] * partition.conditional_means[k];
        }
        return s;
    };
    if (w % 2 == 1) return -head((w + 1) / 2);
    return -0.5 * (head(w / 2) + head(w / 2 + 1));
}

PiecewiseLoss piecewise_loss(const Partition &partition, double mean, double std_dev) {
    return piecewise_loss(partition, mean, std_dev, approximation_error(partition));
}

PiecewiseLoss piecewise_loss(const Partition &partition, double mean, double std_dev,
                             double e_w) {
    if (std_dev < 0.0) throw ValidationError("piecewise_loss: negative std_dev");
    PiecewiseLoss out;
    out.mean = mean;
    out.std_dev = std_dev;
    if (std_dev == 0.0) {
        out.slopes = {0.0, 1.0};
        out.breakpoints = {mean};
        out.probabilities = {1.0};
        return out;
    }
    const int n = partition.segments();
    out.probabilities = partition.probabilities;
    double slope = 0.0;
    out.slopes.push_back(0.0);
    for (int i = 0; i < n; ++i) {
        out.breakpoints.push_back(mean + std_dev * partition.conditional_means[i]);
        slope += partition.probabilities[i];
        out.slopes.push_back(i + 1 == n ? 1.0 : slope);
    }
    out.error_bound = std_dev * e_w;
    out.anchor_value = std_dev * (symmetric_anchor(partition) + e_w);
    return out;
}

double PiecewiseLoss::lower(double x) const {
    double value = 0.0;
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        value += probabilities[i] * std::max(x - breakpoints[i], 0.0);
    }
    return value;
}

double PiecewiseLoss::evaluate_from_anchor(double x) const {
    // Integrate slopes between the anchor and x.
    auto integral_to = [&](double to) {
        double acc = 0.0;
        double left = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i <= breakpoints.size(); ++i) {
            const double right =
                i < breakpoints.size() ? breakpoints[i] : std::numeric_limits<double>::infinity();
            const double lo = std::max(left, std::min(mean, to));
            const double hi = std::min(right, std::max(mean, to));
            if (hi > lo) acc += slopes[i] * (hi - lo);
            left = right;
        }
        return to >= mean ? acc : -acc;
    };
    return anchor_value + integral_to(x);
}

std::vector<double> PiecewiseLoss::intercepts() const {
    // Segment i passes through (breakpoints[i-1], lower) and has slope
    // slopes[i]; the leftmost is flat at zero.
    std::vector<double> out(slopes.size());
    out[0] = error_bound;
    for (std::size_t i = 1; i < slopes.size(); ++i) {
        const double x = breakpoints[i - 1];
        out[i] = lower(x) + error_bound - slopes[i] * x;
    }
    return out;
}

}  // namespace sslot
