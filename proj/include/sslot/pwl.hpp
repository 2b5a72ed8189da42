#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace sslot {

/// Convex piecewise-linear function of one variable on an interval domain
/// (possibly unbounded). Outside the domain the value is +infinity.
class ConvexPwl {
  public:
    ConvexPwl() : ConvexPwl(linear(0.0, 0.0)) {}

    static ConvexPwl linear(double slope, double intercept);
    /// Interpolates (xs[k], values[k]) with the given outer slopes. xs must be
    /// strictly increasing and non-empty.
    static ConvexPwl interpolate(std::vector<double> xs, std::vector<double> values,
                                 double left_slope, double right_slope);

    double operator()(double x) const;
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    const std::vector<double> &breakpoints() const { return xs_; }

    ConvexPwl &operator+=(const ConvexPwl &other);
    ConvexPwl &add_linear(double slope, double intercept);
    ConvexPwl &scale(double factor);
    /// x -> f(x - dx).
    ConvexPwl shifted(double dx) const;
    ConvexPwl restricted(double lo, double hi) const;
    /// z -> min over z' >= z of f(z').
    ConvexPwl suffix_min() const;

    struct Minimum {
        double x;
        double value;
    };
    /// Smallest finite minimiser. Throws SolverError when unbounded below.
    Minimum minimum(double slope_tolerance = 1e-12) const;

    /// Closed interval where f <= level, or nothing when it is empty.
    std::optional<std::pair<double, double>> sublevel(double level) const;

  private:
    ConvexPwl(std::vector<double> xs, std::vector<double> vs, std::vector<double> slopes,
              double lo, double hi)
        : xs_(std::move(xs)), vs_(std::move(vs)), slopes_(std::move(slopes)), lo_(lo), hi_(hi) {}

    // slopes_[0] is left of xs_[0], slopes_[k] between xs_[k-1] and xs_[k],
    // slopes_.back() right of the last breakpoint.
    std::vector<double> xs_;
    std::vector<double> vs_;
    std::vector<double> slopes_;
    double lo_;
    double hi_;

    double slope_at(double x) const;
};

}  // namespace sslot
