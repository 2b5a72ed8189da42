#include "sslot/pwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sslot/core.hpp"

namespace sslot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ConvexPwl ConvexPwl::linear(double slope, double intercept) {
    return ConvexPwl({0.0}, {intercept}, {slope, slope}, -kInf, kInf);
}

ConvexPwl ConvexPwl::interpolate(std::vector<double> xs, std::vector<double> values,
                                 double left_slope, double right_slope) {
    if (xs.empty() || xs.size() != values.size()) {
        throw ValidationError("piecewise-linear function needs matching, non-empty points");
    }
    ConvexPwl f(std::move(xs), std::move(values), {}, -kInf, kInf);
    f.slopes_.push_back(left_slope);
    for (std::size_t k = 1; k < f.xs_.size(); ++k) {
        if (!(f.xs_[k] > f.xs_[k - 1])) {
            throw ValidationError("piecewise-linear breakpoints must increase");
        }
        f.slopes_.push_back((f.vs_[k] - f.vs_[k - 1]) / (f.xs_[k] - f.xs_[k - 1]));
    }
    f.slopes_.push_back(right_slope);
    return f;
}

double ConvexPwl::slope_at(double x) const {
    const auto k = std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin();
    return slopes_[k];
}

double ConvexPwl::operator()(double x) const {
    if (x < lo_ || x > hi_) return kInf;
    const auto k = std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin();
    if (k == 0) return vs_[0] + slopes_[0] * (x - xs_[0]);
    return vs_[k - 1] + slopes_[k] * (x - xs_[k - 1]);
}

ConvexPwl &ConvexPwl::operator+=(const ConvexPwl &other) {
    const double lo = std::max(lo_, other.lo_);
    const double hi = std::min(hi_, other.hi_);
    if (lo > hi) throw SolverError("sum of piecewise-linear functions has an empty domain");
    std::vector<double> xs;
    xs.reserve(xs_.size() + other.xs_.size() + 2);
    std::merge(xs_.begin(), xs_.end(), other.xs_.begin(), other.xs_.end(),
               std::back_inserter(xs));
    if (std::isfinite(lo)) xs.push_back(lo);
    if (std::isfinite(hi)) xs.push_back(hi);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    xs.erase(std::remove_if(xs.begin(), xs.end(), [&](double x) { return x < lo || x > hi; }),
             xs.end());

    std::vector<double> vs;
    std::vector<double> slopes;
    vs.reserve(xs.size());
    slopes.reserve(xs.size() + 1);
    for (double x : xs) vs.push_back((*this)(x) + other(x));
    slopes.push_back(slopes_.front() + other.slopes_.front());
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double mid = 0.5 * (xs[k - 1] + xs[k]);
        slopes.push_back(slope_at(mid) + other.slope_at(mid));
    }
    slopes.push_back(slopes_.back() + other.slopes_.back());
    *this = ConvexPwl(std::move(xs), std::move(vs), std::move(slopes), lo, hi);
    return *this;
}

ConvexPwl &ConvexPwl::add_linear(double slope, double intercept) {
    for (std::size_t k = 0; k < xs_.size(); ++k) vs_[k] += slope * xs_[k] + intercept;
    for (double &s : slopes_) s += slope;
    return *this;
}

ConvexPwl &ConvexPwl::scale(double factor) {
    for (double &v : vs_) v *= factor;
    for (double &s : slopes_) s *= factor;
    return *this;
}

ConvexPwl ConvexPwl::shifted(double dx) const {
    ConvexPwl out = *this;
    for (double &x : out.xs_) x += dx;
    out.lo_ += dx;
    out.hi_ += dx;
    return out;
}

ConvexPwl ConvexPwl::restricted(double lo, double hi) const {
    ConvexPwl window = linear(0.0, 0.0);
    window.lo_ = lo;
    window.hi_ = hi;
    ConvexPwl out = *this;
    out += window;
    return out;
}

ConvexPwl ConvexPwl::suffix_min() const {
    // f(max(z, m)) with m the smallest minimiser; right of m f is
    // nondecreasing, so rounding noise in the slopes is clipped at zero.
    const auto m = minimum();
    std::vector<double> xs{m.x};
    std::vector<double> vs{m.value};
    std::vector<double> slopes{0.0};
    for (std::size_t k = 0; k < xs_.size(); ++k) {
        if (xs_[k] <= m.x) continue;
        slopes.push_back(std::max(0.0, slope_at(0.5 * (xs.back() + xs_[k]))));
        xs.push_back(xs_[k]);
        vs.push_back(vs_[k]);
    }
    slopes.push_back(std::max(0.0, slopes_.back()));
    return ConvexPwl(std::move(xs), std::move(vs), std::move(slopes), -kInf, hi_);
}

ConvexPwl::Minimum ConvexPwl::minimum(double tol) const {
    const std::size_t n = xs_.size();
    if (!std::isfinite(lo_) && slopes_[0] > tol) {
        throw SolverError("piecewise-linear function is unbounded below");
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (xs_[k] < lo_) continue;
        const bool at_hi = xs_[k] >= hi_;
        if (at_hi || slopes_[k + 1] >= -tol) return {xs_[k], vs_[k]};
    }
    throw SolverError("piecewise-linear function is unbounded below");
}

std::optional<std::pair<double, double>> ConvexPwl::sublevel(double level) const {
    const auto m = minimum();
    if (m.value > level) return std::nullopt;
    const auto first = std::lower_bound(xs_.begin(), xs_.end(), m.x) - xs_.begin();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(xs_.size());

    double left = -kInf;
    {
        std::ptrdiff_t k = first;
        while (k > 0 && vs_[k - 1] <= level) --k;
        if (k > 0) {
            left = xs_[k] - (vs_[k] - level) / slopes_[k];
            left = std::clamp(left, xs_[k - 1], xs_[k]);
        } else if (std::isfinite(lo_) && xs_[0] <= lo_) {
            left = lo_;
        } else if (slopes_[0] < 0.0) {
            left = xs_[0] + (level - vs_[0]) / slopes_[0];
        }
    }
    double right = kInf;
    {
        std::ptrdiff_t k = first;
        while (k + 1 < n && vs_[k + 1] <= level) ++k;
        if (k + 1 < n) {
            right = xs_[k] + (level - vs_[k]) / slopes_[k + 1];
            right = std::clamp(right, xs_[k], xs_[k + 1]);
        } else if (std::isfinite(hi_) && xs_[k] >= hi_) {
            right = hi_;
        } else if (slopes_.back() > 0.0) {
            right = xs_[k] + (level - vs_[k]) / slopes_.back();
        }
    }
    return std::make_pair(left, right);
}

}  // namespace sslot
