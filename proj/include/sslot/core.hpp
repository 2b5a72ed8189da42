#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace sslot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An input violates a domain invariant (negative cost, empty horizon, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// A file could not be read or does not follow its schema.
class ParseError : public Error {
  public:
    using Error::Error;
};

/// A solver could not produce a result (bad bounds, grid too small, ...).
class SolverError : public Error {
  public:
    using Error::Error;
};

struct CostParameters {
    double fixed_ordering = 0.0;  // K
    double unit = 0.0;            // c
    double holding = 1.0;         // h
    double penalty = 1.0;         // b

    bool operator==(const CostParameters &) const = default;
};

struct NormalDemand {
    double mean = 0.0;
    double std_dev = 0.0;

    bool operator==(const NormalDemand &) const = default;
};

/// A finite-horizon single-item lot-sizing instance with independent normal
/// period demands. Period t (one based) is index t-1 here.
struct Instance {
    CostParameters costs;
    std::vector<NormalDemand> demands;
    double initial_inventory = 0.0;

    int horizon() const { return static_cast<int>(demands.size()); }

    /// Periods first..horizon-1 (zero based) as a standalone instance.
    Instance suffix(int first, double initial) const;

    double total_mean() const;
    /// sqrt of the summed period variances.
    double pooled_std_dev() const;
    double summed_std_dev() const;

    bool operator==(const Instance &) const = default;
};

struct PolicyParameters {
    std::vector<double> reorder_points;    // s_t
    std::vector<double> order_up_to;       // S_t

    int horizon() const { return static_cast<int>(order_up_to.size()); }
    bool operator==(const PolicyParameters &) const = default;
};

/// Returns `instance` unchanged, or throws ValidationError naming the first
/// violated invariant.
const Instance &validate(const Instance &instance);
void validate(const PolicyParameters &policy);

Instance make_instance(const CostParameters &costs, std::vector<double> means,
                       double coefficient_of_variation,
                       double initial_inventory = 0.0);

/// The four-period instance used throughout the documentation:
/// K=100, h=1, b=10, c=0, means {20,40,60,40}, std dev a quarter of the mean.
Instance worked_example();

inline constexpr int kInstanceFormatVersion = 1;

Instance parse_instance(const std::string &text);
std::string format_instance(const Instance &instance);
Instance read_instance(const std::filesystem::path &path);
void write_instance(const Instance &instance, const std::filesystem::path &path);

/// Policy CSV with header `t,s_t,S_t,linked_cost`, t one based.
void write_policy_csv(const PolicyParameters &policy,
                      const std::vector<double> &linked_costs,
                      const std::filesystem::path &path);
PolicyParameters read_policy_csv(const std::filesystem::path &path);

std::string read_text_file(const std::filesystem::path &path);

}  // namespace sslot
