#include "sslot/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace sslot {

namespace {

constexpr long kBlock = 4096;

struct Moments {
    long n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    long truncated = 0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    // Chan et al. pairwise combination.
    void merge(const Moments &o) {
        if (o.n == 0) return;
        const long total = n + o.n;
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.n) / static_cast<double>(total);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) /
                         static_cast<double>(total);
        n = total;
        truncated += o.truncated;
    }
};

void check(const Instance &instance, const PolicyParameters &policy) {
    validate(instance);
    validate(policy);
    if (policy.horizon() != instance.horizon()) {
        throw ValidationError("policy has " + std::to_string(policy.horizon()) +
                              " periods but the instance has " +
                              std::to_string(instance.horizon()));
    }
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t seed, std::uint64_t rep) {
    std::uint64_t z = seed ^ (rep * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double simulate_once(const Instance &instance, const PolicyParameters &policy,
                     std::uint64_t rep_seed, long *truncated) {
    const auto &c = instance.costs;
    boost::random::mt19937_64 rng(rep_seed);
    boost::random::normal_distribution<double> unit;
    double inv = instance.initial_inventory;
    double cost = 0.0;
    for (int t = 0; t < instance.horizon(); ++t) {
        const double S = policy.order_up_to[t];
        if (inv <= policy.reorder_points[t] && S > inv) {
            cost += c.fixed_ordering + c.unit * (S - inv);
            inv = S;
        }
        const auto &dm = instance.demands[t];
        double d = dm.mean + dm.std_dev * unit(rng);
        if (d < 0.0) {
            d = 0.0;
            if (truncated) ++*truncated;
        }
        inv -= d;
        cost += inv >= 0.0 ? c.holding * inv : -c.penalty * inv;
    }
    return cost;
}

SimulationResult simulate_policy(const Instance &instance, const PolicyParameters &policy,
                                 const SimulationOptions &options) {
    check(instance, policy);
    if (options.replications < 1) throw ValidationError("replications must be at least 1");
    if (options.threads < 0) throw ValidationError("threads must be non-negative");

    const long reps = options.replications;
    const long blocks = (reps + kBlock - 1) / kBlock;
    std::vector<Moments> partial(static_cast<std::size_t>(blocks));
    std::atomic<long> next{0};
    auto work = [&] {
        for (long b = next++; b < blocks; b = next++) {
            Moments m;
            const long end = std::min(reps, (b + 1) * kBlock);
            for (long r = b * kBlock; r < end; ++r) {
                m.add(simulate_once(instance, policy,
                                    replication_seed(options.seed, static_cast<std::uint64_t>(r)),
                                    &m.truncated));
            }
            partial[static_cast<std::size_t>(b)] = m;
        }
    };
    long threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                        : options.threads;
    threads = std::min(threads, blocks);
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (long i = 0; i < threads; ++i) pool.emplace_back(work);
        for (auto &th : pool) th.join();
    }

    Moments total;
    for (const auto &m : partial) total.merge(m);

    SimulationResult out;
    out.mean = total.mean;
    out.replications = reps;
    out.seed = options.seed;
    out.initial_inventory = instance.initial_inventory;
    out.stderr_defined = reps > 1;
    if (reps > 1) {
        out.std_error = std::sqrt(total.m2 / static_cast<double>(reps - 1)) /
                        std::sqrt(static_cast<double>(reps));
    }
    out.truncated_fraction = static_cast<double>(total.truncated) /
                             (static_cast<double>(reps) * instance.horizon());
    return out;
}

GapEstimate estimate_gap(const Instance &instance, const PolicyParameters &policy,
                         double oracle_cost, const SimulationOptions &options) {
    if (!(oracle_cost > 0.0)) {
        throw ValidationError("oracle cost must be positive to express a relative gap");
    }
    GapEstimate out;
    out.oracle_cost = oracle_cost;
    out.simulation = simulate_policy(instance, policy, options);
    out.gap_pct = 100.0 * (out.simulation.mean - oracle_cost) / oracle_cost;
    out.stderr_pct = 100.0 * out.simulation.std_error / oracle_cost;
    return out;
}

void write_simulation_row(std::ostream &os, const SimulationRow &row) {
    char buf[256];
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%ld,%llu,", row.result.mean, row.result.std_error,
                  row.result.replications, static_cast<unsigned long long>(row.result.seed));
    os << row.instance_id << ',' << row.method << buf;
    if (row.gap_pct) {
        std::snprintf(buf, sizeof buf, "%.6f", *row.gap_pct);
        os << buf;
    }
    os << '\n';
}

}  // namespace sslot
