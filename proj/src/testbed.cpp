#include "sslot/testbed.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sslot/sdp.hpp"
#include "sslot/simulator.hpp"

namespace sslot {

namespace {

using nlohmann::json;

constexpr std::array<const char *, 10> kNames{"LCY1", "LCY2", "SIN1", "SIN2", "STA",
                                              "RAND", "EMP1", "EMP2", "EMP3", "EMP4"};

// Periods 1..8, columns in Pattern order.
constexpr int kShort[8][10] = {
    {15, 3, 15, 12, 10, 2, 5, 4, 11, 18},     {16, 6, 4, 7, 10, 4, 15, 23, 14, 6},
    {15, 7, 4, 7, 10, 7, 26, 28, 7, 22},      {14, 11, 10, 10, 10, 3, 44, 50, 11, 22},
    {11, 14, 18, 13, 10, 10, 24, 39, 16, 51}, {7, 15, 4, 7, 10, 10, 15, 26, 31, 54},
    {6, 16, 4, 7, 10, 3, 22, 19, 11, 22},     {3, 15, 10, 12, 10, 3, 10, 32, 48, 21},
};

constexpr int kLongRand[25] = {178, 178, 136, 211, 119, 165, 47, 100, 62, 31, 43, 199, 172,
                               96,  69,  8,   29,  135, 97,  70, 248, 57, 11, 94, 13};
constexpr int kLongEmp[4][25] = {
    {2, 51, 152, 467, 268, 489, 446, 248, 281, 363, 155, 293, 220,
     93, 107, 234, 124, 184, 223, 101, 123, 99, 31, 82, 0},
    {47, 81, 236, 394, 164, 287, 508, 391, 754, 694, 261, 195, 320,
     111, 191, 160, 55, 84, 58, 0, 0, 0, 0, 0, 0},
    {44, 116, 264, 144, 146, 198, 74, 183, 204, 114, 165, 318, 119,
     482, 534, 136, 260, 299, 76, 218, 323, 102, 174, 284, 0},
    {49, 188, 64, 279, 453, 224, 223, 517, 291, 547, 646, 224, 215,
     440, 116, 185, 211, 26, 55, 0, 0, 0, 0, 0, 0},
};

double generated(Pattern p, int t) {
    const double x = t;
    switch (p) {
        case Pattern::LCY1: return std::round(190.0 * std::exp(-(x - 13) * (x - 13) / 50.0));
        case Pattern::LCY2: return std::round(170.0 * std::exp(-(x - 13) * (x - 13) / 72.0));
        case Pattern::SIN1: return std::round(70.0 * std::sin(0.8 * x) + 80.0);
        case Pattern::SIN2: return std::round(30.0 * std::sin(0.8 * x) + 100.0);
        case Pattern::STA: return 100.0;
        default: break;
    }
    throw ValidationError("no closed form for pattern " + std::string(to_string(p)));
}

std::string fmt(const char *spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string opt(const std::optional<double> &v) { return v ? fmt("%.6f", *v) : ""; }

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string &s, const char *what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception &) {
        throw ParseError(std::string("bad ") + what + " '" + s + "'");
    }
}

std::string sanitize(std::string s) {
    for (char &ch : s) {
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    }
    return s;
}

template <typename T>
std::vector<T> list_field(const json &doc, const char *name, std::vector<T> fallback) {
    const auto it = doc.find(name);
    if (it == doc.end()) return fallback;
    if (!it->is_array()) throw ParseError(std::string("config: '") + name + "' must be an array");
    try {
        return it->get<std::vector<T>>();
    } catch (const json::exception &) {
        throw ParseError(std::string("config: '") + name + "' has entries of the wrong type");
    }
}

template <typename T>
T scalar_field(const json &doc, const char *name, T fallback) {
    const auto it = doc.find(name);
    if (it == doc.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception &) {
        throw ParseError(std::string("config: '") + name + "' has the wrong type");
    }
}

double elapsed(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

struct Task {
    std::size_t instance = 0;
    Method method = Method::bs;
};

std::string task_key(const std::string &id, const std::string &method) { return id + "|" + method; }

// Formatting and re-reading a row makes fresh and resumed rows identical.
DetailRow round_trip(const DetailRow &row) { return parse_detail_row(format_detail_row(row)); }

}  // namespace

const std::vector<Pattern> &all_patterns() {
    static const std::vector<Pattern> patterns{Pattern::LCY1, Pattern::LCY2, Pattern::SIN1,
                                               Pattern::SIN2, Pattern::STA,  Pattern::RAND,
                                               Pattern::EMP1, Pattern::EMP2, Pattern::EMP3,
                                               Pattern::EMP4};
    return patterns;
}

const char *to_string(Pattern pattern) { return kNames[static_cast<std::size_t>(pattern)]; }

Pattern parse_pattern(const std::string &name) {
    std::string upper = name;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (upper == kNames[i]) return static_cast<Pattern>(i);
    }
    throw ValidationError("unknown demand pattern '" + name + "'");
}

std::vector<double> demand_means(Pattern pattern, int horizon) {
    const auto col = static_cast<std::size_t>(pattern);
    std::vector<double> out;
    if (horizon == 8) {
        for (const auto &row : kShort) out.push_back(row[col]);
    } else if (horizon == 25) {
        for (int t = 1; t <= 25; ++t) {
            if (pattern == Pattern::RAND) {
                out.push_back(kLongRand[t - 1]);
            } else if (pattern >= Pattern::EMP1) {
                out.push_back(kLongEmp[col - static_cast<std::size_t>(Pattern::EMP1)][t - 1]);
            } else {
                out.push_back(generated(pattern, t));
            }
        }
    } else {
        throw ValidationError("demand patterns exist for 8 and 25 periods, not " +
                              std::to_string(horizon));
    }
    return out;
}

PatternTable read_pattern_table(const std::filesystem::path &path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    const auto header = split(line, ',');
    if (header.size() != 12 || header[0] != "horizon" || header[1] != "t") {
        throw ParseError(path.string() + ": expected header horizon,t,<ten patterns>");
    }
    std::vector<Pattern> cols;
    for (std::size_t i = 2; i < header.size(); ++i) cols.push_back(parse_pattern(header[i]));
    PatternTable table;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != header.size()) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                             ": expected " + std::to_string(header.size()) + " fields");
        }
        const int horizon = static_cast<int>(to_double(cells[0], "horizon"));
        const int t = static_cast<int>(to_double(cells[1], "period"));
        for (std::size_t i = 0; i < cols.size(); ++i) {
            auto &column = table[horizon][cols[i]];
            if (static_cast<int>(column.size()) != t - 1) {
                throw ParseError(path.string() + ": line " + std::to_string(line_no) +
                                 ": periods out of order");
            }
            column.push_back(to_double(cells[i + 2], "demand"));
        }
    }
    return table;
}

BenchmarkConfig default_benchmark_config(int horizon) {
    BenchmarkConfig config;
    config.horizon = horizon;
    config.heuristic = default_config(horizon);
    if (horizon == 25) {
        config.fixed_costs = {500.0, 1000.0, 1500.0};
        config.replications = 1000000;
    }
    return config;
}

void validate(const BenchmarkConfig &config) {
    if (config.horizon != 8 && config.horizon != 25) {
        throw ValidationError("benchmark horizon must be 8 or 25");
    }
    if (config.horizon == 25 && !config.allow_long) {
        throw ValidationError("25-period benchmarks must be enabled explicitly");
    }
    if (config.patterns.empty() || config.fixed_costs.empty() || config.penalties.empty() ||
        config.cvs.empty() || config.methods.empty()) {
        throw ValidationError("benchmark grid has an empty dimension");
    }
    if (config.replications < 1) throw ValidationError("replications must be at least 1");
    if (config.jobs < 1) throw ValidationError("jobs must be at least 1");
    if (!(config.grid_step > 0.0)) throw ValidationError("grid_step must be positive");
    validate(config.heuristic);
}

BenchmarkConfig parse_benchmark_config(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("config: expected a JSON object");
    static const std::set<std::string> known{
        "horizon", "patterns", "K",    "b",         "cv",   "h",         "c",    "I0",
        "methods", "replications", "seed", "segments", "step", "grid_step", "jobs", "allow_long"};
    for (const auto &[key, value] : doc.items()) {
        if (!known.count(key)) throw ParseError("config: unknown key '" + key + "'");
    }
    BenchmarkConfig config = default_benchmark_config(scalar_field(doc, "horizon", 8));
    if (doc.contains("patterns")) {
        config.patterns.clear();
        for (const auto &name : list_field<std::string>(doc, "patterns", {})) {
            config.patterns.push_back(parse_pattern(name));
        }
    }
    config.fixed_costs = list_field(doc, "K", config.fixed_costs);
    config.penalties = list_field(doc, "b", config.penalties);
    config.cvs = list_field(doc, "cv", config.cvs);
    config.holding = scalar_field(doc, "h", config.holding);
    config.unit = scalar_field(doc, "c", config.unit);
    config.initial_inventory = scalar_field(doc, "I0", config.initial_inventory);
    if (doc.contains("methods")) {
        config.methods.clear();
        for (const auto &name : list_field<std::string>(doc, "methods", {})) {
            config.methods.push_back(parse_method(name));
        }
    }
    config.replications = scalar_field(doc, "replications", config.replications);
    config.seed = scalar_field(doc, "seed", config.seed);
    config.heuristic.segments = scalar_field(doc, "segments", config.heuristic.segments);
    config.heuristic.step = scalar_field(doc, "step", config.heuristic.step);
    config.grid_step = scalar_field(doc, "grid_step", config.grid_step);
    config.jobs = scalar_field(doc, "jobs", config.jobs);
    config.allow_long = scalar_field(doc, "allow_long", config.allow_long);
    return config;
}

BenchmarkConfig read_benchmark_config(const std::filesystem::path &path) {
    try {
        return parse_benchmark_config(read_text_file(path));
    } catch (const ParseError &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string instance_id(Pattern pattern, double K, double b, double cv, int horizon) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "T%d-%s-K%g-b%g-cv%g", horizon, to_string(pattern), K, b, cv);
    return buf;
}

std::vector<BenchmarkInstance> build_instances(const BenchmarkConfig &config) {
    std::vector<BenchmarkInstance> out;
    for (Pattern p : config.patterns) {
        const auto means = demand_means(p, config.horizon);
        for (double K : config.fixed_costs) {
            for (double b : config.penalties) {
                for (double cv : config.cvs) {
                    CostParameters costs;
                    costs.fixed_ordering = K;
                    costs.unit = config.unit;
                    costs.holding = config.holding;
                    costs.penalty = b;
                    BenchmarkInstance bi;
                    bi.id = instance_id(p, K, b, cv, config.horizon);
                    bi.pattern = p;
                    bi.fixed_cost = K;
                    bi.penalty = b;
                    bi.cv = cv;
                    bi.instance = make_instance(costs, means, cv, config.initial_inventory);
                    validate(bi.instance);
                    out.push_back(std::move(bi));
                }
            }
        }
    }
    return out;
}

std::string format_detail_row(const DetailRow &row) {
    std::ostringstream os;
    os << row.instance_id << ',' << row.pattern << ',' << row.horizon << ','
       << fmt("%g", row.fixed_cost) << ',' << fmt("%g", row.penalty) << ',' << fmt("%g", row.cv)
       << ',' << row.method << ',' << (row.ok ? "ok" : "failed") << ','
       << fmt("%.6f", row.reorder_point) << ',' << fmt("%.6f", row.order_up_to) << ','
       << fmt("%.6f", row.model_cost) << ',' << opt(row.oracle_cost) << ','
       << fmt("%.6f", row.mean) << ',' << fmt("%.6f", row.std_error) << ',' << row.replications
       << ',' << row.seed << ',' << opt(row.gap_pct) << ','
       << fmt("%.8f", row.truncated_fraction) << ',' << fmt("%.3f", row.seconds) << ','
       << sanitize(row.message);
    return os.str();
}

DetailRow parse_detail_row(const std::string &line) {
    const auto c = split(line, ',');
    if (c.size() != 20) {
        throw ParseError("detail row has " + std::to_string(c.size()) + " fields, expected 20");
    }
    auto optional = [](const std::string &s, const char *what) -> std::optional<double> {
        if (s.empty()) return std::nullopt;
        return to_double(s, what);
    };
    DetailRow row;
    row.instance_id = c[0];
    row.pattern = c[1];
    row.horizon = static_cast<int>(to_double(c[2], "horizon"));
    row.fixed_cost = to_double(c[3], "K");
    row.penalty = to_double(c[4], "b");
    row.cv = to_double(c[5], "cv");
    row.method = c[6];
    if (c[7] != "ok" && c[7] != "failed") throw ParseError("bad status '" + c[7] + "'");
    row.ok = c[7] == "ok";
    row.reorder_point = to_double(c[8], "s_1");
    row.order_up_to = to_double(c[9], "S_1");
    row.model_cost = to_double(c[10], "model_cost");
    row.oracle_cost = optional(c[11], "oracle_cost");
    row.mean = to_double(c[12], "mean");
    row.std_error = to_double(c[13], "stderr");
    row.replications = static_cast<long>(to_double(c[14], "replications"));
    try {
        row.seed = std::stoull(c[15]);
    } catch (const std::exception &) {
        throw ParseError("bad seed '" + c[15] + "'");
    }
    row.gap_pct = optional(c[16], "gap_pct");
    row.truncated_fraction = to_double(c[17], "truncated");
    row.seconds = to_double(c[18], "seconds");
    row.message = c[19];
    return row;
}

std::vector<SummaryRow> summarize(const std::vector<DetailRow> &rows) {
    using Key = std::tuple<std::string, std::string, std::string>;
    struct Acc {
        int instances = 0, failures = 0, gaps = 0;
        double gap = 0.0, cost = 0.0, seconds = 0.0;
    };
    std::vector<Key> order;
    std::map<Key, Acc> acc;
    auto add = [&](const std::string &group, const std::string &key, const DetailRow &r) {
        const Key k{group, key, r.method};
        if (!acc.count(k)) order.push_back(k);
        auto &a = acc[k];
        ++a.instances;
        if (!r.ok) {
            ++a.failures;
            return;
        }
        a.cost += r.mean;
        a.seconds += r.seconds;
        if (r.gap_pct) {
            a.gap += *r.gap_pct;
            ++a.gaps;
        }
    };
    for (const char *group : {"pattern", "K", "b", "cv", "overall"}) {
        for (const auto &r : rows) {
            const std::string g = group;
            const std::string key = g == "pattern" ? r.pattern
                                    : g == "K"     ? fmt("%g", r.fixed_cost)
                                    : g == "b"     ? fmt("%g", r.penalty)
                                    : g == "cv"    ? fmt("%g", r.cv)
                                                   : "all";
            add(g, key, r);
        }
    }
    std::vector<SummaryRow> out;
    for (const auto &k : order) {
        const auto &a = acc[k];
        SummaryRow s;
        std::tie(s.group, s.key, s.method) = k;
        s.instances = a.instances;
        s.failures = a.failures;
        const int ok = a.instances - a.failures;
        if (a.gaps > 0 && a.gaps == ok) s.mean_gap_pct = a.gap / a.gaps;
        if (ok > 0) {
            s.mean_cost = a.cost / ok;
            s.mean_seconds = a.seconds / ok;
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::uint64_t instance_seed(std::uint64_t seed, const std::string &id) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : id) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return replication_seed(seed, h);
}

BenchmarkReport run_benchmark(const BenchmarkConfig &config,
                              const std::filesystem::path &detail_path,
                              const std::filesystem::path &summary_path,
                              const BenchmarkProgress &progress) {
    validate(config);
    const auto instances = build_instances(config);
    const bool with_oracle = config.horizon == 8;

    std::vector<Task> tasks;
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (Method m : config.methods) {
            position[task_key(instances[i].id, to_string(m))] = tasks.size();
            tasks.push_back({i, m});
        }
    }

    std::vector<std::optional<DetailRow>> rows(tasks.size());
    BenchmarkReport report;
    if (std::filesystem::exists(detail_path)) {
        std::istringstream in(read_text_file(detail_path));
        std::string line;
        std::getline(in, line);
        if (line != kDetailCsvHeader) {
            throw ParseError(detail_path.string() + ": not a benchmark detail file");
        }
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            DetailRow row;
            try {
                row = parse_detail_row(line);
            } catch (const ParseError &e) {
                // A run killed mid-write leaves a truncated last line.
                if (in.peek() == EOF) break;
                throw ParseError(detail_path.string() + ": line " + std::to_string(line_no) +
                                 ": " + e.what());
            }
            const auto it = position.find(task_key(row.instance_id, row.method));
            if (it == position.end()) continue;
            const auto &bi = instances[tasks[it->second].instance];
            if (row.replications != config.replications ||
                row.seed != instance_seed(config.seed, bi.id)) {
                throw ValidationError(detail_path.string() +
                                      ": existing rows used other replications or seed; "
                                      "remove the file or write elsewhere");
            }
            if (!rows[it->second]) ++report.resumed;
            rows[it->second] = row;
        }
    }

    std::filesystem::path parent = detail_path.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    {
        // Rewrite what was kept so appended rows follow a complete file.
        std::ofstream out(detail_path, std::ios::trunc);
        out << kDetailCsvHeader << '\n';
        for (const auto &r : rows) {
            if (r) out << format_detail_row(*r) << '\n';
        }
        if (!out) throw Error("cannot write " + detail_path.string());
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!rows[i]) pending.push_back(i);
    }
    // Group pending tasks by instance so the oracle is solved once.
    std::vector<std::vector<std::size_t>> work;
    for (std::size_t i : pending) {
        if (work.empty() || tasks[work.back().front()].instance != tasks[i].instance) {
            work.emplace_back();
        }
        work.back().push_back(i);
    }

    std::mutex mu;
    std::ofstream append(detail_path, std::ios::app);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t w = next++; w < work.size(); w = next++) {
            const auto &bi = instances[tasks[work[w].front()].instance];
            const std::uint64_t seed = instance_seed(config.seed, bi.id);
            std::optional<double> oracle;
            std::string oracle_error;
            if (with_oracle) {
                try {
                    oracle = solve_sdp(bi.instance, config.grid_step, 4)
                                 .expected_cost;
                } catch (const Error &e) {
                    oracle_error = std::string("oracle: ") + e.what();
                }
            }
            for (std::size_t ti : work[w]) {
                const Method method = tasks[ti].method;
                DetailRow row;
                row.instance_id = bi.id;
                row.pattern = to_string(bi.pattern);
                row.horizon = config.horizon;
                row.fixed_cost = bi.fixed_cost;
                row.penalty = bi.penalty;
                row.cv = bi.cv;
                row.method = to_string(method);
                row.replications = config.replications;
                row.seed = seed;
                row.oracle_cost = oracle;
                const auto start = std::chrono::steady_clock::now();
                try {
                    if (!oracle_error.empty()) throw SolverError(oracle_error);
                    const auto res = method == Method::mp
                                         ? mp_policy(bi.instance, config.heuristic)
                                         : bs_policy(bi.instance, config.heuristic);
                    row.seconds = elapsed(start);
                    row.reorder_point = res.policy.reorder_points.front();
                    row.order_up_to = res.policy.order_up_to.front();
                    row.model_cost = res.periods.front().linked_cost;
                    SimulationOptions so;
                    so.replications = config.replications;
                    so.seed = seed;
                    const auto sim = simulate_policy(bi.instance, res.policy, so);
                    row.mean = sim.mean;
                    row.std_error = sim.std_error;
                    row.truncated_fraction = sim.truncated_fraction;
                    if (oracle) row.gap_pct = 100.0 * (sim.mean - *oracle) / *oracle;
                    row.ok = true;
                } catch (const Error &e) {
                    row.seconds = elapsed(start);
                    row.ok = false;
                    row.message = e.what();
                }
                row = round_trip(row);
                std::lock_guard<std::mutex> lock(mu);
                append << format_detail_row(row) << '\n' << std::flush;
                rows[ti] = row;
                if (progress) progress(row);
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(work.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto &th : pool) th.join();
    }
    append.close();

    for (auto &r : rows) report.detail.push_back(std::move(*r));
    report.summary = summarize(report.detail);

    {
        std::ofstream out(detail_path, std::ios::trunc);
        out << kDetailCsvHeader << '\n';
        for (const auto &r : report.detail) out << format_detail_row(r) << '\n';
        if (!out) throw Error("cannot write " + detail_path.string());
    }
    std::ofstream out(summary_path, std::ios::trunc);
    out << "# horizon " << config.horizon << ", h " << fmt("%g", config.holding) << ", c "
        << fmt("%g", config.unit) << ", I0 " << fmt("%g", config.initial_inventory)
        << " (test-bed h, c and I0 are assumed values)\n";
    out << kSummaryCsvHeader << '\n';
    for (const auto &s : report.summary) {
        out << s.group << ',' << s.key << ',' << s.method << ',' << s.instances << ','
            << s.failures << ',' << opt(s.mean_gap_pct) << ',' << fmt("%.6f", s.mean_cost) << ','
            << fmt("%.3f", s.mean_seconds) << '\n';
    }
    if (!out) throw Error("cannot write " + summary_path.string());
    return report;
}

}  // namespace sslot
