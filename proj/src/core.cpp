#include "sslot/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace sslot {

namespace {

using nlohmann::json;

int line_of(const std::string &text, std::size_t byte) {
    const auto end = std::min(byte, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + end, '\n'));
}

const json &field(const json &doc, const char *name) {
    const auto it = doc.find(name);
    if (it == doc.end()) {
        throw ParseError(std::string("instance: missing field '") + name + "'");
    }
    return *it;
}

double number_field(const json &doc, const char *name) {
    const json &value = field(doc, name);
    if (!value.is_number()) {
        throw ParseError(std::string("instance: field '") + name + "' must be a number");
    }
    return value.get<double>();
}

std::vector<double> array_field(const json &doc, const char *name) {
    const json &value = field(doc, name);
    if (!value.is_array()) {
        throw ParseError(std::string("instance: field '") + name + "' must be an array");
    }
    std::vector<double> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) {
            throw ParseError(std::string("instance: field '") + name + "[" + std::to_string(i) +
                             "]' must be a number");
        }
        out.push_back(value[i].get<double>());
    }
    return out;
}

void require_finite(double value, const std::string &what) {
    if (!std::isfinite(value)) {
        throw ValidationError(what + " is not finite");
    }
}

}  // namespace

Instance Instance::suffix(int first, double initial) const {
    if (first < 0 || first >= horizon()) {
        throw ValidationError("suffix start " + std::to_string(first) + " outside horizon " +
                              std::to_string(horizon()));
    }
    Instance out;
    out.costs = costs;
    out.demands.assign(demands.begin() + first, demands.end());
    out.initial_inventory = initial;
    return out;
}

double Instance::total_mean() const {
    double total = 0.0;
    for (const auto &d : demands) total += d.mean;
    return total;
}

double Instance::pooled_std_dev() const {
    double var = 0.0;
    for (const auto &d : demands) var += d.std_dev * d.std_dev;
    return std::sqrt(var);
}

double Instance::summed_std_dev() const {
    double total = 0.0;
    for (const auto &d : demands) total += d.std_dev;
    return total;
}

const Instance &validate(const Instance &instance) {
    const auto &k = instance.costs;
    require_finite(k.fixed_ordering, "K");
    require_finite(k.unit, "c");
    require_finite(k.holding, "h");
    require_finite(k.penalty, "b");
    require_finite(instance.initial_inventory, "initial_inventory");
    if (k.fixed_ordering < 0.0) throw ValidationError("negative fixed ordering cost K");
    if (k.unit < 0.0) throw ValidationError("negative unit cost c");
    if (k.holding <= 0.0) throw ValidationError("holding cost h must be positive");
    if (k.penalty <= 0.0) throw ValidationError("penalty cost b must be positive");
    if (instance.demands.empty()) throw ValidationError("empty horizon");
    for (std::size_t t = 0; t < instance.demands.size(); ++t) {
        const auto &d = instance.demands[t];
        const auto where = " in period " + std::to_string(t + 1);
        require_finite(d.mean, "mean" + where);
        require_finite(d.std_dev, "std_dev" + where);
        if (d.mean < 0.0) throw ValidationError("negative mean" + where);
        if (d.std_dev < 0.0) throw ValidationError("negative std_dev" + where);
    }
    return instance;
}

void validate(const PolicyParameters &policy) {
    if (policy.reorder_points.size() != policy.order_up_to.size()) {
        throw ValidationError("policy has " + std::to_string(policy.reorder_points.size()) +
                              " reorder points but " + std::to_string(policy.order_up_to.size()) +
                              " order-up-to levels");
    }
    for (std::size_t t = 0; t < policy.order_up_to.size(); ++t) {
        if (!(policy.reorder_points[t] <= policy.order_up_to[t])) {
            throw ValidationError("policy period " + std::to_string(t + 1) + ": s_t > S_t");
        }
    }
}

Instance make_instance(const CostParameters &costs, std::vector<double> means,
                       double coefficient_of_variation, double initial_inventory) {
    Instance out;
    out.costs = costs;
    out.initial_inventory = initial_inventory;
    out.demands.reserve(means.size());
    for (double m : means) out.demands.push_back({m, coefficient_of_variation * m});
    return out;
}

Instance worked_example() {
    return make_instance({100.0, 0.0, 1.0, 10.0}, {20.0, 40.0, 60.0, 40.0}, 0.25);
}

Instance parse_instance(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError("instance: line " + std::to_string(line_of(text, e.byte)) + ": " +
                         e.what());
    }
    if (!doc.is_object()) throw ParseError("instance: top level must be an object");

    const double version = number_field(doc, "version");
    if (version != kInstanceFormatVersion) {
        std::ostringstream msg;
        msg << "instance: schema version " << version << " is not supported (expected "
            << kInstanceFormatVersion << ")";
        throw ParseError(msg.str());
    }
    const double horizon = number_field(doc, "horizon");
    Instance out;
    out.costs.fixed_ordering = number_field(doc, "K");
    out.costs.unit = number_field(doc, "c");
    out.costs.holding = number_field(doc, "h");
    out.costs.penalty = number_field(doc, "b");
    out.initial_inventory = number_field(doc, "initial_inventory");
    const auto means = array_field(doc, "demand_means");
    const auto sds = array_field(doc, "demand_std_devs");
    if (horizon != std::floor(horizon) || horizon < 0) {
        throw ParseError("instance: field 'horizon' must be a non-negative integer");
    }
    if (means.size() != static_cast<std::size_t>(horizon)) {
        throw ParseError("instance: field 'demand_means' has " + std::to_string(means.size()) +
                         " entries, horizon is " + std::to_string(static_cast<long>(horizon)));
    }
    if (sds.size() != means.size()) {
        throw ParseError("instance: field 'demand_std_devs' has " + std::to_string(sds.size()) +
                         " entries, horizon is " + std::to_string(means.size()));
    }
    for (std::size_t t = 0; t < means.size(); ++t) out.demands.push_back({means[t], sds[t]});
    return out;
}

std::string format_instance(const Instance &instance) {
    json doc;
    doc["version"] = kInstanceFormatVersion;
    doc["horizon"] = instance.horizon();
    doc["K"] = instance.costs.fixed_ordering;
    doc["c"] = instance.costs.unit;
    doc["h"] = instance.costs.holding;
    doc["b"] = instance.costs.penalty;
    doc["initial_inventory"] = instance.initial_inventory;
    json means = json::array();
    json sds = json::array();
    for (const auto &d : instance.demands) {
        means.push_back(d.mean);
        sds.push_back(d.std_dev);
    }
    doc["demand_means"] = std::move(means);
    doc["demand_std_devs"] = std::move(sds);
    return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Instance read_instance(const std::filesystem::path &path) {
    const auto text = read_text_file(path);
    try {
        return parse_instance(text);
    } catch (const ParseError &e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_instance(const Instance &instance, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << format_instance(instance);
}

void write_policy_csv(const PolicyParameters &policy, const std::vector<double> &linked_costs,
                      const std::filesystem::path &path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "t,s_t,S_t,linked_cost\n" << std::setprecision(17);
    for (int t = 0; t < policy.horizon(); ++t) {
        out << t + 1 << ',' << policy.reorder_points[t] << ',' << policy.order_up_to[t] << ',';
        if (static_cast<std::size_t>(t) < linked_costs.size()) out << linked_costs[t];
        out << '\n';
    }
}

PolicyParameters read_policy_csv(const std::filesystem::path &path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,s_t,S_t", 0) != 0) {
        throw ParseError(path.string() + ": line 1: expected header 't,s_t,S_t,linked_cost'");
    }
    PolicyParameters policy;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        try {
            if (cells.size() < 3) throw std::invalid_argument("too few columns");
            if (std::stoi(cells[0]) != policy.horizon() + 1) {
                throw std::invalid_argument("periods must be listed in order from 1");
            }
            policy.reorder_points.push_back(std::stod(cells[1]));
            policy.order_up_to.push_back(std::stod(cells[2]));
        } catch (const std::exception &e) {
            throw ParseError(path.string() + ": line " + std::to_string(line_no) + ": " +
                             e.what());
        }
    }
    validate(policy);
    return policy;
}

}  // namespace sslot
