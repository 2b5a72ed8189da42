#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sslot/core.hpp"
#include "sslot/loss.hpp"

namespace sslot {

/// Piecewise loss approximations for every replenishment cycle: entry
/// [t][j] (zero based, j <= t) approximates the demand over periods j..t.
using LossTable = std::vector<std::vector<PiecewiseLoss>>;

LossTable make_loss_table(const Instance &instance, const Partition &partition);

enum class VariableType { continuous, binary };

struct Variable {
    std::string name;
    VariableType type = VariableType::continuous;
    double lower = 0.0;
    double upper = 0.0;
};

struct LinearTerm {
    int var;
    double coef;
};

enum class Sense { less_equal, greater_equal, equal };

struct LinearRow {
    std::string name;
    std::vector<LinearTerm> terms;
    Sense sense = Sense::greater_equal;
    double rhs = 0.0;
    /// Valid inequality that the exact backend may ignore.
    bool cut = false;
};

/// binary == active  =>  row.
struct IndicatorRow {
    int binary;
    int active;
    LinearRow row;
};

enum class ModelKind {
    reorder,      // no order in the first period, I_0 is the reorder point
    order_up_to,  // forced first-period order, I_0 is the order-up-to level
    joint,
};

/// Variable indices of one submodel. Vectors are indexed by zero-based
/// period t and cycle start j.
struct SubmodelIndex {
    ModelKind kind = ModelKind::reorder;
    std::string tag;  // "s" or "S"
    int initial = -1;
    std::vector<int> closing;
    std::vector<int> order;
    std::vector<std::vector<int>> cycle;               // [t][j], j <= t
    std::vector<std::vector<std::vector<int>>> piece;  // [t][j][i], joint models only
    std::vector<int> excess;
    std::vector<int> shortage;
};

struct MilpModel {
    ModelKind kind = ModelKind::reorder;
    /// First period (one based) of the original horizon covered by the model.
    int offset = 1;
    Instance instance;
    LossTable losses;
    double big_m = 0.0;

    std::vector<Variable> variables;
    std::vector<LinearRow> rows;
    std::vector<IndicatorRow> indicators;
    std::vector<LinearTerm> objective;
    double objective_constant = 0.0;

    std::vector<SubmodelIndex> submodels;
    int order_up_to_cost = -1;  // C_S, joint models only
    int reorder_cost = -1;      // G_s, joint models only

    int horizon() const { return instance.horizon(); }
    /// Index of the variable with this name, or -1.
    int find(const std::string &name) const;
    const SubmodelIndex &submodel(ModelKind kind) const;
};

/// Model whose optimum approximates G(I_0): no order in the first period.
/// A fixed `initial_inventory` turns I_0 into a constant.
MilpModel build_minlp_s(const Instance &instance, const LossTable &losses,
                        std::optional<double> initial_inventory = std::nullopt);
/// Model with a forced first-period order; I_0 is the order-up-to level.
MilpModel build_minlp_S(const Instance &instance, const LossTable &losses);
/// Both submodels, linked by G_s(I_0^s) = C_S(I_0^S) and I_0^s <= I_0^S.
MilpModel build_joint(const Instance &instance, const LossTable &losses);

/// Fixes I_0 of the reorder submodel.
void fix_initial_inventory(MilpModel &model, double value);
/// Fixes every order indicator of one submodel (and the cycle indicators
/// they imply). pattern[t] is 0 or 1.
void fix_order_pattern(MilpModel &model, ModelKind submodel, const std::vector<int> &pattern);

double objective_value(const MilpModel &model, const std::vector<double> &values);

struct RowViolation {
    std::string row;  // empty when nothing is violated
    double amount = 0.0;
};
/// Largest violation of bounds, integrality, linear rows and active
/// indicator rows.
RowViolation worst_violation(const MilpModel &model, const std::vector<double> &values);

/// CPLEX LP text. Indicator rows are lowered to big-M rows with M taken from
/// the variable bounds, fixed binaries become bounds.
std::string format_lp(const MilpModel &model);
void export_lp(const MilpModel &model, const std::filesystem::path &path);

}  // namespace sslot
