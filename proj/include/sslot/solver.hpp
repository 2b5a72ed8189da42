#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sslot/model.hpp"

namespace sslot {

enum class SolveStatus { optimal, infeasible, node_limit };

const char *to_string(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0.0;
    std::vector<double> values;
    /// Order patterns evaluated (not pruned).
    long nodes = 0;
    double seconds = 0.0;
    /// Joint models: number of separate stretches of I_0^s <= I_0^S on which
    /// the linking equation has a root. More than one means the reorder
    /// point is ambiguous.
    int link_roots = 0;
};

struct SolveOptions {
    /// Relative objective tolerance for ties between order patterns.
    double tolerance = 1e-9;
    /// Stop after this many patterns; 0 means no limit.
    long node_limit = 0;
};

/// Global optimum of a model from build_minlp_s, build_minlp_S or
/// build_joint. Branch and bound over order patterns (ties go to the
/// lexicographically smallest); for each pattern the remaining problem is a
/// chain of convex piecewise-linear cycle costs solved exactly by dynamic
/// programming.
///
/// Joint models take I_0^S as the minimiser of the order-up-to submodel and
/// I_0^s as the largest root of G_s(y) = C_S(I_0^S) with y <= I_0^S.
SolveResult solve_exact(const MilpModel &model, const SolveOptions &options = {});

/// Reads `name value` lines (one per variable), validates the assignment
/// against every row within 1e-6 and recomputes the objective.
SolveResult import_solution(const MilpModel &model, const std::filesystem::path &path);

struct SubmodelSolution {
    double initial = 0.0;
    std::vector<int> orders;
    /// One-based period of the most recent cycle start for each period.
    std::vector<int> cycle_start;
    std::vector<double> closing;
    std::vector<double> excess;
    std::vector<double> shortage;
    /// Full cost expression of the submodel.
    double cost = 0.0;
};

SubmodelSolution submodel_solution(const MilpModel &model, ModelKind which,
                                   const std::vector<double> &values);

struct JointSolution {
    double order_up_to = 0.0;    // I_0^S
    double reorder_point = 0.0;  // I_0^s
    double objective = 0.0;
    /// C_S(I_0^S) = G_s(I_0^s).
    double linked_cost = 0.0;
    SubmodelSolution up_to;
    SubmodelSolution reorder;
    int link_roots = 0;
};

JointSolution joint_solution(const MilpModel &model, const SolveResult &result);

}  // namespace sslot
