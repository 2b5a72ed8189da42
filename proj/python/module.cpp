#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sslot/heuristics.hpp"
#include "sslot/loss.hpp"
#include "sslot/sdp.hpp"
#include "sslot/simulator.hpp"
#include "sslot/testbed.hpp"

namespace py = pybind11;
using namespace sslot;

PYBIND11_MODULE(_core, m) {
    m.doc() = "(s, S) policies for non-stationary stochastic lot sizing";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<ParseError>(m, "ParseError", error);
    py::register_exception<SolverError>(m, "SolverError", error);

    py::class_<CostParameters>(m, "CostParameters")
        .def(py::init([](double K, double c, double h, double b) {
                 return CostParameters{K, c, h, b};
             }),
             py::arg("K"), py::arg("c") = 0.0, py::arg("h") = 1.0, py::arg("b") = 1.0)
        .def_readwrite("K", &CostParameters::fixed_ordering)
        .def_readwrite("c", &CostParameters::unit)
        .def_readwrite("h", &CostParameters::holding)
        .def_readwrite("b", &CostParameters::penalty);

    py::class_<Instance>(m, "Instance")
        .def_readwrite("costs", &Instance::costs)
        .def_readwrite("initial_inventory", &Instance::initial_inventory)
        .def_property_readonly("horizon", &Instance::horizon)
        .def_property_readonly("means",
                               [](const Instance &i) {
                                   std::vector<double> v;
                                   for (const auto &d : i.demands) v.push_back(d.mean);
                                   return v;
                               })
        .def_property_readonly("std_devs",
                               [](const Instance &i) {
                                   std::vector<double> v;
                                   for (const auto &d : i.demands) v.push_back(d.std_dev);
                                   return v;
                               })
        .def("to_json", [](const Instance &i) { return format_instance(i); });

    m.def(
        "make_instance",
        [](const CostParameters &costs, const std::vector<double> &means, double cv, double I0) {
            return make_instance(costs, means, cv, I0);
        },
        py::arg("costs"), py::arg("means"), py::arg("cv"), py::arg("initial_inventory") = 0.0);
    m.def("worked_example", &worked_example);
    m.def("read_instance", &read_instance);
    m.def("parse_instance", &parse_instance);

    py::class_<PolicyParameters>(m, "Policy")
        .def(py::init([](std::vector<double> s, std::vector<double> S) {
                 PolicyParameters p{std::move(s), std::move(S)};
                 validate(p);
                 return p;
             }),
             py::arg("reorder_points"), py::arg("order_up_to"))
        .def_readonly("reorder_points", &PolicyParameters::reorder_points)
        .def_readonly("order_up_to", &PolicyParameters::order_up_to)
        .def("__repr__", [](const PolicyParameters &p) {
            return "Policy(s=" + py::repr(py::cast(p.reorder_points)).cast<std::string>() +
                   ", S=" + py::repr(py::cast(p.order_up_to)).cast<std::string>() + ")";
        });

    m.def("loss", &loss, py::arg("x"), py::arg("mean") = 0.0, py::arg("std_dev") = 1.0);
    m.def("complementary_loss", &complementary_loss, py::arg("x"), py::arg("mean") = 0.0,
          py::arg("std_dev") = 1.0);
    m.def(
        "approximation_error",
        [](int cells, const std::string &strategy) {
            return approximation_error(make_partition(
                cells, strategy == "minimax" ? PartitionStrategy::minimax
                                             : PartitionStrategy::equal_probability));
        },
        py::arg("cells"), py::arg("strategy") = "equal");

    py::class_<SdpSolution>(m, "SdpSolution")
        .def_readonly("policy", &SdpSolution::policy)
        .def_readonly("expected_cost", &SdpSolution::expected_cost)
        .def_readonly("indifference_points", &SdpSolution::indifference_points)
        .def_property_readonly("grid",
                               [](const SdpSolution &s) {
                                   return py::make_tuple(s.grid.lower, s.grid.upper, s.grid.step);
                               })
        .def("G", [](const SdpSolution &s, int t, double y) { return scarf_g(s, t, y); },
             py::arg("t"), py::arg("y"));

    m.def(
        "solve_sdp",
        [](const Instance &inst, double step) {
            py::gil_scoped_release release;
            return solve_sdp(inst, step, 4);
        },
        py::arg("instance"), py::arg("grid_step") = 1.0);

    py::class_<HeuristicResult>(m, "HeuristicResult")
        .def_readonly("policy", &HeuristicResult::policy)
        .def_readonly("seconds", &HeuristicResult::seconds)
        .def_property_readonly("linked_costs", &HeuristicResult::linked_costs);

    m.def(
        "solve_heuristic",
        [](const Instance &inst, const std::string &method, int segments, double step) {
            HeuristicConfig config = default_config(inst.horizon());
            config.segments = segments;
            config.step = step;
            const Method mt = parse_method(method);
            py::gil_scoped_release release;
            return mt == Method::mp ? mp_policy(inst, config) : bs_policy(inst, config);
        },
        py::arg("instance"), py::arg("method") = "bs", py::arg("segments") = 11,
        py::arg("step") = 0.1);

    py::class_<SimulationResult>(m, "SimulationResult")
        .def_readonly("mean", &SimulationResult::mean)
        .def_readonly("std_error", &SimulationResult::std_error)
        .def_readonly("replications", &SimulationResult::replications)
        .def_readonly("seed", &SimulationResult::seed);

    m.def(
        "simulate",
        [](const Instance &inst, const PolicyParameters &policy, long reps, std::uint64_t seed,
           int threads) {
            py::gil_scoped_release release;
            return simulate_policy(inst, policy, {reps, seed, threads});
        },
        py::arg("instance"), py::arg("policy"), py::arg("replications") = 10000,
        py::arg("seed") = 0, py::arg("threads") = 1);

    m.def(
        "demand_means",
        [](const std::string &pattern, int horizon) {
            return demand_means(parse_pattern(pattern), horizon);
        },
        py::arg("pattern"), py::arg("horizon") = 8);
}
