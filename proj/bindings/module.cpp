#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uncross/crsm.hpp"
#include "uncross/datagen.hpp"
#include "uncross/geometry.hpp"
#include "uncross/io.hpp"
#include "uncross/mds.hpp"
#include "uncross/separation.hpp"
#include "uncross/types.hpp"

namespace py = pybind11;
using namespace uncross;

namespace {

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::no_crossings: return "no_crossings";
        case StopReason::movement_below_tolerance: return "movement_below_tolerance";
        case StopReason::iteration_cap: return "iteration_cap";
    }
    return "unknown";
}

std::vector<Edge> edges_from_pairs(const std::vector<std::pair<int, int>>& pairs) {
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [a, b] : pairs) edges.push_back({a, b});
    return edges;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "low-stress graph layouts with edge crossing reduction";

    py::class_<Edge>(m, "Edge")
        .def(py::init<int, int>(), py::arg("a"), py::arg("b"))
        .def_readonly("a", &Edge::a)
        .def_readonly("b", &Edge::b)
        .def("__eq__", [](const Edge& e, const Edge& o) { return e == o; })
        .def("__repr__", [](const Edge& e) {
            return "Edge(" + std::to_string(e.a) + ", " + std::to_string(e.b) + ")";
        });

    py::class_<GraphInstance>(m, "GraphInstance")
        .def(py::init([](int node_count, const std::vector<std::pair<int, int>>& edges,
                         const Eigen::MatrixXd& distances, std::vector<std::string> groups) {
                 return GraphInstance(node_count, edges_from_pairs(edges), distances,
                                      std::move(groups));
             }),
             py::arg("node_count"), py::arg("edges"), py::arg("distances"),
             py::arg("groups") = std::vector<std::string>{})
        .def_readonly("node_count", &GraphInstance::node_count)
        .def_readonly("edges", &GraphInstance::edges)
        .def_readonly("distances", &GraphInstance::distances)
        .def_readonly("groups", &GraphInstance::groups);

    py::class_<WeightMatrix>(m, "WeightMatrix")
        .def_readonly("values", &WeightMatrix::values)
        .def_readonly("alpha", &WeightMatrix::alpha);

    m.def("build_weights", &build_weights, py::arg("graph"), py::arg("alpha") = 2.0,
          "stress weights w_ij = d_ij ** -alpha with a zero diagonal");

    m.def("count_crossings", &count_crossings, py::arg("layout"), py::arg("graph"),
          "number of intersecting edge pairs that do not share an endpoint");
    m.def("segments_intersect", &segments_intersect, py::arg("s1"), py::arg("s2"));
    m.def("stress", &stress, py::arg("layout"), py::arg("graph"), py::arg("weights"));

    py::class_<Hyperplane>(m, "Hyperplane")
        .def(py::init<>())
        .def_readwrite("u", &Hyperplane::u)
        .def_readwrite("gamma", &Hyperplane::gamma);

    py::class_<SeparationResult>(m, "SeparationResult")
        .def_readonly("plane", &SeparationResult::plane)
        .def_readonly("violation", &SeparationResult::violation)
        .def_readonly("separated", &SeparationResult::separated)
        .def_readonly("converged", &SeparationResult::converged);

    m.def("separation_objective", &separation_objective, py::arg("a"), py::arg("b"), py::arg("u"),
          py::arg("gamma"), "squared hinge residual of the strict separation system");
    m.def(
        "solve_separation",
        [](const PolyhedronPoints& a, const PolyhedronPoints& b,
           std::optional<Hyperplane> warm) { return solve_separation(a, b, warm); },
        py::arg("a"), py::arg("b"), py::arg("warm_start") = std::nullopt,
        "minimize the residual over (u, gamma); zero means separable, positive "
        "certifies an intersection");

    py::class_<SmacofResult>(m, "SmacofResult")
        .def_readonly("layout", &SmacofResult::layout)
        .def_readonly("stress_trace", &SmacofResult::stress_trace)
        .def_readonly("iterations", &SmacofResult::iterations)
        .def_readonly("converged", &SmacofResult::converged);

    m.def(
        "smacof_embed",
        [](const GraphInstance& graph, const WeightMatrix& weights, std::optional<Layout> init,
           int max_iterations, double tolerance, std::uint64_t seed) {
            return smacof_embed(graph, weights, init ? &*init : nullptr, max_iterations,
                                tolerance, seed);
        },
        py::arg("graph"), py::arg("weights"), py::arg("init") = std::nullopt,
        py::arg("max_iterations") = 500, py::arg("tolerance") = 1e-6, py::arg("seed") = 0,
        "stress majorization embedding with a nonincreasing stress trace");

    py::class_<PenaltyParams>(m, "PenaltyParams")
        .def(py::init<>())
        .def_readwrite("epsilon", &PenaltyParams::epsilon)
        .def_readwrite("tau", &PenaltyParams::tau)
        .def_readwrite("rho_increase", &PenaltyParams::rho_increase)
        .def_readwrite("rho_max", &PenaltyParams::rho_max)
        .def_readwrite("rho_min", &PenaltyParams::rho_min)
        .def_readwrite("max_outer", &PenaltyParams::max_outer)
        .def_readwrite("max_inner", &PenaltyParams::max_inner);

    py::class_<TraceEntry>(m, "TraceEntry")
        .def_readonly("stress", &TraceEntry::stress)
        .def_readonly("crossings", &TraceEntry::crossings)
        .def_readonly("penalty_count", &TraceEntry::penalty_count)
        .def_readonly("max_rho", &TraceEntry::max_rho);

    py::class_<RunReport>(m, "RunReport")
        .def_readonly("layout", &RunReport::layout)
        .def_readonly("final_stress", &RunReport::final_stress)
        .def_readonly("final_crossings", &RunReport::final_crossings)
        .def_property_readonly("reason",
                               [](const RunReport& r) { return stop_reason_name(r.reason); })
        .def_readonly("trace", &RunReport::trace)
        .def_readonly("outer_iterations", &RunReport::outer_iterations)
        .def_readonly("inner_iterations", &RunReport::inner_iterations)
        .def_readonly("runtime_seconds", &RunReport::runtime_seconds)
        .def_readonly("optimizer_warning", &RunReport::optimizer_warning);

    m.def(
        "crsm_run",
        [](const GraphInstance& graph, const PenaltyParams& params, std::optional<Layout> init,
           std::uint64_t seed, double alpha) {
            return crsm_run(graph, params, init ? &*init : nullptr, seed, alpha);
        },
        py::arg("graph"), py::arg("params") = PenaltyParams{}, py::arg("init") = std::nullopt,
        py::arg("seed") = 0, py::arg("alpha") = 2.0,
        "crossing reduction with stress majorization; starts from init or a "
        "fresh stress-majorization embedding");

    py::class_<BenchmarkInstance>(m, "BenchmarkInstance")
        .def_readonly("graph", &BenchmarkInstance::graph)
        .def_readonly("points", &BenchmarkInstance::points)
        .def_readonly("projection", &BenchmarkInstance::projection)
        .def_readonly("planar_stress", &BenchmarkInstance::planar_stress)
        .def_readonly("seed", &BenchmarkInstance::seed);

    py::register_exception<GenerationError>(m, "GenerationError");
    m.def("generate_planar_instance", &generate_planar_instance, py::arg("nodes"),
          py::arg("edges"), py::arg("dimension") = 7, py::arg("seed") = 0,
          "random graph whose first-two-coordinates projection is crossing free");

    py::register_exception<IoError>(m, "IoError");
    py::class_<GraphDocument>(m, "GraphDocument")
        .def_readonly("graph", &GraphDocument::graph)
        .def_readonly("ids", &GraphDocument::ids)
        .def_readonly("coords", &GraphDocument::coords);
    m.def("make_graph_document",
          py::overload_cast<const BenchmarkInstance&>(&make_graph_document), py::arg("instance"));
    m.def("make_graph_document", py::overload_cast<const GraphInstance&>(&make_graph_document),
          py::arg("graph"));
    m.def("load_graph", &load_graph, py::arg("path"));
    m.def("save_graph", &save_graph, py::arg("doc"), py::arg("path"));

    m.def(
        "render_svg",
        [](const Layout& layout, const GraphInstance& graph, std::vector<std::string> ids) {
            return render_svg(layout, graph, ids);
        },
        py::arg("layout"), py::arg("graph"), py::arg("ids") = std::vector<std::string>{},
        "standalone SVG drawing of the layout");
}
