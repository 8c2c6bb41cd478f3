#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sketchmom/consensus.hpp"
#include "sketchmom/harness.hpp"
#include "sketchmom/linalg.hpp"
#include "sketchmom/rates.hpp"
#include "sketchmom/sketch.hpp"
#include "sketchmom/solvers.hpp"

namespace py = pybind11;
using namespace sketchmom;

namespace {

MetricSpec make_metric(const std::string& kind, const LinearSystem& sys) {
    if (kind == "identity") return MetricSpec::identity(sys.cols());
    if (kind == "system_matrix") return MetricSpec::system_matrix(sys);
    if (kind == "gram_ata") return MetricSpec::gram_ata(sys);
    throw std::invalid_argument("unknown metric: " + kind);
}

Sketcher make_sketcher(const std::string& variant, const LinearSystem& sys, int block_size) {
    if (variant == "mrk") return Sketcher::mrk(sys);
    if (variant == "mrcd") return Sketcher::mrcd(sys);
    if (variant == "block_rows") return Sketcher::block_rows(block_size);
    if (variant == "gaussian") return Sketcher::gaussian();
    if (variant == "column_coordinate") return Sketcher::column_coordinate(sys);
    throw std::invalid_argument("unknown sketcher: " + variant);
}

SolverConfig make_config(const std::string& method, const std::string& momentum, double beta,
                         const std::string& scale, double omega, long max_iters,
                         long checkpoint_stride, double target_rel_err, double target_abs_err,
                         std::uint64_t seed) {
    SolverConfig cfg;
    if (method == "sgd") cfg.method = Method::SGD;
    else if (method == "newton") cfg.method = Method::Newton;
    else if (method == "prox_point") cfg.method = Method::ProxPoint;
    else if (method == "dual_ascent") cfg.method = Method::DualAscent;
    else throw std::invalid_argument("unknown method: " + method);
    if (momentum == "none") cfg.momentum = MomentumMode::None;
    else if (momentum == "deterministic") cfg.momentum = MomentumMode::Deterministic;
    else if (momentum == "stochastic") cfg.momentum = MomentumMode::Stochastic;
    else throw std::invalid_argument("unknown momentum mode: " + momentum);
    if (scale == "raw") cfg.scale = StochMomentumScale::Raw;
    else if (scale == "equivalent") cfg.scale = StochMomentumScale::Equivalent;
    else throw std::invalid_argument("unknown momentum scale: " + scale);
    cfg.beta = beta;
    cfg.omega = omega;
    cfg.max_iters = max_iters;
    cfg.checkpoint_stride = checkpoint_stride;
    cfg.target_rel_err = target_rel_err;
    cfg.target_abs_err = target_abs_err;
    cfg.seed = seed;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "sketch-and-project solvers with heavy-ball and stochastic momentum";

    py::class_<LinearSystem>(m, "LinearSystem")
        .def(py::init<Matrix, Vector, double>(), py::arg("A"), py::arg("b"),
             py::arg("consistency_tol") = 1e-8)
        .def_property_readonly("A", &LinearSystem::A)
        .def_property_readonly("b", &LinearSystem::b)
        .def_property_readonly("rows", &LinearSystem::rows)
        .def_property_readonly("cols", &LinearSystem::cols)
        .def_property_readonly("frob_sq", &LinearSystem::frob_sq)
        .def_property_readonly("mean_row_nnz", &LinearSystem::mean_row_nnz);

    py::class_<Checkpoint>(m, "Checkpoint")
        .def_readonly("k", &Checkpoint::k)
        .def_readonly("rel_err_b", &Checkpoint::rel_err_b)
        .def_readonly("f_val", &Checkpoint::f_val)
        .def_readonly("op_count", &Checkpoint::op_count)
        .def_readonly("wall_ns", &Checkpoint::wall_ns);

    py::class_<IterateTrace>(m, "IterateTrace")
        .def_readonly("checkpoints", &IterateTrace::checkpoints)
        .def_readonly("x_star", &IterateTrace::x_star)
        .def_readonly("x_final", &IterateTrace::x_final)
        .def_readonly("iters", &IterateTrace::iters)
        .def_readonly("converged", &IterateTrace::converged)
        .def_readonly("final_rel_err", &IterateTrace::final_rel_err)
        .def_readonly("ops_per_iter", &IterateTrace::ops_per_iter);

    py::class_<RateReport>(m, "RateReport")
        .def_readonly("a1", &RateReport::a1)
        .def_readonly("a2", &RateReport::a2)
        .def_readonly("q", &RateReport::q)
        .def_readonly("delta", &RateReport::delta)
        .def_readonly("admissible", &RateReport::admissible)
        .def("bound", &RateReport::bound, py::arg("k"));

    py::class_<ComplexityRow>(m, "ComplexityRow")
        .def_readonly("g", &ComplexityRow::g)
        .def_readonly("ratio_measured", &ComplexityRow::ratio_measured)
        .def_readonly("ratio_theory", &ComplexityRow::ratio_theory)
        .def_readonly("mean_iters_msgd", &ComplexityRow::mean_iters_msgd)
        .def_readonly("mean_iters_smsgd", &ComplexityRow::mean_iters_smsgd);

    m.def("gen_gaussian_system", &gen_gaussian_system, py::arg("m"), py::arg("n"),
          py::arg("seed"));
    m.def("gen_pd_system", &gen_pd_system, py::arg("m"), py::arg("n"), py::arg("seed"));
    m.def("gen_sparse_rows_system", &gen_sparse_rows_system, py::arg("m"), py::arg("n"),
          py::arg("g"), py::arg("seed"));

    m.def(
        "project_onto_solution_set",
        [](const LinearSystem& sys, const Vector& x, const std::string& metric) {
            return project_onto_solution_set(sys, make_metric(metric, sys), x);
        },
        py::arg("system"), py::arg("x"), py::arg("metric") = "identity");

    m.def("pinv_psd", &pinv_psd, py::arg("M"), py::arg("rel_tol") = 1e-10);

    m.def(
        "spectrum",
        [](const LinearSystem& sys, const std::string& sketcher, const std::string& metric,
           int block_size) {
            MetricSpec ms = make_metric(metric, sys);
            Sketcher sk = make_sketcher(sketcher, sys, block_size);
            SpectrumReport rep = spectrum_W(sys, ms, expected_Z(sk, sys, ms));
            return py::make_tuple(rep.eigenvalues, rep.lambda_min_plus, rep.lambda_max);
        },
        py::arg("system"), py::arg("sketcher") = "mrk", py::arg("metric") = "identity",
        py::arg("block_size") = 1,
        "Eigenvalues of B^{-1/2} E[Z] B^{-1/2}, plus (lambda_min_plus, lambda_max)");

    m.def(
        "solve",
        [](const LinearSystem& sys, const Vector& x0, const std::string& method,
           const std::string& momentum, double beta, const std::string& scale, double omega,
           long max_iters, long checkpoint_stride, double target_rel_err,
           double target_abs_err, std::uint64_t seed, const std::string& sketcher,
           const std::string& metric, int block_size) {
            SolverConfig cfg = make_config(method, momentum, beta, scale, omega, max_iters,
                                           checkpoint_stride, target_rel_err, target_abs_err,
                                           seed);
            MetricSpec ms = make_metric(metric, sys);
            Sketcher sk = make_sketcher(sketcher, sys, block_size);
            return run(cfg, sys, ms, sk, x0);
        },
        py::arg("system"), py::arg("x0"), py::arg("method") = "sgd",
        py::arg("momentum") = "none", py::arg("beta") = 0.0, py::arg("scale") = "raw",
        py::arg("omega") = 1.0, py::arg("max_iters") = 1000,
        py::arg("checkpoint_stride") = 0, py::arg("target_rel_err") = 0.0,
        py::arg("target_abs_err") = 0.0, py::arg("seed") = 0, py::arg("sketcher") = "mrk",
        py::arg("metric") = "identity", py::arg("block_size") = 1);

    m.def("rate_constants", &rate_constants, py::arg("omega"), py::arg("beta"),
          py::arg("lambda_min_plus"), py::arg("lambda_max"));
    m.def("beta_max", &beta_max, py::arg("omega"), py::arg("lambda_min_plus"),
          py::arg("lambda_max"));
    m.def(
        "accelerated_params",
        [](double lmin, double lmax, const std::string& mode) {
            AcceleratedMode am = mode == "unit_step" ? AcceleratedMode::UnitStep
                               : mode == "inv_lmax"  ? AcceleratedMode::InvLmax
                                                     : throw std::invalid_argument(
                                                           "unknown mode: " + mode);
            AcceleratedParams p = accelerated_params(lmin, lmax, am);
            return py::make_tuple(p.omega, p.beta);
        },
        py::arg("lambda_min_plus"), py::arg("lambda_max"), py::arg("mode") = "unit_step");
    m.def("sm_rate_constants", &sm_rate_constants, py::arg("omega"), py::arg("beta"),
          py::arg("n"), py::arg("lambda_min_plus"), py::arg("lambda_max"));
    m.def("cesaro_bound", &cesaro_bound, py::arg("omega"), py::arg("beta"),
          py::arg("dist0_sq"), py::arg("f0"), py::arg("k"));

    m.def(
        "gossip",
        [](const std::string& topology, int n, double radius, std::uint64_t graph_seed,
           const Vector& c, double beta, double omega, long max_iters, double target_rel_err,
           std::uint64_t seed) {
            GraphSpec spec;
            if (topology == "line") spec.topology = Topology::Line;
            else if (topology == "cycle") spec.topology = Topology::Cycle;
            else if (topology == "rgg") spec.topology = Topology::RandomGeometric;
            else throw std::invalid_argument("unknown topology: " + topology);
            spec.n = n;
            spec.radius = radius;
            spec.seed = graph_seed;
            Graph g = build_graph(spec);
            SolverConfig cfg;
            cfg.method = Method::SGD;
            cfg.omega = omega;
            cfg.momentum = beta > 0 ? MomentumMode::Deterministic : MomentumMode::None;
            cfg.beta = beta;
            cfg.max_iters = max_iters;
            cfg.target_rel_err = target_rel_err;
            cfg.seed = seed;
            return run_gossip(g, c, cfg);
        },
        py::arg("topology"), py::arg("n"), py::arg("radius"), py::arg("graph_seed"),
        py::arg("c"), py::arg("beta") = 0.0, py::arg("omega") = 1.0,
        py::arg("max_iters") = 1000000, py::arg("target_rel_err") = 1e-8,
        py::arg("seed") = 0);

    m.def(
        "algebraic_connectivity",
        [](const std::string& topology, int n) {
            Topology t = topology == "line"    ? Topology::Line
                         : topology == "cycle" ? Topology::Cycle
                                               : throw std::invalid_argument(
                                                     "closed form needs line or cycle");
            Graph g = build_graph({t, n});
            return py::make_tuple(algebraic_connectivity(g),
                                  algebraic_connectivity_closed_form(t, n));
        },
        py::arg("topology"), py::arg("n"), "(numeric, closed form) for line/cycle graphs");

    m.def("measure_complexity_ratio", &measure_complexity_ratio, py::arg("m"), py::arg("n"),
          py::arg("g_list"), py::arg("beta"), py::arg("eps"), py::arg("trials"),
          py::arg("seed"), py::call_guard<py::gil_scoped_release>());

    m.def(
        "run_experiment_json",
        [](const std::string& config_json, const std::string& output_dir) {
            ExperimentConfig cfg = ExperimentConfig::from_json_string(config_json);
            if (!output_dir.empty()) cfg.output_dir = output_dir;
            ExperimentResult res = run_experiment(cfg);
            return res.csv_files;
        },
        py::arg("config_json"), py::arg("output_dir") = "",
        "Run a JSON-configured experiment grid; returns the written CSV paths");
}
