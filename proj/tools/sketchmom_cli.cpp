// Command-line front end: single solves, config-driven experiment grids,
// rate-formula evaluation, consensus runs, and the complexity-ratio table.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "sketchmom/consensus.hpp"
#include "sketchmom/harness.hpp"
#include "sketchmom/linalg.hpp"
#include "sketchmom/rates.hpp"
#include "sketchmom/rng.hpp"
#include "sketchmom/sketch.hpp"
#include "sketchmom/solvers.hpp"

using namespace sketchmom;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out = ".";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config, "JSON config file");
    cmd->add_option("--seed", o.seed, "base RNG seed")->each([&](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv"}));
}

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_csv(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + p.string());
    std::cout << p.string() << "\n";
    return out;
}

ExperimentConfig load_config(const CommonOpts& o) {
    if (o.config.empty()) throw CLI::ValidationError("--config is required");
    ExperimentConfig cfg = ExperimentConfig::from_json_file(o.config);
    if (o.seed_set) cfg.seed_base = o.seed;
    cfg.output_dir = o.out;
    return cfg;
}

int cmd_solve(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o);
    LinearSystem sys = build_problem(cfg.problem, cfg.seed_base);
    const bool pd = cfg.problem.kind == ProblemKind::PdGram;
    MetricSpec metric = pd ? MetricSpec::system_matrix(sys) : MetricSpec::identity(sys.cols());
    Sketcher sk = pd ? Sketcher::mrcd(sys) : Sketcher::mrk(sys);

    SolverConfig scfg = cfg.solvers.front();
    scfg.seed = cfg.seed_base;
    Vector x0 = Vector::Zero(sys.cols());
    IterateTrace tr = run(scfg, sys, metric, sk, x0);

    std::ofstream out = open_csv(o.out, "solve.csv");
    out << "k,rel_err_B,f_val,bound,op_count,wall_ns\n";
    for (const Checkpoint& c : tr.checkpoints)
        out << c.k << "," << fmt(c.rel_err_b) << "," << fmt(c.f_val) << ",nan,"
            << fmt(c.op_count) << "," << c.wall_ns << "\n";
    std::cerr << "iters " << tr.iters << " converged " << tr.converged << " final_rel_err "
              << fmt(tr.final_rel_err) << "\n";
    return 0;
}

int cmd_experiment(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o);
    ExperimentResult res = run_experiment(cfg);
    for (const std::string& f : res.csv_files) std::cout << f << "\n";
    return 0;
}

int cmd_rates(const CommonOpts& o, double omega, double beta, double lmin, double lmax,
              long n) {
    RateReport r = rate_constants(omega, beta, lmin, lmax);
    double bmax = beta_max(omega, lmin, lmax);
    AcceleratedParams acc = accelerated_params(lmin, lmax, AcceleratedMode::UnitStep);

    std::ofstream out = open_csv(o.out, "rates.csv");
    out << "omega,beta,lambda_min_plus,lambda_max,a1,a2,q,delta,admissible,beta_max,"
           "accel_omega,accel_beta,sm_q\n";
    double sm_q = n > 0 ? sm_rate_constants(omega, beta * n, n, lmin, lmax).q
                        : std::nan("");
    out << fmt(omega) << "," << fmt(beta) << "," << fmt(lmin) << "," << fmt(lmax) << ","
        << fmt(r.a1) << "," << fmt(r.a2) << "," << fmt(r.q) << "," << fmt(r.delta) << ","
        << (r.admissible ? 1 : 0) << "," << fmt(bmax) << "," << fmt(acc.omega) << ","
        << fmt(acc.beta) << "," << fmt(sm_q) << "\n";
    return 0;
}

int cmd_consensus(const CommonOpts& o, const std::string& topology, int n, double radius,
                  const std::string& graph_file, double beta, long max_iters,
                  double target_rel_err) {
    Graph g;
    if (!graph_file.empty()) {
        g = load_edge_list(graph_file);
    } else {
        GraphSpec spec;
        if (topology == "line") spec.topology = Topology::Line;
        else if (topology == "cycle") spec.topology = Topology::Cycle;
        else if (topology == "rgg") spec.topology = Topology::RandomGeometric;
        else throw CLI::ValidationError("unknown topology: " + topology);
        spec.n = n;
        spec.radius = radius;
        spec.seed = o.seed;
        g = build_graph(spec);
    }

    std::mt19937_64 rng = make_rng(o.seed, 99);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Vector c(g.n);
    for (int i = 0; i < g.n; ++i) c(i) = u01(rng);

    SolverConfig cfg;
    cfg.method = Method::SGD;
    cfg.omega = 1.0;
    cfg.momentum = beta > 0 ? MomentumMode::Deterministic : MomentumMode::None;
    cfg.beta = beta;
    cfg.max_iters = max_iters;
    cfg.target_rel_err = target_rel_err;
    cfg.seed = o.seed;
    IterateTrace tr = run_gossip(g, c, cfg);

    std::ofstream out = open_csv(o.out, "consensus.csv");
    out << "k,rel_err_B,f_val,bound,op_count,wall_ns\n";
    for (const Checkpoint& cp : tr.checkpoints)
        out << cp.k << "," << fmt(cp.rel_err_b) << "," << fmt(cp.f_val) << ",nan,"
            << fmt(cp.op_count) << "," << cp.wall_ns << "\n";
    std::cerr << "nodes " << g.n << " edges " << g.m() << " algebraic_connectivity "
              << fmt(algebraic_connectivity(g)) << " iters " << tr.iters << " converged "
              << tr.converged << "\n";
    return 0;
}

int cmd_complexity(const CommonOpts& o, int m, int n, std::vector<int> g_list, double beta,
                   double eps, int trials) {
    if (g_list.empty()) g_list = {5, 20, 50};
    std::vector<ComplexityRow> rows =
        measure_complexity_ratio(m, n, g_list, beta, eps, trials, o.seed);
    std::ofstream out = open_csv(o.out, "complexity.csv");
    out << "g,ratio_measured,ratio_theory,mean_iters_msgd,mean_iters_smsgd\n";
    for (const ComplexityRow& r : rows)
        out << r.g << "," << fmt(r.ratio_measured) << "," << fmt(r.ratio_theory) << ","
            << fmt(r.mean_iters_msgd) << "," << fmt(r.mean_iters_smsgd) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sketch-and-project solvers with momentum"};
    app.require_subcommand(1);

    CommonOpts solve_o, exp_o, rates_o, cons_o, cplx_o;

    CLI::App* solve = app.add_subcommand("solve", "run the first configured solver once");
    add_common(solve, solve_o);

    CLI::App* experiment = app.add_subcommand("experiment", "run a config-driven solver grid");
    add_common(experiment, exp_o);

    CLI::App* rates = app.add_subcommand("rates", "evaluate convergence-rate formulas");
    add_common(rates, rates_o);
    double omega = 1.0, beta = 0.0, lmin = 0.1, lmax = 1.0;
    long sm_n = 0;
    rates->add_option("--omega", omega, "stepsize");
    rates->add_option("--beta", beta, "momentum parameter");
    rates->add_option("--lmin", lmin, "smallest nonzero eigenvalue of W");
    rates->add_option("--lmax", lmax, "largest eigenvalue of W");
    rates->add_option("--n", sm_n, "columns for the stochastic-momentum rate (0 skips)");

    CLI::App* consensus = app.add_subcommand("consensus", "gossip run on a graph");
    add_common(consensus, cons_o);
    std::string topology = "cycle", graph_file;
    int cn = 10;
    double radius = 0.0, cbeta = 0.0, target_rel_err = 1e-8;
    long max_iters = 1000000;
    consensus->add_option("--topology", topology, "line|cycle|rgg");
    consensus->add_option("--n", cn, "node count");
    consensus->add_option("--radius", radius, "rgg radius (0 uses sqrt(log n / n))");
    consensus->add_option("--graph", graph_file, "edge-list file instead of a topology");
    consensus->add_option("--beta", cbeta, "momentum parameter");
    consensus->add_option("--max-iters", max_iters, "iteration cap");
    consensus->add_option("--target-rel-err", target_rel_err, "stopping threshold");

    CLI::App* complexity = app.add_subcommand("complexity", "measured vs theoretical cost ratio");
    add_common(complexity, cplx_o);
    int cm = 200, cncols = 100, trials = 10;
    std::vector<int> g_list;
    double cxbeta = 1e-4, eps = 1e-3;
    complexity->add_option("--m", cm, "rows");
    complexity->add_option("--ncols", cncols, "columns");
    complexity->add_option("--g", g_list, "nonzeros per row (repeatable)");
    complexity->add_option("--beta", cxbeta, "momentum parameter");
    complexity->add_option("--eps", eps, "stopping threshold on ||x_k - x*||");
    complexity->add_option("--trials", trials, "trial count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) return cmd_solve(solve_o);
        if (*experiment) return cmd_experiment(exp_o);
        if (*rates) return cmd_rates(rates_o, omega, beta, lmin, lmax, sm_n);
        if (*consensus)
            return cmd_consensus(cons_o, topology, cn, radius, graph_file, cbeta, max_iters,
                                 target_rel_err);
        if (*complexity)
            return cmd_complexity(cplx_o, cm, cncols, g_list, cxbeta, eps, trials);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
