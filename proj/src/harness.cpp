#include "sketchmom/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "sketchmom/rng.hpp"

namespace sketchmom {

namespace {

using nlohmann::json;

std::uint64_t trial_seed(std::uint64_t seed_base, std::uint64_t trial_id) {
    std::uint64_t s = seed_base ^ (0x517cc1b727220a95ULL * (trial_id + 1));
    return splitmix64(s);
}

} // namespace

LinearSystem gen_gaussian_system(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("gen_gaussian_system: m,n >= 1");
    std::mt19937_64 rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    Vector z(n);
    for (int j = 0; j < n; ++j) z(j) = normal(rng);
    return LinearSystem(a, a * z);
}

LinearSystem gen_pd_system(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("gen_pd_system: m,n >= 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::uint64_t attempt = 0;; ++attempt) {
        std::mt19937_64 rng = make_rng(seed, attempt);
        Matrix p(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) p(i, j) = normal(rng);
        Matrix a = p.transpose() * p;
        a = 0.5 * (a + a.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff()) continue;
        Vector z(n);
        for (int j = 0; j < n; ++j) z(j) = normal(rng);
        return LinearSystem(a, a * z);
    }
}

LinearSystem gen_sparse_rows_system(int m, int n, int g, std::uint64_t seed) {
    if (g < 1 || g > n) throw std::invalid_argument("gen_sparse_rows_system: need 1 <= g <= n");
    std::mt19937_64 rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix a = Matrix::Zero(m, n);
    std::vector<int> pool(n);
    for (int i = 0; i < m; ++i) {
        std::iota(pool.begin(), pool.end(), 0);
        for (int j = 0; j < g; ++j) {
            std::uniform_int_distribution<int> pick(j, n - 1);
            std::swap(pool[j], pool[pick(rng)]);
            double val;
            do {
                val = normal(rng);
            } while (val == 0.0);
            a(i, pool[j]) = val;
        }
    }
    Vector z(n);
    for (int j = 0; j < n; ++j) z(j) = normal(rng);
    return LinearSystem(a, a * z);
}

LibsvmMatrix parse_libsvm(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_libsvm: cannot open " + path);

    struct Entry {
        int row, col;
        double val;
    };
    std::vector<Entry> entries;
    LibsvmMatrix out;
    std::string line;
    int row = 0, max_col = 0, lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string token;
        if (!(ls >> token)) continue;  // blank line: skip entirely
        // first token is the label; ignored
        bool any = false;
        while (ls >> token) {
            auto colon = token.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("parse_libsvm: line " + std::to_string(lineno) +
                                         ": token '" + token + "' is not idx:val");
            int idx;
            double val;
            try {
                size_t used;
                idx = std::stoi(token.substr(0, colon), &used);
                if (used != colon) throw std::invalid_argument("trailing");
                val = std::stod(token.substr(colon + 1), &used);
                if (used != token.size() - colon - 1) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::runtime_error("parse_libsvm: line " + std::to_string(lineno) +
                                         ": non-numeric token '" + token + "'");
            }
            if (idx < 1)
                throw std::runtime_error("parse_libsvm: line " + std::to_string(lineno) +
                                         ": feature index must be >= 1");
            entries.push_back({row, idx - 1, val});
            max_col = std::max(max_col, idx);
            any = true;
        }
        if (!any)
            out.warnings.push_back("line " + std::to_string(lineno) +
                                   ": empty feature list (all-zero row)");
        ++row;
    }
    if (row == 0) throw std::runtime_error("parse_libsvm: no data rows in " + path);
    out.a = Matrix::Zero(row, std::max(max_col, 1));
    for (const auto& e : entries) out.a(e.row, e.col) = e.val;
    return out;
}

namespace {

SolverConfig solver_from_json(const json& j) {
    SolverConfig cfg;
    std::string method = j.value("method", "sgd");
    if (method == "sgd") cfg.method = Method::SGD;
    else if (method == "newton") cfg.method = Method::Newton;
    else if (method == "prox_point") cfg.method = Method::ProxPoint;
    else if (method == "dual_ascent") cfg.method = Method::DualAscent;
    else throw std::invalid_argument("unknown method: " + method);

    std::string momentum = j.value("momentum", "none");
    if (momentum == "none") cfg.momentum = MomentumMode::None;
    else if (momentum == "deterministic") cfg.momentum = MomentumMode::Deterministic;
    else if (momentum == "stochastic") cfg.momentum = MomentumMode::Stochastic;
    else throw std::invalid_argument("unknown momentum mode: " + momentum);

    std::string scale = j.value("scale", "raw");
    if (scale == "raw") cfg.scale = StochMomentumScale::Raw;
    else if (scale == "equivalent") cfg.scale = StochMomentumScale::Equivalent;
    else throw std::invalid_argument("unknown momentum scale: " + scale);

    cfg.beta = j.value("beta", 0.0);
    cfg.omega = j.value("omega", 1.0);
    cfg.max_iters = j.value("max_iters", 1000L);
    cfg.checkpoint_stride = j.value("checkpoint_stride", 0L);
    cfg.target_rel_err = j.value("target_rel_err", 0.0);
    cfg.target_abs_err = j.value("target_abs_err", 0.0);
    return cfg;
}

ProblemSpec problem_from_json(const json& j) {
    ProblemSpec p;
    std::string type = j.value("type", "gaussian");
    if (type == "gaussian") p.kind = ProblemKind::Gaussian;
    else if (type == "pd_gram") p.kind = ProblemKind::PdGram;
    else if (type == "sparse_rows") p.kind = ProblemKind::SparseRows;
    else if (type == "libsvm") p.kind = ProblemKind::Libsvm;
    else if (type == "consensus") p.kind = ProblemKind::Consensus;
    else throw std::invalid_argument("unknown problem type: " + type);
    p.m = j.value("m", 0);
    p.n = j.value("n", 0);
    p.g = j.value("g", 0);
    p.path = j.value("path", std::string());
    if (j.contains("graph")) {
        const json& gj = j["graph"];
        std::string topo = gj.value("topology", "line");
        if (topo == "line") p.graph.topology = Topology::Line;
        else if (topo == "cycle") p.graph.topology = Topology::Cycle;
        else if (topo == "rgg") p.graph.topology = Topology::RandomGeometric;
        else throw std::invalid_argument("unknown topology: " + topo);
        p.graph.n = gj.value("n", 2);
        p.graph.radius = gj.value("radius", 0.0);
        p.graph.seed = gj.value("seed", 0ULL);
    }
    return p;
}

} // namespace

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
    json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.problem = problem_from_json(j.at("problem"));
    for (const json& sj : j.at("solvers")) cfg.solvers.push_back(solver_from_json(sj));
    if (cfg.solvers.empty()) throw std::invalid_argument("experiment: empty solver grid");
    cfg.trials = j.value("trials", 1);
    if (cfg.trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
    cfg.seed_base = j.value("seed_base", 0ULL);
    cfg.output_dir = j.value("output_dir", ".");
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

LinearSystem build_problem(const ProblemSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case ProblemKind::Gaussian:
            return gen_gaussian_system(spec.m, spec.n, seed);
        case ProblemKind::PdGram:
            return gen_pd_system(spec.m, spec.n, seed);
        case ProblemKind::SparseRows:
            return gen_sparse_rows_system(spec.m, spec.n, spec.g, seed);
        case ProblemKind::Libsvm: {
            LibsvmMatrix lm = parse_libsvm(spec.path);
            std::mt19937_64 rng = make_rng(seed, 7);
            std::normal_distribution<double> normal(0.0, 1.0);
            Vector z(lm.a.cols());
            for (int j = 0; j < z.size(); ++j) z(j) = normal(rng);
            return LinearSystem(lm.a, lm.a * z);
        }
        case ProblemKind::Consensus:
            return incidence_matrix(build_graph(spec.graph));
    }
    throw std::logic_error("unreachable");
}

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void write_trace_csv(const std::string& path, const IterateTrace& trace,
                     const std::vector<double>& bound_col) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "k,rel_err_B,f_val,bound,op_count,wall_ns\n";
    for (size_t i = 0; i < trace.checkpoints.size(); ++i) {
        const Checkpoint& c = trace.checkpoints[i];
        double bound = i < bound_col.size() ? bound_col[i] : std::nan("");
        out << c.k << "," << fmt_double(c.rel_err_b) << "," << fmt_double(c.f_val) << ","
            << fmt_double(bound) << "," << fmt_double(c.op_count) << "," << c.wall_ns << "\n";
    }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);

    LinearSystem sys = build_problem(cfg.problem, cfg.seed_base);
    const bool pd_problem = cfg.problem.kind == ProblemKind::PdGram;
    MetricSpec metric =
        pd_problem ? MetricSpec::system_matrix(sys) : MetricSpec::identity(sys.cols());
    Sketcher sk = pd_problem ? Sketcher::mrcd(sys) : Sketcher::mrk(sys);

    // starting point: private node values for consensus, zero otherwise
    Vector x0;
    if (cfg.problem.kind == ProblemKind::Consensus) {
        std::mt19937_64 rng = make_rng(cfg.seed_base, 99);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        x0.resize(sys.cols());
        for (int i = 0; i < x0.size(); ++i) x0(i) = unif(rng);
    } else {
        x0 = Vector::Zero(sys.cols());
    }
    Vector x_star = project_onto_solution_set(sys, metric, x0);

    SpectrumReport spec = spectrum_W(sys, metric, expected_Z(sk, sys, metric));

    ExperimentResult result;
    for (size_t si = 0; si < cfg.solvers.size(); ++si) {
        SolverConfig solver = cfg.solvers[si];
        solver.validate(metric);

        // theoretical bound multiplier per checkpoint, when admissible
        RateReport rate;
        bool have_rate = false;
        try {
            rate = solver.momentum == MomentumMode::Stochastic
                       ? sm_rate_constants(solver.omega, solver.beta, sys.cols(),
                                           spec.lambda_min_plus, spec.lambda_max)
                       : rate_constants(solver.omega,
                                        solver.momentum == MomentumMode::Deterministic
                                            ? solver.beta
                                            : 0.0,
                                        spec.lambda_min_plus, spec.lambda_max);
            have_rate = rate.admissible;
        } catch (const std::exception&) {
            have_rate = false;
        }

        std::vector<IterateTrace> traces(cfg.trials);
        std::vector<std::future<IterateTrace>> futures;
        futures.reserve(cfg.trials);
        for (int t = 0; t < cfg.trials; ++t) {
            SolverConfig run_cfg = solver;
            run_cfg.seed = trial_seed(cfg.seed_base, si * 1000003ULL + t);
            futures.push_back(std::async(std::launch::async, [&, run_cfg]() {
                RunOptions opts;
                opts.x_star = x_star;
                return run(run_cfg, sys, metric, sk, x0, opts);
            }));
        }
        for (int t = 0; t < cfg.trials; ++t) traces[t] = futures[t].get();

        size_t min_cp = std::numeric_limits<size_t>::max();
        for (const auto& tr : traces) min_cp = std::min(min_cp, tr.checkpoints.size());

        SolverRunSummary summary;
        summary.label = "solver" + std::to_string(si);
        summary.ops_per_iter = traces.front().ops_per_iter;
        for (size_t c = 0; c < min_cp; ++c) {
            long k = traces.front().checkpoints[c].k;
            double mean_err = 0.0, mean_f = 0.0;
            for (const auto& tr : traces) {
                mean_err += tr.checkpoints[c].rel_err_b;
                mean_f += tr.checkpoints[c].f_val;
            }
            summary.ks.push_back(k);
            summary.mean_rel_err.push_back(mean_err / cfg.trials);
            summary.mean_f_val.push_back(mean_f / cfg.trials);
            summary.bound.push_back(have_rate ? rate.bound(k) : std::nan(""));
        }

        for (int t = 0; t < cfg.trials; ++t) {
            std::vector<double> bound_col;
            for (const auto& c : traces[t].checkpoints)
                bound_col.push_back(have_rate ? rate.bound(c.k) : std::nan(""));
            std::string path = cfg.output_dir + "/" + summary.label + "_trial" +
                               std::to_string(t) + ".csv";
            write_trace_csv(path, traces[t], bound_col);
            result.csv_files.push_back(path);
        }

        std::string agg_path = cfg.output_dir + "/" + summary.label + "_mean.csv";
        {
            std::ofstream out(agg_path, std::ios::binary);
            out << "k,rel_err_B,f_val,bound,op_count,wall_ns\n";
            for (size_t c = 0; c < summary.ks.size(); ++c)
                out << summary.ks[c] << "," << fmt_double(summary.mean_rel_err[c]) << ","
                    << fmt_double(summary.mean_f_val[c]) << "," << fmt_double(summary.bound[c])
                    << "," << fmt_double(summary.ops_per_iter * summary.ks[c]) << ",0\n";
        }
        result.csv_files.push_back(agg_path);
        result.summaries.push_back(std::move(summary));
    }
    return result;
}

std::vector<ComplexityRow> measure_complexity_ratio(int m, int n, const std::vector<int>& g_list,
                                                    double beta, double eps, int trials,
                                                    std::uint64_t seed) {
    if (beta < 0.0 || beta >= 1.0)
        throw std::invalid_argument("measure_complexity_ratio: beta must be in [0, 1)");
    if (!(eps > 0.0)) throw std::invalid_argument("measure_complexity_ratio: eps must be > 0");

    std::vector<ComplexityRow> rows;
    for (int g : g_list) {
        LinearSystem sys = gen_sparse_rows_system(m, n, g, trial_seed(seed, g));
        MetricSpec metric = MetricSpec::identity(n);
        Sketcher sk = Sketcher::mrk(sys);
        Vector x0 = Vector::Zero(n);
        Vector x_star = project_onto_solution_set(sys, metric, x0);
        ComplexityModel model{n, static_cast<double>(g)};

        SolverConfig msgd;
        msgd.method = Method::SGD;
        msgd.momentum = MomentumMode::Deterministic;
        msgd.beta = beta;
        msgd.omega = 1.0;
        msgd.target_abs_err = eps;
        msgd.max_iters = 20'000'000;
        msgd.checkpoint_stride = 1'000'000;

        SolverConfig smsgd = msgd;
        smsgd.momentum = MomentumMode::Stochastic;
        smsgd.scale = StochMomentumScale::Equivalent;

        ComplexityRow row;
        row.g = g;
        row.ratio_theory = 1.0 + static_cast<double>(n) / g;
        double ratio_acc = 0.0;
        for (int t = 0; t < trials; ++t) {
            RunOptions opts;
            opts.x_star = x_star;
            SolverConfig c1 = msgd;
            c1.seed = trial_seed(seed, 2 * t);
            SolverConfig c2 = smsgd;
            c2.seed = trial_seed(seed, 2 * t + 1);
            auto f1 = std::async(std::launch::async,
                                 [&] { return run(c1, sys, metric, sk, x0, opts); });
            IterateTrace t2 = run(c2, sys, metric, sk, x0, opts);
            IterateTrace t1 = f1.get();
            if (!t1.converged || !t2.converged)
                throw std::runtime_error("measure_complexity_ratio: non-convergence at g=" +
                                         std::to_string(g));
            double cost1 = model.cost_momentum() * t1.iters;
            double cost2 = model.cost_stochastic_momentum() * t2.iters;
            ratio_acc += cost1 / cost2;
            row.mean_iters_msgd += t1.iters;
            row.mean_iters_smsgd += t2.iters;
        }
        row.ratio_measured = ratio_acc / trials;
        row.mean_iters_msgd /= trials;
        row.mean_iters_smsgd /= trials;
        rows.push_back(row);
    }
    return rows;
}

} // namespace sketchmom
