#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sketchmom/harness.hpp"
#include "sketchmom/rng.hpp"

using namespace sketchmom;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("sketchmom_test_" + std::to_string(splitmix_once()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    static std::uint64_t splitmix_once() {
        static std::uint64_t ctr = 0x9e3779b97f4a7c15ULL;
        std::mt19937_64 rng = make_rng(ctr++);
        return rng();
    }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("generators are deterministic per seed and consistent") {
    LinearSystem g1 = gen_gaussian_system(7, 4, 2);
    LinearSystem g2 = gen_gaussian_system(7, 4, 2);
    LinearSystem g3 = gen_gaussian_system(7, 4, 3);
    CHECK((g1.A() - g2.A()).norm() == 0.0);
    CHECK((g1.b() - g2.b()).norm() == 0.0);
    CHECK((g1.A() - g3.A()).norm() > 0.0);

    // b = Az exactly, so the least-squares residual vanishes
    Vector z = g1.A().colPivHouseholderQr().solve(g1.b());
    CHECK((g1.A() * z - g1.b()).norm() < 1e-10 * g1.b().norm());

    LinearSystem pd = gen_pd_system(9, 5, 4);
    CHECK(pd.rows() == 5);
    CHECK(pd.cols() == 5);
    CHECK((pd.A() - pd.A().transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> es(pd.A(), Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("gen_sparse_rows_system row sparsity") {
    LinearSystem sp = gen_sparse_rows_system(30, 12, 4, 5);
    for (int i = 0; i < 30; ++i) {
        CHECK(sp.csr().row_nnz(i) == 4);
        CHECK(sp.row_sq_norm(i) > 0.0);
    }
    CHECK(sp.mean_row_nnz() == doctest::Approx(4.0));
    CHECK_THROWS(gen_sparse_rows_system(5, 3, 7, 1));  // g > n
    CHECK_THROWS(gen_sparse_rows_system(5, 3, 0, 1));
}

TEST_CASE("parse_libsvm") {
    TempDir td;
    fs::path file = td.path / "data.libsvm";

    SUBCASE("well-formed file") {
        write_file(file,
                   "+1 1:0.5 3:-2\n"
                   "-1 2:1.25\n"
                   "\n"
                   "+1 1:4\n");
        LibsvmMatrix m = parse_libsvm(file.string());
        REQUIRE(m.a.rows() == 3);
        REQUIRE(m.a.cols() == 3);
        CHECK(m.a(0, 0) == doctest::Approx(0.5));
        CHECK(m.a(0, 2) == doctest::Approx(-2.0));
        CHECK(m.a(1, 1) == doctest::Approx(1.25));
        CHECK(m.a(2, 0) == doctest::Approx(4.0));
        CHECK(m.a(1, 0) == doctest::Approx(0.0));
        CHECK(m.warnings.empty());
    }

    SUBCASE("label-only line produces a warning with its line number") {
        write_file(file, "+1 1:1\n-1\n");
        LibsvmMatrix m = parse_libsvm(file.string());
        CHECK(m.a.rows() == 2);
        REQUIRE(m.warnings.size() == 1);
        CHECK(m.warnings[0].find("line 2") != std::string::npos);
    }

    SUBCASE("malformed tokens carry line numbers") {
        write_file(file, "+1 1:1\n+1 2=3\n");
        CHECK_THROWS_WITH_AS(parse_libsvm(file.string()),
                             doctest::Contains("line 2"), std::runtime_error);
        write_file(file, "+1 1:abc\n");
        CHECK_THROWS_WITH_AS(parse_libsvm(file.string()),
                             doctest::Contains("line 1"), std::runtime_error);
        write_file(file, "+1 0:1\n");
        CHECK_THROWS_AS(parse_libsvm(file.string()), std::runtime_error);
    }

    SUBCASE("missing or empty file") {
        CHECK_THROWS(parse_libsvm((td.path / "absent").string()));
        write_file(file, "");
        CHECK_THROWS(parse_libsvm(file.string()));
    }
}

TEST_CASE("ExperimentConfig JSON round trip and validation") {
    std::string text = R"({
        "problem": {"type": "sparse_rows", "m": 40, "n": 10, "g": 3},
        "solvers": [
            {"method": "sgd", "momentum": "deterministic", "beta": 0.2, "omega": 1.0,
             "max_iters": 500, "checkpoint_stride": 50},
            {"method": "sgd", "momentum": "stochastic", "scale": "equivalent",
             "beta": 0.02, "max_iters": 500}
        ],
        "trials": 2,
        "seed_base": 7,
        "output_dir": "/tmp/out"
    })";
    ExperimentConfig cfg = ExperimentConfig::from_json_string(text);
    CHECK(cfg.problem.kind == ProblemKind::SparseRows);
    CHECK(cfg.problem.g == 3);
    REQUIRE(cfg.solvers.size() == 2);
    CHECK(cfg.solvers[0].momentum == MomentumMode::Deterministic);
    CHECK(cfg.solvers[0].beta == doctest::Approx(0.2));
    CHECK(cfg.solvers[0].checkpoint_stride == 50);
    CHECK(cfg.solvers[1].scale == StochMomentumScale::Equivalent);
    CHECK(cfg.trials == 2);
    CHECK(cfg.seed_base == 7);

    CHECK_THROWS(ExperimentConfig::from_json_string("{}"));
    CHECK_THROWS(ExperimentConfig::from_json_string(
        R"({"problem": {"type": "nope"}, "solvers": [{}]})"));
    CHECK_THROWS(ExperimentConfig::from_json_string(
        R"({"problem": {"type": "gaussian"}, "solvers": []})"));
    CHECK_THROWS(ExperimentConfig::from_json_string(
        R"({"problem": {"type": "gaussian"}, "solvers": [{"momentum": "sometimes"}]})"));
}

TEST_CASE("build_problem covers every kind") {
    ProblemSpec p;
    p.kind = ProblemKind::Gaussian;
    p.m = 6;
    p.n = 4;
    CHECK(build_problem(p, 1).rows() == 6);

    p.kind = ProblemKind::PdGram;
    p.m = 8;
    p.n = 4;
    CHECK(build_problem(p, 1).rows() == 4);

    p.kind = ProblemKind::SparseRows;
    p.m = 6;
    p.n = 4;
    p.g = 2;
    CHECK(build_problem(p, 1).csr().row_nnz(0) == 2);

    TempDir td;
    fs::path file = td.path / "x.libsvm";
    write_file(file, "+1 1:1 2:2\n-1 2:1\n");
    p.kind = ProblemKind::Libsvm;
    p.path = file.string();
    LinearSystem ls = build_problem(p, 1);
    CHECK(ls.rows() == 2);
    CHECK(ls.cols() == 2);

    p.kind = ProblemKind::Consensus;
    p.graph = GraphSpec{Topology::Cycle, 8};
    LinearSystem cs = build_problem(p, 1);
    CHECK(cs.rows() == 8);
    CHECK(cs.cols() == 8);
}

TEST_CASE("run_experiment writes per-trial and mean CSVs") {
    TempDir td;
    ExperimentConfig cfg = ExperimentConfig::from_json_string(R"({
        "problem": {"type": "gaussian", "m": 20, "n": 8},
        "solvers": [
            {"method": "sgd", "beta": 0.0, "omega": 1.0, "max_iters": 400,
             "checkpoint_stride": 100},
            {"method": "sgd", "momentum": "deterministic", "beta": 0.2, "omega": 1.0,
             "max_iters": 400, "checkpoint_stride": 100}
        ],
        "trials": 3,
        "seed_base": 11
    })");
    cfg.output_dir = td.path.string();

    ExperimentResult res = run_experiment(cfg);
    // 2 solvers x (3 trials + 1 mean)
    CHECK(res.csv_files.size() == 8);
    for (const std::string& f : res.csv_files) {
        REQUIRE(fs::exists(f));
        std::ifstream in(f);
        std::string header;
        std::getline(in, header);
        CHECK(header == "k,rel_err_B,f_val,bound,op_count,wall_ns");
        std::string row;
        CHECK(std::getline(in, row));
    }

    REQUIRE(res.summaries.size() == 2);
    for (const SolverRunSummary& s : res.summaries) {
        REQUIRE(s.ks.size() >= 2);
        CHECK(s.ks[0] == 0);
        CHECK(s.mean_rel_err[0] == doctest::Approx(1.0));
        // error decays over the run and the admissible bound dominates the mean
        CHECK(s.mean_rel_err.back() < 0.5);
        for (size_t i = 0; i < s.ks.size(); ++i) {
            if (!std::isnan(s.bound[i])) CHECK(s.mean_rel_err[i] <= s.bound[i] * 1.5);
        }
    }

    // determinism: same config, same summary
    ExperimentResult res2 = run_experiment(cfg);
    for (size_t i = 0; i < res.summaries[0].mean_rel_err.size(); ++i)
        CHECK(res2.summaries[0].mean_rel_err[i] ==
              doctest::Approx(res.summaries[0].mean_rel_err[i]));
}

TEST_CASE("run_experiment on a consensus problem") {
    TempDir td;
    ExperimentConfig cfg = ExperimentConfig::from_json_string(R"({
        "problem": {"type": "consensus", "graph": {"topology": "cycle", "n": 10}},
        "solvers": [{"method": "sgd", "omega": 1.0, "max_iters": 600,
                     "checkpoint_stride": 200}],
        "trials": 1,
        "seed_base": 3
    })");
    cfg.output_dir = td.path.string();
    ExperimentResult res = run_experiment(cfg);
    REQUIRE(res.summaries.size() == 1);
    CHECK(res.summaries[0].mean_rel_err.back() < res.summaries[0].mean_rel_err.front());
}

TEST_CASE("measure_complexity_ratio returns sane rows on a small instance") {
    std::vector<ComplexityRow> rows = measure_complexity_ratio(60, 20, {5}, 0.002, 1e-4, 1, 5);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].g == 5);
    CHECK(rows[0].ratio_theory == doctest::Approx(1.0 + 20.0 / 5.0));
    CHECK(rows[0].ratio_measured > 1.0);
    CHECK(rows[0].mean_iters_msgd > 0.0);
    CHECK(rows[0].mean_iters_smsgd > 0.0);
}
