#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sketchmom/consensus.hpp"
#include "sketchmom/linalg.hpp"
#include "sketchmom/rates.hpp"
#include "sketchmom/solvers.hpp"

namespace sketchmom {

/// A i.i.d. N(0,1), b = Az with z i.i.d. N(0,1).
LinearSystem gen_gaussian_system(int m, int n, std::uint64_t seed);

/// A = P^T P with Gaussian P (m x n); PD with probability 1; b = Az.
LinearSystem gen_pd_system(int m, int n, std::uint64_t seed);

/// Exactly g Gaussian nonzeros per row at uniformly chosen positions; b = Az.
LinearSystem gen_sparse_rows_system(int m, int n, int g, std::uint64_t seed);

struct LibsvmMatrix {
    Matrix a;
    std::vector<std::string> warnings;  // per-line issues, with line numbers
};

/// LIBSVM sparse text format: `label idx:val idx:val ...`, 1-based indices.
/// Labels are ignored; n is the largest feature index seen.
LibsvmMatrix parse_libsvm(const std::string& path);

enum class ProblemKind { Gaussian, PdGram, SparseRows, Libsvm, Consensus };

struct ProblemSpec {
    ProblemKind kind = ProblemKind::Gaussian;
    int m = 0;
    int n = 0;
    int g = 0;                 // sparse_rows
    std::string path;          // libsvm
    GraphSpec graph;           // consensus
};

struct ExperimentConfig {
    ProblemSpec problem;
    std::vector<SolverConfig> solvers;
    int trials = 1;
    std::uint64_t seed_base = 0;
    std::string output_dir = ".";

    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_string(const std::string& text);
};

struct SolverRunSummary {
    std::string label;
    std::vector<long> ks;
    std::vector<double> mean_rel_err;
    std::vector<double> mean_f_val;
    std::vector<double> bound;  // q^k(1+delta) when admissible, else NaN
    double ops_per_iter = 0.0;
};

struct ExperimentResult {
    std::vector<std::string> csv_files;
    std::vector<SolverRunSummary> summaries;
};

/// Runs the solver grid over `trials` seeded trials, writes one CSV per
/// (solver, trial) plus an aggregate CSV of per-checkpoint means, and attaches
/// the theoretical bound column where the configuration is admissible.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct ComplexityRow {
    int g = 0;
    double ratio_measured = 0.0;
    double ratio_theory = 0.0;  // 1 + n/g
    double mean_iters_msgd = 0.0;
    double mean_iters_smsgd = 0.0;
};

/// Complexity experiment: run mSGD(beta) and smSGD(beta, equivalent scale) to
/// ||x_k - x*|| < eps, multiply iterations by the modeled per-iteration costs
/// and average the ratio over trials.
std::vector<ComplexityRow> measure_complexity_ratio(int m, int n, const std::vector<int>& g_list,
                                                    double beta, double eps, int trials,
                                                    std::uint64_t seed);

/// Materialize a LinearSystem for a problem spec (deterministic per seed).
LinearSystem build_problem(const ProblemSpec& spec, std::uint64_t seed);

void write_trace_csv(const std::string& path, const IterateTrace& trace,
                     const std::vector<double>& bound_col);

} // namespace sketchmom
