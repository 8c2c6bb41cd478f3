#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sketchmom/linalg.hpp"
#include "sketchmom/sketch.hpp"

namespace sketchmom {

enum class Method { SGD, Newton, ProxPoint, DualAscent };
enum class MomentumMode { None, Deterministic, Stochastic };
enum class StochMomentumScale { Raw, Equivalent };

struct SolverConfig {
    Method method = Method::SGD;
    MomentumMode momentum = MomentumMode::None;
    double beta = 0.0;
    StochMomentumScale scale = StochMomentumScale::Raw;
    double omega = 1.0;
    long max_iters = 1000;
    long checkpoint_stride = 0;  // 0 -> one sweep (m iterations)
    double target_rel_err = 0.0; // B-norm relative error stop; 0 disables
    double target_abs_err = 0.0; // Euclidean ||x_k - x*|| stop; 0 disables
    std::uint64_t seed = 0;

    void validate(const MetricSpec& metric) const;
};

struct IterateState {
    Vector x;       // x_k
    Vector x_prev;  // x_{k-1}
    Vector y;       // dual iterate (DualAscent only)
    Vector y_prev;
    long k = 0;
};

IterateState init_state(const Vector& x0, int dual_dim = 0);

struct Checkpoint {
    long k = 0;
    double rel_err_b = 0.0;  // ||x_k - x*||_B^2 / ||x0 - x*||_B^2
    double f_val = 0.0;
    double op_count = 0.0;
    std::int64_t wall_ns = 0;
};

struct IterateTrace {
    std::vector<Checkpoint> checkpoints;
    Vector x_star;
    Vector x_final;
    long iters = 0;
    bool converged = false;
    double final_rel_err = 1.0;
    double ops_per_iter = 0.0;
    std::uint64_t seed = 0;
};

/// One step of mSGD / mSN / mSPP. The three base steps are computed through
/// independent code paths; momentum is added identically afterwards.
void step_primal(const SolverConfig& cfg, const LinearSystem& sys, const MetricSpec& metric,
                 const SketchSample& s, IterateState& state);

/// One smSGD step: the momentum term is a single coordinate of x_k - x_{k-1},
/// optionally rescaled by n (unbiased convention).
void step_stochastic_momentum(const SolverConfig& cfg, const LinearSystem& sys,
                              const SketchSample& s, int coord, IterateState& state);

/// One mSDSA step on the dual iterate y.
void step_dual(const SolverConfig& cfg, const LinearSystem& sys, const MetricSpec& metric,
               const SketchSample& s, const Vector& x0, IterateState& state);

/// phi(y) = x0 + B^{-1} A^T y.
Vector phi_map(const Vector& x0, const MetricSpec& metric, const LinearSystem& sys,
               const Vector& y);

/// D(y) = (b - A x0)^T y - 1/2 ||A^T y||_{B^{-1}}^2.
double dual_value(const LinearSystem& sys, const MetricSpec& metric, const Vector& x0,
                  const Vector& y);

/// Running Cesaro mean of x_1 ... x_k in O(n) memory.
class CesaroAccumulator {
public:
    void add(const Vector& x);
    Vector mean() const;
    long count() const { return count_; }

private:
    Vector sum_;
    long count_ = 0;
};

Vector cesaro_average(const std::vector<Vector>& iterates);

struct RunOptions {
    /// Invoked after every iteration with the current primal iterate
    /// (phi(y_k) for DualAscent). Used by experiments that need dense access.
    std::function<void(long k, const Vector& x)> on_iterate;
    /// Check the stopping target every iteration instead of per checkpoint.
    bool stop_check_every_iter = false;
    /// Reuse a precomputed projection x* = Pi_L^B(x0).
    std::optional<Vector> x_star;
};

/// Drive the configured method from x0 until the stopping policy fires.
IterateTrace run(const SolverConfig& cfg, const LinearSystem& sys, const MetricSpec& metric,
                 const Sketcher& sk, const Vector& x0, const RunOptions& opts = {});

} // namespace sketchmom
