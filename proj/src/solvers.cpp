#include "sketchmom/solvers.hpp"

#include <chrono>
#include <cmath>

#include "sketchmom/rng.hpp"

namespace sketchmom {

void SolverConfig::validate(const MetricSpec& metric) const {
    if (beta < 0.0) throw std::invalid_argument("SolverConfig: beta must be >= 0");
    if (method == Method::ProxPoint) {
        if (omega <= 0.0 || omega > 1.0)
            throw std::invalid_argument("SolverConfig: ProxPoint requires omega in (0,1]");
    } else {
        if (omega <= 0.0 || omega >= 2.0)
            throw std::invalid_argument("SolverConfig: omega must lie in (0,2)");
    }
    if (momentum == MomentumMode::Stochastic && !metric.is_identity())
        throw std::invalid_argument("SolverConfig: stochastic momentum requires B = I");
    if (max_iters < 0) throw std::invalid_argument("SolverConfig: max_iters must be >= 0");
}

IterateState init_state(const Vector& x0, int dual_dim) {
    IterateState st;
    st.x = x0;
    st.x_prev = x0;  // x1 = x0
    if (dual_dim > 0) {
        st.y = Vector::Zero(dual_dim);
        st.y_prev = Vector::Zero(dual_dim);
    }
    st.k = 0;
    return st;
}

namespace {

// Sketched pieces shared by the Newton and ProxPoint paths: everything is
// built from the materialized S so these routes stay independent from the
// per-variant shortcuts inside stoch_grad.
struct SketchedSystem {
    Matrix sta;     // S^T A, q x n
    Vector sb;      // S^T b
    Matrix minv;    // (S^T A B^{-1} A^T S)^dagger
};

SketchedSystem sketched_system(const LinearSystem& sys, const MetricSpec& metric,
                               const SketchSample& s) {
    SketchedSystem out;
    Matrix sm = s.materialize(sys);
    out.sta = sm.transpose() * sys.A();
    out.sb = sm.transpose() * sys.b();
    Matrix gram = out.sta * metric.apply_inv(Matrix(out.sta.transpose()));
    out.minv = pinv_psd(gram);
    return out;
}

Vector base_step_sgd(const SolverConfig& cfg, const LinearSystem& sys, const MetricSpec& metric,
                     const SketchSample& s, const Vector& x) {
    return x - cfg.omega * stoch_grad(sys, metric, s, x);
}

Vector base_step_newton(const SolverConfig& cfg, const LinearSystem& sys,
                        const MetricSpec& metric, const SketchSample& s, const Vector& x) {
    SketchedSystem sk = sketched_system(sys, metric, s);
    Vector u = sk.sta * x - sk.sb;
    Vector grad = metric.apply_inv(Vector(sk.sta.transpose() * (sk.minv * u)));
    Matrix z = sk.sta.transpose() * sk.minv * sk.sta;
    // B-pseudoinverse of the sketched Hessian B^{-1}Z applied to grad:
    // B^{-1/2} (B^{-1/2} Z B^{-1/2})^dagger B^{1/2} grad
    Matrix half = metric.apply_inv_sqrt(z);
    Matrix ws = metric.apply_inv_sqrt(Matrix(half.transpose()));
    Vector dir = metric.apply_inv_sqrt(
        Vector(pinv_psd(0.5 * (ws + ws.transpose())) * metric.apply_sqrt(grad)));
    return x - cfg.omega * dir;
}

Vector base_step_prox(const SolverConfig& cfg, const LinearSystem& sys, const MetricSpec& metric,
                      const SketchSample& s, const Vector& x) {
    SketchedSystem sk = sketched_system(sys, metric, s);
    if (cfg.omega == 1.0) {
        // exact projection onto the sketched system S^T A x = S^T b
        Vector u = sk.sta * x - sk.sb;
        return x - metric.apply_inv(Vector(sk.sta.transpose() * (sk.minv * u)));
    }
    // argmin f_S(x') + (1-w)/(2w) ||x' - x||_B^2 solved as the PD system
    // (Z + c B) x' = Z xbar + c B x with c = (1-w)/w and Z xbar = A^T H b.
    const double c = (1.0 - cfg.omega) / cfg.omega;
    Matrix z = sk.sta.transpose() * sk.minv * sk.sta;
    Matrix lhs = z + c * metric.B();
    Vector rhs = sk.sta.transpose() * (sk.minv * sk.sb) + c * metric.apply(x);
    Eigen::LDLT<Matrix> ldlt(lhs);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("step_primal: singular proximal system");
    return ldlt.solve(rhs);
}

} // namespace

void step_primal(const SolverConfig& cfg, const LinearSystem& sys, const MetricSpec& metric,
                 const SketchSample& s, IterateState& state) {
    Vector base;
    switch (cfg.method) {
        case Method::SGD: base = base_step_sgd(cfg, sys, metric, s, state.x); break;
        case Method::Newton: base = base_step_newton(cfg, sys, metric, s, state.x); break;
        case Method::ProxPoint: base = base_step_prox(cfg, sys, metric, s, state.x); break;
        default: throw std::invalid_argument("step_primal: method must be SGD/Newton/ProxPoint");
    }
    const double beta = cfg.momentum == MomentumMode::Deterministic ? cfg.beta : 0.0;
    Vector next = base + beta * (state.x - state.x_prev);
    state.x_prev = std::move(state.x);
    state.x = std::move(next);
    ++state.k;
}

void step_stochastic_momentum(const SolverConfig& cfg, const LinearSystem& sys,
                              const SketchSample& s, int coord, IterateState& state) {
    MetricSpec ident = MetricSpec::identity(sys.cols());
    const double beta_eff =
        cfg.scale == StochMomentumScale::Raw ? cfg.beta : cfg.beta * sys.cols();
    double delta = beta_eff * (state.x(coord) - state.x_prev(coord));
    Vector next = state.x - cfg.omega * stoch_grad(sys, ident, s, state.x);
    next(coord) += delta;
    state.x_prev = std::move(state.x);
    state.x = std::move(next);
    ++state.k;
}

void step_dual(const SolverConfig& cfg, const LinearSystem& sys, const MetricSpec& metric,
               const SketchSample& s, const Vector& x0, IterateState& state) {
    Matrix sm = s.materialize(sys);
    Matrix sta = sm.transpose() * sys.A();
    Matrix gram = sta * metric.apply_inv(Matrix(sta.transpose()));
    Vector phi = phi_map(x0, metric, sys, state.y);
    Vector lambda = pinv_psd(gram) * (sm.transpose() * (sys.b() - sys.A() * phi));
    Vector next = state.y + cfg.omega * (sm * lambda) + cfg.beta * (state.y - state.y_prev);
    state.y_prev = std::move(state.y);
    state.y = std::move(next);
    ++state.k;
}

Vector phi_map(const Vector& x0, const MetricSpec& metric, const LinearSystem& sys,
               const Vector& y) {
    if (y.size() != sys.rows()) throw std::invalid_argument("phi_map: dim(y) must equal m");
    return x0 + metric.apply_inv(Vector(sys.A().transpose() * y));
}

double dual_value(const LinearSystem& sys, const MetricSpec& metric, const Vector& x0,
                  const Vector& y) {
    if (y.size() != sys.rows()) throw std::invalid_argument("dual_value: dim(y) must equal m");
    Vector aty = sys.A().transpose() * y;
    return (sys.b() - sys.A() * x0).dot(y) - 0.5 * aty.dot(metric.apply_inv(aty));
}

void CesaroAccumulator::add(const Vector& x) {
    if (count_ == 0)
        sum_ = x;
    else
        sum_ += x;
    ++count_;
}

Vector CesaroAccumulator::mean() const {
    if (count_ == 0) throw std::runtime_error("CesaroAccumulator: empty sequence");
    return sum_ / static_cast<double>(count_);
}

Vector cesaro_average(const std::vector<Vector>& iterates) {
    CesaroAccumulator acc;
    for (const auto& x : iterates) acc.add(x);
    return acc.mean();
}

namespace {

double trace_f_value(const LinearSystem& sys, const MetricSpec& metric, const Sketcher& sk,
                     const Vector& x) {
    if (sk.variant() == SketchVariant::RowCoordinate && metric.is_identity())
        return f_value_closed(sys, metric, ClosedFormVariant::mRK, x);
    if (sk.variant() == SketchVariant::RowCoordinate &&
        metric.kind() == MetricKind::SystemMatrix)
        return f_value_closed(sys, metric, ClosedFormVariant::mRCD, x);
    return 0.5 * (sys.A() * x - sys.b()).squaredNorm();  // residual proxy
}

bool fast_kaczmarz_eligible(const SolverConfig& cfg, const MetricSpec& metric,
                            const Sketcher& sk) {
    return cfg.method == Method::SGD && metric.is_identity() &&
           sk.variant() == SketchVariant::RowCoordinate;
}

} // namespace

IterateTrace run(const SolverConfig& cfg, const LinearSystem& sys, const MetricSpec& metric,
                 const Sketcher& sk, const Vector& x0, const RunOptions& opts) {
    cfg.validate(metric);
    if (cfg.momentum == MomentumMode::Stochastic && cfg.method != Method::SGD)
        throw std::invalid_argument("run: stochastic momentum is implemented for SGD only");

    const int m = sys.rows();
    const int n = sys.cols();
    const long stride = cfg.checkpoint_stride > 0 ? cfg.checkpoint_stride : m;

    Vector x_star =
        opts.x_star ? *opts.x_star : project_onto_solution_set(sys, metric, x0);
    const double err0 = metric.norm_sq(x0 - x_star);
    const bool degenerate_start = err0 <= 0.0;

    const double g = sys.mean_row_nnz();
    double ops_per_iter = 4.0 * g;
    if (cfg.momentum == MomentumMode::Deterministic && cfg.beta > 0.0)
        ops_per_iter = 4.0 * g + 3.0 * n;
    else if (cfg.momentum == MomentumMode::Stochastic && cfg.beta > 0.0)
        ops_per_iter = 4.0 * g + 1.0;

    IterateTrace trace;
    trace.x_star = x_star;
    trace.ops_per_iter = ops_per_iter;
    trace.seed = cfg.seed;

    IterateState state =
        init_state(x0, cfg.method == Method::DualAscent ? m : 0);
    std::mt19937_64 rng = make_rng(cfg.seed);
    std::uniform_int_distribution<int> coord_dist(0, n - 1);
    const bool fast = fast_kaczmarz_eligible(cfg, metric, sk) && !opts.on_iterate;

    const auto t0 = std::chrono::steady_clock::now();
    auto current_x = [&]() -> Vector {
        if (cfg.method == Method::DualAscent) return phi_map(x0, metric, sys, state.y);
        return state.x;
    };
    auto rel_err_of = [&](const Vector& x) {
        return degenerate_start ? 0.0 : metric.norm_sq(x - x_star) / err0;
    };

    long k = 0;
    bool done = false;
    Vector scratch;
    while (true) {
        if (k % stride == 0 || done || k >= cfg.max_iters) {
            Vector x = current_x();
            double rel = rel_err_of(x);
            auto now = std::chrono::steady_clock::now();
            trace.checkpoints.push_back(
                {k, rel, trace_f_value(sys, metric, sk, x),
                 ops_per_iter * static_cast<double>(k),
                 std::chrono::duration_cast<std::chrono::nanoseconds>(now - t0).count()});
            trace.final_rel_err = rel;
            if (cfg.target_rel_err > 0.0 && rel <= cfg.target_rel_err) trace.converged = true;
            if (trace.converged || done || k >= cfg.max_iters) {
                trace.x_final = std::move(x);
                trace.iters = k;
                break;
            }
        }

        if (fast) {
            int i = 0;
            {
                // inverse-CDF draw matching sample()'s categorical path
                SketchSample s;
                s = sample(sk, sys, rng);
                i = s.index;
            }
            double rs = sys.row_sq_norm(i);
            double resid = sys.csr().row_dot(i, state.x) - sys.b()(i);
            double alpha = rs > 1e-30 ? -cfg.omega * resid / rs : 0.0;
            if (cfg.momentum == MomentumMode::Deterministic && cfg.beta > 0.0) {
                scratch = state.x;
                state.x += cfg.beta * (state.x - state.x_prev);
                sys.csr().add_scaled_row(i, alpha, state.x);
                state.x_prev.swap(scratch);
            } else if (cfg.momentum == MomentumMode::Stochastic && cfg.beta > 0.0) {
                int c = coord_dist(rng);
                double beta_eff =
                    cfg.scale == StochMomentumScale::Raw ? cfg.beta : cfg.beta * n;
                double delta = beta_eff * (state.x(c) - state.x_prev(c));
                scratch = state.x;
                sys.csr().add_scaled_row(i, alpha, state.x);
                state.x(c) += delta;
                state.x_prev.swap(scratch);
            } else {
                sys.csr().add_scaled_row(i, alpha, state.x);
            }
            ++state.k;
        } else {
            SketchSample s = sample(sk, sys, rng);
            if (cfg.method == Method::DualAscent) {
                step_dual(cfg, sys, metric, s, x0, state);
            } else if (cfg.momentum == MomentumMode::Stochastic) {
                step_stochastic_momentum(cfg, sys, s, coord_dist(rng), state);
            } else {
                step_primal(cfg, sys, metric, s, state);
            }
        }
        ++k;
        if (opts.on_iterate) opts.on_iterate(k, current_x());

        if (opts.stop_check_every_iter || cfg.target_abs_err > 0.0) {
            Vector x = current_x();
            if (cfg.target_abs_err > 0.0 && (x - x_star).norm() <= cfg.target_abs_err) {
                trace.converged = true;
                done = true;
            }
            if (cfg.target_rel_err > 0.0 && rel_err_of(x) <= cfg.target_rel_err) {
                trace.converged = true;
                done = true;
            }
        }
    }
    return trace;
}

} // namespace sketchmom
