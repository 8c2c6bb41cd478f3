#include <doctest.h>

#include <cmath>

#include "sketchmom/harness.hpp"
#include "sketchmom/rng.hpp"
#include "sketchmom/solvers.hpp"

using namespace sketchmom;

namespace {

SketchSample row_sample(int i) {
    SketchSample s;
    s.variant = SketchVariant::RowCoordinate;
    s.index = i;
    return s;
}

}  // namespace

TEST_CASE("SGD step without momentum is a hyperplane projection") {
    // row (3,4), b = 0, x = (1,0), omega = 1: x' = (0.64, -0.48)
    Matrix a(2, 2);
    a << 3, 4, 1, 0;
    LinearSystem sys(a, Vector::Zero(2));
    MetricSpec ident = MetricSpec::identity(2);

    SolverConfig cfg;
    cfg.method = Method::SGD;
    cfg.omega = 1.0;
    Vector x0(2);
    x0 << 1, 0;
    IterateState st = init_state(x0);
    step_primal(cfg, sys, ident, row_sample(0), st);
    CHECK(st.x(0) == doctest::Approx(0.64));
    CHECK(st.x(1) == doctest::Approx(-0.48));
    CHECK(st.x_prev(0) == doctest::Approx(1.0));
    CHECK(st.k == 1);

    // omega = 0.5 moves halfway
    IterateState st2 = init_state(x0);
    cfg.omega = 0.5;
    step_primal(cfg, sys, ident, row_sample(0), st2);
    CHECK(st2.x(0) == doctest::Approx(0.82));
    CHECK(st2.x(1) == doctest::Approx(-0.24));
}

TEST_CASE("momentum term is added after the base step") {
    Matrix a(2, 2);
    a << 3, 4, 1, 0;
    LinearSystem sys(a, Vector::Zero(2));
    MetricSpec ident = MetricSpec::identity(2);

    SolverConfig cfg;
    cfg.method = Method::SGD;
    cfg.momentum = MomentumMode::Deterministic;
    cfg.beta = 0.5;
    cfg.omega = 1.0;

    Vector x0(2), xm1(2);
    x0 << 1, 0;
    xm1 << 0, 0;
    IterateState st = init_state(x0);
    st.x_prev = xm1;  // x_k - x_{k-1} = (1,0)
    step_primal(cfg, sys, ident, row_sample(0), st);
    CHECK(st.x(0) == doctest::Approx(0.64 + 0.5));
    CHECK(st.x(1) == doctest::Approx(-0.48));
}

TEST_CASE("three methods coincide for rank-one sketches at omega = 1") {
    LinearSystem sys = gen_gaussian_system(6, 4, 5);
    MetricSpec ident = MetricSpec::identity(4);
    std::mt19937_64 rng = make_rng(11);
    std::normal_distribution<double> normal;
    Vector x(4);
    for (int i = 0; i < 4; ++i) x(i) = normal(rng);

    for (int row = 0; row < 6; ++row) {
        SketchSample s = row_sample(row);
        IterateState a = init_state(x), b = init_state(x), c = init_state(x);
        SolverConfig cfg;
        cfg.omega = 1.0;
        cfg.method = Method::SGD;
        step_primal(cfg, sys, ident, s, a);
        cfg.method = Method::Newton;
        step_primal(cfg, sys, ident, s, b);
        cfg.method = Method::ProxPoint;
        step_primal(cfg, sys, ident, s, c);
        CHECK((a.x - b.x).norm() < 1e-10 * (1.0 + a.x.norm()));
        CHECK((a.x - c.x).norm() < 1e-10 * (1.0 + a.x.norm()));
    }
}

TEST_CASE("methods also coincide at omega < 1 in the B geometry") {
    LinearSystem pd = gen_pd_system(8, 4, 19);
    MetricSpec bm = MetricSpec::system_matrix(pd);
    Vector x = Vector::Ones(4);

    for (double omega : {0.3, 0.7, 1.0}) {
        SketchSample s = row_sample(2);
        IterateState a = init_state(x), b = init_state(x), c = init_state(x);
        SolverConfig cfg;
        cfg.omega = omega;
        cfg.method = Method::SGD;
        step_primal(cfg, pd, bm, s, a);
        cfg.method = Method::Newton;
        step_primal(cfg, pd, bm, s, b);
        cfg.method = Method::ProxPoint;
        step_primal(cfg, pd, bm, s, c);
        CHECK((a.x - b.x).norm() < 1e-9 * (1.0 + a.x.norm()));
        CHECK((a.x - c.x).norm() < 1e-9 * (1.0 + a.x.norm()));
    }
}

TEST_CASE("solutions are fixed points of every method") {
    LinearSystem sys = gen_gaussian_system(5, 5, 23);
    MetricSpec ident = MetricSpec::identity(5);
    Vector x_star = project_onto_solution_set(sys, ident, Vector::Zero(5));
    std::mt19937_64 rng = make_rng(4);
    Sketcher sk = Sketcher::mrk(sys);

    for (Method method : {Method::SGD, Method::Newton, Method::ProxPoint}) {
        SolverConfig cfg;
        cfg.method = method;
        cfg.omega = method == Method::ProxPoint ? 0.8 : 1.3;
        cfg.momentum = MomentumMode::Deterministic;
        cfg.beta = 0.3;
        IterateState st = init_state(x_star);
        for (int k = 0; k < 10; ++k) step_primal(cfg, sys, ident, sample(sk, sys, rng), st);
        CHECK((st.x - x_star).norm() < 1e-9 * (1.0 + x_star.norm()));
    }
}

TEST_CASE("config validation") {
    MetricSpec ident = MetricSpec::identity(3);
    SolverConfig cfg;
    cfg.omega = 0.0;
    CHECK_THROWS(cfg.validate(ident));
    cfg.omega = 2.0;
    CHECK_THROWS(cfg.validate(ident));
    cfg.omega = 1.5;
    cfg.method = Method::ProxPoint;  // proximal view only exists for omega <= 1
    CHECK_THROWS(cfg.validate(ident));
    cfg.omega = 1.0;
    CHECK_NOTHROW(cfg.validate(ident));
    cfg.beta = -0.1;
    CHECK_THROWS(cfg.validate(ident));
    cfg.beta = 0.1;
    cfg.method = Method::SGD;
    cfg.momentum = MomentumMode::Stochastic;
    CHECK_NOTHROW(cfg.validate(ident));
    LinearSystem pd = gen_pd_system(6, 3, 2);
    CHECK_THROWS(cfg.validate(MetricSpec::system_matrix(pd)));
}

TEST_CASE("smSGD: sampled momentum coordinate matches expectation convention") {
    Matrix a(1, 3);
    a << 1, 1, 1;
    Vector b(1);
    b << 3;
    LinearSystem sys(a, b);

    SolverConfig cfg;
    cfg.method = Method::SGD;
    cfg.momentum = MomentumMode::Stochastic;
    cfg.beta = 0.3;
    cfg.omega = 1.0;

    Vector x0(3), xm1(3);
    x0 << 1, 2, 3;
    xm1 << 0, 0, 0;

    SUBCASE("raw scale adds beta (x_k - x_{k-1})_i e_i") {
        cfg.scale = StochMomentumScale::Raw;
        IterateState st = init_state(x0);
        st.x_prev = xm1;
        IterateState base = init_state(x0);
        base.x_prev = xm1;
        SolverConfig nocfg = cfg;
        nocfg.momentum = MomentumMode::None;
        step_primal(nocfg, sys, MetricSpec::identity(3), row_sample(0), base);
        step_stochastic_momentum(cfg, sys, row_sample(0), 1, st);
        Vector want = base.x;
        want(1) += 0.3 * (x0(1) - xm1(1));
        CHECK((st.x - want).norm() < 1e-12);
    }

    SUBCASE("equivalent scale multiplies by n") {
        cfg.scale = StochMomentumScale::Equivalent;
        IterateState st = init_state(x0);
        st.x_prev = xm1;
        IterateState base = init_state(x0);
        base.x_prev = xm1;
        SolverConfig nocfg = cfg;
        nocfg.momentum = MomentumMode::None;
        step_primal(nocfg, sys, MetricSpec::identity(3), row_sample(0), base);
        step_stochastic_momentum(cfg, sys, row_sample(0), 1, st);
        Vector want = base.x;
        want(1) += 3.0 * 0.3 * (x0(1) - xm1(1));
        CHECK((st.x - want).norm() < 1e-12);
    }

    SUBCASE("average over coordinates recovers the deterministic term") {
        cfg.scale = StochMomentumScale::Equivalent;
        Vector acc = Vector::Zero(3);
        IterateState base = init_state(x0);
        base.x_prev = xm1;
        SolverConfig nocfg = cfg;
        nocfg.momentum = MomentumMode::None;
        step_primal(nocfg, sys, MetricSpec::identity(3), row_sample(0), base);
        for (int coord = 0; coord < 3; ++coord) {
            IterateState st = init_state(x0);
            st.x_prev = xm1;
            step_stochastic_momentum(cfg, sys, row_sample(0), coord, st);
            acc += st.x;
        }
        acc /= 3.0;
        Vector want = base.x + 0.3 * (x0 - xm1);
        CHECK((acc - want).norm() < 1e-12);
    }
}

TEST_CASE("dual ascent: phi correspondence and monotone dual value") {
    LinearSystem sys = gen_gaussian_system(6, 4, 31);
    MetricSpec ident = MetricSpec::identity(4);
    Vector x0 = Vector::Ones(4);

    // phi(0) = x0; D(0) = 0
    CHECK((phi_map(x0, ident, sys, Vector::Zero(6)) - x0).norm() < 1e-14);
    CHECK(dual_value(sys, ident, x0, Vector::Zero(6)) == doctest::Approx(0.0));

    SolverConfig cfg;
    cfg.method = Method::DualAscent;
    cfg.omega = 1.0;
    cfg.beta = 0.0;
    Sketcher sk = Sketcher::mrk(sys);
    std::mt19937_64 rng = make_rng(6);
    IterateState st = init_state(x0, 6);
    double prev = 0.0;
    for (int k = 0; k < 60; ++k) {
        step_dual(cfg, sys, ident, sample(sk, sys, rng), x0, st);
        double d = dual_value(sys, ident, x0, st.y);
        CHECK(d >= prev - 1e-12);  // exact dual ascent without momentum
        prev = d;
    }
    // primal image converges toward the projection of x0
    Vector x_star = project_onto_solution_set(sys, ident, x0);
    Vector x_end = phi_map(x0, ident, sys, st.y);
    CHECK((x_end - x_star).norm() < 0.2 * (x0 - x_star).norm());
}

TEST_CASE("dual step mirrors the primal SGD step through phi") {
    LinearSystem sys = gen_gaussian_system(5, 3, 47);
    MetricSpec ident = MetricSpec::identity(3);
    Vector x0(3);
    x0 << 2, -1, 0.5;

    SolverConfig dual_cfg;
    dual_cfg.method = Method::DualAscent;
    dual_cfg.omega = 0.8;
    dual_cfg.beta = 0.4;
    SolverConfig primal_cfg;
    primal_cfg.method = Method::SGD;
    primal_cfg.omega = 0.8;
    primal_cfg.momentum = MomentumMode::Deterministic;
    primal_cfg.beta = 0.4;

    std::mt19937_64 rng_a = make_rng(9);
    std::mt19937_64 rng_b = make_rng(9);
    Sketcher sk = Sketcher::mrk(sys);
    IterateState dual = init_state(x0, 5);
    IterateState primal = init_state(x0);
    for (int k = 0; k < 40; ++k) {
        step_dual(dual_cfg, sys, ident, sample(sk, sys, rng_a), x0, dual);
        step_primal(primal_cfg, sys, ident, sample(sk, sys, rng_b), primal);
        CHECK((phi_map(x0, ident, sys, dual.y) - primal.x).norm() <
              1e-9 * (1.0 + primal.x.norm()));
    }
}

TEST_CASE("CesaroAccumulator equals the dense average") {
    std::mt19937_64 rng = make_rng(12);
    std::normal_distribution<double> normal;
    std::vector<Vector> xs;
    CesaroAccumulator acc;
    for (int k = 0; k < 25; ++k) {
        Vector v(3);
        for (int i = 0; i < 3; ++i) v(i) = normal(rng);
        xs.push_back(v);
        acc.add(v);
        CHECK((acc.mean() - cesaro_average(xs)).norm() < 1e-13);
    }
    CHECK(acc.count() == 25);
    CHECK_THROWS(CesaroAccumulator().mean());
    CHECK_THROWS(cesaro_average({}));
}

TEST_CASE("run: converges and reports checkpoints") {
    LinearSystem sys = gen_gaussian_system(20, 10, 61);
    MetricSpec ident = MetricSpec::identity(10);
    Sketcher sk = Sketcher::mrk(sys);
    Vector x0 = Vector::Zero(10);

    SolverConfig cfg;
    cfg.method = Method::SGD;
    cfg.omega = 1.0;
    cfg.max_iters = 60000;
    cfg.target_rel_err = 1e-8;
    cfg.seed = 3;

    IterateTrace tr = run(cfg, sys, ident, sk, x0);
    CHECK(tr.converged);
    CHECK(tr.final_rel_err < 1e-8);
    CHECK(tr.iters <= cfg.max_iters);
    REQUIRE(tr.checkpoints.size() >= 2);
    CHECK(tr.checkpoints.front().k == 0);
    CHECK(tr.checkpoints.front().rel_err_b == doctest::Approx(1.0));
    // checkpoint stride defaults to one sweep (m = 20)
    CHECK(tr.checkpoints[1].k == 20);
    // op counts grow linearly: 4g per iteration for the basic method
    CHECK(tr.ops_per_iter == doctest::Approx(4.0 * sys.mean_row_nnz()));
    CHECK(tr.checkpoints[1].op_count == doctest::Approx(20.0 * tr.ops_per_iter));
    // the solution solves the system
    CHECK((sys.A() * tr.x_final - sys.b()).norm() < 1e-3 * sys.b().norm());
}

TEST_CASE("run is deterministic per seed and momentum accelerates") {
    LinearSystem sys = gen_gaussian_system(30, 10, 71);
    MetricSpec ident = MetricSpec::identity(10);
    Sketcher sk = Sketcher::mrk(sys);
    Vector x0 = Vector::Zero(10);

    SolverConfig cfg;
    cfg.method = Method::SGD;
    cfg.omega = 1.0;
    cfg.max_iters = 3000;
    cfg.seed = 17;
    IterateTrace t1 = run(cfg, sys, ident, sk, x0);
    IterateTrace t2 = run(cfg, sys, ident, sk, x0);
    CHECK((t1.x_final - t2.x_final).norm() == 0.0);

    // on_iterate path yields the same iterates as the fast path
    long calls = 0;
    RunOptions opts;
    Vector last;
    opts.on_iterate = [&](long, const Vector& x) {
        ++calls;
        last = x;
    };
    IterateTrace t3 = run(cfg, sys, ident, sk, x0, opts);
    CHECK(calls == t3.iters);
    CHECK((last - t1.x_final).norm() < 1e-12);

    SolverConfig mom = cfg;
    mom.momentum = MomentumMode::Deterministic;
    mom.beta = 0.3;
    IterateTrace tm = run(mom, sys, ident, sk, x0);
    CHECK(tm.final_rel_err < t1.final_rel_err);
    CHECK(tm.ops_per_iter == doctest::Approx(4.0 * sys.mean_row_nnz() + 3.0 * 10));
}

TEST_CASE("run with dual ascent matches feasibility") {
    LinearSystem sys = gen_gaussian_system(8, 6, 83);
    MetricSpec ident = MetricSpec::identity(6);
    Sketcher sk = Sketcher::mrk(sys);
    Vector x0 = Vector::Zero(6);

    SolverConfig cfg;
    cfg.method = Method::DualAscent;
    cfg.omega = 1.0;
    cfg.beta = 0.1;
    cfg.max_iters = 20000;
    cfg.target_rel_err = 1e-10;
    cfg.seed = 8;
    IterateTrace tr = run(cfg, sys, ident, sk, x0);
    CHECK(tr.converged);
    Vector x_star = project_onto_solution_set(sys, ident, x0);
    CHECK((tr.x_final - x_star).norm() < 1e-4 * (1.0 + x_star.norm()));
}
