#include "sketchmom/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchmom/rng.hpp"

namespace sketchmom {

namespace {

constexpr double kDenomGuard = 1e-30;

Vector build_cdf(const Vector& probs) {
    double total = probs.sum();
    if (probs.minCoeff() < 0.0)
        throw std::invalid_argument("Sketcher: probabilities must be nonnegative");
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("Sketcher: probabilities must sum to 1");
    Vector cdf(probs.size());
    double acc = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
        acc += probs(i);
        cdf(i) = acc;
    }
    cdf(probs.size() - 1) = 1.0;
    return cdf;
}

int draw_categorical(const Vector& cdf, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    const double* begin = cdf.data();
    const double* it = std::lower_bound(begin, begin + cdf.size(), u);
    int idx = static_cast<int>(it - begin);
    return std::min<int>(idx, static_cast<int>(cdf.size()) - 1);
}

} // namespace

Sketcher Sketcher::row_coordinate(Vector probs) {
    Sketcher sk;
    sk.variant_ = SketchVariant::RowCoordinate;
    sk.cdf_ = build_cdf(probs);
    sk.probs_ = std::move(probs);
    return sk;
}

Sketcher Sketcher::mrk(const LinearSystem& sys) {
    return row_coordinate(sys.row_sq_norms() / sys.frob_sq());
}

Sketcher Sketcher::mrcd(const LinearSystem& sys) {
    if (sys.rows() != sys.cols())
        throw std::invalid_argument("Sketcher::mrcd: requires a square (PD) system matrix");
    Vector diag = sys.A().diagonal();
    if (diag.minCoeff() <= 0.0)
        throw std::invalid_argument("Sketcher::mrcd: diagonal of A must be positive");
    return row_coordinate(diag / diag.sum());
}

Sketcher Sketcher::block_rows(int block_size) {
    if (block_size < 1)
        throw std::invalid_argument("Sketcher::block_rows: block size must be >= 1");
    Sketcher sk;
    sk.variant_ = SketchVariant::BlockRows;
    sk.block_size_ = block_size;
    return sk;
}

Sketcher Sketcher::gaussian() {
    Sketcher sk;
    sk.variant_ = SketchVariant::Gaussian;
    return sk;
}

Sketcher Sketcher::column_coordinate(const LinearSystem& sys) {
    Vector col_sq = sys.A().colwise().squaredNorm();
    Sketcher sk;
    sk.variant_ = SketchVariant::ColumnCoordinate;
    sk.cdf_ = build_cdf(Vector(col_sq / col_sq.sum()));
    sk.probs_ = col_sq / col_sq.sum();
    return sk;
}

Matrix SketchSample::materialize(const LinearSystem& sys) const {
    const int m = sys.rows();
    switch (variant) {
        case SketchVariant::RowCoordinate: {
            Matrix s = Matrix::Zero(m, 1);
            s(index, 0) = 1.0;
            return s;
        }
        case SketchVariant::BlockRows: {
            Matrix s = Matrix::Zero(m, static_cast<int>(block.size()));
            for (int j = 0; j < static_cast<int>(block.size()); ++j) s(block[j], j) = 1.0;
            return s;
        }
        case SketchVariant::Gaussian:
            return dense;
        case SketchVariant::ColumnCoordinate:
            return sys.A().col(index);
    }
    throw std::logic_error("unreachable");
}

SketchSample sample(const Sketcher& sk, const LinearSystem& sys, std::mt19937_64& rng) {
    SketchSample out;
    out.variant = sk.variant();
    switch (sk.variant()) {
        case SketchVariant::RowCoordinate:
        case SketchVariant::ColumnCoordinate:
            out.index = draw_categorical(sk.cdf(), rng);
            break;
        case SketchVariant::BlockRows: {
            const int m = sys.rows();
            if (sk.block_size() > m)
                throw std::invalid_argument("sample: block size exceeds row count");
            const int q = sk.block_size();
            std::vector<int> pool(m);
            std::iota(pool.begin(), pool.end(), 0);
            for (int j = 0; j < q; ++j) {
                std::uniform_int_distribution<int> pick(j, m - 1);
                std::swap(pool[j], pool[pick(rng)]);
            }
            out.block.assign(pool.begin(), pool.begin() + q);
            std::sort(out.block.begin(), out.block.end());
            break;
        }
        case SketchVariant::Gaussian: {
            std::normal_distribution<double> normal(0.0, 1.0);
            out.dense.resize(sys.rows());
            do {
                for (int i = 0; i < out.dense.size(); ++i) out.dense(i) = normal(rng);
            } while (out.dense.squaredNorm() < kDenomGuard);
            break;
        }
    }
    return out;
}

namespace {

// Rank-one sketches reduce to v = A^T S, resid = S^T(Ax - b), denom = v^T B^{-1} v.
struct RankOneParts {
    Vector binv_v;
    double resid = 0.0;
    double denom = 0.0;
};

RankOneParts rank_one_parts(const LinearSystem& sys, const MetricSpec& metric,
                            const SketchSample& s, const Vector& x) {
    RankOneParts parts;
    Vector v;
    switch (s.variant) {
        case SketchVariant::RowCoordinate:
            v = sys.A().row(s.index).transpose();
            parts.resid = v.dot(x) - sys.b()(s.index);
            break;
        case SketchVariant::Gaussian:
            v = sys.A().transpose() * s.dense;
            parts.resid = s.dense.dot(sys.A() * x - sys.b());
            break;
        case SketchVariant::ColumnCoordinate:
            v = sys.A().transpose() * sys.A().col(s.index);
            parts.resid = sys.A().col(s.index).dot(sys.A() * x - sys.b());
            break;
        default:
            throw std::logic_error("rank_one_parts: not a rank-one sketch");
    }
    parts.binv_v = metric.apply_inv(v);
    parts.denom = v.dot(parts.binv_v);
    return parts;
}

} // namespace

Vector stoch_grad(const LinearSystem& sys, const MetricSpec& metric, const SketchSample& s,
                  const Vector& x) {
    if (static_cast<int>(x.size()) != sys.cols())
        throw std::invalid_argument("stoch_grad: dimension mismatch");

    if (s.variant == SketchVariant::BlockRows) {
        const int q = static_cast<int>(s.block.size());
        Matrix as(q, static_cast<int>(sys.cols()));
        Vector u(q);
        for (int j = 0; j < q; ++j) {
            as.row(j) = sys.A().row(s.block[j]);
            u(j) = as.row(j).dot(x) - sys.b()(s.block[j]);
        }
        Matrix binv_ast = metric.apply_inv(Matrix(as.transpose()));  // n x q
        Matrix gram = as * binv_ast;                                 // q x q
        return binv_ast * (pinv_psd(gram) * u);
    }

    RankOneParts parts = rank_one_parts(sys, metric, s, x);
    if (parts.denom <= kDenomGuard) return Vector::Zero(sys.cols());  // zero sketched row
    return (parts.resid / parts.denom) * parts.binv_v;
}

double f_S_value(const LinearSystem& sys, const MetricSpec& metric, const SketchSample& s,
                 const Vector& x) {
    if (s.variant == SketchVariant::BlockRows) {
        const int q = static_cast<int>(s.block.size());
        Matrix as(q, static_cast<int>(sys.cols()));
        Vector u(q);
        for (int j = 0; j < q; ++j) {
            as.row(j) = sys.A().row(s.block[j]);
            u(j) = as.row(j).dot(x) - sys.b()(s.block[j]);
        }
        Matrix gram = as * metric.apply_inv(Matrix(as.transpose()));
        return 0.5 * u.dot(pinv_psd(gram) * u);
    }
    RankOneParts parts = rank_one_parts(sys, metric, s, x);
    if (parts.denom <= kDenomGuard) return 0.0;
    return 0.5 * parts.resid * parts.resid / parts.denom;
}

double f_value_closed(const LinearSystem& sys, const MetricSpec& metric,
                      ClosedFormVariant variant, const Vector& x) {
    double resid_sq = (sys.A() * x - sys.b()).squaredNorm();
    switch (variant) {
        case ClosedFormVariant::mRK:
            if (!metric.is_identity())
                throw std::invalid_argument("f_value_closed: mRK requires B = I");
            return resid_sq / (2.0 * sys.frob_sq());
        case ClosedFormVariant::mRCD: {
            if (metric.kind() != MetricKind::SystemMatrix)
                throw std::invalid_argument("f_value_closed: mRCD requires B = A");
            double trace = sys.A().trace();
            return resid_sq / (2.0 * trace);
        }
    }
    throw std::logic_error("unreachable");
}

Matrix estimate_EZ_monte_carlo(const Sketcher& sk, const LinearSystem& sys,
                               const MetricSpec& metric, long nsamples, std::uint64_t seed) {
    if (nsamples < 1)
        throw std::invalid_argument("estimate_EZ_monte_carlo: nsamples must be >= 1");
    const int n = sys.cols();
    Matrix acc = Matrix::Zero(n, n);
    std::mt19937_64 rng = make_rng(seed);
    for (long t = 0; t < nsamples; ++t) {
        SketchSample s = sample(sk, sys, rng);
        if (s.variant == SketchVariant::BlockRows) {
            Matrix sm = s.materialize(sys);
            Matrix sta = sm.transpose() * sys.A();  // q x n
            Matrix gram = sta * metric.apply_inv(Matrix(sta.transpose()));
            acc.noalias() += sta.transpose() * pinv_psd(gram) * sta;
        } else {
            Vector v;
            if (s.variant == SketchVariant::RowCoordinate)
                v = sys.A().row(s.index).transpose();
            else if (s.variant == SketchVariant::Gaussian)
                v = sys.A().transpose() * s.dense;
            else
                v = sys.A().transpose() * sys.A().col(s.index);
            double denom = v.dot(metric.apply_inv(v));
            if (denom > kDenomGuard) acc.noalias() += v * v.transpose() / denom;
        }
    }
    return acc / static_cast<double>(nsamples);
}

Matrix expected_Z(const Sketcher& sk, const LinearSystem& sys, const MetricSpec& metric,
                  long mc_samples, std::uint64_t mc_seed) {
    const int n = sys.cols();
    switch (sk.variant()) {
        case SketchVariant::RowCoordinate: {
            Matrix acc = Matrix::Zero(n, n);
            for (int i = 0; i < sys.rows(); ++i) {
                if (sk.probs()(i) == 0.0) continue;
                Vector v = sys.A().row(i).transpose();
                double denom = v.dot(metric.apply_inv(v));
                if (denom > kDenomGuard) acc.noalias() += sk.probs()(i) * v * v.transpose() / denom;
            }
            return acc;
        }
        case SketchVariant::ColumnCoordinate: {
            Matrix acc = Matrix::Zero(n, n);
            for (int i = 0; i < sys.cols(); ++i) {
                if (sk.probs()(i) == 0.0) continue;
                Vector v = sys.A().transpose() * sys.A().col(i);
                double denom = v.dot(metric.apply_inv(v));
                if (denom > kDenomGuard) acc.noalias() += sk.probs()(i) * v * v.transpose() / denom;
            }
            return acc;
        }
        case SketchVariant::BlockRows:
        case SketchVariant::Gaussian:
            return estimate_EZ_monte_carlo(sk, sys, metric, mc_samples, mc_seed);
    }
    throw std::logic_error("unreachable");
}

} // namespace sketchmom
