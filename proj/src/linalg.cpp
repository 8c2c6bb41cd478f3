#include "sketchmom/linalg.hpp"

#include <cmath>

namespace sketchmom {

CsrMatrix CsrMatrix::from_dense(const Matrix& a, double drop_tol) {
    CsrMatrix out;
    out.rows = static_cast<int>(a.rows());
    out.cols = static_cast<int>(a.cols());
    out.indptr.resize(out.rows + 1, 0);
    for (int i = 0; i < out.rows; ++i) {
        for (int j = 0; j < out.cols; ++j) {
            if (std::abs(a(i, j)) > drop_tol) {
                out.indices.push_back(j);
                out.values.push_back(a(i, j));
            }
        }
        out.indptr[i + 1] = static_cast<int>(out.indices.size());
    }
    return out;
}

Matrix CsrMatrix::to_dense() const {
    Matrix out = Matrix::Zero(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int p = indptr[i]; p < indptr[i + 1]; ++p)
            out(i, indices[p]) = values[p];
    return out;
}

double CsrMatrix::row_dot(int i, const Vector& x) const {
    double acc = 0.0;
    for (int p = indptr[i]; p < indptr[i + 1]; ++p)
        acc += values[p] * x(indices[p]);
    return acc;
}

void CsrMatrix::add_scaled_row(int i, double alpha, Vector& x) const {
    for (int p = indptr[i]; p < indptr[i + 1]; ++p)
        x(indices[p]) += alpha * values[p];
}

LinearSystem::LinearSystem(Matrix a, Vector b, double consistency_tol)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != b_.size())
        throw std::invalid_argument("LinearSystem: A rows must match b length");
    if (a_.rows() == 0 || a_.cols() == 0)
        throw std::invalid_argument("LinearSystem: empty matrix");

    row_sq_norms_ = a_.rowwise().squaredNorm();
    frob_sq_ = row_sq_norms_.sum();
    csr_ = CsrMatrix::from_dense(a_);
    mean_row_nnz_ = static_cast<double>(csr_.values.size()) / a_.rows();

    // consistency: least-squares residual must be small relative to ||b||
    Vector ls = a_.colPivHouseholderQr().solve(b_);
    double resid = (a_ * ls - b_).norm();
    if (resid > consistency_tol * std::max(b_.norm(), 1e-300) && b_.norm() > 0)
        throw std::invalid_argument("LinearSystem: b is not in the range of A (inconsistent system)");
}

MetricSpec MetricSpec::identity(int n) {
    MetricSpec m;
    m.kind_ = MetricKind::Identity;
    m.n_ = n;
    return m;
}

MetricSpec MetricSpec::system_matrix(const LinearSystem& sys) {
    if (sys.rows() != sys.cols())
        throw std::invalid_argument("MetricSpec: SystemMatrix metric requires a square A");
    MetricSpec m;
    m.kind_ = MetricKind::SystemMatrix;
    m.n_ = sys.cols();
    m.b_ = 0.5 * (sys.A() + sys.A().transpose());
    m.factorize(1e-12);
    return m;
}

MetricSpec MetricSpec::gram_ata(const LinearSystem& sys) {
    MetricSpec m;
    m.kind_ = MetricKind::GramATA;
    m.n_ = sys.cols();
    m.b_ = sys.A().transpose() * sys.A();
    m.factorize(1e-12);
    return m;
}

void MetricSpec::factorize(double eig_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b_);
    eigvals_ = es.eigenvalues();
    eigvecs_ = es.eigenvectors();
    double lmax = eigvals_.maxCoeff();
    if (eigvals_.minCoeff() <= eig_tol * std::max(lmax, 1.0))
        throw std::invalid_argument("MetricSpec: B is not positive definite");
}

const Matrix& MetricSpec::B() const {
    if (kind_ == MetricKind::Identity && b_.size() == 0)
        b_ = Matrix::Identity(n_, n_);
    return b_;
}

Vector MetricSpec::apply(const Vector& x) const {
    return kind_ == MetricKind::Identity ? x : Vector(b_ * x);
}

Vector MetricSpec::apply_inv(const Vector& x) const {
    if (kind_ == MetricKind::Identity) return x;
    return eigvecs_ * (eigvals_.cwiseInverse().asDiagonal() * (eigvecs_.transpose() * x));
}

Vector MetricSpec::apply_sqrt(const Vector& x) const {
    if (kind_ == MetricKind::Identity) return x;
    return eigvecs_ * (eigvals_.cwiseSqrt().asDiagonal() * (eigvecs_.transpose() * x));
}

Vector MetricSpec::apply_inv_sqrt(const Vector& x) const {
    if (kind_ == MetricKind::Identity) return x;
    return eigvecs_ * (eigvals_.cwiseSqrt().cwiseInverse().asDiagonal() * (eigvecs_.transpose() * x));
}

Matrix MetricSpec::apply_inv(const Matrix& x) const {
    if (kind_ == MetricKind::Identity) return x;
    return eigvecs_ * (eigvals_.cwiseInverse().asDiagonal() * (eigvecs_.transpose() * x));
}

Matrix MetricSpec::apply_inv_sqrt(const Matrix& x) const {
    if (kind_ == MetricKind::Identity) return x;
    return eigvecs_ * (eigvals_.cwiseSqrt().cwiseInverse().asDiagonal() * (eigvecs_.transpose() * x));
}

double MetricSpec::norm_sq(const Vector& x) const {
    if (kind_ == MetricKind::Identity) return x.squaredNorm();
    return x.dot(b_ * x);
}

double b_inner(const Vector& x, const Vector& y, const MetricSpec& metric) {
    if (x.size() != y.size() || static_cast<int>(x.size()) != metric.dim())
        throw std::invalid_argument("b_inner: dimension mismatch");
    if (metric.is_identity()) return x.dot(y);
    return metric.apply(x).dot(y);
}

Matrix pinv_psd(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("pinv_psd: matrix must be square");
    double sym_err = (m - m.transpose()).norm();
    if (sym_err > 1e-12 * std::max(1.0, m.norm()))
        throw std::invalid_argument("pinv_psd: matrix is not symmetric");
    if (rel_tol <= 0.0 || rel_tol >= 1.0)
        throw std::invalid_argument("pinv_psd: rel_tol must lie in (0,1)");

    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    const Vector& d = es.eigenvalues();
    double cutoff = rel_tol * std::max(d.maxCoeff(), 0.0);
    Vector dinv = Vector::Zero(d.size());
    for (int i = 0; i < d.size(); ++i)
        if (d(i) > cutoff) dinv(i) = 1.0 / d(i);
    return es.eigenvectors() * dinv.asDiagonal() * es.eigenvectors().transpose();
}

Vector project_onto_solution_set(const LinearSystem& sys, const MetricSpec& metric,
                                 const Vector& x) {
    if (static_cast<int>(x.size()) != sys.cols())
        throw std::invalid_argument("project_onto_solution_set: dimension mismatch");
    Matrix binv_at = metric.apply_inv(Matrix(sys.A().transpose()));  // n x m
    Matrix gram = sys.A() * binv_at;                                 // m x m, PSD
    Vector resid = sys.A() * x - sys.b();
    return x - binv_at * (pinv_psd(gram) * resid);
}

SpectrumReport spectrum_W(const LinearSystem& sys, const MetricSpec& metric, const Matrix& ez) {
    (void)sys;
    if (ez.rows() != ez.cols() || static_cast<int>(ez.rows()) != metric.dim())
        throw std::invalid_argument("spectrum_W: E[Z] must be n x n");
    Matrix half = metric.apply_inv_sqrt(ez);
    Matrix w = metric.apply_inv_sqrt(Matrix(half.transpose()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);

    SpectrumReport rep;
    rep.eigenvalues = es.eigenvalues();
    rep.lambda_max = rep.eigenvalues.maxCoeff();
    rep.zero_tol = 1e-9 * rep.lambda_max;
    rep.lambda_min_plus = 0.0;
    for (int i = 0; i < rep.eigenvalues.size(); ++i) {
        if (rep.eigenvalues(i) > rep.zero_tol) {
            rep.lambda_min_plus = rep.eigenvalues(i);
            break;
        }
    }
    if (rep.lambda_min_plus <= 0.0)
        throw std::runtime_error("spectrum_W: all eigenvalues below zero tolerance (degenerate distribution)");
    rep.exact = rep.eigenvalues.minCoeff() > rep.zero_tol;
    return rep;
}

} // namespace sketchmom
