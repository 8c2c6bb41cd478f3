#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace sketchmom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Row-compressed sparse storage. Kept alongside the dense matrix so that
/// per-row products cost O(nnz(row)) in the Kaczmarz fast path and the
/// per-row nonzero counts feed the flop model.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> indptr;   // size rows+1
    std::vector<int> indices;  // column indices, row-major
    std::vector<double> values;

    static CsrMatrix from_dense(const Matrix& a, double drop_tol = 0.0);
    Matrix to_dense() const;

    int row_nnz(int i) const { return indptr[i + 1] - indptr[i]; }
    double row_dot(int i, const Vector& x) const;
    /// x += alpha * row_i
    void add_scaled_row(int i, double alpha, Vector& x) const;
};

/// Consistent linear system Ax = b. Consistency is verified at construction
/// via a least-squares residual test (see consistency_tol).
class LinearSystem {
public:
    LinearSystem(Matrix a, Vector b, double consistency_tol = 1e-8);

    const Matrix& A() const { return a_; }
    const Vector& b() const { return b_; }
    int rows() const { return static_cast<int>(a_.rows()); }
    int cols() const { return static_cast<int>(a_.cols()); }

    const Vector& row_sq_norms() const { return row_sq_norms_; }
    double row_sq_norm(int i) const { return row_sq_norms_(i); }
    double frob_sq() const { return frob_sq_; }

    const CsrMatrix& csr() const { return csr_; }
    double mean_row_nnz() const { return mean_row_nnz_; }

private:
    Matrix a_;
    Vector b_;
    Vector row_sq_norms_;
    double frob_sq_ = 0.0;
    CsrMatrix csr_;
    double mean_row_nnz_ = 0.0;
};

enum class MetricKind { Identity, SystemMatrix, GramATA };

/// Positive definite geometry B together with cached eigendecomposition for
/// applying B, B^{-1}, B^{1/2} and B^{-1/2}.
class MetricSpec {
public:
    static MetricSpec identity(int n);
    static MetricSpec system_matrix(const LinearSystem& sys);
    static MetricSpec gram_ata(const LinearSystem& sys);

    MetricKind kind() const { return kind_; }
    int dim() const { return n_; }
    bool is_identity() const { return kind_ == MetricKind::Identity; }

    const Matrix& B() const;

    Vector apply(const Vector& x) const;           // Bx
    Vector apply_inv(const Vector& x) const;       // B^{-1}x
    Vector apply_sqrt(const Vector& x) const;      // B^{1/2}x
    Vector apply_inv_sqrt(const Vector& x) const;  // B^{-1/2}x
    Matrix apply_inv(const Matrix& x) const;
    Matrix apply_inv_sqrt(const Matrix& x) const;

    double norm_sq(const Vector& x) const;  // ||x||_B^2

private:
    MetricSpec() = default;
    void factorize(double eig_tol);

    MetricKind kind_ = MetricKind::Identity;
    int n_ = 0;
    mutable Matrix b_;  // Identity metric materializes B lazily
    Matrix eigvecs_;
    Vector eigvals_;
};

/// <Bx, y>
double b_inner(const Vector& x, const Vector& y, const MetricSpec& metric);

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix via symmetric
/// eigendecomposition, zeroing eigenvalues below rel_tol * lambda_max.
Matrix pinv_psd(const Matrix& m, double rel_tol = 1e-10);

/// Projection of x onto {z : Az = b} in the B-norm:
/// x - B^{-1}A^T (A B^{-1} A^T)^dagger (Ax - b).
Vector project_onto_solution_set(const LinearSystem& sys, const MetricSpec& metric,
                                 const Vector& x);

struct SpectrumReport {
    Vector eigenvalues;  // ascending
    double lambda_min_plus = 0.0;
    double lambda_max = 0.0;
    double zero_tol = 0.0;
    bool exact = false;  // E[Z] PD within tolerance (sufficient for exactness)
};

/// Eigendecomposition of W = B^{-1/2} E[Z] B^{-1/2}.
SpectrumReport spectrum_W(const LinearSystem& sys, const MetricSpec& metric, const Matrix& ez);

} // namespace sketchmom
