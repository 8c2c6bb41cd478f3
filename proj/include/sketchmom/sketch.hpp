#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sketchmom/linalg.hpp"

namespace sketchmom {

enum class SketchVariant { RowCoordinate, BlockRows, Gaussian, ColumnCoordinate };

/// A sampling distribution D over sketch matrices S (all with m rows).
class Sketcher {
public:
    /// S = e_i with probability probs[i].
    static Sketcher row_coordinate(Vector probs);
    /// mRK convention: p_i = ||A_{i:}||^2 / ||A||_F^2.
    static Sketcher mrk(const LinearSystem& sys);
    /// mRCD convention (A PD, B = A): p_i = A_ii / Trace(A).
    static Sketcher mrcd(const LinearSystem& sys);
    /// S = I_{:C}, C uniform over subsets of [m] of the given size.
    static Sketcher block_rows(int block_size);
    /// S ~ N(0, I_m), realized as a dense m-vector.
    static Sketcher gaussian();
    /// S = A_{:i} with p_i = ||A_{:i}||^2 / ||A||_F^2 (least-squares RCD, B = A^T A).
    static Sketcher column_coordinate(const LinearSystem& sys);

    SketchVariant variant() const { return variant_; }
    const Vector& probs() const { return probs_; }
    const Vector& cdf() const { return cdf_; }
    int block_size() const { return block_size_; }

private:
    Sketcher() = default;
    SketchVariant variant_ = SketchVariant::RowCoordinate;
    Vector probs_;      // categorical variants
    Vector cdf_;        // inverse-CDF sampling
    int block_size_ = 1;
};

/// One realized sketch. Coordinate variants store an index, blocks a sorted
/// index set, the Gaussian variant a dense m-vector.
struct SketchSample {
    SketchVariant variant = SketchVariant::RowCoordinate;
    int index = -1;
    std::vector<int> block;
    Vector dense;

    /// Realize S as an m x q dense operator.
    Matrix materialize(const LinearSystem& sys) const;
};

SketchSample sample(const Sketcher& sk, const LinearSystem& sys, std::mt19937_64& rng);

/// Stochastic gradient of f_S at x in the B geometry:
/// B^{-1} A^T S (S^T A B^{-1} A^T S)^dagger S^T (Ax - b).
Vector stoch_grad(const LinearSystem& sys, const MetricSpec& metric, const SketchSample& s,
                  const Vector& x);

/// f_S(x) = 1/2 ||Ax - b||_H^2 with H = S (S^T A B^{-1} A^T S)^dagger S^T.
double f_S_value(const LinearSystem& sys, const MetricSpec& metric, const SketchSample& s,
                 const Vector& x);

enum class ClosedFormVariant { mRK, mRCD };

/// Population objective f(x) in the two cases where it has a closed form:
/// mRK: ||Ax-b||^2 / (2 ||A||_F^2);  mRCD: ||Ax-b||^2 / (2 Trace(A)).
double f_value_closed(const LinearSystem& sys, const MetricSpec& metric,
                      ClosedFormVariant variant, const Vector& x);

/// Monte-Carlo estimate of E[Z] = E[A^T H A] over nsamples i.i.d. sketches.
Matrix estimate_EZ_monte_carlo(const Sketcher& sk, const LinearSystem& sys,
                               const MetricSpec& metric, long nsamples, std::uint64_t seed);

/// Closed-form E[Z] for the categorical variants (used for rate constants).
/// RowCoordinate: sum_i p_i A_i^T A_i / row_gram_i; falls back to Monte Carlo
/// for Gaussian sketches.
Matrix expected_Z(const Sketcher& sk, const LinearSystem& sys, const MetricSpec& metric,
                  long mc_samples = 200000, std::uint64_t mc_seed = 12345);

} // namespace sketchmom
