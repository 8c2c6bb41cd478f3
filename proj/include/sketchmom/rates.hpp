#pragma once

#include <stdexcept>

namespace sketchmom {

struct RateReport {
    double a1 = 0.0;
    double a2 = 0.0;
    double q = 0.0;
    double delta = 0.0;
    bool admissible = false;  // a1 + a2 < 1

    /// Bound multiplier q^k (1 + delta).
    double bound(long k) const;
};

/// Heavy-ball L2 rate constants:
/// a1 = 1 + 3b + 2b^2 - (w(2-w) + wb) lmin, a2 = b + 2b^2 + wb lmax.
RateReport rate_constants(double omega, double beta, double lambda_min_plus, double lambda_max);

/// Supremum of the admissible momentum range for a given stepsize.
double beta_max(double omega, double lambda_min_plus, double lambda_max);

enum class AcceleratedMode { UnitStep, InvLmax };

struct AcceleratedParams {
    double omega = 1.0;
    double beta = 0.0;
};

/// Parameter pairs achieving the accelerated L1 rate:
/// UnitStep: w = 1, b = (1 - sqrt(0.99 lmin))^2;
/// InvLmax:  w = 1/lmax, b = (1 - sqrt(0.99 lmin/lmax))^2.
AcceleratedParams accelerated_params(double lambda_min_plus, double lambda_max,
                                     AcceleratedMode mode);

/// Stochastic-momentum rate constants (B = I):
/// a1 = 1 + 3b/n + 2b^2/n - (w(2-w) + wb/n) lmin, a2 = (b + 2b^2 + wb lmax)/n.
RateReport sm_rate_constants(double omega, double beta, long n, double lambda_min_plus,
                             double lambda_max);

/// Cesaro average bound ((1-b)^2 d0 + 2wb f0) / (2w(2-2b-w)k); requires w+2b<2.
double cesaro_bound(double omega, double beta, double dist0_sq, double f0, long k);

struct ComplexityModel {
    long n = 0;        // columns
    double g = 0.0;    // expected nonzeros per row
    double cost_basic() const { return 4.0 * g; }
    double cost_momentum() const { return 4.0 * g + 3.0 * n; }
    double cost_stochastic_momentum() const { return 4.0 * g + 1.0; }
};

struct ComplexityRatio {
    double c_msgd = 0.0;
    double c_smsgd = 0.0;
    double ratio = 0.0;
    double asymptote = 0.0;  // 1 + n/g
};

/// Theoretical total-complexity ratio C_mSGD(b) / C_smSGD(bn) with
/// C_mSGD = (g+n)/(1-q(b)) and C_smSGD = g/(1-qbar(bn)).
ComplexityRatio complexity_ratio(const ComplexityModel& model, double beta, double omega,
                                 double lambda_min_plus, double lambda_max);

/// Closed-form dominating bound q^k(1+delta)F0 for the two-term recursion
/// F_k <= a1 F_{k-1} + a2 F_{k-2} started from F_0 = F_{-1}.
double recursion_bound(double a1, double a2, double f0, long k);

} // namespace sketchmom
