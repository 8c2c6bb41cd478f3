#include "sketchmom/rates.hpp"

#include <cmath>

namespace sketchmom {

namespace {

void check_spectrum(double lambda_min_plus, double lambda_max) {
    if (!(lambda_min_plus > 0.0) || lambda_min_plus > lambda_max || lambda_max > 1.0 + 1e-12)
        throw std::invalid_argument("rates: need 0 < lambda_min_plus <= lambda_max <= 1");
}

RateReport from_constants(double a1, double a2) {
    RateReport rep;
    rep.a1 = a1;
    rep.a2 = a2;
    rep.q = 0.5 * (a1 + std::sqrt(a1 * a1 + 4.0 * a2));
    rep.delta = rep.q - a1;
    rep.admissible = a1 + a2 < 1.0;
    return rep;
}

} // namespace

double RateReport::bound(long k) const {
    return std::pow(q, static_cast<double>(k)) * (1.0 + delta);
}

RateReport rate_constants(double omega, double beta, double lambda_min_plus, double lambda_max) {
    if (omega <= 0.0 || omega >= 2.0) throw std::invalid_argument("rate_constants: omega out of (0,2)");
    if (beta < 0.0) throw std::invalid_argument("rate_constants: beta must be >= 0");
    check_spectrum(lambda_min_plus, lambda_max);
    double a1 = 1.0 + 3.0 * beta + 2.0 * beta * beta -
                (omega * (2.0 - omega) + omega * beta) * lambda_min_plus;
    double a2 = beta + 2.0 * beta * beta + omega * beta * lambda_max;
    return from_constants(a1, a2);
}

double beta_max(double omega, double lambda_min_plus, double lambda_max) {
    if (omega <= 0.0 || omega >= 2.0) throw std::invalid_argument("beta_max: omega out of (0,2)");
    double s = 4.0 - omega * lambda_min_plus + omega * lambda_max;
    return 0.125 * (-s + std::sqrt(s * s + 16.0 * omega * (2.0 - omega) * lambda_min_plus));
}

AcceleratedParams accelerated_params(double lambda_min_plus, double lambda_max,
                                     AcceleratedMode mode) {
    check_spectrum(lambda_min_plus, lambda_max);
    AcceleratedParams p;
    if (mode == AcceleratedMode::UnitStep) {
        p.omega = 1.0;
        double t = 1.0 - std::sqrt(0.99 * lambda_min_plus);
        p.beta = t * t;
    } else {
        p.omega = 1.0 / lambda_max;
        double t = 1.0 - std::sqrt(0.99 * lambda_min_plus / lambda_max);
        p.beta = t * t;
    }
    return p;
}

RateReport sm_rate_constants(double omega, double beta, long n, double lambda_min_plus,
                             double lambda_max) {
    if (omega <= 0.0 || omega >= 2.0)
        throw std::invalid_argument("sm_rate_constants: omega out of (0,2)");
    if (beta < 0.0) throw std::invalid_argument("sm_rate_constants: beta must be >= 0");
    if (n < 1) throw std::invalid_argument("sm_rate_constants: n must be >= 1");
    check_spectrum(lambda_min_plus, lambda_max);
    const double bn = beta / static_cast<double>(n);
    double a1 = 1.0 + 3.0 * bn + 2.0 * beta * bn -
                (omega * (2.0 - omega) + omega * bn) * lambda_min_plus;
    double a2 = (beta + 2.0 * beta * beta + omega * beta * lambda_max) / static_cast<double>(n);
    return from_constants(a1, a2);
}

double cesaro_bound(double omega, double beta, double dist0_sq, double f0, long k) {
    if (!(omega > 0.0) || beta < 0.0 || beta >= 1.0)
        throw std::invalid_argument("cesaro_bound: need omega > 0 and 0 <= beta < 1");
    if (omega + 2.0 * beta >= 2.0)
        throw std::invalid_argument("cesaro_bound: requires omega + 2 beta < 2");
    if (k < 1) throw std::invalid_argument("cesaro_bound: k must be >= 1");
    double num = (1.0 - beta) * (1.0 - beta) * dist0_sq + 2.0 * omega * beta * f0;
    return num / (2.0 * omega * (2.0 - 2.0 * beta - omega) * static_cast<double>(k));
}

ComplexityRatio complexity_ratio(const ComplexityModel& model, double beta, double omega,
                                 double lambda_min_plus, double lambda_max) {
    RateReport msgd = rate_constants(omega, beta, lambda_min_plus, lambda_max);
    RateReport smsgd = sm_rate_constants(omega, beta * model.n, model.n, lambda_min_plus,
                                         lambda_max);
    if (!msgd.admissible || !smsgd.admissible)
        throw std::invalid_argument("complexity_ratio: beta is not admissible for both rates");
    ComplexityRatio out;
    out.c_msgd = (model.g + model.n) / (1.0 - msgd.q);
    out.c_smsgd = model.g / (1.0 - smsgd.q);
    out.ratio = out.c_msgd / out.c_smsgd;
    out.asymptote = 1.0 + model.n / model.g;
    return out;
}

double recursion_bound(double a1, double a2, double f0, long k) {
    if (a1 < 0.0 || a2 < 0.0 || a1 + a2 >= 1.0 || a1 + a2 <= 0.0)
        throw std::invalid_argument("recursion_bound: inadmissible coefficients");
    if (f0 < 0.0) throw std::invalid_argument("recursion_bound: F0 must be >= 0");
    RateReport rep = from_constants(a1, a2);
    return rep.bound(k) * f0;
}

} // namespace sketchmom
