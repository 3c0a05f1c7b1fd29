#ifndef XVA_VASICEK_HPP
#define XVA_VASICEK_HPP

#include <vector>

#include "xva/errors.hpp"

namespace xva {

// Single-factor mean-reverting Gaussian short rate,
//   dr = a (b - r) dt + sigma dW  (+ an optional additive drift shift).
// Bonds and swaps have closed forms, which keeps the valuation layer analytic.
struct ModelParams {
    double r0 = 0.01;
    double mean_reversion = 0.0;   // a, per annum
    double rate_vol = 0.0;         // sigma, per annum
    double long_term_rate = 0.01;  // b, per annum
    double hist_drift_shift = 0.0; // additive drift on secondary paths
    // Entity default-clock copula correlation (counterparties then bank).
    // Empty means independent clocks.
    std::vector<std::vector<double>> correlation;

    void validate() const;
};

// (1 - e^-x)/x, stable near 0.
double expm1_ratio(double x);

// Exact one-step transition of the OU short rate: r' = offset + decay*r + stdev*Z.
struct OuStep {
    double decay;
    double offset;
    double stdev;
};
OuStep ou_transition(const ModelParams& m, double dt, double drift_shift);

// Zero-coupon bond P(t, t+tau; r) = exp(A - B r) under the risk-neutral dynamics.
void zcb_coefficients(const ModelParams& m, double tau, double& A, double& B);
double zcb_price(const ModelParams& m, double tau, double r);

// Law of r_{t+tau} given r_t under the (t+tau)-forward measure, together with
// the bond P(t,t+tau;r): E[e^{-int r} g(r_{t+tau})] = bond * E[g(N(mean, stdev^2))].
struct ForwardLaw {
    double mean;
    double stdev;
    double bond;
};
ForwardLaw forward_law(const ModelParams& m, double tau, double r);

}  // namespace xva

#endif
