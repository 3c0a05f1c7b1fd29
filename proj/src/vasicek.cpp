#include "xva/vasicek.hpp"

#include <cmath>
#include <cstddef>

namespace xva {

namespace {
constexpr double kSmallMeanReversion = 1e-8;
}

void ModelParams::validate() const {
    if (!(rate_vol >= 0.0)) throw ConfigError("ModelParams: rate_vol must be >= 0");
    if (!(mean_reversion >= 0.0)) throw ConfigError("ModelParams: mean_reversion must be >= 0");
    if (!std::isfinite(r0) || !std::isfinite(long_term_rate) || !std::isfinite(hist_drift_shift))
        throw ConfigError("ModelParams: parameters must be finite");
    const std::size_t n = correlation.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (correlation[i].size() != n)
            throw ConfigError("ModelParams: correlation matrix must be square");
        if (std::fabs(correlation[i][i] - 1.0) > 1e-12)
            throw ConfigError("ModelParams: correlation matrix must have unit diagonal");
        for (std::size_t j = 0; j < n; ++j) {
            const double x = correlation[i][j];
            if (!(x >= -1.0 && x <= 1.0))
                throw ConfigError("ModelParams: correlations must lie in [-1,1]");
            if (std::fabs(x - correlation[j][i]) > 1e-12)
                throw ConfigError("ModelParams: correlation matrix must be symmetric");
        }
    }
}

double expm1_ratio(double x) {
    if (std::fabs(x) < 1e-8) return 1.0 - 0.5 * x + x * x / 6.0;
    return -std::expm1(-x) / x;
}

OuStep ou_transition(const ModelParams& m, double dt, double drift_shift) {
    const double a = m.mean_reversion;
    const double sigma = m.rate_vol;
    OuStep s{};
    if (a > kSmallMeanReversion) {
        const double decay = std::exp(-a * dt);
        const double target = m.long_term_rate + drift_shift / a;
        s.decay = decay;
        s.offset = target * (1.0 - decay);
        s.stdev = sigma * std::sqrt(dt * expm1_ratio(2.0 * a * dt));
    } else {
        s.decay = 1.0;
        s.offset = drift_shift * dt;
        s.stdev = sigma * std::sqrt(dt);
    }
    return s;
}

void zcb_coefficients(const ModelParams& m, double tau, double& A, double& B) {
    const double a = m.mean_reversion;
    const double sigma = m.rate_vol;
    if (tau <= 0.0) {
        A = 0.0;
        B = 0.0;
        return;
    }
    if (a > kSmallMeanReversion) {
        B = tau * expm1_ratio(a * tau);
        const double s2 = sigma * sigma;
        A = (m.long_term_rate - 0.5 * s2 / (a * a)) * (B - tau) - 0.25 * s2 * B * B / a;
    } else {
        B = tau;
        A = sigma * sigma * tau * tau * tau / 6.0;
    }
}

double zcb_price(const ModelParams& m, double tau, double r) {
    double A, B;
    zcb_coefficients(m, tau, A, B);
    return std::exp(A - B * r);
}

ForwardLaw forward_law(const ModelParams& m, double tau, double r) {
    const double a = m.mean_reversion;
    const double sigma = m.rate_vol;
    ForwardLaw law{};
    law.bond = zcb_price(m, tau, r);
    double B;
    double meanQ, var;
    if (a > kSmallMeanReversion) {
        const double decay = std::exp(-a * tau);
        meanQ = m.long_term_rate + (r - m.long_term_rate) * decay;
        var = sigma * sigma * tau * expm1_ratio(2.0 * a * tau);
        B = tau * expm1_ratio(a * tau);
    } else {
        meanQ = r;
        var = sigma * sigma * tau;
        B = tau;
    }
    // Measure change shifts the mean by -Cov(int r, r_s) = -sigma^2 B^2 / 2.
    law.mean = meanQ - 0.5 * sigma * sigma * B * B;
    law.stdev = std::sqrt(var);
    return law;
}

}  // namespace xva
