#include "xva/credit.hpp"

#include <cmath>

namespace xva {

void CreditCurve::bootstrap() {
    if (tenors.empty() || tenors.size() != spreads_bps.size())
        throw ConfigError("CreditCurve: tenor/spread lengths do not match");
    if (!(recovery >= 0.0 && recovery < 1.0))
        throw ConfigError("CreditCurve: recovery must lie in [0,1)");
    double prev = 0.0;
    hazards.resize(tenors.size());
    for (std::size_t j = 0; j < tenors.size(); ++j) {
        if (!(tenors[j] > prev)) throw ConfigError("CreditCurve: tenors must be strictly increasing");
        if (!(spreads_bps[j] >= 0.0)) throw ConfigError("CreditCurve: spreads must be >= 0");
        hazards[j] = spreads_bps[j] * 1e-4 / (1.0 - recovery);
        prev = tenors[j];
    }
}

double CreditCurve::hazard_at(double t) const {
    for (std::size_t j = 0; j < tenors.size(); ++j)
        if (t <= tenors[j]) return hazards[j];
    return hazards.back();
}

double CreditCurve::cumulative_hazard(double t) const {
    if (t <= 0.0) return 0.0;
    double acc = 0.0;
    double start = 0.0;
    for (std::size_t j = 0; j < tenors.size(); ++j) {
        const double end = tenors[j];
        if (t <= end) return acc + hazards[j] * (t - start);
        acc += hazards[j] * (end - start);
        start = end;
    }
    return acc + hazards.back() * (t - start);
}

double CreditCurve::inverse_cumulative_hazard(double e) const {
    if (e <= 0.0) return 0.0;
    double acc = 0.0;
    double start = 0.0;
    for (std::size_t j = 0; j < tenors.size(); ++j) {
        const double seg = hazards[j] * (tenors[j] - start);
        if (acc + seg >= e) {
            if (hazards[j] <= 0.0) return kNever;  // zero-density plateau, cannot ring here
            return start + (e - acc) / hazards[j];
        }
        acc += seg;
        start = tenors[j];
    }
    if (hazards.back() <= 0.0) return kNever;
    return start + (e - acc) / hazards.back();
}

double CreditCurve::survival(double t) const { return std::exp(-cumulative_hazard(t)); }

std::size_t CreditSetup::counterparty_index(const std::string& name) const {
    for (std::size_t i = 0; i < counterparty_names.size(); ++i)
        if (counterparty_names[i] == name) return i;
    throw ConfigError("CreditSetup: no credit curve for counterparty '" + name + "'");
}

void CreditSetup::validate() const {
    if (counterparty_names.size() != counterparty_curves.size())
        throw ConfigError("CreditSetup: name/curve count mismatch");
    if (bank_curve.hazards.empty()) throw ConfigError("CreditSetup: missing bank curve");
    for (const auto& c : counterparty_curves)
        if (c.hazards.empty()) throw ConfigError("CreditSetup: curve not bootstrapped");
    if (lambda_override && !(*lambda_override >= 0.0))
        throw ConfigError("CreditSetup: lambda override must be >= 0");
    if (lambda_bar_override && !(*lambda_bar_override >= 0.0))
        throw ConfigError("CreditSetup: lambda_bar override must be >= 0");
}

}  // namespace xva
