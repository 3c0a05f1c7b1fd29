#ifndef XVA_CREDIT_HPP
#define XVA_CREDIT_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "xva/errors.hpp"

namespace xva {

// Piecewise-constant forward hazards bootstrapped from a CDS spread curve via
// the credit triangle gamma = s / (1 - R), segment by segment.
struct CreditCurve {
    std::vector<double> tenors;       // years, strictly increasing
    std::vector<double> spreads_bps;  // one quote per tenor
    double recovery = 0.4;

    std::vector<double> hazards;  // derived, same length as tenors

    void bootstrap();
    double hazard_at(double t) const;
    double cumulative_hazard(double t) const;
    // Smallest t with cumulative hazard >= e; +inf when the clock never rings.
    double inverse_cumulative_hazard(double e) const;
    double survival(double t) const;
};

enum class ImFundingMode { Unsecured, Blended };

struct CreditSetup {
    // Counterparty curves in file order; the bank's curve is kept separately.
    std::vector<std::string> counterparty_names;
    std::vector<CreditCurve> counterparty_curves;
    CreditCurve bank_curve;

    std::optional<double> lambda_override;      // flat unsecured funding spread
    std::optional<double> lambda_bar_override;  // flat IM funding spread
    ImFundingMode im_mode = ImFundingMode::Unsecured;

    std::size_t counterparty_count() const { return counterparty_curves.size(); }
    std::size_t entity_count() const { return counterparty_curves.size() + 1; }
    std::size_t bank_entity_index() const { return counterparty_curves.size(); }

    const CreditCurve& entity_curve(std::size_t e) const {
        return e < counterparty_curves.size() ? counterparty_curves[e] : bank_curve;
    }

    std::size_t counterparty_index(const std::string& name) const;

    // lambda_t: bank hazard * (1 - R_bank), i.e. the bank CDS spread, unless overridden.
    double unsecured_spread(double t) const {
        if (lambda_override) return *lambda_override;
        return bank_curve.hazard_at(t) * (1.0 - bank_curve.recovery);
    }

    void validate() const;
};

inline constexpr double kNever = std::numeric_limits<double>::infinity();

}  // namespace xva

#endif
