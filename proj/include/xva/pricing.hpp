#ifndef XVA_PRICING_HPP
#define XVA_PRICING_HPP

#include <vector>

#include "xva/grid.hpp"
#include "xva/portfolio.hpp"
#include "xva/vasicek.hpp"

namespace xva {

// Par fixed rate at inception off the model's initial curve.
double par_rate(const ModelParams& m, double maturity_years, int fixed_tenor_months);

// Analytic netting-set valuation. The floating leg is valued as 1 - P(t, T),
// i.e. the running coupon is treated as restruck at the valuation time; this
// is exact at reset dates and keeps MtM a pure function of (t, r).
class SetValuer {
public:
    SetValuer(const ModelParams& m, const NettingSet& set);

    double mtm(double t, double r) const;
    double dmtm_dr(double t, double r) const;
    double last_maturity() const { return last_maturity_; }
    const NettingSet& set() const { return *set_; }

    // Resolved fixed rates (par rates filled in), aligned with set().trades.
    const std::vector<double>& fixed_rates() const { return fixed_rates_; }

private:
    struct Leg {
        double sign;  // +1 receives float / pays fixed, -1 the opposite
        double notional;
        double maturity;
        double fixed_rate;
        std::vector<double> fixed_times;  // coupon payment times from inception
        double fixed_accrual;             // year fraction per coupon
    };
    const ModelParams* model_;
    const NettingSet* set_;
    std::vector<Leg> legs_;
    std::vector<double> fixed_rates_;
    double last_maturity_ = 0.0;
};

// Cubic-Hermite cache of set MtM over (grid point, rate); falls back to the
// analytic valuer outside the tabulated rate range.
class MtmTable {
public:
    MtmTable() = default;
    MtmTable(const SetValuer& valuer, const TimeGrid& grid, double r_lo, double r_hi,
             std::size_t mesh_points);

    double eval(std::size_t k, double r) const;

private:
    const SetValuer* valuer_ = nullptr;
    std::vector<double> times_;
    std::size_t n_times_ = 0;
    std::size_t n_mesh_ = 0;
    double r_lo_ = 0.0;
    double inv_h_ = 0.0;
    double h_ = 0.0;
    std::vector<double> value_;  // [k][i]
    std::vector<double> deriv_;
};

// Rate-mesh bounds wide enough for the model's state distribution.
void mtm_mesh_bounds(const ModelParams& m, double horizon, double& r_lo, double& r_hi);

struct MarginState {
    double vm = 0.0;
    double im_received = 0.0;
    double im_posted = 0.0;
};

// Margin balances for a set given its mark-to-market at (t, r). Quantile IM is
// a stratified sample of the rate-driven mark-to-market gap over `im_horizon`.
MarginState margin_balances(const SetValuer& valuer, const MarginSpec& margin, double t, double r,
                            double mtm_value, const ModelParams& model, double im_horizon);

double apply_vm(double mtm_value, double vm_threshold);

}  // namespace xva

#endif
