#include "xva/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "xva/rng.hpp"

namespace xva {

namespace {

std::vector<double> coupon_schedule(double maturity, int tenor_months) {
    if (tenor_months <= 0) throw ConfigError("coupon tenor must be positive");
    const double step = tenor_months / 12.0;
    std::vector<double> times;
    const long n = std::lround(maturity / step);
    if (n < 1 || std::fabs(maturity - n * step) > 1e-9)
        throw ConfigError("trade maturity must be a whole number of coupon periods");
    times.reserve(static_cast<std::size_t>(n));
    for (long j = 1; j <= n; ++j) times.push_back(step * static_cast<double>(j));
    times.back() = maturity;
    return times;
}

}  // namespace

double par_rate(const ModelParams& m, double maturity_years, int fixed_tenor_months) {
    const auto times = coupon_schedule(maturity_years, fixed_tenor_months);
    const double accrual = fixed_tenor_months / 12.0;
    double annuity = 0.0;
    for (double s : times) annuity += accrual * zcb_price(m, s, m.r0);
    const double float_leg = 1.0 - zcb_price(m, maturity_years, m.r0);
    if (annuity <= 0.0) throw ConfigError("par_rate: degenerate annuity");
    return float_leg / annuity;
}

SetValuer::SetValuer(const ModelParams& m, const NettingSet& set) : model_(&m), set_(&set) {
    legs_.reserve(set.trades.size());
    fixed_rates_.reserve(set.trades.size());
    for (const auto& tr : set.trades) {
        if (!(tr.notional > 0.0))
            throw ConfigError("trade " + tr.id + ": notional must be positive");
        Leg leg;
        leg.sign = (tr.type == TradeType::PayerSwap) ? 1.0 : -1.0;
        leg.notional = tr.notional;
        leg.maturity = tr.maturity_years;
        leg.fixed_times = coupon_schedule(tr.maturity_years, tr.fixed_tenor_months);
        leg.fixed_accrual = tr.fixed_tenor_months / 12.0;
        leg.fixed_rate =
            tr.fixed_rate ? *tr.fixed_rate : par_rate(m, tr.maturity_years, tr.fixed_tenor_months);
        fixed_rates_.push_back(leg.fixed_rate);
        last_maturity_ = std::max(last_maturity_, tr.maturity_years);
        legs_.push_back(std::move(leg));
    }
}

double SetValuer::mtm(double t, double r) const {
    double value = 0.0;
    for (const auto& leg : legs_) {
        if (t >= leg.maturity) continue;
        const double float_leg = 1.0 - zcb_price(*model_, leg.maturity - t, r);
        double fixed_leg = 0.0;
        for (double s : leg.fixed_times)
            if (s > t) fixed_leg += leg.fixed_accrual * zcb_price(*model_, s - t, r);
        fixed_leg *= leg.fixed_rate;
        value += leg.sign * leg.notional * (float_leg - fixed_leg);
    }
    return value;
}

double SetValuer::dmtm_dr(double t, double r) const {
    double deriv = 0.0;
    for (const auto& leg : legs_) {
        if (t >= leg.maturity) continue;
        double A, B;
        zcb_coefficients(*model_, leg.maturity - t, A, B);
        double d = B * std::exp(A - B * r);  // d(1-P)/dr
        for (double s : leg.fixed_times) {
            if (s <= t) continue;
            zcb_coefficients(*model_, s - t, A, B);
            d += leg.fixed_rate * leg.fixed_accrual * B * std::exp(A - B * r);
        }
        deriv += leg.sign * leg.notional * d;
    }
    return deriv;
}

void mtm_mesh_bounds(const ModelParams& m, double horizon, double& r_lo, double& r_hi) {
    const double a = m.mean_reversion;
    const double sd_limit =
        (a > 1e-8) ? m.rate_vol / std::sqrt(2.0 * a) : m.rate_vol * std::sqrt(std::max(horizon, 1.0));
    const double drift_span = std::fabs(m.hist_drift_shift) * ((a > 1e-8) ? 1.0 / a : horizon);
    const double lo_center = std::min(m.r0, m.long_term_rate) - drift_span;
    const double hi_center = std::max(m.r0, m.long_term_rate) + drift_span;
    r_lo = lo_center - 12.0 * sd_limit - 0.02;
    r_hi = hi_center + 12.0 * sd_limit + 0.02;
}

MtmTable::MtmTable(const SetValuer& valuer, const TimeGrid& grid, double r_lo, double r_hi,
                   std::size_t mesh_points)
    : valuer_(&valuer), times_(grid.times()), n_times_(grid.size()), n_mesh_(mesh_points),
      r_lo_(r_lo) {
    if (mesh_points < 4) throw ArgumentError("MtmTable: need at least 4 mesh points");
    h_ = (r_hi - r_lo) / static_cast<double>(mesh_points - 1);
    inv_h_ = 1.0 / h_;
    value_.resize(n_times_ * n_mesh_);
    deriv_.resize(n_times_ * n_mesh_);
    for (std::size_t k = 0; k < n_times_; ++k) {
        const double t = grid[k];
        for (std::size_t i = 0; i < n_mesh_; ++i) {
            const double r = r_lo_ + h_ * static_cast<double>(i);
            value_[k * n_mesh_ + i] = valuer.mtm(t, r);
            deriv_[k * n_mesh_ + i] = valuer.dmtm_dr(t, r);
        }
    }
}

double MtmTable::eval(std::size_t k, double r) const {
    const double x = (r - r_lo_) * inv_h_;
    if (x < 0.0 || x >= static_cast<double>(n_mesh_ - 1))
        return valuer_->mtm(times_[k], r);  // rare tail state, exact slow path
    const std::size_t i = static_cast<std::size_t>(x);
    const double u = x - static_cast<double>(i);
    const double v0 = value_[k * n_mesh_ + i];
    const double v1 = value_[k * n_mesh_ + i + 1];
    const double d0 = deriv_[k * n_mesh_ + i] * h_;
    const double d1 = deriv_[k * n_mesh_ + i + 1] * h_;
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2.0 * u3 - 3.0 * u2 + 1.0) * v0 + (u3 - 2.0 * u2 + u) * d0 +
           (-2.0 * u3 + 3.0 * u2) * v1 + (u3 - u2) * d1;
}

double apply_vm(double mtm_value, double vm_threshold) {
    if (vm_threshold <= 0.0) return mtm_value;  // full collateralization
    if (std::isinf(vm_threshold)) return 0.0;   // uncollateralized
    const double excess = std::fabs(mtm_value) - vm_threshold;
    return excess > 0.0 ? std::copysign(excess, mtm_value) : 0.0;
}

namespace {

// Stratified sample of the mark-to-market gap over the liquidation horizon.
double gap_quantile(const SetValuer& valuer, const ModelParams& model, double t, double r,
                    double alpha, double horizon, bool upside) {
    constexpr int kDraws = 201;
    const OuStep step = ou_transition(model, horizon, 0.0);
    const double base = valuer.mtm(t, r);
    std::vector<double> gaps(kDraws);
    for (int i = 0; i < kDraws; ++i) {
        const double u = (i + 0.5) / kDraws;
        const double z = inverse_normal_cdf(u);
        const double r_next = step.offset + step.decay * r + step.stdev * z;
        const double gap = valuer.mtm(t, r_next) - base;
        gaps[i] = upside ? gap : -gap;
    }
    std::sort(gaps.begin(), gaps.end());
    const int idx = std::min(kDraws - 1, static_cast<int>(alpha * kDraws));
    return std::max(0.0, gaps[idx]);
}

}  // namespace

MarginState margin_balances(const SetValuer& valuer, const MarginSpec& margin, double t, double r,
                            double mtm_value, const ModelParams& model, double im_horizon) {
    MarginState out;
    if (t >= valuer.last_maturity()) return out;  // nothing live, no balances
    out.vm = apply_vm(mtm_value, margin.vm_threshold);
    auto im_amount = [&](const ImSpec& spec, bool upside) {
        switch (spec.model) {
            case ImModel::None:
                return 0.0;
            case ImModel::Fixed:
                return spec.amount;
            case ImModel::Quantile:
                return gap_quantile(valuer, model, t, r, spec.alpha, im_horizon, upside);
        }
        return 0.0;
    };
    out.im_received = im_amount(margin.im_received, true);
    out.im_posted = im_amount(margin.im_posted, false);
    return out;
}

}  // namespace xva
