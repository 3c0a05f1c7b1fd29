#ifndef XVA_EXPOSURE_HPP
#define XVA_EXPOSURE_HPP

#include <vector>

#include "xva/credit.hpp"
#include "xva/portfolio.hpp"
#include "xva/pricing.hpp"
#include "xva/scenario.hpp"
#include "xva/stats.hpp"
#include "xva/term_structure.hpp"

namespace xva {

struct ExposureOptions {
    double gap_shock = 0.0;   // additive shock on the gap exposure Q (wrong-way hook)
    double im_horizon = 10.0 / 250.0;
    int quadrature_panels = 40;
    // FTDDVA margin convention: true follows the displayed formula (bank-posted
    // IM inside the negative part); false uses the received IM instead.
    bool ftddva_posted_im = true;
};

// Bound state evaluator: portfolio, model, credit and per-set valuation tables.
class ExposureModel {
public:
    ExposureModel(const Portfolio& portfolio, const ModelParams& model, const CreditSetup& credit,
                  const TimeGrid& grid, const ExposureOptions& options = {});

    const TimeGrid& grid() const { return grid_; }
    const Portfolio& portfolio() const { return portfolio_; }
    const CreditSetup& credit() const { return credit_; }
    const ModelParams& model() const { return model_; }
    const ExposureOptions& options() const { return options_; }

    std::size_t set_count() const { return valuers_.size(); }
    std::size_t set_entity(std::size_t i) const { return set_entity_[i]; }
    double set_recovery(std::size_t i) const { return set_recovery_[i]; }
    const SetValuer& valuer(std::size_t i) const { return valuers_[i]; }

    double mtm(std::size_t i, std::size_t k, double r) const { return tables_[i].eval(k, r); }
    double mtm_exact(std::size_t i, double t, double r) const { return valuers_[i].mtm(t, r); }
    MarginState margins(std::size_t i, std::size_t k, double r, double mtm_value) const {
        return margin_balances(valuers_[i], portfolio_.sets[i].margin, grid_[k], r, mtm_value,
                               model_, options_.im_horizon);
    }

private:
    Portfolio portfolio_;
    ModelParams model_;
    CreditSetup credit_;
    TimeGrid grid_;
    ExposureOptions options_;
    std::vector<SetValuer> valuers_;
    std::vector<MtmTable> tables_;
    std::vector<std::size_t> set_entity_;
    std::vector<double> set_recovery_;
};

enum class EventTiming { BeforeBank, AtBankDefault, AfterBank };

struct LossEvent {
    std::size_t t_index;
    std::size_t set_index;
    std::size_t entity;
    double loss;             // (1-R_i)(Q - IM_received)^+
    double dva_posted_im;    // (1-R_i)(Q - IM_posted)^-
    double dva_received_im;  // (1-R_i)(Q - IM_received)^-
    EventTiming timing;
};

struct ExposureCube {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::size_t n_sets = 0;
    // Flattened [path][time][set]; P = MtM - VM pointwise, Q = P + gap_shock.
    std::vector<double> P, Q, VM, IM_received, IM_posted;
    std::vector<std::vector<LossEvent>> events;      // per path, ordered by time
    std::vector<std::ptrdiff_t> bank_default_index;  // grid index, -1 if none
    std::vector<double> ucva_at_bank_default;        // conditional value at own default
    std::vector<std::size_t> set_entity;             // netting set -> counterparty entity

    std::size_t at(std::size_t p, std::size_t k, std::size_t i) const {
        return (p * grid.size() + k) * n_sets + i;
    }
};

ExposureCube build_cube(const ExposureModel& model, const ScenarioSet& s);

namespace reference {
// Serial baseline of the cube kernel (see scenario.hpp).
ExposureCube build_cube(const ExposureModel& model, const ScenarioSet& s);
}

// Survival-weighted conditional UCVA at a grid state, by bond-forward-measure
// quadrature over the rate. Used for the own-default transfer and as a test
// oracle. When the bank's latent clock normal is supplied, the default-time
// weights condition on it through the Gaussian copula, so correlated survivor
// clocks are priced consistently with the simulation.
class ConditionalUcva {
public:
    explicit ConditionalUcva(const ExposureModel& model);
    // alive[e] = counterparty entity e has not defaulted by t_index.
    double value(std::size_t t_index, double r, const std::vector<char>& alive) const;
    double value_given_bank_clock(std::size_t t_index, double r, const std::vector<char>& alive,
                                  double bank_z) const;

private:
    double value_impl(std::size_t t_index, double r, const std::vector<char>& alive,
                      const double* bank_z) const;

    const ExposureModel* model_;
    NormalExpectation rule_;
    std::vector<double> bank_rho_;       // corr(entity clock, bank clock)
    std::vector<double> default_bound_;  // [entity][time]: z threshold for default by t
};

// Per-parent conditional UCVA estimates from a secondary set spawned at t_index.
std::vector<double> ucva_conditional(const ExposureModel& model, const ExposureCube& cube,
                                     const ScenarioSet& secondary, std::size_t t_index);

// Cross-path UCVA at time 0 with batch-means standard error.
EstimateWithSe ucva_time0(const ExposureModel& model, const ExposureCube& cube,
                          const ScenarioSet& s, std::size_t batches = 20);

struct FtdValues {
    EstimateWithSe ftdcva;
    EstimateWithSe ftddva;
};
FtdValues ftd_cva_dva(const ExposureModel& model, const ExposureCube& cube, const ScenarioSet& s,
                      std::size_t batches = 20);

// lambda_bar_t * sum_i J^i * IM_posted^i per (path, time).
std::vector<double> mva_integrand(const ExposureModel& model, const ExposureCube& cube,
                                  const ScenarioSet& s);

// Blended IM funding spread per path at one grid index (0/0 treated as 0).
std::vector<double> blended_spread(const ExposureModel& model, const ExposureCube& cube,
                                   const ScenarioSet& s, std::size_t t_index);

// Effective IM funding spread of one path state; equals the unsecured spread
// under the unsecured scheme and the specialist-lender ratio under blending.
double im_funding_spread(const ExposureModel& model, const ExposureCube& cube,
                         const ScenarioSet& s, std::size_t p, std::size_t k);

// Deterministic projection curves from realized cube quantities.
TermStructure ucva_projection_curve(const ExposureCube& cube, const ScenarioSet& s);
TermStructure mva_projection_curve(const ExposureModel& model, const ExposureCube& cube,
                                   const ScenarioSet& s);

// Sum over sets of surviving net spot exposures, flattened [path][time].
std::vector<double> aggregate_alive_exposure(const ExposureCube& cube, const ScenarioSet& s);

}  // namespace xva

#endif
