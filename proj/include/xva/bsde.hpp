#ifndef XVA_BSDE_HPP
#define XVA_BSDE_HPP

#include <cstdint>
#include <vector>

#include "xva/exposure.hpp"
#include "xva/term_structure.hpp"

namespace xva {

struct KvaInputs {
    TermStructure ec_curve;    // capital C_t to remunerate
    TermStructure rate_curve;  // deterministic r_t
    double hurdle = 0.105;

    void validate() const;
};

struct BackwardSolution {
    TermStructure value_curve;
    int iterations = 0;
    double residual = 0.0;

    double at0() const { return value_curve.values.front(); }
};

// K_t = h int_t^T e^{-int_t^s (r+h)} C_s ds, solved as the implicit-trapezoid
// backward recursion of the linear BSDE (terminal value 0).
BackwardSolution kva_linear(const KvaInputs& inputs);

// KVA_t = int_t^T (h max(ES_s, KVA_s) - (r_s+h) KVA_s) ds by Picard iteration
// started from kva_linear(es); its fixed point satisfies the same trapezoid
// relation as the linear solver with C = max(ES, KVA).
BackwardSolution kva_bsde(const TermStructure& es_curve, const TermStructure& rate_curve,
                          double hurdle, double tol = 1e-8, int max_iter = 200);

// Per-path discounted state needed by the funding equations.
struct FundingPaths {
    TimeGrid grid;
    std::size_t n_paths = 0;
    std::vector<double> exposure;        // [path][time] sum_i J^i P^i
    std::vector<double> discount;        // [path][time]
    std::vector<std::uint8_t> bank_alive;  // [path][time]

    std::size_t at(std::size_t p, std::size_t k) const { return p * grid.size() + k; }
};

FundingPaths make_funding_paths(const ExposureModel& model, const ExposureCube& cube,
                                const ScenarioSet& s);

// Deterministic-term-structure FVA: the conditional expectations are projected
// in time, the positive part stays path-wise, and the implicit occurrence of
// FVA inside it is resolved by Picard iteration.
BackwardSolution fva_fixed_point(const FundingPaths& paths, const TermStructure& ec_curve,
                                 const TermStructure& ucva_curve, const TermStructure& mva_curve,
                                 const TermStructure& lambda_curve, double tol = 1e-8,
                                 int max_iter = 200);

// Path-wise backward solve kept for diagnostics (exact scalar step).
std::vector<double> fva_per_path(const FundingPaths& paths, const TermStructure& ec_curve,
                                 const TermStructure& ucva_curve, const TermStructure& mva_curve,
                                 const TermStructure& lambda_curve);

struct ReplicationResult {
    BackwardSolution trc;  // TRC* = UCVA + MVA + FVA*
    TermStructure ucva_curve;
    TermStructure mva_curve;
    TermStructure fva_star_curve;
};

// Counterparty-risk replication BSDE: the funding term carries no capital
// pocket (EC = 0) and the exogenous UCVA/MVA legs come from the cube.
ReplicationResult replication_bsde(const ExposureModel& model, const ExposureCube& cube,
                                   const ScenarioSet& s, double tol = 1e-8, int max_iter = 200);

// Unsecured funding spread sampled on the grid.
TermStructure lambda_curve_on_grid(const CreditSetup& credit, const TimeGrid& grid);

}  // namespace xva

#endif
