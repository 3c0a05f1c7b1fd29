#ifndef XVA_ENGINE_HPP
#define XVA_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xva/bsde.hpp"
#include "xva/exposure.hpp"
#include "xva/risk_measure.hpp"

namespace xva {

struct EngineConfig {
    std::size_t primary_paths = 2000;
    std::size_t secondary_paths = 200;
    std::uint64_t seed = 1;
    double hurdle = 0.105;
    double alpha = 0.025;
    double picard_tol = 1e-8;
    int max_iter = 200;
    std::size_t batches = 20;
    std::size_t es_min_survivors = 200;
    // Capital anchors sit on every grid point by default; a positive stride
    // pins them to fixed calendar times instead (useful when comparing runs
    // across grid resolutions, since anchors then share their random streams).
    double es_anchor_stride_years = 0.0;
    int loop_passes = 1;          // passes through the one-pass scheme (1 = as prescribed)
    bool retain_es_samples = false;
    int threads = 0;              // 0 = runtime default
    double accrued_loss_y = 0.0;

    void validate() const;
};

struct IncrementalBlock {
    double delta_ucva = 0.0;
    double delta_mva = 0.0;
    double delta_fva = 0.0;
    double delta_kva = 0.0;
    double delta_ftdcva = 0.0;
    double delta_ftddva = 0.0;
    double delta_trc = 0.0;
    double ftp = 0.0;  // delta TRC + delta KVA
};

struct XVAReport {
    EstimateWithSe ucva0, ftdcva0, ftddva0, mva0, fva_star0, fva0;
    double kva0 = 0.0;  // deterministic time-integral, no sampling error reported
    double trc0 = 0.0;  // ucva0 + mva0 + fva0, exact by construction
    std::optional<IncrementalBlock> incremental;

    TermStructure es_star, kva_curve, ec_curve, blended_lambda;
    EstimateWithSe loss_mean_tbar;  // martingale diagnostic for L at tau ^ T

    std::vector<std::string> warnings;

    std::uint64_t seed = 0;
    std::size_t primary_paths = 0;
    std::size_t secondary_paths = 0;
    int threads = 0;
    std::vector<std::pair<std::string, double>> timings_ms;
};

// Loss-and-profit process L = TRC - RC along the primary paths, with the RC
// account frozen once the bank defaults (after absorbing the UCVA transfer).
struct LossProcessPaths {
    TimeGrid grid;
    std::size_t n_paths = 0;
    double y = 0.0;
    std::vector<double> rc;    // [path][time]
    std::vector<double> loss;  // [path][time]
    std::vector<double> loss_at_tbar;
    std::vector<std::size_t> tbar_index;
    std::vector<std::size_t> anchor_indices;
    std::vector<AnchorSamples> increments;  // retained only on request
};

struct LossRealizationSchedule {
    std::vector<std::size_t> reset_indices;  // strictly increasing grid indices >= 1
    void validate(std::size_t grid_size) const;
};

struct ResetResult {
    std::vector<double> path;       // TRC-reset reserve capital
    std::vector<double> pre_reset;  // value carried into each reset time
};

ResetResult apply_reset_schedule(const std::vector<double>& unreset_rc,
                                 const std::vector<double>& trc,
                                 const LossRealizationSchedule& schedule);

// Second line of the reset identity: reconstructs the unreset path.
std::vector<double> undo_reset_schedule(const ResetResult& reset,
                                        const std::vector<double>& trc,
                                        const LossRealizationSchedule& schedule);

class XvaEngine {
public:
    XvaEngine(Portfolio portfolio, ModelParams params, CreditSetup credit, TimeGrid grid,
              EngineConfig config, ExposureOptions exposure_options = {});

    XVAReport run_full();

    // Forward SDE for the reserve capital account against a deterministic TRC
    // curve; the capital funding pocket enters through ec_curve (zero on the
    // first pass of the scheme).
    LossProcessPaths forward_rc_paths(const BackwardSolution& trc_star, const ExposureCube& cube,
                                      const ScenarioSet& s, const TermStructure& ec_curve) const;

    // One-year-ahead loss increments pooled over (primary x secondary) at one anchor.
    AnchorSamples anchor_increments(std::size_t anchor_index, const LossProcessPaths& loss_paths,
                                    const BackwardSolution& trc_star, const ExposureCube& cube,
                                    const ScenarioSet& s, const TermStructure& ec_curve) const;

    std::vector<std::size_t> capital_anchor_indices() const;

    // Model-implied instantaneous forward curve, the deterministic discounting
    // rate used by the KVA integral.
    TermStructure forward_rate_curve() const;

    const ExposureModel& exposure_model() const { return model_; }
    const TimeGrid& grid() const { return grid_; }
    const EngineConfig& config() const { return config_; }

private:
    struct Time0Metrics {
        EstimateWithSe ucva, ftdcva, ftddva;
    };
    Time0Metrics time0_metrics(const ScenarioSet& s) const;
    TermStructure blended_lambda_curve(const ExposureCube& cube, const ScenarioSet& s) const;

    Portfolio portfolio_;
    ModelParams params_;
    CreditSetup credit_;
    TimeGrid grid_;
    EngineConfig config_;
    ExposureOptions exposure_options_;
    ExposureModel model_;
    TermStructure lambda_curve_;
};

XVAReport run_full(const Portfolio& portfolio, const ModelParams& params,
                   const CreditSetup& credit, const TimeGrid& grid, const EngineConfig& config,
                   const ExposureOptions& exposure_options = {});

// Runs the book with and without the added trades under common random numbers
// and reports the funds transfer price FTP = delta TRC + delta KVA.
XVAReport incremental_xva(const Portfolio& base, const Portfolio& addition,
                          const ModelParams& params, const CreditSetup& credit,
                          const TimeGrid& grid, const EngineConfig& config,
                          const ExposureOptions& exposure_options = {});

}  // namespace xva

#endif
