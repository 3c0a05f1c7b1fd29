#ifndef XVA_SCENARIO_HPP
#define XVA_SCENARIO_HPP

#include <cstdint>
#include <vector>

#include "xva/credit.hpp"
#include "xva/grid.hpp"
#include "xva/rng.hpp"
#include "xva/vasicek.hpp"

namespace xva {

// Short-rate paths evolve on a fixed micro lattice of 16 steps per year and are
// sampled at the grid points. Noise is keyed by the absolute micro index, so a
// refined grid reuses the same Brownian path and default clocks are keyed by
// (path, entity) alone. Runs with different grid steps therefore share random
// numbers, which makes grid-convergence differences nearly noise-free.
inline constexpr int kMicroPerYear = 16;

struct ScenarioSet {
    TimeGrid grid;
    std::size_t primary_count = 0;
    std::size_t secondary_count = 1;  // sub-paths per primary (1 for a primary set)
    std::size_t entity_count = 0;     // counterparties + bank (bank last)
    std::uint64_t seed = 0;

    bool is_secondary = false;
    std::size_t anchor_index = 0;  // branch point for secondary sets

    // Flattened [path][time] and [path][entity]; path = parent*secondary_count + sub.
    std::vector<double> short_rate;
    std::vector<double> discount;
    std::vector<double> default_time;  // snapped grid time, +inf if no default <= horizon
    // Correlated standard normals behind the default clocks; conditioning on
    // them lets the own-default wealth transfer respect the copula.
    std::vector<double> clock_z;

    std::size_t path_count() const { return primary_count * secondary_count; }
    std::size_t idx(std::size_t p, std::size_t k) const { return p * grid.size() + k; }
    double rate(std::size_t p, std::size_t k) const { return short_rate[idx(p, k)]; }
    double df(std::size_t p, std::size_t k) const { return discount[idx(p, k)]; }
    double entity_default(std::size_t p, std::size_t e) const {
        return default_time[p * entity_count + e];
    }
    std::size_t bank_entity() const { return entity_count - 1; }
};

ScenarioSet generate_primary(const ModelParams& params, const TimeGrid& grid, std::size_t n,
                             const CreditSetup& credit, std::uint64_t seed);

ScenarioSet spawn_secondary(const ScenarioSet& base, std::size_t t_index, std::size_t m,
                            const ModelParams& params, const CreditSetup& credit,
                            std::uint64_t seed);

// Plain-loop counterparts of the OpenMP kernels, kept as the correctness
// baseline: outputs must be byte-identical to the parallel versions.
namespace reference {
ScenarioSet generate_primary(const ModelParams& params, const TimeGrid& grid, std::size_t n,
                             const CreditSetup& credit, std::uint64_t seed);
}

double discount_between(const ScenarioSet& s, std::size_t path, std::size_t i, std::size_t j);

// Lower-triangular Cholesky factor; ConfigError when the matrix is not PSD.
std::vector<double> cholesky_lower(const std::vector<std::vector<double>>& corr);

// Shared per-path generation core. Both the materialised ScenarioSet builders
// and the engine's streamed nested layers draw through this, so a streamed
// sub-path is bit-identical to the corresponding spawned one.
class PathSampler {
public:
    PathSampler(const ModelParams& params, const CreditSetup& credit, const TimeGrid& grid,
                std::uint64_t seed, double drift_shift, std::uint32_t rate_stream,
                std::uint32_t clock_stream);

    // Rates and log-discounts at grid points start_index..end_index inclusive,
    // written to out[0..end-start]; logdf_out[0] = 0 at the start point.
    void evolve(std::uint64_t path_key, std::size_t start_index, std::size_t end_index,
                double r_start, double* r_out, double* logdf_out) const;

    // Unconditional clocks (t_cond = 0) or survivor clocks conditioned on no
    // default by t_cond; tau_out[e] is a snapped grid time or +inf. z_out,
    // when given, receives the correlated clock normals.
    void draw_defaults(std::uint64_t path_key, double t_cond, const double* alive_mask,
                       double* tau_out, double* z_out = nullptr) const;

    std::size_t entity_count() const { return n_entities_; }

private:
    const ModelParams& params_;
    const CreditSetup& credit_;
    const TimeGrid& grid_;
    CounterRng rng_;
    double drift_shift_;
    std::uint32_t rate_stream_;
    std::uint32_t clock_stream_;
    std::size_t n_entities_;
    std::vector<double> chol_;  // row-major lower factor, empty = identity
    std::vector<long> micro_base_;
    std::vector<int> micro_steps_;
    std::vector<OuStep> micro_tr_;
};

}  // namespace xva

#endif
