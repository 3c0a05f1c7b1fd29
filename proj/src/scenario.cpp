#include "xva/scenario.hpp"

#include <cmath>

#include "xva/parallel.hpp"

namespace xva {

std::vector<double> cholesky_lower(const std::vector<std::vector<double>>& corr) {
    const std::size_t n = corr.size();
    std::vector<double> L(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = corr[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
            if (i == j) {
                if (s < 1e-12)
                    throw ConfigError("correlation matrix is not positive definite");
                L[i * n + i] = std::sqrt(s);
            } else {
                L[i * n + j] = s / L[j * n + j];
            }
        }
    }
    return L;
}

PathSampler::PathSampler(const ModelParams& params, const CreditSetup& credit,
                         const TimeGrid& grid, std::uint64_t seed, double drift_shift,
                         std::uint32_t rate_stream, std::uint32_t clock_stream)
    : params_(params),
      credit_(credit),
      grid_(grid),
      rng_(seed),
      drift_shift_(drift_shift),
      rate_stream_(rate_stream),
      clock_stream_(clock_stream),
      n_entities_(credit.entity_count()) {
    params.validate();
    if (!params.correlation.empty()) {
        if (params.correlation.size() != n_entities_)
            throw ConfigError("correlation matrix size must equal entity count (counterparties + bank)");
        chol_ = cholesky_lower(params.correlation);
    }
    // Each grid interval must be an integer number of micro steps.
    micro_base_.resize(grid.size());
    micro_steps_.assign(grid.steps(), 0);
    micro_tr_.clear();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double scaled = grid[k] * kMicroPerYear;
        micro_base_[k] = std::lround(scaled);
        if (std::fabs(scaled - static_cast<double>(micro_base_[k])) > 1e-6)
            throw ConfigError("grid times must be multiples of 1/" + std::to_string(kMicroPerYear) +
                              " year");
    }
    micro_tr_.reserve(grid.steps());
    for (std::size_t k = 0; k < grid.steps(); ++k) {
        micro_steps_[k] = static_cast<int>(micro_base_[k + 1] - micro_base_[k]);
        const double micro_dt = grid.dt(k) / micro_steps_[k];
        micro_tr_.push_back(ou_transition(params, micro_dt, drift_shift_));
    }
}

void PathSampler::evolve(std::uint64_t path_key, std::size_t start_index, std::size_t end_index,
                         double r_start, double* r_out, double* logdf_out) const {
    double r = r_start;
    double logdf = 0.0;
    r_out[0] = r;
    logdf_out[0] = 0.0;
    for (std::size_t k = start_index; k < end_index; ++k) {
        const OuStep& tr = micro_tr_[k];
        const double micro_dt = grid_.dt(k) / micro_steps_[k];
        for (int j = 0; j < micro_steps_[k]; ++j) {
            const std::uint64_t micro_idx = static_cast<std::uint64_t>(micro_base_[k] + j);
            const double z = rng_.normal(rate_stream_, path_key, micro_idx);
            const double r_next = tr.offset + tr.decay * r + tr.stdev * z;
            logdf -= 0.5 * micro_dt * (r + r_next);
            r = r_next;
        }
        r_out[k + 1 - start_index] = r;
        logdf_out[k + 1 - start_index] = logdf;
    }
}

void PathSampler::draw_defaults(std::uint64_t path_key, double t_cond, const double* alive_mask,
                                double* tau_out, double* z_out) const {
    const std::size_t n = n_entities_;
    std::vector<double> z(n);
    for (std::size_t e = 0; e < n; ++e)
        z[e] = rng_.normal(clock_stream_, path_key, static_cast<std::uint64_t>(e));
    for (std::size_t e = 0; e < n; ++e) {
        if (alive_mask && alive_mask[e] == 0.0) continue;  // caller keeps the parent's time
        double zc = z[e];
        if (!chol_.empty()) {
            zc = 0.0;
            for (std::size_t j = 0; j <= e; ++j) zc += chol_[e * n + j] * z[j];
        }
        const double u = normal_cdf(zc);
        const double clock = credit_.entity_curve(e).cumulative_hazard(t_cond) - std::log(u);
        if (z_out) {
            // latent normal on the unconditional clock scale (equal to zc at t_cond = 0)
            const double u_total = std::exp(-clock);
            z_out[e] = (u_total > 1e-300) ? inverse_normal_cdf(u_total) : -38.0;
        }
        const double raw = credit_.entity_curve(e).inverse_cumulative_hazard(clock);
        if (!(raw <= grid_.horizon())) {
            tau_out[e] = kNever;
            continue;
        }
        const std::size_t snap = grid_.index_at_or_after(raw);
        tau_out[e] = (snap < grid_.size()) ? grid_[snap] : kNever;
    }
}

namespace {

ScenarioSet generate_primary_impl(const ModelParams& params, const TimeGrid& grid, std::size_t n,
                                  const CreditSetup& credit, std::uint64_t seed, bool parallel) {
    if (n < 1) throw ArgumentError("generate_primary: need at least one path");
    credit.validate();
    PathSampler sampler(params, credit, grid, seed, 0.0, rng_stream::kPrimaryRate,
                        rng_stream::kPrimaryClock);

    ScenarioSet s;
    s.grid = grid;
    s.primary_count = n;
    s.secondary_count = 1;
    s.entity_count = credit.entity_count();
    s.seed = seed;
    const std::size_t T = grid.size();
    s.short_rate.resize(n * T);
    s.discount.resize(n * T);
    s.default_time.resize(n * s.entity_count);
    s.clock_z.resize(n * s.entity_count);

    const auto body = [&](std::size_t p) {
        std::vector<double> logdf(T);
        sampler.evolve(p, 0, T - 1, params.r0, &s.short_rate[p * T], logdf.data());
        for (std::size_t k = 0; k < T; ++k) s.discount[p * T + k] = std::exp(logdf[k]);
        sampler.draw_defaults(p, 0.0, nullptr, &s.default_time[p * s.entity_count],
                              &s.clock_z[p * s.entity_count]);
    };
    if (parallel)
        parallel_for(static_cast<std::ptrdiff_t>(n), body);
    else
        serial_for(static_cast<std::ptrdiff_t>(n), body);
    return s;
}

}  // namespace

ScenarioSet generate_primary(const ModelParams& params, const TimeGrid& grid, std::size_t n,
                             const CreditSetup& credit, std::uint64_t seed) {
    return generate_primary_impl(params, grid, n, credit, seed, true);
}

namespace reference {
ScenarioSet generate_primary(const ModelParams& params, const TimeGrid& grid, std::size_t n,
                             const CreditSetup& credit, std::uint64_t seed) {
    return generate_primary_impl(params, grid, n, credit, seed, false);
}
}  // namespace reference

ScenarioSet spawn_secondary(const ScenarioSet& base, std::size_t t_index, std::size_t m,
                            const ModelParams& params, const CreditSetup& credit,
                            std::uint64_t seed) {
    if (base.is_secondary) throw ArgumentError("spawn_secondary: base must be a primary set");
    if (t_index + 1 >= base.grid.size())
        throw ArgumentError("spawn_secondary: no window beyond the final grid point");
    if (m < 1) throw ArgumentError("spawn_secondary: need at least one sub-path");

    PathSampler sampler(params, credit, base.grid, seed, params.hist_drift_shift,
                        rng_stream::kSecondaryRate, rng_stream::kSecondaryClock);

    ScenarioSet s;
    s.grid = base.grid;
    s.primary_count = base.primary_count;
    s.secondary_count = m;
    s.entity_count = base.entity_count;
    s.seed = seed;
    s.is_secondary = true;
    s.anchor_index = t_index;
    const std::size_t T = base.grid.size();
    const double t_anchor = base.grid[t_index];
    s.short_rate.resize(s.path_count() * T);
    s.discount.resize(s.path_count() * T);
    s.default_time.resize(s.path_count() * s.entity_count);
    s.clock_z.resize(s.path_count() * s.entity_count);

    parallel_for(static_cast<std::ptrdiff_t>(base.primary_count), [&](std::size_t p) {
        std::vector<double> r_tail(T - t_index), logdf_tail(T - t_index);
        std::vector<double> alive(s.entity_count);
        for (std::size_t e = 0; e < s.entity_count; ++e)
            alive[e] = (base.entity_default(p, e) > t_anchor) ? 1.0 : 0.0;
        for (std::size_t q = 0; q < m; ++q) {
            const std::size_t path = p * m + q;
            const std::uint64_t key = path;
            sampler.evolve(key, t_index, T - 1, base.rate(p, t_index), r_tail.data(),
                           logdf_tail.data());
            double* rates = &s.short_rate[path * T];
            double* dfs = &s.discount[path * T];
            for (std::size_t k = 0; k <= t_index; ++k) {
                rates[k] = base.rate(p, k);
                dfs[k] = base.df(p, k);
            }
            const double df_anchor = base.df(p, t_index);
            for (std::size_t k = t_index + 1; k < T; ++k) {
                rates[k] = r_tail[k - t_index];
                dfs[k] = df_anchor * std::exp(logdf_tail[k - t_index]);
            }
            double* tau = &s.default_time[path * s.entity_count];
            double* zeff = &s.clock_z[path * s.entity_count];
            for (std::size_t e = 0; e < s.entity_count; ++e) {
                tau[e] = base.entity_default(p, e);
                zeff[e] = base.clock_z.empty() ? 0.0 : base.clock_z[p * s.entity_count + e];
            }
            sampler.draw_defaults(key, t_anchor, alive.data(), tau, zeff);
        }
    });
    return s;
}

double discount_between(const ScenarioSet& s, std::size_t path, std::size_t i, std::size_t j) {
    if (i > j) throw ArgumentError("discount_between: need i <= j");
    if (i == j) return 1.0;
    return s.df(path, j) / s.df(path, i);
}

}  // namespace xva
