#include "xva/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <type_traits>

#include "xva/parallel.hpp"

namespace xva {

namespace {

inline double positive(double x) { return x > 0.0 ? x : 0.0; }
inline double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

constexpr std::uint64_t kSaltTime0Pricing = 0x5052494345303030ull;

class StageTimer {
public:
    explicit StageTimer(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}
    // Times a pipeline stage and stamps the stage name onto solver and
    // estimation failures so callers see where a run died.
    template <typename F>
    auto run(const std::string& name, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                record(name, t0);
            } else {
                auto out = f();
                record(name, t0);
                return out;
            }
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("stage " + name + ": " + e.what(), e.residual);
        } catch (const EstimationError& e) {
            throw EstimationError("stage " + name + ": " + e.what());
        }
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
        const auto dt = std::chrono::steady_clock::now() - t0;
        sink_.emplace_back(name,
                           std::chrono::duration_cast<std::chrono::microseconds>(dt).count() / 1e3);
    }
    std::vector<std::pair<std::string, double>>& sink_;
};

}  // namespace

void EngineConfig::validate() const {
    if (primary_paths < 1) throw ConfigError("EngineConfig: primary_paths must be >= 1");
    if (secondary_paths < 1) throw ConfigError("EngineConfig: secondary_paths must be >= 1");
    if (!(hurdle >= 0.0)) throw ConfigError("EngineConfig: hurdle must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("EngineConfig: alpha must lie in (0,1)");
    if (!(picard_tol > 0.0)) throw ConfigError("EngineConfig: picard_tol must be positive");
    if (max_iter < 1) throw ConfigError("EngineConfig: max_iter must be >= 1");
    if (loop_passes < 1) throw ConfigError("EngineConfig: loop_passes must be >= 1");
}

void LossRealizationSchedule::validate(std::size_t grid_size) const {
    std::size_t prev = 0;
    for (std::size_t idx : reset_indices) {
        if (idx < 1 || idx >= grid_size)
            throw ArgumentError("LossRealizationSchedule: reset index outside grid");
        if (idx <= prev)
            throw ArgumentError("LossRealizationSchedule: reset indices must be strictly increasing");
        prev = idx;
    }
}

ResetResult apply_reset_schedule(const std::vector<double>& unreset_rc,
                                 const std::vector<double>& trc,
                                 const LossRealizationSchedule& schedule) {
    if (unreset_rc.size() != trc.size())
        throw ArgumentError("apply_reset_schedule: paths must share the grid");
    schedule.validate(unreset_rc.size());
    ResetResult out;
    out.path.resize(unreset_rc.size());
    out.pre_reset.reserve(schedule.reset_indices.size());
    double correction = 0.0;
    std::size_t next = 0;
    std::size_t prev_reset = 0;  // t_0 = 0
    for (std::size_t k = 0; k < unreset_rc.size(); ++k) {
        if (next < schedule.reset_indices.size() && schedule.reset_indices[next] == k) {
            out.pre_reset.push_back(unreset_rc[k] + correction);
            // realized gain/loss since the previous reset is swept out
            correction += trc[k] - trc[prev_reset] - (unreset_rc[k] - unreset_rc[prev_reset]);
            prev_reset = k;
            ++next;
        }
        out.path[k] = unreset_rc[k] + correction;
    }
    return out;
}

std::vector<double> undo_reset_schedule(const ResetResult& reset, const std::vector<double>& trc,
                                        const LossRealizationSchedule& schedule) {
    schedule.validate(reset.path.size());
    if (reset.pre_reset.size() != schedule.reset_indices.size())
        throw ArgumentError("undo_reset_schedule: pre-reset values missing");
    std::vector<double> out(reset.path.size());
    double correction = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < reset.path.size(); ++k) {
        if (next < schedule.reset_indices.size() && schedule.reset_indices[next] == k) {
            correction += trc[k] - reset.pre_reset[next];
            ++next;
        }
        out[k] = reset.path[k] - correction;
    }
    return out;
}

XvaEngine::XvaEngine(Portfolio portfolio, ModelParams params, CreditSetup credit, TimeGrid grid,
                     EngineConfig config, ExposureOptions exposure_options)
    : portfolio_(std::move(portfolio)),
      params_(std::move(params)),
      credit_(std::move(credit)),
      grid_(std::move(grid)),
      config_(std::move(config)),
      exposure_options_(exposure_options),
      model_(portfolio_, params_, credit_, grid_, exposure_options_),
      lambda_curve_(lambda_curve_on_grid(credit_, grid_)) {
    config_.validate();
}

TermStructure XvaEngine::forward_rate_curve() const {
    const double a = params_.mean_reversion;
    const double sigma = params_.rate_vol;
    std::vector<double> f(grid_.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        const double t = grid_[k];
        double B;
        if (a > 1e-8) {
            const double decay = std::exp(-a * t);
            B = t * expm1_ratio(a * t);
            f[k] = params_.long_term_rate + (params_.r0 - params_.long_term_rate) * decay -
                   0.5 * sigma * sigma * B * B;
        } else {
            f[k] = params_.r0 - 0.5 * sigma * sigma * t * t;
        }
    }
    return TermStructure(grid_, std::move(f));
}

std::vector<std::size_t> XvaEngine::capital_anchor_indices() const {
    std::vector<std::size_t> anchors;
    const double stride = config_.es_anchor_stride_years;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (!(grid_[k] + 1.0 <= grid_.horizon() + 1e-9)) break;
        if (stride > 0.0) {
            const double ratio = grid_[k] / stride;
            if (std::fabs(ratio - std::lround(ratio)) > 1e-9) continue;
        }
        anchors.push_back(k);
    }
    return anchors;
}

LossProcessPaths XvaEngine::forward_rc_paths(const BackwardSolution& trc_star,
                                             const ExposureCube& cube, const ScenarioSet& s,
                                             const TermStructure& ec_curve) const {
    if (!(trc_star.value_curve.grid == grid_) || !(ec_curve.grid == grid_))
        throw ArgumentError("forward_rc_paths: curve grid mismatch");
    const std::size_t K = grid_.size();
    const std::size_t N = cube.n_paths;
    const TermStructure& trc = trc_star.value_curve;
    const auto exposure = aggregate_alive_exposure(cube, s);
    const auto im_flows = mva_integrand(model_, cube, s);

    LossProcessPaths out;
    out.grid = grid_;
    out.n_paths = N;
    out.y = config_.accrued_loss_y;
    out.rc.assign(N * K, 0.0);
    out.loss.assign(N * K, 0.0);
    out.loss_at_tbar.assign(N, 0.0);
    out.tbar_index.assign(N, K - 1);
    out.anchor_indices = capital_anchor_indices();

    parallel_for(static_cast<std::ptrdiff_t>(N), [&](std::size_t p) {
        double rc = trc[0] - out.y;
        const std::ptrdiff_t bank_idx = cube.bank_default_index[p];
        std::size_t ev = 0;
        const auto& events = cube.events[p];
        for (std::size_t k = 0; k < K; ++k) {
            while (ev < events.size() && events[ev].t_index == k) {
                if (events[ev].timing != EventTiming::AfterBank) rc -= events[ev].loss;
                ++ev;
            }
            if (bank_idx >= 0 && static_cast<std::size_t>(bank_idx) == k) {
                rc -= cube.ucva_at_bank_default[p];
                out.tbar_index[p] = k;
                out.loss_at_tbar[p] = 0.0 - rc;  // terminal TRC is zero after the transfer
                for (std::size_t j = k; j < K; ++j) {
                    out.rc[p * K + j] = rc;
                    out.loss[p * K + j] = out.loss_at_tbar[p];
                }
                return;
            }
            out.rc[p * K + k] = rc;
            out.loss[p * K + k] = trc[k] - rc;
            if (k + 1 == K) {
                out.tbar_index[p] = k;
                out.loss_at_tbar[p] = trc[k] - rc;
                return;
            }
            const double dt = grid_.dt(k);
            const double accrual = s.rate(p, k) * trc[k];
            const double need = exposure[p * K + k] - ec_curve[k] - trc[k];
            const double funding = lambda_curve_[k] * positive(need);
            rc += dt * (accrual - funding - im_flows[p * K + k]);
        }
    });
    return out;
}

AnchorSamples XvaEngine::anchor_increments(std::size_t anchor_index,
                                           const LossProcessPaths& loss_paths,
                                           const BackwardSolution& trc_star,
                                           const ExposureCube& cube, const ScenarioSet& s,
                                           const TermStructure& ec_curve) const {
    const std::size_t K = grid_.size();
    const std::size_t a = anchor_index;
    const double t_anchor = grid_[a];
    const std::size_t w = grid_.index_at_or_after(t_anchor + 1.0);
    if (w >= K) throw ArgumentError("anchor_increments: window beyond horizon");
    const TermStructure& trc = trc_star.value_curve;
    const std::size_t m = config_.secondary_paths;
    const std::size_t N = s.primary_count;
    const std::size_t bank = s.bank_entity();
    const std::size_t n_sets = model_.set_count();

    const std::uint64_t anchor_micro =
        static_cast<std::uint64_t>(std::llround(t_anchor * kMicroPerYear));
    const PathSampler sampler(params_, credit_, grid_, mix_seed(s.seed, anchor_micro),
                              params_.hist_drift_shift, rng_stream::kSecondaryRate,
                              rng_stream::kSecondaryClock);

    AnchorSamples out;
    out.anchor_index = a;
    out.increments.assign(N * m, 0.0f);
    out.survived.assign(N * m, 0);

    parallel_for(static_cast<std::ptrdiff_t>(N), [&](std::size_t p) {
        const double tau_bank_primary = s.entity_default(p, bank);
        if (!(tau_bank_primary > t_anchor)) return;  // portfolio already stopped
        std::vector<double> alive(s.entity_count, 0.0);
        for (std::size_t e = 0; e < s.entity_count; ++e)
            alive[e] = (s.entity_default(p, e) > t_anchor) ? 1.0 : 0.0;
        std::vector<double> r_sub(w - a + 1), logdf(w - a + 1);
        std::vector<double> tau(s.entity_count);
        const double rc_anchor = loss_paths.rc[p * K + a];
        const double l_anchor = loss_paths.loss[p * K + a];

        for (std::size_t q = 0; q < m; ++q) {
            const std::uint64_t key = p * m + q;
            for (std::size_t e = 0; e < s.entity_count; ++e)
                tau[e] = s.entity_default(p, e);
            sampler.draw_defaults(key, t_anchor, alive.data(), tau.data());
            const double tau_bank_sub = tau[bank];
            if (!(tau_bank_sub > grid_[w])) continue;  // (0, false) slot, excluded by survival
            sampler.evolve(key, a, w, s.rate(p, a), r_sub.data(), logdf.data());

            double rc = rc_anchor;
            for (std::size_t k = a; k <= w; ++k) {
                const double r = r_sub[k - a];
                if (k > a) {
                    for (std::size_t i = 0; i < n_sets; ++i) {
                        if (tau[cube.set_entity[i]] != grid_[k]) continue;
                        const double mtm = model_.mtm(i, k, r);
                        const MarginState ms = model_.margins(i, k, r, mtm);
                        const bool live = grid_[k] < model_.valuer(i).last_maturity();
                        const double q_gap =
                            live ? (mtm - ms.vm + exposure_options_.gap_shock) : 0.0;
                        rc -= (1.0 - model_.set_recovery(i)) * positive(q_gap - ms.im_received);
                    }
                }
                if (k == w) break;
                double agg = 0.0;
                double im_flow = 0.0;
                double blended_num = 0.0, blended_den = 0.0;
                for (std::size_t i = 0; i < n_sets; ++i) {
                    if (!(tau[cube.set_entity[i]] > grid_[k])) continue;
                    const double mtm = model_.mtm(i, k, r);
                    const MarginState ms = model_.margins(i, k, r, mtm);
                    agg += mtm - ms.vm;
                    if (ms.im_posted > 0.0) {
                        const bool live = grid_[k] < model_.valuer(i).last_maturity();
                        const double q_gap =
                            live ? (mtm - ms.vm + exposure_options_.gap_shock) : 0.0;
                        blended_num += std::min(negative_part(q_gap), ms.im_posted);
                        blended_den += ms.im_posted;
                    }
                }
                if (blended_den > 0.0) {
                    if (credit_.im_mode == ImFundingMode::Blended) {
                        im_flow = lambda_curve_[k] * blended_num;
                    } else {
                        const double lb = credit_.lambda_bar_override
                                              ? *credit_.lambda_bar_override
                                              : lambda_curve_[k];
                        im_flow = lb * blended_den;
                    }
                }
                const double need = agg - ec_curve[k] - trc[k];
                const double dt = grid_.dt(k);
                rc += dt * (r * trc[k] - lambda_curve_[k] * positive(need) - im_flow);
            }
            const double l_end = trc[w] - rc;
            out.increments[p * m + q] = static_cast<float>(l_end - l_anchor);
            out.survived[p * m + q] = 1;
        }
    });
    return out;
}

XvaEngine::Time0Metrics XvaEngine::time0_metrics(const ScenarioSet& s) const {
    const std::size_t K = grid_.size();
    const std::size_t m = config_.secondary_paths;
    const std::size_t N = s.primary_count;
    const std::size_t bank = s.bank_entity();
    const std::size_t n_sets = model_.set_count();
    // Pricing layer: risk-neutral dynamics regardless of the historical drift
    // shift, which only serves the capital layer.
    ModelParams pricing = params_;
    pricing.hist_drift_shift = 0.0;
    const PathSampler sampler(pricing, credit_, grid_, mix_seed(s.seed, kSaltTime0Pricing), 0.0,
                              rng_stream::kSecondaryRate, rng_stream::kSecondaryClock);

    std::vector<double> ucva(N, 0.0), ftdcva(N, 0.0), ftddva(N, 0.0);
    const bool posted = exposure_options_.ftddva_posted_im;

    parallel_for(static_cast<std::ptrdiff_t>(N), [&](std::size_t p) {
        std::vector<double> r_sub(K), logdf(K);
        std::vector<double> tau(s.entity_count);
        double acc_u = 0.0, acc_fc = 0.0, acc_fd = 0.0;
        for (std::size_t q = 0; q < m; ++q) {
            const std::uint64_t key = p * m + q;
            sampler.draw_defaults(key, 0.0, nullptr, tau.data());
            sampler.evolve(key, 0, K - 1, params_.r0, r_sub.data(), logdf.data());
            const double tau_bank_sub = tau[bank];
            for (std::size_t i = 0; i < n_sets; ++i) {
                const double tau_i = tau[model_.set_entity(i)];
                if (!(tau_i <= grid_.horizon())) continue;
                const std::size_t k = grid_.index_at_or_after(tau_i);
                const double r = r_sub[k];
                const double mtm = model_.mtm(i, k, r);
                const MarginState ms = model_.margins(i, k, r, mtm);
                const bool live = grid_[k] < model_.valuer(i).last_maturity();
                const double q_gap = live ? (mtm - ms.vm + exposure_options_.gap_shock) : 0.0;
                const double df = std::exp(logdf[k]);
                const double rec = model_.set_recovery(i);
                const double loss = (1.0 - rec) * positive(q_gap - ms.im_received);
                acc_u += loss * df;
                if (tau_i <= tau_bank_sub) {
                    acc_fc += loss * df;
                    const double im = posted ? ms.im_posted : ms.im_received;
                    acc_fd += (1.0 - rec) * negative_part(q_gap - im) * df;
                }
            }
        }
        ucva[p] = acc_u / static_cast<double>(m);
        ftdcva[p] = acc_fc / static_cast<double>(m);
        ftddva[p] = acc_fd / static_cast<double>(m);
    });

    Time0Metrics out;
    out.ucva = mean_with_batch_se(ucva, config_.batches);
    out.ftdcva = mean_with_batch_se(ftdcva, config_.batches);
    out.ftddva = mean_with_batch_se(ftddva, config_.batches);
    return out;
}

TermStructure XvaEngine::blended_lambda_curve(const ExposureCube& cube,
                                              const ScenarioSet& s) const {
    std::vector<double> v(grid_.size(), 0.0);
    if (credit_.im_mode == ImFundingMode::Unsecured) {
        for (std::size_t k = 0; k < grid_.size(); ++k)
            v[k] = credit_.lambda_bar_override ? *credit_.lambda_bar_override : lambda_curve_[k];
        return TermStructure(grid_, std::move(v));
    }
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        double num = 0.0, den = 0.0;
        for (std::size_t p = 0; p < cube.n_paths; ++p) {
            for (std::size_t i = 0; i < cube.n_sets; ++i) {
                if (!(s.entity_default(p, cube.set_entity[i]) > grid_[k])) continue;
                const std::size_t c = cube.at(p, k, i);
                num += std::min(negative_part(cube.Q[c]), cube.IM_posted[c]);
                den += cube.IM_posted[c];
            }
        }
        v[k] = (den > 0.0) ? lambda_curve_[k] * num / den : 0.0;
    }
    return TermStructure(grid_, std::move(v));
}

XVAReport XvaEngine::run_full() {
    set_thread_count(config_.threads);
    XVAReport report;
    report.seed = config_.seed;
    report.primary_paths = config_.primary_paths;
    report.secondary_paths = config_.secondary_paths;
    report.threads = thread_count();
    StageTimer timer(report.timings_ms);

    const ScenarioSet s = timer.run("simulate_primary", [&] {
        return generate_primary(params_, grid_, config_.primary_paths, credit_, config_.seed);
    });
    const ExposureCube cube = timer.run("build_cube", [&] { return build_cube(model_, s); });
    const ReplicationResult repl = timer.run("replication_bsde", [&] {
        return replication_bsde(model_, cube, s, config_.picard_tol, config_.max_iter);
    });
    const FundingPaths funding = make_funding_paths(model_, cube, s);
    const TermStructure rate_curve = forward_rate_curve();

    TermStructure ec_prev = TermStructure::zero(grid_);
    BackwardSolution trc_prev = repl.trc;
    LossProcessPaths loss_paths;
    EsCurveResult es;
    BackwardSolution kva;
    BackwardSolution fva;

    for (int pass = 1; pass <= config_.loop_passes; ++pass) {
        loss_paths = timer.run("forward_rc_pass" + std::to_string(pass), [&] {
            return forward_rc_paths(trc_prev, cube, s, ec_prev);
        });
        es = timer.run("es_term_structure_pass" + std::to_string(pass), [&] {
            const auto& anchors = loss_paths.anchor_indices;
            return es_term_structure(
                anchors.size(),
                [&](std::size_t j) {
                    AnchorSamples a =
                        anchor_increments(anchors[j], loss_paths, trc_prev, cube, s, ec_prev);
                    if (config_.retain_es_samples) loss_paths.increments.push_back(a);
                    return a;
                },
                grid_, config_.alpha, config_.es_min_survivors);
        });
        kva = timer.run("kva_pass" + std::to_string(pass), [&] {
            KvaInputs inputs{es.curve, rate_curve, config_.hurdle};
            BackwardSolution lin = kva_linear(inputs);
            bool below = true;
            for (std::size_t k = 0; k < grid_.size(); ++k) {
                if (lin.value_curve[k] > es.curve[k] + 1e-12 * (1.0 + std::fabs(es.curve[k]))) {
                    below = false;
                    break;
                }
            }
            if (below) return lin;
            report.warnings.push_back(
                "kva: linear solution exceeds the expected-shortfall curve, using the "
                "constrained BSDE");
            return kva_bsde(es.curve, rate_curve, config_.hurdle, config_.picard_tol,
                            config_.max_iter);
        });
        const TermStructure ec = pointwise_max(es.curve, kva.value_curve);
        fva = timer.run("fva_pass" + std::to_string(pass), [&] {
            return fva_fixed_point(funding, ec, repl.ucva_curve, repl.mva_curve, lambda_curve_,
                                   config_.picard_tol, config_.max_iter);
        });
        std::vector<double> trc_vals(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k)
            trc_vals[k] = repl.ucva_curve[k] + repl.mva_curve[k] + fva.value_curve[k];
        trc_prev.value_curve = TermStructure(grid_, std::move(trc_vals));
        ec_prev = ec;
    }
    for (const auto& w : es.warnings) report.warnings.push_back(w);

    const Time0Metrics t0 = timer.run("time0_pricing", [&] { return time0_metrics(s); });
    report.ucva0 = t0.ucva;
    report.ftdcva0 = t0.ftdcva;
    report.ftddva0 = t0.ftddva;

    // MVA at time 0 with a batch error from realized primary flows.
    {
        const auto flows = mva_integrand(model_, cube, s);
        const std::size_t K = grid_.size();
        const std::size_t bankent = s.bank_entity();
        std::vector<double> per_path(cube.n_paths, 0.0);
        for (std::size_t p = 0; p < cube.n_paths; ++p) {
            const double tau_bank = s.entity_default(p, bankent);
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < K; ++j)
                if (grid_[j] < tau_bank) acc += flows[p * K + j] * s.df(p, j) * grid_.dt(j);
            per_path[p] = acc;
        }
        report.mva0 = mean_with_batch_se(per_path, config_.batches);
    }

    // FVA standard errors by re-solving the fixed point on path batches.
    {
        auto batch_se = [&](const TermStructure& ec) {
            const std::size_t B = std::min<std::size_t>(config_.batches, funding.n_paths);
            std::vector<double> vals;
            vals.reserve(B);
            for (std::size_t b = 0; b < B; ++b) {
                const std::size_t lo = b * funding.n_paths / B;
                const std::size_t hi = (b + 1) * funding.n_paths / B;
                if (hi == lo) continue;
                FundingPaths sub;
                sub.grid = funding.grid;
                sub.n_paths = hi - lo;
                const std::size_t K = grid_.size();
                sub.exposure.assign(funding.exposure.begin() + lo * K,
                                    funding.exposure.begin() + hi * K);
                sub.discount.assign(funding.discount.begin() + lo * K,
                                    funding.discount.begin() + hi * K);
                sub.bank_alive.assign(funding.bank_alive.begin() + lo * K,
                                      funding.bank_alive.begin() + hi * K);
                vals.push_back(fva_fixed_point(sub, ec, repl.ucva_curve, repl.mva_curve,
                                               lambda_curve_, config_.picard_tol, config_.max_iter)
                                   .at0());
            }
            return mean_with_plain_se(vals).se;
        };
        report.fva_star0.value = repl.fva_star_curve.values.front();
        report.fva_star0.se = batch_se(TermStructure::zero(grid_));
        report.fva0.value = fva.at0();
        report.fva0.se = batch_se(ec_prev);
    }

    report.kva0 = kva.at0();
    report.trc0 = report.ucva0.value + report.mva0.value + report.fva0.value;
    report.es_star = es.curve;
    report.kva_curve = kva.value_curve;
    report.ec_curve = ec_prev;
    report.blended_lambda = blended_lambda_curve(cube, s);
    report.loss_mean_tbar = mean_with_batch_se(loss_paths.loss_at_tbar, config_.batches);
    return report;
}

XVAReport run_full(const Portfolio& portfolio, const ModelParams& params,
                   const CreditSetup& credit, const TimeGrid& grid, const EngineConfig& config,
                   const ExposureOptions& exposure_options) {
    XvaEngine engine(portfolio, params, credit, grid, config, exposure_options);
    return engine.run_full();
}

XVAReport incremental_xva(const Portfolio& base, const Portfolio& addition,
                          const ModelParams& params, const CreditSetup& credit,
                          const TimeGrid& grid, const EngineConfig& config,
                          const ExposureOptions& exposure_options) {
    for (const auto& add_set : addition.sets)
        for (const auto& t : add_set.trades)
            for (const auto& s : base.sets)
                for (const auto& bt : s.trades)
                    if (bt.id == t.id)
                        throw ArgumentError("incremental_xva: trade '" + t.id +
                                            "' is already in the base portfolio");
    const Portfolio full = with_trades_added(base, addition);
    XVAReport base_report = run_full(base, params, credit, grid, config, exposure_options);
    XVAReport full_report = run_full(full, params, credit, grid, config, exposure_options);

    IncrementalBlock inc;
    inc.delta_ucva = full_report.ucva0.value - base_report.ucva0.value;
    inc.delta_mva = full_report.mva0.value - base_report.mva0.value;
    inc.delta_fva = full_report.fva0.value - base_report.fva0.value;
    inc.delta_kva = full_report.kva0 - base_report.kva0;
    inc.delta_ftdcva = full_report.ftdcva0.value - base_report.ftdcva0.value;
    inc.delta_ftddva = full_report.ftddva0.value - base_report.ftddva0.value;
    inc.delta_trc = full_report.trc0 - base_report.trc0;
    inc.ftp = inc.delta_trc + inc.delta_kva;
    full_report.incremental = inc;
    return full_report;
}

}  // namespace xva
