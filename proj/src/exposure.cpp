#include "xva/exposure.hpp"

#include <algorithm>
#include <cmath>

#include "xva/parallel.hpp"

namespace xva {

namespace {
constexpr std::size_t kMeshPoints = 513;

inline double positive(double x) { return x > 0.0 ? x : 0.0; }
inline double negative_part(double x) { return x < 0.0 ? -x : 0.0; }
}  // namespace

ExposureModel::ExposureModel(const Portfolio& portfolio, const ModelParams& model,
                             const CreditSetup& credit, const TimeGrid& grid,
                             const ExposureOptions& options)
    : portfolio_(portfolio), model_(model), credit_(credit), grid_(grid), options_(options) {
    credit_.validate();
    portfolio_.validate(credit_, grid_);
    double r_lo, r_hi;
    mtm_mesh_bounds(model_, grid_.horizon(), r_lo, r_hi);
    valuers_.reserve(portfolio_.sets.size());
    for (const auto& set : portfolio_.sets) valuers_.emplace_back(model_, set);
    tables_.reserve(valuers_.size());
    for (std::size_t i = 0; i < valuers_.size(); ++i) {
        tables_.emplace_back(valuers_[i], grid_, r_lo, r_hi, kMeshPoints);
        set_entity_.push_back(credit_.counterparty_index(portfolio_.sets[i].counterparty_id));
        set_recovery_.push_back(credit_.counterparty_curves[set_entity_.back()].recovery);
    }
}

namespace {
ExposureCube build_cube_impl(const ExposureModel& model, const ScenarioSet& s, bool parallel);
}

ExposureCube build_cube(const ExposureModel& model, const ScenarioSet& s) {
    return build_cube_impl(model, s, true);
}

namespace reference {
ExposureCube build_cube(const ExposureModel& model, const ScenarioSet& s) {
    return build_cube_impl(model, s, false);
}
}  // namespace reference

namespace {
ExposureCube build_cube_impl(const ExposureModel& model, const ScenarioSet& s, bool parallel) {
    const TimeGrid& grid = model.grid();
    if (!(grid == s.grid)) throw ArgumentError("build_cube: scenario grid mismatch");
    if (s.entity_count != model.credit().entity_count())
        throw ConfigError("build_cube: scenario entity count does not match credit setup");

    ExposureCube cube;
    cube.grid = grid;
    cube.n_paths = s.path_count();
    cube.n_sets = model.set_count();
    const std::size_t K = grid.size();
    cube.P.assign(cube.n_paths * K * cube.n_sets, 0.0);
    cube.Q.assign(cube.n_paths * K * cube.n_sets, 0.0);
    cube.VM.assign(cube.n_paths * K * cube.n_sets, 0.0);
    cube.IM_received.assign(cube.n_paths * K * cube.n_sets, 0.0);
    cube.IM_posted.assign(cube.n_paths * K * cube.n_sets, 0.0);
    cube.events.assign(cube.n_paths, {});
    cube.bank_default_index.assign(cube.n_paths, -1);
    cube.ucva_at_bank_default.assign(cube.n_paths, 0.0);
    cube.set_entity.resize(cube.n_sets);
    for (std::size_t i = 0; i < cube.n_sets; ++i) cube.set_entity[i] = model.set_entity(i);

    const ConditionalUcva cond_ucva(model);
    const std::size_t bank = s.bank_entity();
    const double shock = model.options().gap_shock;

    const auto body = [&](std::size_t p) {
        const double tau_bank = s.entity_default(p, bank);
        if (tau_bank <= grid.horizon()) {
            cube.bank_default_index[p] =
                static_cast<std::ptrdiff_t>(grid.index_at_or_after(tau_bank));
        }
        for (std::size_t k = 0; k < K; ++k) {
            const double r = s.rate(p, k);
            for (std::size_t i = 0; i < cube.n_sets; ++i) {
                const double m = model.mtm(i, k, r);
                const MarginState ms = model.margins(i, k, r, m);
                const std::size_t c = cube.at(p, k, i);
                cube.VM[c] = ms.vm;
                cube.IM_received[c] = ms.im_received;
                cube.IM_posted[c] = ms.im_posted;
                cube.P[c] = m - ms.vm;
                const bool live = grid[k] < model.valuer(i).last_maturity();
                cube.Q[c] = live ? cube.P[c] + shock : 0.0;
            }
        }
        auto& ev = cube.events[p];
        for (std::size_t i = 0; i < cube.n_sets; ++i) {
            const std::size_t e = model.set_entity(i);
            const double tau = s.entity_default(p, e);
            if (!(tau <= grid.horizon())) continue;
            const std::size_t t_idx = grid.index_at_or_after(tau);
            const std::size_t c = cube.at(p, t_idx, i);
            const double rec = model.set_recovery(i);
            LossEvent le;
            le.t_index = t_idx;
            le.set_index = i;
            le.entity = e;
            le.loss = (1.0 - rec) * positive(cube.Q[c] - cube.IM_received[c]);
            le.dva_posted_im = (1.0 - rec) * negative_part(cube.Q[c] - cube.IM_posted[c]);
            le.dva_received_im = (1.0 - rec) * negative_part(cube.Q[c] - cube.IM_received[c]);
            le.timing = (tau < tau_bank)    ? EventTiming::BeforeBank
                        : (tau == tau_bank) ? EventTiming::AtBankDefault
                                            : EventTiming::AfterBank;
            if (le.loss > 0.0 || le.dva_posted_im > 0.0 || le.dva_received_im > 0.0)
                ev.push_back(le);
        }
        std::stable_sort(ev.begin(), ev.end(),
                         [](const LossEvent& a, const LossEvent& b) { return a.t_index < b.t_index; });
        if (cube.bank_default_index[p] >= 0) {
            const std::size_t bk = static_cast<std::size_t>(cube.bank_default_index[p]);
            std::vector<char> alive(model.credit().counterparty_count(), 0);
            for (std::size_t e = 0; e < alive.size(); ++e)
                alive[e] = (s.entity_default(p, e) > tau_bank) ? 1 : 0;
            if (s.clock_z.empty()) {
                cube.ucva_at_bank_default[p] = cond_ucva.value(bk, s.rate(p, bk), alive);
            } else {
                cube.ucva_at_bank_default[p] = cond_ucva.value_given_bank_clock(
                    bk, s.rate(p, bk), alive, s.clock_z[p * s.entity_count + bank]);
            }
        }
    };
    if (parallel)
        parallel_for(static_cast<std::ptrdiff_t>(cube.n_paths), body);
    else
        serial_for(static_cast<std::ptrdiff_t>(cube.n_paths), body);
    return cube;
}
}  // namespace

ConditionalUcva::ConditionalUcva(const ExposureModel& model)
    : model_(&model), rule_(model.options().quadrature_panels, 8) {
    const CreditSetup& credit = model.credit();
    const std::size_t n_cpty = credit.counterparty_count();
    const std::size_t bank = credit.bank_entity_index();
    bank_rho_.assign(n_cpty, 0.0);
    const auto& corr = model.model().correlation;
    if (!corr.empty())
        for (std::size_t e = 0; e < n_cpty; ++e) bank_rho_[e] = corr[e][bank];
    // z threshold for {default by t}: Z >= Phi^{-1}(exp(-Gamma(t)))
    const TimeGrid& grid = model.grid();
    default_bound_.assign(n_cpty * grid.size(), 40.0);
    for (std::size_t e = 0; e < n_cpty; ++e) {
        const CreditCurve& curve = credit.counterparty_curves[e];
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double surv = std::exp(-curve.cumulative_hazard(grid[k]));
            double bound = 40.0;
            if (surv < 1.0 - 1e-16) bound = (surv > 1e-300) ? inverse_normal_cdf(surv) : -40.0;
            default_bound_[e * grid.size() + k] = bound;
        }
    }
}

double ConditionalUcva::value(std::size_t t_index, double r,
                              const std::vector<char>& alive) const {
    return value_impl(t_index, r, alive, nullptr);
}

double ConditionalUcva::value_given_bank_clock(std::size_t t_index, double r,
                                               const std::vector<char>& alive,
                                               double bank_z) const {
    return value_impl(t_index, r, alive, &bank_z);
}

double ConditionalUcva::value_impl(std::size_t t_index, double r, const std::vector<char>& alive,
                                   const double* bank_z) const {
    const ExposureModel& m = *model_;
    const TimeGrid& grid = m.grid();
    const double t = grid[t_index];
    double total = 0.0;
    for (std::size_t i = 0; i < m.set_count(); ++i) {
        const std::size_t e = m.set_entity(i);
        if (e < alive.size() && !alive[e]) continue;
        const double maturity = m.valuer(i).last_maturity();
        const double rec = m.set_recovery(i);
        const double rho = (bank_z && e < bank_rho_.size()) ? bank_rho_[e] : 0.0;
        // survival probability to grid[k] given the bank's clock normal
        auto survival = [&](std::size_t k) {
            const double bound = default_bound_[e * grid.size() + k];
            if (rho == 0.0) {
                if (bound >= 40.0) return 1.0;
                return normal_cdf(bound);
            }
            const double sd = std::sqrt(std::max(1.0 - rho * rho, 1e-12));
            return normal_cdf((bound - rho * *bank_z) / sd);
        };
        const double alive_mass = survival(t_index);
        if (alive_mass <= 0.0) continue;
        double surv_prev = alive_mass;
        for (std::size_t k = t_index + 1; k < grid.size(); ++k) {
            if (grid[k] >= maturity) break;  // matured set carries no gap exposure
            const double surv = survival(k);
            const double weight = (surv_prev - surv) / alive_mass;
            surv_prev = surv;
            if (weight <= 0.0) continue;
            const ForwardLaw law = forward_law(m.model(), grid[k] - t, r);
            const double expected = rule_.expect(law.mean, law.stdev, [&](double x) {
                const double mtm = m.mtm(i, k, x);
                const MarginState ms = m.margins(i, k, x, mtm);
                const double q = mtm - ms.vm + m.options().gap_shock;
                return positive(q - ms.im_received);
            });
            total += (1.0 - rec) * weight * law.bond * expected;
        }
    }
    return total;
}

std::vector<double> ucva_conditional(const ExposureModel& model, const ExposureCube& cube,
                                     const ScenarioSet& secondary, std::size_t t_index) {
    (void)model;
    if (!secondary.is_secondary || secondary.anchor_index != t_index)
        throw StateError("ucva_conditional: no secondary set spawned at the requested index");
    if (cube.n_paths != secondary.path_count())
        throw ArgumentError("ucva_conditional: cube does not match the secondary set");
    const std::size_t m = secondary.secondary_count;
    std::vector<double> out(secondary.primary_count, 0.0);
    for (std::size_t p = 0; p < secondary.primary_count; ++p) {
        double acc = 0.0;
        for (std::size_t q = 0; q < m; ++q) {
            const std::size_t path = p * m + q;
            const double df_anchor = secondary.df(path, t_index);
            for (const auto& ev : cube.events[path]) {
                if (ev.t_index <= t_index) continue;
                acc += ev.loss * secondary.df(path, ev.t_index) / df_anchor;
            }
        }
        out[p] = acc / static_cast<double>(m);
    }
    return out;
}

EstimateWithSe ucva_time0(const ExposureModel& model, const ExposureCube& cube,
                          const ScenarioSet& s, std::size_t batches) {
    (void)model;
    std::vector<double> per_path(cube.n_paths, 0.0);
    for (std::size_t p = 0; p < cube.n_paths; ++p) {
        double acc = 0.0;
        for (const auto& ev : cube.events[p]) acc += ev.loss * s.df(p, ev.t_index);
        per_path[p] = acc;
    }
    return mean_with_batch_se(per_path, batches);
}

FtdValues ftd_cva_dva(const ExposureModel& model, const ExposureCube& cube, const ScenarioSet& s,
                      std::size_t batches) {
    const bool posted = model.options().ftddva_posted_im;
    std::vector<double> cva(cube.n_paths, 0.0), dva(cube.n_paths, 0.0);
    for (std::size_t p = 0; p < cube.n_paths; ++p) {
        for (const auto& ev : cube.events[p]) {
            if (ev.timing == EventTiming::AfterBank) continue;  // past the first-to-default time
            const double df = s.df(p, ev.t_index);
            cva[p] += ev.loss * df;
            dva[p] += (posted ? ev.dva_posted_im : ev.dva_received_im) * df;
        }
    }
    FtdValues out;
    out.ftdcva = mean_with_batch_se(cva, batches);
    out.ftddva = mean_with_batch_se(dva, batches);
    return out;
}

double im_funding_spread(const ExposureModel& model, const ExposureCube& cube,
                         const ScenarioSet& s, std::size_t p, std::size_t k) {
    const CreditSetup& credit = model.credit();
    const double t = cube.grid[k];
    if (credit.im_mode == ImFundingMode::Unsecured) {
        if (credit.lambda_bar_override) return *credit.lambda_bar_override;
        return credit.unsecured_spread(t);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < cube.n_sets; ++i) {
        if (!(s.entity_default(p, model.set_entity(i)) > t)) continue;
        const std::size_t c = cube.at(p, k, i);
        const double im = cube.IM_posted[c];
        num += std::min(negative_part(cube.Q[c]), im);
        den += im;
    }
    if (den <= 0.0) return 0.0;
    return credit.unsecured_spread(t) * num / den;
}

std::vector<double> blended_spread(const ExposureModel& model, const ExposureCube& cube,
                                   const ScenarioSet& s, std::size_t t_index) {
    std::vector<double> out(cube.n_paths, 0.0);
    const CreditSetup& credit = model.credit();
    const double t = cube.grid[t_index];
    const double lambda = credit.unsecured_spread(t);
    for (std::size_t p = 0; p < cube.n_paths; ++p) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < cube.n_sets; ++i) {
            if (!(s.entity_default(p, model.set_entity(i)) > t)) continue;
            const std::size_t c = cube.at(p, t_index, i);
            num += std::min(negative_part(cube.Q[c]), cube.IM_posted[c]);
            den += cube.IM_posted[c];
        }
        out[p] = (den > 0.0) ? lambda * num / den : 0.0;
    }
    return out;
}

std::vector<double> mva_integrand(const ExposureModel& model, const ExposureCube& cube,
                                  const ScenarioSet& s) {
    const std::size_t K = cube.grid.size();
    std::vector<double> out(cube.n_paths * K, 0.0);
    parallel_for(static_cast<std::ptrdiff_t>(cube.n_paths), [&](std::size_t p) {
        for (std::size_t k = 0; k < K; ++k) {
            const double spread = im_funding_spread(model, cube, s, p, k);
            if (spread == 0.0) continue;
            double im_sum = 0.0;
            for (std::size_t i = 0; i < cube.n_sets; ++i) {
                if (!(s.entity_default(p, model.set_entity(i)) > cube.grid[k])) continue;
                im_sum += cube.IM_posted[cube.at(p, k, i)];
            }
            out[p * K + k] = spread * im_sum;
        }
    });
    return out;
}

TermStructure ucva_projection_curve(const ExposureCube& cube, const ScenarioSet& s) {
    const std::size_t K = cube.grid.size();
    std::vector<double> acc(K, 0.0);
    for (std::size_t p = 0; p < cube.n_paths; ++p) {
        double suffix = 0.0;
        auto it = cube.events[p].rbegin();
        for (std::size_t kk = K; kk-- > 0;) {
            while (it != cube.events[p].rend() && it->t_index > kk) {
                suffix += it->loss * s.df(p, it->t_index);
                ++it;
            }
            acc[kk] += suffix / s.df(p, kk);
        }
    }
    for (double& v : acc) v /= static_cast<double>(cube.n_paths);
    return TermStructure(cube.grid, std::move(acc));
}

TermStructure mva_projection_curve(const ExposureModel& model, const ExposureCube& cube,
                                   const ScenarioSet& s) {
    const std::size_t K = cube.grid.size();
    const std::size_t bank = s.bank_entity();
    const auto flows = mva_integrand(model, cube, s);
    std::vector<double> acc(K, 0.0);
    for (std::size_t p = 0; p < cube.n_paths; ++p) {
        const double tau_bank = s.entity_default(p, bank);
        double suffix = 0.0;
        for (std::size_t kk = K; kk-- > 0;) {
            acc[kk] += suffix / s.df(p, kk);
            if (kk == 0) break;
            const std::size_t j = kk - 1;  // flow on [t_j, t_{j+1})
            if (cube.grid[j] < tau_bank)
                suffix += flows[p * K + j] * s.df(p, j) * cube.grid.dt(j);
        }
    }
    for (double& v : acc) v /= static_cast<double>(cube.n_paths);
    return TermStructure(cube.grid, std::move(acc));
}

std::vector<double> aggregate_alive_exposure(const ExposureCube& cube, const ScenarioSet& s) {
    const std::size_t K = cube.grid.size();
    std::vector<double> out(cube.n_paths * K, 0.0);
    parallel_for(static_cast<std::ptrdiff_t>(cube.n_paths), [&](std::size_t p) {
        for (std::size_t k = 0; k < K; ++k) {
            double sum = 0.0;
            for (std::size_t i = 0; i < cube.n_sets; ++i)
                if (s.entity_default(p, cube.set_entity[i]) > cube.grid[k])
                    sum += cube.P[cube.at(p, k, i)];
            out[p * K + k] = sum;
        }
    });
    return out;
}

}  // namespace xva
