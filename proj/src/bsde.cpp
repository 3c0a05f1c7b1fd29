#include "xva/bsde.hpp"

#include <algorithm>
#include <cmath>

#include "xva/parallel.hpp"

namespace xva {

namespace {
inline double positive(double x) { return x > 0.0 ? x : 0.0; }

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}
}  // namespace

void KvaInputs::validate() const {
    ec_curve.validate();
    rate_curve.validate();
    if (!(ec_curve.grid == rate_curve.grid))
        throw ArgumentError("KvaInputs: curves must share one grid");
    if (!(hurdle >= 0.0)) throw ArgumentError("KvaInputs: hurdle must be >= 0");
}

BackwardSolution kva_linear(const KvaInputs& inputs) {
    inputs.validate();
    const TimeGrid& grid = inputs.ec_curve.grid;
    const double h = inputs.hurdle;
    const std::size_t K = grid.size();
    std::vector<double> k_curve(K, 0.0);
    for (std::size_t k = K - 1; k-- > 0;) {
        const double dt = grid.dt(k);
        const double c0 = inputs.ec_curve[k], c1 = inputs.ec_curve[k + 1];
        const double r0 = inputs.rate_curve[k], r1 = inputs.rate_curve[k + 1];
        const double rhs = k_curve[k + 1] +
                           0.5 * dt * (h * c0 + h * c1 - (r1 + h) * k_curve[k + 1]);
        k_curve[k] = rhs / (1.0 + 0.5 * dt * (r0 + h));
    }
    BackwardSolution out;
    out.value_curve = TermStructure(grid, std::move(k_curve));
    out.iterations = 1;
    out.residual = 0.0;
    return out;
}

BackwardSolution kva_bsde(const TermStructure& es_curve, const TermStructure& rate_curve,
                          double hurdle, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ArgumentError("kva_bsde: tol must be positive");
    KvaInputs lin{es_curve, rate_curve, hurdle};
    BackwardSolution start = kva_linear(lin);
    const TimeGrid& grid = es_curve.grid;
    const std::size_t K = grid.size();
    std::vector<double> k_cur = std::move(start.value_curve.values);
    std::vector<double> k_next(K, 0.0);
    const double h = hurdle;

    auto generator = [&](std::size_t j, const std::vector<double>& k) {
        return h * std::max(es_curve[j], k[j]) - (rate_curve[j] + h) * k[j];
    };

    double residual = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        k_next[K - 1] = 0.0;
        for (std::size_t k = K - 1; k-- > 0;) {
            const double dt = grid.dt(k);
            k_next[k] = k_next[k + 1] + 0.5 * dt * (generator(k, k_cur) + generator(k + 1, k_cur));
        }
        double diff = 0.0;
        for (std::size_t k = 0; k < K; ++k) diff = std::max(diff, std::fabs(k_next[k] - k_cur[k]));
        k_cur.swap(k_next);
        residual = diff / std::max(1.0, sup_abs(k_cur));
        if (residual < tol) {
            BackwardSolution out;
            out.value_curve = TermStructure(grid, std::move(k_cur));
            out.iterations = it;
            out.residual = residual;
            return out;
        }
    }
    throw ConvergenceError("kva_bsde: Picard iteration did not converge in " +
                               std::to_string(max_iter) + " iterations",
                           residual);
}

FundingPaths make_funding_paths(const ExposureModel& model, const ExposureCube& cube,
                                const ScenarioSet& s) {
    FundingPaths fp;
    fp.grid = cube.grid;
    fp.n_paths = cube.n_paths;
    fp.exposure = aggregate_alive_exposure(cube, s);
    fp.discount.assign(s.discount.begin(), s.discount.end());
    const std::size_t K = cube.grid.size();
    const std::size_t bank = s.bank_entity();
    fp.bank_alive.assign(fp.n_paths * K, 0);
    (void)model;
    parallel_for(static_cast<std::ptrdiff_t>(fp.n_paths), [&](std::size_t p) {
        const double tau = s.entity_default(p, bank);
        for (std::size_t k = 0; k < K; ++k)
            fp.bank_alive[p * K + k] = (cube.grid[k] < tau) ? 1 : 0;
    });
    return fp;
}

BackwardSolution fva_fixed_point(const FundingPaths& paths, const TermStructure& ec_curve,
                                 const TermStructure& ucva_curve, const TermStructure& mva_curve,
                                 const TermStructure& lambda_curve, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ArgumentError("fva_fixed_point: tol must be positive");
    const TimeGrid& grid = paths.grid;
    const std::size_t K = grid.size();
    const std::size_t N = paths.n_paths;
    if (N == 0) throw ArgumentError("fva_fixed_point: no paths");
    std::vector<double> fva(K, 0.0), fva_next(K, 0.0);
    std::vector<double> contrib(N * K, 0.0);

    double residual = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        parallel_for(static_cast<std::ptrdiff_t>(N), [&](std::size_t p) {
            double suffix = 0.0;
            for (std::size_t kk = K; kk-- > 0;) {
                if (kk + 1 < K) {
                    const std::size_t j = kk;  // flow over [t_j, t_{j+1})
                    if (paths.bank_alive[paths.at(p, j)]) {
                        const double need = paths.exposure[paths.at(p, j)] - ec_curve[j] -
                                            ucva_curve[j] - mva_curve[j] - fva[j];
                        suffix += lambda_curve[j] * positive(need) * grid.dt(j) *
                                  paths.discount[paths.at(p, j)];
                    }
                }
                contrib[p * K + kk] = suffix / paths.discount[paths.at(p, kk)];
            }
        });
        for (std::size_t k = 0; k < K; ++k) {
            double acc = 0.0;
            for (std::size_t p = 0; p < N; ++p) acc += contrib[p * K + k];
            fva_next[k] = acc / static_cast<double>(N);
        }
        double diff = 0.0;
        for (std::size_t k = 0; k < K; ++k) diff = std::max(diff, std::fabs(fva_next[k] - fva[k]));
        fva.swap(fva_next);
        residual = diff / std::max(1.0, sup_abs(fva));
        if (residual < tol) {
            BackwardSolution out;
            out.value_curve = TermStructure(grid, std::move(fva));
            out.iterations = it;
            out.residual = residual;
            return out;
        }
    }
    throw ConvergenceError("fva_fixed_point: Picard iteration did not converge in " +
                               std::to_string(max_iter) + " iterations",
                           residual);
}

std::vector<double> fva_per_path(const FundingPaths& paths, const TermStructure& ec_curve,
                                 const TermStructure& ucva_curve, const TermStructure& mva_curve,
                                 const TermStructure& lambda_curve) {
    const TimeGrid& grid = paths.grid;
    const std::size_t K = grid.size();
    std::vector<double> out(paths.n_paths * K, 0.0);
    parallel_for(static_cast<std::ptrdiff_t>(paths.n_paths), [&](std::size_t p) {
        double next = 0.0;
        out[p * K + K - 1] = 0.0;
        for (std::size_t k = K - 1; k-- > 0;) {
            const double growth = paths.discount[paths.at(p, k + 1)] / paths.discount[paths.at(p, k)];
            const double carried = next * growth;
            double f = carried;
            if (paths.bank_alive[paths.at(p, k)]) {
                const double base = paths.exposure[paths.at(p, k)] - ec_curve[k] - ucva_curve[k] -
                                    mva_curve[k];
                const double lam_dt = lambda_curve[k] * grid.dt(k);
                // f = carried + lam_dt (base - f)^+ has an exact piecewise solution
                if (base > carried) f = (carried + lam_dt * base) / (1.0 + lam_dt);
            }
            out[p * K + k] = f;
            next = f;
        }
    });
    return out;
}

TermStructure lambda_curve_on_grid(const CreditSetup& credit, const TimeGrid& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) v[k] = credit.unsecured_spread(grid[k]);
    return TermStructure(grid, std::move(v));
}

ReplicationResult replication_bsde(const ExposureModel& model, const ExposureCube& cube,
                                   const ScenarioSet& s, double tol, int max_iter) {
    ReplicationResult out;
    out.ucva_curve = ucva_projection_curve(cube, s);
    out.mva_curve = mva_projection_curve(model, cube, s);
    const FundingPaths fp = make_funding_paths(model, cube, s);
    const TermStructure lambda = lambda_curve_on_grid(model.credit(), cube.grid);
    const TermStructure zero_ec = TermStructure::zero(cube.grid);
    BackwardSolution fstar =
        fva_fixed_point(fp, zero_ec, out.ucva_curve, out.mva_curve, lambda, tol, max_iter);
    out.fva_star_curve = fstar.value_curve;
    std::vector<double> trc(cube.grid.size());
    for (std::size_t k = 0; k < trc.size(); ++k)
        trc[k] = out.ucva_curve[k] + out.mva_curve[k] + out.fva_star_curve[k];
    out.trc.value_curve = TermStructure(cube.grid, std::move(trc));
    out.trc.iterations = fstar.iterations;
    out.trc.residual = fstar.residual;
    return out;
}

}  // namespace xva
