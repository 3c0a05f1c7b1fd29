#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "xva/pricing.hpp"
#include "xva/scenario.hpp"
#include "xva/stats.hpp"

using namespace xva;
using namespace testutil;

TEST_CASE("par swap is worth zero at inception") {
    const ModelParams params = toy_params();
    for (double maturity : {2.0, 5.0, 10.0, 30.0}) {
        const Portfolio p = one_set_portfolio({swap("1", TradeType::PayerSwap, maturity, "S")});
        const SetValuer valuer(params, p.sets[0]);
        CHECK(std::fabs(valuer.mtm(0.0, params.r0)) <= 1e-9 * 1e4);
    }
}

TEST_CASE("matured trades value to exactly zero") {
    const ModelParams params = toy_params();
    const Portfolio p = one_set_portfolio({swap("1", TradeType::ReceiverSwap, 5.0, "S")});
    const SetValuer valuer(params, p.sets[0]);
    CHECK(valuer.mtm(5.0, 0.015) == 0.0);
    CHECK(valuer.mtm(7.25, 0.03) == 0.0);
}

TEST_CASE("payer and receiver with identical terms cancel") {
    const ModelParams params = toy_params();
    const Portfolio p = one_set_portfolio({swap("1", TradeType::PayerSwap, 10.0, "S"),
                                           swap("2", TradeType::ReceiverSwap, 10.0, "S")});
    const SetValuer valuer(params, p.sets[0]);
    for (double t : {0.0, 1.25, 4.5, 9.75})
        for (double r : {-0.01, 0.01, 0.04, 0.09}) CHECK(valuer.mtm(t, r) == 0.0);
}

TEST_CASE("netting set value is trade additive") {
    const ModelParams params = toy_params();
    const Portfolio combined = one_set_portfolio({swap("1", TradeType::PayerSwap, 10.0, "S"),
                                                  swap("2", TradeType::ReceiverSwap, 5.0, "S"),
                                                  swap("3", TradeType::PayerSwap, 2.0, "S", 5e3)});
    const SetValuer all(params, combined.sets[0]);
    double parts = 0.0;
    for (const auto& t : combined.sets[0].trades) {
        const Portfolio single = one_set_portfolio({t});
        parts += SetValuer(params, single.sets[0]).mtm(1.5, 0.027);
    }
    CHECK(all.mtm(1.5, 0.027) == doctest::Approx(parts).epsilon(1e-13));
}

TEST_CASE("analytic swap value matches a discounted cash-flow simulation") {
    const ModelParams params = toy_params();
    const TimeGrid grid = TimeGrid::regular(5.0, 0.25);
    const CreditSetup credit = flat_credit({0.0}, 0.0);
    const std::size_t n = 20000;
    const ScenarioSet s = generate_primary(params, grid, n, credit, 2024);

    Trade tr = swap("1", TradeType::PayerSwap, 5.0, "S");
    tr.fixed_rate = 0.02;
    const Portfolio p = one_set_portfolio({tr});
    const SetValuer valuer(params, p.sets[0]);
    const double analytic = valuer.mtm(0.0, params.r0);

    // pay fixed 2% semiannually, receive 3M forward-looking simple coupons
    std::vector<double> pv(n, 0.0);
    for (std::size_t path = 0; path < n; ++path) {
        double v = 0.0;
        for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
            const double delta = grid.dt(k);
            const double p_next = zcb_price(params, delta, s.rate(path, k));
            const double libor = (1.0 / p_next - 1.0) / delta;
            v += 1e4 * delta * libor * s.df(path, k + 1);
        }
        for (std::size_t k = 2; k < grid.size(); k += 2) v -= 1e4 * 0.5 * 0.02 * s.df(path, k);
        pv[path] = v;
    }
    const auto est = mean_with_plain_se(pv);
    CHECK(std::fabs(est.value - analytic) < 3.0 * est.se);
}

TEST_CASE("variation margin truncation") {
    CHECK(apply_vm(120.0, 0.0) == 120.0);
    CHECK(apply_vm(-70.0, 0.0) == -70.0);
    CHECK(apply_vm(120.0, std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(apply_vm(120.0, 50.0) == 70.0);
    CHECK(apply_vm(-120.0, 50.0) == -70.0);
    CHECK(apply_vm(30.0, 50.0) == 0.0);
}

TEST_CASE("margin balances per model") {
    const ModelParams params = toy_params();
    const Portfolio p = one_set_portfolio({swap("1", TradeType::ReceiverSwap, 10.0, "S")});
    MarginSpec margin;
    margin.vm_threshold = 0.0;
    margin.im_posted = {ImModel::Fixed, 50.0, 0.99};
    const SetValuer valuer(params, p.sets[0]);
    const double mtm = valuer.mtm(2.0, 0.02);
    MarginState ms = margin_balances(valuer, margin, 2.0, 0.02, mtm, params, 0.04);
    CHECK(ms.vm == mtm);
    CHECK(ms.im_posted == 50.0);
    CHECK(ms.im_received == 0.0);
    // beyond the last maturity everything is released
    ms = margin_balances(valuer, margin, 10.0, 0.02, 0.0, params, 0.04);
    CHECK(ms.vm == 0.0);
    CHECK(ms.im_posted == 0.0);

    MarginSpec qm;
    qm.im_received = {ImModel::Quantile, 0.0, 0.99};
    const MarginState q99 = margin_balances(valuer, qm, 2.0, 0.02, mtm, params, 0.04);
    qm.im_received.alpha = 0.95;
    const MarginState q95 = margin_balances(valuer, qm, 2.0, 0.02, mtm, params, 0.04);
    CHECK(q99.im_received > 0.0);
    CHECK(q99.im_received >= q95.im_received);
    // rough scale: one-percentile move of a 10y receiver over 10 business days
    CHECK(q99.im_received < 0.05 * 1e4);
}

TEST_CASE("mtm table interpolates the valuer closely") {
    const ModelParams params = toy_params();
    const TimeGrid grid = TimeGrid::regular(10.0, 0.25);
    const Portfolio p = one_set_portfolio({swap("1", TradeType::PayerSwap, 10.0, "S"),
                                           swap("2", TradeType::ReceiverSwap, 5.0, "S")});
    const SetValuer valuer(params, p.sets[0]);
    double lo, hi;
    mtm_mesh_bounds(params, grid.horizon(), lo, hi);
    const MtmTable table(valuer, grid, lo, hi, 513);
    for (std::size_t k : {std::size_t{0}, std::size_t{13}, std::size_t{39}})
        for (double r : {-0.05, 0.0, 0.013, 0.0421, 0.11}) {
            const double exact = valuer.mtm(grid[k], r);
            CHECK(table.eval(k, r) == doctest::Approx(exact).epsilon(5e-7));
        }
    // far outside the mesh the exact slow path kicks in
    CHECK(table.eval(4, 2.5) == valuer.mtm(grid[4], 2.5));
}

TEST_CASE("par rates increase with an upward initial curve") {
    const ModelParams params = toy_params();
    const double p2 = par_rate(params, 2.0, 6);
    const double p10 = par_rate(params, 10.0, 6);
    const double p30 = par_rate(params, 30.0, 6);
    CHECK(p2 < p10);
    CHECK(p10 < p30);
    CHECK(p2 > 0.0);
    CHECK(p30 < 0.05);
}

TEST_CASE("portfolio validation catches bad trades") {
    const TimeGrid grid = TimeGrid::regular(10.0, 0.25);
    const CreditSetup credit = flat_credit({100.0}, 50.0);
    Portfolio p = one_set_portfolio({swap("1", TradeType::PayerSwap, 10.0, "S")});
    p.validate(credit, grid);

    Portfolio too_long = one_set_portfolio({swap("1", TradeType::PayerSwap, 12.0, "S")});
    CHECK_THROWS_AS(too_long.validate(credit, grid), ConfigError);

    Portfolio unknown_cpty = one_set_portfolio({swap("1", TradeType::PayerSwap, 5.0, "S")}, "Z");
    CHECK_THROWS_AS(unknown_cpty.validate(credit, grid), ConfigError);

    Portfolio dup = one_set_portfolio(
        {swap("1", TradeType::PayerSwap, 5.0, "S"), swap("1", TradeType::ReceiverSwap, 5.0, "S")});
    CHECK_THROWS_AS(dup.validate(credit, grid), ConfigError);
}
