#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "test_util.hpp"
#include "xva/engine.hpp"
#include "xva/io.hpp"

using namespace xva;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

std::string temp_dir() {
    const auto dir = fs::temp_directory_path() / "xva_io_tests";
    fs::create_directories(dir);
    return dir.string();
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = temp_dir() + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool same_portfolio(const Portfolio& a, const Portfolio& b) {
    if (a.sets.size() != b.sets.size()) return false;
    for (std::size_t i = 0; i < a.sets.size(); ++i) {
        const auto& x = a.sets[i];
        const auto& y = b.sets[i];
        if (x.id != y.id || x.counterparty_id != y.counterparty_id) return false;
        if (!(x.margin.vm_threshold == y.margin.vm_threshold ||
              (std::isinf(x.margin.vm_threshold) && std::isinf(y.margin.vm_threshold))))
            return false;
        if (x.trades.size() != y.trades.size()) return false;
        for (std::size_t j = 0; j < x.trades.size(); ++j) {
            const auto& t = x.trades[j];
            const auto& u = y.trades[j];
            if (t.id != u.id || t.type != u.type || t.notional != u.notional ||
                t.maturity_years != u.maturity_years || t.fixed_rate != u.fixed_rate ||
                t.fixed_tenor_months != u.fixed_tenor_months ||
                t.float_tenor_months != u.float_tenor_months)
                return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("the bundled toy portfolio matches its table") {
    const Portfolio p = load_portfolio(data_path("toy_portfolio.csv"));
    CHECK(p.trade_count() == 10);
    CHECK(p.sets.size() == 4);
    for (const auto& set : p.sets) {
        CHECK(std::isinf(set.margin.vm_threshold));
        CHECK(set.margin.im_received.model == ImModel::None);
        for (const auto& t : set.trades) {
            CHECK(t.notional == 1e4);
            CHECK(!t.fixed_rate.has_value());  // par at inception
        }
    }
    const NettingSet* a = p.find_set("A");
    REQUIRE(a != nullptr);
    CHECK(a->trades.size() == 3);  // swaps 6, 7, 9
}

TEST_CASE("empty portfolio files are valid") {
    const std::string path = write_temp("empty.csv", "");
    const Portfolio p = load_portfolio(path);
    CHECK(p.sets.empty());
    const std::string header_only = write_temp(
        "header_only.csv",
        "id,type,notional,maturity_years,fixed_rate,fixed_tenor_months,float_tenor_months,"
        "netting_set,counterparty,vm_threshold,im_received,im_posted\n");
    CHECK(load_portfolio(header_only).sets.empty());
}

TEST_CASE("portfolio parse errors carry line numbers") {
    const std::string header =
        "id,type,notional,maturity_years,fixed_rate,fixed_tenor_months,float_tenor_months,"
        "netting_set,counterparty,vm_threshold,im_received,im_posted\n";
    const std::string bad_notional =
        write_temp("bad_notional.csv", header + "1,payer,-5,10,par,6,3,S,A,inf,none,none\n");
    try {
        load_portfolio(bad_notional);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 2);
        CHECK(std::string(e.what()).find("notional") != std::string::npos);
    }
    const std::string dup = write_temp("dup.csv", header +
                                                      "1,payer,5,10,par,6,3,S,A,inf,none,none\n"
                                                      "1,payer,5,5,par,6,3,S,A,inf,none,none\n");
    CHECK_THROWS_AS(load_portfolio(dup), ParseError);
    const std::string two_cpty =
        write_temp("two_cpty.csv", header +
                                       "1,payer,5,10,par,6,3,S,A,inf,none,none\n"
                                       "2,payer,5,5,par,6,3,S,B,inf,none,none\n");
    CHECK_THROWS_AS(load_portfolio(two_cpty), ParseError);
    const std::string bad_type =
        write_temp("bad_type.csv", header + "1,swaption,5,10,par,6,3,S,A,inf,none,none\n");
    CHECK_THROWS_AS(load_portfolio(bad_type), ParseError);
    CHECK_THROWS_AS(load_portfolio(temp_dir() + "/does_not_exist.csv"), IoError);
}

TEST_CASE("json portfolios are accepted and reject unknown netting sets") {
    const std::string good = write_temp("p.json", R"({
        "netting_sets": [{"id": "S", "counterparty": "A", "vm_threshold": "inf"}],
        "trades": [{"id": "1", "type": "payer", "notional": 100.0,
                     "maturity_years": 5.0, "netting_set": "S"}]
    })");
    const Portfolio p = load_portfolio(good);
    CHECK(p.trade_count() == 1);
    CHECK(p.sets[0].trades[0].fixed_tenor_months == 6);
    const std::string orphan = write_temp("orphan.json", R"({
        "netting_sets": [],
        "trades": [{"id": "1", "type": "payer", "notional": 100.0,
                     "maturity_years": 5.0, "netting_set": "S"}]
    })");
    CHECK_THROWS_AS(load_portfolio(orphan), ParseError);
}

TEST_CASE("portfolio save/load is a fixed point") {
    const Portfolio p = load_portfolio(data_path("toy_portfolio.csv"));
    const std::string saved = temp_dir() + "/toy_roundtrip.csv";
    save_portfolio(p, saved);
    const Portfolio q = load_portfolio(saved);
    CHECK(same_portfolio(p, q));
    const std::string saved2 = temp_dir() + "/toy_roundtrip2.csv";
    save_portfolio(q, saved2);
    CHECK(slurp(saved) == slurp(saved2));
}

TEST_CASE("credit file loading and hazards") {
    const CreditSetup credit = load_credit(data_path("toy_credit.csv"));
    CHECK(credit.counterparty_count() == 4);
    CHECK(credit.counterparty_names == std::vector<std::string>{"A", "B", "C", "D"});
    CHECK(credit.bank_curve.tenors.front() == 0.5);
    CHECK(credit.bank_curve.tenors.back() == 50.0);
    // credit triangle on the first segment of A: 9 bps at 40% recovery
    CHECK(credit.counterparty_curves[0].hazard_at(0.25) ==
          doctest::Approx(9e-4 / 0.6).epsilon(1e-12));
    // bank unsecured spread reproduces its CDS quote
    CHECK(credit.unsecured_spread(0.25) == doctest::Approx(18e-4).epsilon(1e-12));

    const std::string flat = write_temp("flat_credit.csv",
                                        "entity,recovery,1Y,5Y\n"
                                        "A,0.4,100,100\n"
                                        "Bank,0.4,0,0\n");
    const CreditSetup fc = load_credit(flat);
    CHECK(fc.counterparty_curves[0].hazard_at(3.0) == doctest::Approx(0.0166667).epsilon(1e-4));
    for (double t : {0.5, 2.0, 10.0}) CHECK(fc.bank_curve.hazard_at(t) == 0.0);
}

TEST_CASE("credit parse errors") {
    const std::string non_monotone = write_temp("nm.csv",
                                                "entity,recovery,5Y,1Y\n"
                                                "A,0.4,100,100\nBank,0.4,10,10\n");
    CHECK_THROWS_AS(load_credit(non_monotone), ParseError);
    const std::string no_bank = write_temp("nb.csv",
                                           "entity,recovery,1Y,5Y\n"
                                           "A,0.4,100,100\n");
    CHECK_THROWS_AS(load_credit(no_bank), ParseError);
    const std::string bad_recovery = write_temp("br.csv",
                                                "entity,recovery,1Y\n"
                                                "A,1.2,100\nBank,0.4,10\n");
    CHECK_THROWS_AS(load_credit(bad_recovery), ParseError);
}

TEST_CASE("credit save/load round trip") {
    const CreditSetup credit = load_credit(data_path("toy_credit.csv"));
    const std::string saved = temp_dir() + "/credit_roundtrip.csv";
    save_credit(credit, saved);
    const CreditSetup again = load_credit(saved);
    CHECK(again.counterparty_names == credit.counterparty_names);
    for (std::size_t i = 0; i < credit.counterparty_count(); ++i) {
        CHECK(again.counterparty_curves[i].hazards == credit.counterparty_curves[i].hazards);
        CHECK(again.counterparty_curves[i].recovery == credit.counterparty_curves[i].recovery);
    }
    CHECK(again.bank_curve.hazards == credit.bank_curve.hazards);
}

TEST_CASE("config loading resolves inputs and correlations") {
    const RunConfig cfg = load_config(data_path("toy_config.json"));
    CHECK(cfg.engine.primary_paths == 2000);
    CHECK(cfg.engine.secondary_paths == 200);
    CHECK(cfg.engine.hurdle == 0.105);
    CHECK(cfg.horizon_years == 30.0);
    const LoadedInputs in = load_inputs(cfg);
    CHECK(in.portfolio.trade_count() == 10);
    CHECK(in.credit.im_mode == ImFundingMode::Unsecured);
    REQUIRE(in.params.correlation.size() == 5);  // four counterparties + bank
    CHECK(in.params.correlation[0][1] == 0.3);
    CHECK(in.params.correlation[2][2] == 1.0);
    CHECK(in.grid.size() == 121);

    // print-config output is invalid JSON never: parse and re-check a few keys
    const nlohmann::json echoed = nlohmann::json::parse(config_to_json(cfg));
    CHECK(echoed.at("seed").get<std::uint64_t>() == cfg.engine.seed);
    CHECK(echoed.at("model").at("rate_vol").get<double>() == 0.008);
    CHECK(echoed.at("grid").at("step_years").get<double>() == 0.25);
}

TEST_CASE("reports are emitted deterministically and round trip") {
    const RunConfig cfg = load_config(data_path("toy_config.json"));
    LoadedInputs in = load_inputs(cfg);
    EngineConfig ecfg = cfg.engine;
    ecfg.primary_paths = 120;
    ecfg.secondary_paths = 5;
    ecfg.es_min_survivors = 5;
    const XVAReport report = run_full(in.portfolio, in.params, in.credit, in.grid, ecfg);

    const std::string dir1 = temp_dir() + "/out1";
    const std::string dir2 = temp_dir() + "/out2";
    emit_report(report, dir1);
    emit_report(report, dir2);
    for (const char* name : {"xva.json", "xva.csv", "term_structures.csv"})
        CHECK(slurp(dir1 + "/" + std::string(name)) == slurp(dir2 + "/" + std::string(name)));
    CHECK(fs::exists(dir1 + "/run_meta.json"));
    CHECK(!fs::exists(dir1 + "/ftp.csv"));  // plain runs carry no incremental block

    const nlohmann::json j = nlohmann::json::parse(slurp(dir1 + "/xva.json"));
    CHECK(j.at("ucva0").at("value").get<double>() ==
          doctest::Approx(report.ucva0.value).epsilon(1e-14));
    CHECK(j.at("kva0").at("se").is_null());
    CHECK(j.at("trc0").get<double>() == doctest::Approx(report.trc0).epsilon(1e-14));
    CHECK(j.at("term_structures").at("es_star").size() == in.grid.size());

    // run_meta differs only in wall-clock timings
    nlohmann::json meta1 = nlohmann::json::parse(slurp(dir1 + "/run_meta.json"));
    nlohmann::json meta2 = nlohmann::json::parse(slurp(dir2 + "/run_meta.json"));
    meta1.erase("timings_ms");
    meta2.erase("timings_ms");
    CHECK(meta1 == meta2);

    XVAReport inc = report;
    inc.incremental = IncrementalBlock{};
    const std::string dir3 = temp_dir() + "/out3";
    emit_report(inc, dir3);
    CHECK(fs::exists(dir3 + "/ftp.csv"));
}

TEST_CASE("emitting into an unwritable location raises an io error") {
    XVAReport report;
    report.es_star = TermStructure::zero(TimeGrid::regular(1.0, 0.5));
    report.kva_curve = report.es_star;
    report.ec_curve = report.es_star;
    report.blended_lambda = report.es_star;
    CHECK_THROWS_AS(emit_report(report, "/proc/xva_cannot_write_here"), IoError);
}

TEST_CASE("number formatting carries 15 significant digits") {
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(123456.789012345) == "123456.789012345");
    const double x = 0.12345678901234567;
    const double reparsed = std::stod(format_number(x));
    CHECK(format_number(reparsed) == format_number(x));
}
