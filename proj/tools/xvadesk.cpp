// Command-line front end: run, incremental, validate, print-config.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xva/io.hpp"
#include "xva/pricing.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> primary, secondary;
    std::optional<int> threads, passes;
    std::optional<double> hurdle, step, horizon;
    std::optional<std::string> output;
};

void apply_overrides(xva::RunConfig& cfg, const Overrides& ov) {
    if (ov.seed) cfg.engine.seed = *ov.seed;
    if (ov.primary) cfg.engine.primary_paths = *ov.primary;
    if (ov.secondary) cfg.engine.secondary_paths = *ov.secondary;
    if (ov.threads) cfg.engine.threads = *ov.threads;
    if (ov.passes) cfg.engine.loop_passes = *ov.passes;
    if (ov.hurdle) cfg.engine.hurdle = *ov.hurdle;
    if (ov.step) cfg.step_years = *ov.step;
    if (ov.horizon) cfg.horizon_years = *ov.horizon;
    if (ov.output) cfg.output_dir = *ov.output;
}

int run_command(const std::string& config_path, const Overrides& ov,
                const std::optional<std::string>& add_file) {
    xva::RunConfig cfg = xva::load_config(config_path);
    apply_overrides(cfg, ov);
    const xva::LoadedInputs in = xva::load_inputs(cfg);
    xva::XVAReport report;
    if (add_file) {
        const xva::Portfolio addition = xva::load_portfolio(*add_file);
        report = xva::incremental_xva(in.portfolio, addition, in.params, in.credit, in.grid,
                                      cfg.engine, cfg.exposure);
    } else {
        report = xva::run_full(in.portfolio, in.params, in.credit, in.grid, cfg.engine,
                               cfg.exposure);
    }
    const std::string out_dir = cfg.resolve(cfg.output_dir);
    xva::emit_report(report, out_dir);
    xva::log_line(xva::LogLevel::Info, "report written to " + out_dir);
    std::cout << "ucva0 " << xva::format_number(report.ucva0.value) << "\n"
              << "mva0 " << xva::format_number(report.mva0.value) << "\n"
              << "fva_star0 " << xva::format_number(report.fva_star0.value) << "\n"
              << "fva0 " << xva::format_number(report.fva0.value) << "\n"
              << "kva0 " << xva::format_number(report.kva0) << "\n"
              << "trc0 " << xva::format_number(report.trc0) << "\n";
    if (report.incremental)
        std::cout << "ftp " << xva::format_number(report.incremental->ftp) << "\n";
    return 0;
}

int validate_command(const std::string& config_path) {
    const xva::RunConfig cfg = xva::load_config(config_path);
    const xva::LoadedInputs in = xva::load_inputs(cfg);
    cfg.engine.validate();
    std::cout << "portfolio: " << in.portfolio.trade_count() << " trades in "
              << in.portfolio.sets.size() << " netting sets\n";
    std::cout << "credit: " << in.credit.counterparty_count() << " counterparties + bank\n";
    std::cout << "grid: " << in.grid.steps() << " steps to " << in.grid.horizon() << "y\n";
    for (const auto& set : in.portfolio.sets) {
        for (const auto& t : set.trades) {
            if (!t.fixed_rate) {
                const double par = xva::par_rate(in.params, t.maturity_years, t.fixed_tenor_months);
                std::cout << "trade " << t.id << ": par rate "
                          << xva::format_number(par) << "\n";
            }
        }
    }
    std::cout << "ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested Monte Carlo XVA engine"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::string add_file;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "engine configuration file")->required();
        cmd->add_option("--seed", ov.seed, "override the RNG seed");
        cmd->add_option("--primary", ov.primary, "override the primary path count");
        cmd->add_option("--secondary", ov.secondary, "override the secondary path count");
        cmd->add_option("--threads", ov.threads, "override the thread count (0 = auto)");
        cmd->add_option("--passes", ov.passes, "override the scheme pass count");
        cmd->add_option("--hurdle", ov.hurdle, "override the hurdle rate");
        cmd->add_option("--step", ov.step, "override the grid step (years)");
        cmd->add_option("--horizon", ov.horizon, "override the grid horizon (years)");
        cmd->add_option("--output", ov.output, "override the output directory");
    };

    CLI::App* run = app.add_subcommand("run", "run the full pipeline and emit the report");
    add_common(run);
    CLI::App* inc = app.add_subcommand("incremental", "price trades added to the book");
    add_common(inc);
    inc->add_option("--add", add_file, "portfolio file with the trades to add")->required();
    CLI::App* val = app.add_subcommand("validate", "check config, portfolio and credit inputs");
    val->add_option("--config", config_path, "engine configuration file")->required();
    CLI::App* pc = app.add_subcommand("print-config", "print the effective configuration");
    add_common(pc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return run_command(config_path, ov, std::nullopt);
        if (inc->parsed()) return run_command(config_path, ov, add_file);
        if (val->parsed()) return validate_command(config_path);
        if (pc->parsed()) {
            xva::RunConfig cfg = xva::load_config(config_path);
            apply_overrides(cfg, ov);
            std::cout << xva::config_to_json(cfg);
            return 0;
        }
    } catch (const xva::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const xva::EstimationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const xva::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const xva::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const xva::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const xva::StateError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
