#ifndef XVA_IO_HPP
#define XVA_IO_HPP

#include <optional>
#include <string>

#include "xva/engine.hpp"

namespace xva {

struct RunConfig {
    std::string config_dir;  // directory of the config file, for relative paths
    std::string portfolio_file;
    std::string credit_file;
    std::string output_dir = "out";

    ModelParams model;
    std::optional<double> uniform_correlation;  // expanded once the entity count is known
    double horizon_years = 30.0;
    double step_years = 0.25;

    EngineConfig engine;
    ExposureOptions exposure;

    std::string im_funding_mode = "unsecured";  // or "specialist-blended"
    std::optional<double> lambda_override;
    std::optional<double> lambda_bar_override;

    std::string resolve(const std::string& path) const;
};

RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

Portfolio load_portfolio(const std::string& path);
void save_portfolio(const Portfolio& portfolio, const std::string& path);

CreditSetup load_credit(const std::string& path);
void save_credit(const CreditSetup& credit, const std::string& path);

struct LoadedInputs {
    Portfolio portfolio;
    CreditSetup credit;
    TimeGrid grid;
    ModelParams params;
};

// Loads the files named by the config and finalises the model: IM funding
// mode and spread overrides onto the credit setup, correlation matrix sized
// to counterparties + bank.
LoadedInputs load_inputs(const RunConfig& cfg);

// Writes xva.json, xva.csv, term_structures.csv, run_meta.json and, for
// incremental runs, ftp.csv. All numbers carry 15 significant digits.
void emit_report(const XVAReport& report, const std::string& dir);

std::string format_number(double x);  // %.15g

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };
LogLevel log_level();  // from XVA_LOG_LEVEL
void log_line(LogLevel level, const std::string& msg);

}  // namespace xva

#endif
