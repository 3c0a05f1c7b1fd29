#include "xva/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace xva {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("XVA_LOG_LEVEL");
        if (!env) return LogLevel::Warn;
        std::string v(env);
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        if (v == "error") return LogLevel::Error;
        if (v == "warn" || v == "warning") return LogLevel::Warn;
        if (v == "info") return LogLevel::Info;
        if (v == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

void log_line(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) <= static_cast<int>(log_level())) std::cerr << msg << "\n";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& file, long line, const std::string& field,
                    const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(file, line, "cannot parse " + field + " from '" + text + "'");
    }
}

long parse_long(const std::string& file, long line, const std::string& field,
                const std::string& text) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(file, line, "cannot parse " + field + " from '" + text + "'");
    }
}

std::string lower(std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    return v;
}

ImSpec parse_im_spec(const std::string& file, long line, const std::string& text) {
    ImSpec spec;
    const std::string v = lower(text);
    if (v == "none" || v.empty()) return spec;
    const auto colon = v.find(':');
    const std::string head = colon == std::string::npos ? v : v.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : v.substr(colon + 1);
    if (head == "fixed") {
        spec.model = ImModel::Fixed;
        spec.amount = parse_double(file, line, "fixed IM amount", arg);
        if (spec.amount < 0.0) throw ParseError(file, line, "fixed IM amount must be >= 0");
    } else if (head == "quantile") {
        spec.model = ImModel::Quantile;
        spec.alpha = parse_double(file, line, "IM quantile level", arg);
        if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
            throw ParseError(file, line, "IM quantile level must lie in (0,1)");
    } else {
        throw ParseError(file, line, "unknown IM model '" + text + "'");
    }
    return spec;
}

std::string im_spec_to_string(const ImSpec& spec) {
    switch (spec.model) {
        case ImModel::None:
            return "none";
        case ImModel::Fixed:
            return "fixed:" + format_number(spec.amount);
        case ImModel::Quantile:
            return "quantile:" + format_number(spec.alpha);
    }
    return "none";
}

double parse_vm_threshold(const std::string& file, long line, const std::string& text) {
    if (lower(text) == "inf" || lower(text) == "infinity")
        return std::numeric_limits<double>::infinity();
    const double v = parse_double(file, line, "vm_threshold", text);
    if (v < 0.0) throw ParseError(file, line, "vm_threshold must be >= 0");
    return v;
}

double parse_tenor(const std::string& file, long line, const std::string& text) {
    if (text.empty()) throw ParseError(file, line, "empty tenor label");
    const char suffix = static_cast<char>(std::tolower(static_cast<unsigned char>(text.back())));
    const std::string num = text.substr(0, text.size() - 1);
    if (suffix == 'm') return parse_double(file, line, "tenor", num) / 12.0;
    if (suffix == 'y') return parse_double(file, line, "tenor", num);
    throw ParseError(file, line, "tenor label '" + text + "' must end in M or Y");
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    return out;
}

bool has_json_extension(const std::string& path) {
    return path.size() > 5 && lower(path.substr(path.size() - 5)) == ".json";
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
    }
    return j;
}

Trade trade_from_fields(const std::string& file, long line, const std::string& id,
                        const std::string& type, double notional, double maturity,
                        const std::string& fixed_rate, long fixed_tenor, long float_tenor,
                        const std::string& set_id) {
    Trade t;
    t.id = id;
    const std::string ty = lower(type);
    if (ty == "payer" || ty == "payer-swap")
        t.type = TradeType::PayerSwap;
    else if (ty == "receiver" || ty == "receiver-swap")
        t.type = TradeType::ReceiverSwap;
    else
        throw ParseError(file, line, "unknown trade type '" + type + "'");
    if (!(notional > 0.0)) throw ParseError(file, line, "notional must be positive");
    t.notional = notional;
    if (!(maturity > 0.0)) throw ParseError(file, line, "maturity must be positive");
    t.maturity_years = maturity;
    if (lower(fixed_rate) != "par") t.fixed_rate = parse_double(file, line, "fixed_rate", fixed_rate);
    if (fixed_tenor < 1 || float_tenor < 1)
        throw ParseError(file, line, "coupon tenors must be positive months");
    t.fixed_tenor_months = static_cast<int>(fixed_tenor);
    t.float_tenor_months = static_cast<int>(float_tenor);
    t.netting_set_id = set_id;
    return t;
}

const std::vector<std::string> kPortfolioColumns = {
    "id",           "type",        "notional",     "maturity_years",
    "fixed_rate",   "fixed_tenor_months", "float_tenor_months", "netting_set",
    "counterparty", "vm_threshold", "im_received",  "im_posted"};

Portfolio portfolio_from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Portfolio out;
    std::string line;
    long line_no = 0;
    std::map<std::string, std::size_t> col;
    std::map<std::string, std::size_t> set_index;
    std::map<std::string, long> seen_trade_line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto fields = split_csv(stripped);
        if (col.empty()) {
            for (std::size_t i = 0; i < fields.size(); ++i) col[lower(fields[i])] = i;
            for (const auto& name : kPortfolioColumns)
                if (!col.count(name))
                    throw ParseError(path, line_no, "missing column '" + name + "'");
            continue;
        }
        if (fields.size() != col.size())
            throw ParseError(path, line_no, "expected " + std::to_string(col.size()) +
                                                " fields, found " + std::to_string(fields.size()));
        auto f = [&](const std::string& name) { return fields[col.at(name)]; };
        const std::string id = f("id");
        if (seen_trade_line.count(id))
            throw ParseError(path, line_no, "duplicate trade id '" + id + "' (first seen at line " +
                                                std::to_string(seen_trade_line[id]) + ")");
        seen_trade_line[id] = line_no;
        Trade t = trade_from_fields(path, line_no, id, f("type"),
                                    parse_double(path, line_no, "notional", f("notional")),
                                    parse_double(path, line_no, "maturity_years", f("maturity_years")),
                                    f("fixed_rate"),
                                    parse_long(path, line_no, "fixed_tenor_months", f("fixed_tenor_months")),
                                    parse_long(path, line_no, "float_tenor_months", f("float_tenor_months")),
                                    f("netting_set"));
        MarginSpec margin;
        margin.vm_threshold = parse_vm_threshold(path, line_no, f("vm_threshold"));
        margin.im_received = parse_im_spec(path, line_no, f("im_received"));
        margin.im_posted = parse_im_spec(path, line_no, f("im_posted"));
        const std::string set_id = f("netting_set");
        const std::string counterparty = f("counterparty");
        auto it = set_index.find(set_id);
        if (it == set_index.end()) {
            NettingSet set;
            set.id = set_id;
            set.counterparty_id = counterparty;
            set.margin = margin;
            set_index[set_id] = out.sets.size();
            out.sets.push_back(std::move(set));
            it = set_index.find(set_id);
        } else {
            const NettingSet& existing = out.sets[it->second];
            if (existing.counterparty_id != counterparty)
                throw ParseError(path, line_no, "netting set '" + set_id +
                                                    "' listed with two counterparties");
            if (existing.margin.vm_threshold != margin.vm_threshold ||
                im_spec_to_string(existing.margin.im_received) != im_spec_to_string(margin.im_received) ||
                im_spec_to_string(existing.margin.im_posted) != im_spec_to_string(margin.im_posted))
                throw ParseError(path, line_no,
                                 "netting set '" + set_id + "' listed with two margin specs");
        }
        out.sets[it->second].trades.push_back(std::move(t));
    }
    return out;
}

Portfolio portfolio_from_json(const std::string& path) {
    const json j = read_json_file(path);
    Portfolio out;
    std::map<std::string, std::size_t> set_index;
    if (j.contains("netting_sets")) {
        for (const auto& sj : j.at("netting_sets")) {
            NettingSet set;
            set.id = sj.at("id").get<std::string>();
            set.counterparty_id = sj.at("counterparty").get<std::string>();
            if (sj.contains("vm_threshold")) {
                if (sj["vm_threshold"].is_string())
                    set.margin.vm_threshold = parse_vm_threshold(path, 0, sj["vm_threshold"]);
                else
                    set.margin.vm_threshold = sj["vm_threshold"].get<double>();
            }
            if (sj.contains("im_received"))
                set.margin.im_received = parse_im_spec(path, 0, sj["im_received"]);
            if (sj.contains("im_posted"))
                set.margin.im_posted = parse_im_spec(path, 0, sj["im_posted"]);
            if (set_index.count(set.id)) throw ParseError(path, 0, "duplicate netting set " + set.id);
            set_index[set.id] = out.sets.size();
            out.sets.push_back(std::move(set));
        }
    }
    std::map<std::string, bool> seen;
    for (const auto& tj : j.value("trades", json::array())) {
        const std::string set_id = tj.at("netting_set").get<std::string>();
        auto it = set_index.find(set_id);
        if (it == set_index.end())
            throw ParseError(path, 0, "trade references unknown netting set '" + set_id + "'");
        std::string fixed = "par";
        if (tj.contains("fixed_rate") && !tj["fixed_rate"].is_string())
            fixed = format_number(tj["fixed_rate"].get<double>());
        else if (tj.contains("fixed_rate"))
            fixed = tj["fixed_rate"].get<std::string>();
        Trade t = trade_from_fields(path, 0, tj.at("id").get<std::string>(),
                                    tj.at("type").get<std::string>(),
                                    tj.at("notional").get<double>(),
                                    tj.at("maturity_years").get<double>(), fixed,
                                    tj.value("fixed_tenor_months", 6),
                                    tj.value("float_tenor_months", 3), set_id);
        if (seen.count(t.id)) throw ParseError(path, 0, "duplicate trade id '" + t.id + "'");
        seen[t.id] = true;
        out.sets[it->second].trades.push_back(std::move(t));
    }
    return out;
}

}  // namespace

Portfolio load_portfolio(const std::string& path) {
    if (!fs::exists(path)) throw IoError("portfolio file does not exist: " + path);
    return has_json_extension(path) ? portfolio_from_json(path) : portfolio_from_csv(path);
}

void save_portfolio(const Portfolio& portfolio, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    for (std::size_t i = 0; i < kPortfolioColumns.size(); ++i)
        out << (i ? "," : "") << kPortfolioColumns[i];
    out << "\n";
    for (const auto& set : portfolio.sets) {
        for (const auto& t : set.trades) {
            out << t.id << "," << (t.type == TradeType::PayerSwap ? "payer" : "receiver") << ","
                << format_number(t.notional) << "," << format_number(t.maturity_years) << ","
                << (t.fixed_rate ? format_number(*t.fixed_rate) : std::string("par")) << ","
                << t.fixed_tenor_months << "," << t.float_tenor_months << "," << set.id << ","
                << set.counterparty_id << ","
                << (std::isinf(set.margin.vm_threshold) ? std::string("inf")
                                                        : format_number(set.margin.vm_threshold))
                << "," << im_spec_to_string(set.margin.im_received) << ","
                << im_spec_to_string(set.margin.im_posted) << "\n";
        }
    }
    if (!out) throw IoError("failed writing " + path);
}

CreditSetup load_credit(const std::string& path) {
    if (!fs::exists(path)) throw IoError("credit file does not exist: " + path);
    CreditSetup setup;
    bool bank_seen = false;
    auto add_entity = [&](const std::string& name, CreditCurve curve) {
        curve.bootstrap();
        if (lower(name) == "bank") {
            if (bank_seen) throw ConfigError(path + ": bank curve listed twice");
            setup.bank_curve = std::move(curve);
            bank_seen = true;
        } else {
            setup.counterparty_names.push_back(name);
            setup.counterparty_curves.push_back(std::move(curve));
        }
    };
    if (has_json_extension(path)) {
        const json j = read_json_file(path);
        for (const auto& ej : j.at("entities")) {
            CreditCurve curve;
            curve.recovery = ej.at("recovery").get<double>();
            curve.tenors = ej.at("tenors").get<std::vector<double>>();
            curve.spreads_bps = ej.at("spreads_bps").get<std::vector<double>>();
            add_entity(ej.at("name").get<std::string>(), std::move(curve));
        }
    } else {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        std::string line;
        long line_no = 0;
        std::vector<double> tenors;
        while (std::getline(in, line)) {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped[0] == '#') continue;
            const auto fields = split_csv(stripped);
            if (tenors.empty()) {
                if (fields.size() < 3 || lower(fields[0]) != "entity" || lower(fields[1]) != "recovery")
                    throw ParseError(path, line_no, "header must be entity,recovery,<tenors...>");
                double prev = 0.0;
                for (std::size_t i = 2; i < fields.size(); ++i) {
                    const double tenor = parse_tenor(path, line_no, fields[i]);
                    if (!(tenor > prev))
                        throw ParseError(path, line_no, "tenors must be strictly increasing");
                    tenors.push_back(tenor);
                    prev = tenor;
                }
                continue;
            }
            if (fields.size() != tenors.size() + 2)
                throw ParseError(path, line_no, "expected " + std::to_string(tenors.size() + 2) +
                                                    " fields, found " + std::to_string(fields.size()));
            CreditCurve curve;
            curve.recovery = parse_double(path, line_no, "recovery", fields[1]);
            if (!(curve.recovery >= 0.0 && curve.recovery < 1.0))
                throw ParseError(path, line_no, "recovery must lie in [0,1)");
            curve.tenors = tenors;
            for (std::size_t i = 2; i < fields.size(); ++i) {
                const double v = parse_double(path, line_no, "spread", fields[i]);
                if (v < 0.0) throw ParseError(path, line_no, "spreads must be >= 0");
                curve.spreads_bps.push_back(v);
            }
            add_entity(fields[0], std::move(curve));
        }
    }
    if (!bank_seen) throw ParseError(path, 0, "missing bank curve (entity named 'Bank')");
    return setup;
}

void save_credit(const CreditSetup& credit, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    const auto& tenors = credit.bank_curve.tenors;
    out << "entity,recovery";
    for (double t : tenors) {
        const double months = t * 12.0;
        if (t < 1.0)
            out << "," << format_number(months) << "M";
        else
            out << "," << format_number(t) << "Y";
    }
    out << "\n";
    auto row = [&](const std::string& name, const CreditCurve& c) {
        if (c.tenors != tenors)
            throw IoError("save_credit: all curves must share the bank curve's tenors");
        out << name << "," << format_number(c.recovery);
        for (double s : c.spreads_bps) out << "," << format_number(s);
        out << "\n";
    };
    for (std::size_t i = 0; i < credit.counterparty_names.size(); ++i)
        row(credit.counterparty_names[i], credit.counterparty_curves[i]);
    row("Bank", credit.bank_curve);
    if (!out) throw IoError("failed writing " + path);
}

std::string RunConfig::resolve(const std::string& path) const {
    if (path.empty() || fs::path(path).is_absolute() || config_dir.empty()) return path;
    return (fs::path(config_dir) / path).string();
}

RunConfig load_config(const std::string& path) {
    const json j = read_json_file(path);
    RunConfig cfg;
    cfg.config_dir = fs::path(path).parent_path().string();
    try {
        cfg.portfolio_file = j.at("portfolio").get<std::string>();
        cfg.credit_file = j.at("credit").get<std::string>();
        cfg.output_dir = j.value("output_dir", cfg.output_dir);

        const json& mj = j.at("model");
        cfg.model.r0 = mj.at("r0").get<double>();
        cfg.model.mean_reversion = mj.value("mean_reversion", 0.0);
        cfg.model.rate_vol = mj.value("rate_vol", 0.0);
        cfg.model.long_term_rate = mj.value("long_term_rate", cfg.model.r0);
        cfg.model.hist_drift_shift = mj.value("hist_drift_shift", 0.0);
        if (mj.contains("correlation")) {
            const json& cj = mj["correlation"];
            if (cj.contains("uniform"))
                cfg.uniform_correlation = cj["uniform"].get<double>();
            else if (cj.contains("matrix"))
                cfg.model.correlation = cj["matrix"].get<std::vector<std::vector<double>>>();
        }

        const json& gj = j.at("grid");
        cfg.horizon_years = gj.at("horizon_years").get<double>();
        cfg.step_years = gj.at("step_years").get<double>();

        const json& pj = j.at("paths");
        cfg.engine.primary_paths = pj.at("primary").get<std::size_t>();
        cfg.engine.secondary_paths = pj.at("secondary").get<std::size_t>();

        cfg.engine.seed = j.value("seed", 1ull);
        cfg.engine.hurdle = j.value("hurdle", 0.105);
        cfg.engine.alpha = j.value("alpha", 0.025);
        if (j.contains("tolerances")) {
            cfg.engine.picard_tol = j["tolerances"].value("picard_tol", 1e-8);
            cfg.engine.max_iter = j["tolerances"].value("max_iter", 200);
        }
        cfg.engine.batches = j.value("batches", std::size_t{20});
        cfg.engine.es_min_survivors = j.value("es_min_survivors", std::size_t{200});
        cfg.engine.es_anchor_stride_years = j.value("es_anchor_stride_years", 0.0);
        cfg.engine.loop_passes = j.value("loop_passes", 1);
        cfg.engine.threads = j.value("threads", 0);
        cfg.engine.accrued_loss_y = j.value("accrued_loss_y", 0.0);

        cfg.exposure.gap_shock = j.value("gap_shock", 0.0);
        cfg.exposure.im_horizon = j.value("im_horizon_years", 10.0 / 250.0);
        cfg.exposure.ftddva_posted_im = j.value("ftddva_posted_im", true);

        cfg.im_funding_mode = j.value("im_funding_mode", std::string("unsecured"));
        if (cfg.im_funding_mode != "unsecured" && cfg.im_funding_mode != "specialist-blended")
            throw ConfigError("im_funding_mode must be 'unsecured' or 'specialist-blended'");
        if (j.contains("lambda_override")) cfg.lambda_override = j["lambda_override"].get<double>();
        if (j.contains("lambda_bar_override"))
            cfg.lambda_bar_override = j["lambda_bar_override"].get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"portfolio\": \"" << json_escape(cfg.portfolio_file) << "\",\n";
    out << "  \"credit\": \"" << json_escape(cfg.credit_file) << "\",\n";
    out << "  \"output_dir\": \"" << json_escape(cfg.output_dir) << "\",\n";
    out << "  \"model\": {\"r0\": " << format_number(cfg.model.r0)
        << ", \"mean_reversion\": " << format_number(cfg.model.mean_reversion)
        << ", \"rate_vol\": " << format_number(cfg.model.rate_vol)
        << ", \"long_term_rate\": " << format_number(cfg.model.long_term_rate)
        << ", \"hist_drift_shift\": " << format_number(cfg.model.hist_drift_shift);
    if (cfg.uniform_correlation) {
        out << ", \"correlation\": {\"uniform\": " << format_number(*cfg.uniform_correlation) << "}";
    } else if (!cfg.model.correlation.empty()) {
        out << ", \"correlation\": {\"matrix\": [";
        for (std::size_t i = 0; i < cfg.model.correlation.size(); ++i) {
            out << (i ? ", [" : "[");
            for (std::size_t k = 0; k < cfg.model.correlation[i].size(); ++k)
                out << (k ? ", " : "") << format_number(cfg.model.correlation[i][k]);
            out << "]";
        }
        out << "]}";
    }
    out << "},\n";
    out << "  \"grid\": {\"horizon_years\": " << format_number(cfg.horizon_years)
        << ", \"step_years\": " << format_number(cfg.step_years) << "},\n";
    out << "  \"paths\": {\"primary\": " << cfg.engine.primary_paths
        << ", \"secondary\": " << cfg.engine.secondary_paths << "},\n";
    out << "  \"seed\": " << cfg.engine.seed << ",\n";
    out << "  \"hurdle\": " << format_number(cfg.engine.hurdle) << ",\n";
    out << "  \"alpha\": " << format_number(cfg.engine.alpha) << ",\n";
    out << "  \"tolerances\": {\"picard_tol\": " << format_number(cfg.engine.picard_tol)
        << ", \"max_iter\": " << cfg.engine.max_iter << "},\n";
    out << "  \"batches\": " << cfg.engine.batches << ",\n";
    out << "  \"es_min_survivors\": " << cfg.engine.es_min_survivors << ",\n";
    out << "  \"es_anchor_stride_years\": " << format_number(cfg.engine.es_anchor_stride_years)
        << ",\n";
    out << "  \"loop_passes\": " << cfg.engine.loop_passes << ",\n";
    out << "  \"threads\": " << cfg.engine.threads << ",\n";
    out << "  \"accrued_loss_y\": " << format_number(cfg.engine.accrued_loss_y) << ",\n";
    out << "  \"gap_shock\": " << format_number(cfg.exposure.gap_shock) << ",\n";
    out << "  \"im_horizon_years\": " << format_number(cfg.exposure.im_horizon) << ",\n";
    out << "  \"ftddva_posted_im\": " << (cfg.exposure.ftddva_posted_im ? "true" : "false") << ",\n";
    out << "  \"im_funding_mode\": \"" << json_escape(cfg.im_funding_mode) << "\"";
    if (cfg.lambda_override)
        out << ",\n  \"lambda_override\": " << format_number(*cfg.lambda_override);
    if (cfg.lambda_bar_override)
        out << ",\n  \"lambda_bar_override\": " << format_number(*cfg.lambda_bar_override);
    out << "\n}\n";
    return out.str();
}

LoadedInputs load_inputs(const RunConfig& cfg) {
    LoadedInputs out;
    out.portfolio = load_portfolio(cfg.resolve(cfg.portfolio_file));
    out.credit = load_credit(cfg.resolve(cfg.credit_file));
    out.credit.im_mode = (cfg.im_funding_mode == "specialist-blended") ? ImFundingMode::Blended
                                                                       : ImFundingMode::Unsecured;
    out.credit.lambda_override = cfg.lambda_override;
    out.credit.lambda_bar_override = cfg.lambda_bar_override;
    out.params = cfg.model;
    if (cfg.uniform_correlation) {
        const std::size_t n = out.credit.entity_count();
        const double rho = *cfg.uniform_correlation;
        out.params.correlation.assign(n, std::vector<double>(n, rho));
        for (std::size_t i = 0; i < n; ++i) out.params.correlation[i][i] = 1.0;
    }
    out.grid = TimeGrid::regular(cfg.horizon_years, cfg.step_years);
    out.portfolio.validate(out.credit, out.grid);
    return out;
}

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("failed writing " + path);
}

std::string estimate_json(const EstimateWithSe& e) {
    return "{\"value\": " + format_number(e.value) + ", \"se\": " + format_number(e.se) + "}";
}

std::string curve_json(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_number(v[i]);
    }
    out += "]";
    return out;
}

}  // namespace

void emit_report(const XVAReport& report, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());

    // xva.json: stable key order, 15 significant digits, no volatile fields.
    {
        std::ostringstream out;
        out << "{\n";
        out << "  \"ucva0\": " << estimate_json(report.ucva0) << ",\n";
        out << "  \"ftdcva0\": " << estimate_json(report.ftdcva0) << ",\n";
        out << "  \"ftddva0\": " << estimate_json(report.ftddva0) << ",\n";
        out << "  \"mva0\": " << estimate_json(report.mva0) << ",\n";
        out << "  \"fva_star0\": " << estimate_json(report.fva_star0) << ",\n";
        out << "  \"fva0\": " << estimate_json(report.fva0) << ",\n";
        out << "  \"kva0\": {\"value\": " << format_number(report.kva0) << ", \"se\": null},\n";
        out << "  \"trc0\": " << format_number(report.trc0) << ",\n";
        if (report.incremental) {
            const auto& i = *report.incremental;
            out << "  \"ftp\": {\"delta_ftdcva\": " << format_number(i.delta_ftdcva)
                << ", \"delta_ftddva\": " << format_number(i.delta_ftddva)
                << ", \"delta_ucva\": " << format_number(i.delta_ucva)
                << ", \"delta_fva\": " << format_number(i.delta_fva)
                << ", \"delta_mva\": " << format_number(i.delta_mva)
                << ", \"delta_kva\": " << format_number(i.delta_kva)
                << ", \"delta_trc\": " << format_number(i.delta_trc)
                << ", \"ftp\": " << format_number(i.ftp) << "},\n";
        } else {
            out << "  \"ftp\": null,\n";
        }
        out << "  \"martingale_check\": {\"mean_loss_tbar\": "
            << format_number(report.loss_mean_tbar.value)
            << ", \"se\": " << format_number(report.loss_mean_tbar.se) << "},\n";
        out << "  \"term_structures\": {\n";
        out << "    \"t\": " << curve_json(report.es_star.grid.times()) << ",\n";
        out << "    \"es_star\": " << curve_json(report.es_star.values) << ",\n";
        out << "    \"kva\": " << curve_json(report.kva_curve.values) << ",\n";
        out << "    \"ec\": " << curve_json(report.ec_curve.values) << ",\n";
        out << "    \"blended_lambda\": " << curve_json(report.blended_lambda.values) << "\n";
        out << "  },\n";
        out << "  \"warnings\": [";
        for (std::size_t i = 0; i < report.warnings.size(); ++i)
            out << (i ? ", " : "") << "\"" << json_escape(report.warnings[i]) << "\"";
        out << "]\n";
        out << "}\n";
        write_file((fs::path(dir) / "xva.json").string(), out.str());
    }

    // xva.csv: one row per metric.
    {
        std::ostringstream out;
        out << "metric,value,se\n";
        auto row = [&](const std::string& name, const EstimateWithSe& e) {
            out << name << "," << format_number(e.value) << "," << format_number(e.se) << "\n";
        };
        row("ucva0", report.ucva0);
        row("ftdcva0", report.ftdcva0);
        row("ftddva0", report.ftddva0);
        row("mva0", report.mva0);
        row("fva_star0", report.fva_star0);
        row("fva0", report.fva0);
        out << "kva0," << format_number(report.kva0) << ",\n";
        out << "trc0," << format_number(report.trc0) << ",\n";
        write_file((fs::path(dir) / "xva.csv").string(), out.str());
    }

    // term_structures.csv for plotting.
    {
        std::ostringstream out;
        out << "t,es_star,kva,ec,blended_lambda\n";
        for (std::size_t k = 0; k < report.es_star.size(); ++k) {
            out << format_number(report.es_star.grid[k]) << "," << format_number(report.es_star[k])
                << "," << format_number(report.kva_curve[k]) << ","
                << format_number(report.ec_curve[k]) << ","
                << format_number(report.blended_lambda[k]) << "\n";
        }
        write_file((fs::path(dir) / "term_structures.csv").string(), out.str());
    }

    // run_meta.json: counts, seed, timings (wall-clock, not deterministic).
    {
        std::ostringstream out;
        out << "{\n";
        out << "  \"seed\": " << report.seed << ",\n";
        out << "  \"primary_paths\": " << report.primary_paths << ",\n";
        out << "  \"secondary_paths\": " << report.secondary_paths << ",\n";
        out << "  \"threads\": " << report.threads << ",\n";
        out << "  \"timings_ms\": {";
        for (std::size_t i = 0; i < report.timings_ms.size(); ++i) {
            if (i) out << ", ";
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", report.timings_ms[i].second);
            out << "\"" << json_escape(report.timings_ms[i].first) << "\": " << buf;
        }
        out << "},\n";
        out << "  \"warnings\": [";
        for (std::size_t i = 0; i < report.warnings.size(); ++i)
            out << (i ? ", " : "") << "\"" << json_escape(report.warnings[i]) << "\"";
        out << "]\n";
        out << "}\n";
        write_file((fs::path(dir) / "run_meta.json").string(), out.str());
    }

    if (report.incremental) {
        const auto& i = *report.incremental;
        std::ostringstream out;
        out << "metric,value\n";
        out << "delta_ftdcva," << format_number(i.delta_ftdcva) << "\n";
        out << "delta_ftddva," << format_number(i.delta_ftddva) << "\n";
        out << "delta_ucva," << format_number(i.delta_ucva) << "\n";
        out << "delta_fva," << format_number(i.delta_fva) << "\n";
        out << "delta_mva," << format_number(i.delta_mva) << "\n";
        out << "delta_kva," << format_number(i.delta_kva) << "\n";
        out << "delta_trc," << format_number(i.delta_trc) << "\n";
        out << "ftp," << format_number(i.ftp) << "\n";
        write_file((fs::path(dir) / "ftp.csv").string(), out.str());
    }
}

}  // namespace xva
