#ifndef XVA_PORTFOLIO_HPP
#define XVA_PORTFOLIO_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "xva/credit.hpp"
#include "xva/errors.hpp"
#include "xva/grid.hpp"

namespace xva {

enum class TradeType { PayerSwap, ReceiverSwap };

struct Trade {
    std::string id;
    TradeType type = TradeType::PayerSwap;
    double notional = 0.0;
    double maturity_years = 0.0;
    std::optional<double> fixed_rate;  // empty = par at inception
    int fixed_tenor_months = 6;
    int float_tenor_months = 3;
    std::string netting_set_id;
};

enum class ImModel { None, Fixed, Quantile };

struct ImSpec {
    ImModel model = ImModel::None;
    double amount = 0.0;  // fixed model
    double alpha = 0.99;  // quantile model confidence
};

struct MarginSpec {
    // Variation margin covers mark-to-market beyond the threshold; infinity
    // means uncollateralized, zero means full collateralization.
    double vm_threshold = std::numeric_limits<double>::infinity();
    ImSpec im_received;
    ImSpec im_posted;
};

struct NettingSet {
    std::string id;
    std::string counterparty_id;
    std::vector<Trade> trades;
    MarginSpec margin;

    double last_maturity() const {
        double m = 0.0;
        for (const auto& t : trades) m = std::max(m, t.maturity_years);
        return m;
    }
};

struct Portfolio {
    std::vector<NettingSet> sets;

    double last_maturity() const {
        double m = 0.0;
        for (const auto& s : sets) m = std::max(m, s.last_maturity());
        return m;
    }
    std::size_t trade_count() const {
        std::size_t n = 0;
        for (const auto& s : sets) n += s.trades.size();
        return n;
    }
    const NettingSet* find_set(const std::string& id) const {
        for (const auto& s : sets)
            if (s.id == id) return &s;
        return nullptr;
    }

    void validate(const CreditSetup& credit, const TimeGrid& grid) const;
};

// Deep-copied portfolio with `addition`'s trades merged in (new or existing sets).
Portfolio with_trades_added(const Portfolio& base, const Portfolio& addition);

}  // namespace xva

#endif
