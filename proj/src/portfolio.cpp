#include "xva/portfolio.hpp"

#include <set>

namespace xva {

void Portfolio::validate(const CreditSetup& credit, const TimeGrid& grid) const {
    std::set<std::string> trade_ids;
    std::set<std::string> set_ids;
    for (const auto& s : sets) {
        if (!set_ids.insert(s.id).second)
            throw ConfigError("portfolio: duplicate netting set id '" + s.id + "'");
        credit.counterparty_index(s.counterparty_id);  // throws when unknown
        if (!(s.margin.vm_threshold >= 0.0))
            throw ConfigError("netting set " + s.id + ": vm_threshold must be >= 0");
        for (const ImSpec* im : {&s.margin.im_received, &s.margin.im_posted}) {
            if (im->model == ImModel::Fixed && !(im->amount >= 0.0))
                throw ConfigError("netting set " + s.id + ": fixed IM must be >= 0");
            if (im->model == ImModel::Quantile && !(im->alpha > 0.0 && im->alpha < 1.0))
                throw ConfigError("netting set " + s.id + ": IM quantile level must be in (0,1)");
        }
        for (const auto& t : s.trades) {
            if (!trade_ids.insert(t.id).second)
                throw ConfigError("portfolio: duplicate trade id '" + t.id + "'");
            if (!(t.notional > 0.0))
                throw ConfigError("trade " + t.id + ": notional must be positive");
            if (!(t.maturity_years > 0.0) || t.maturity_years > grid.horizon() + 1e-9)
                throw ConfigError("trade " + t.id + ": maturity must lie in (0, horizon]");
            if (t.netting_set_id != s.id)
                throw ConfigError("trade " + t.id + ": netting_set_id does not match its set");
        }
    }
}

Portfolio with_trades_added(const Portfolio& base, const Portfolio& addition) {
    Portfolio out = base;
    for (const auto& add_set : addition.sets) {
        NettingSet* target = nullptr;
        for (auto& s : out.sets)
            if (s.id == add_set.id) target = &s;
        if (target == nullptr) {
            out.sets.push_back(add_set);
            continue;
        }
        if (target->counterparty_id != add_set.counterparty_id)
            throw ConfigError("added trades: netting set '" + add_set.id +
                              "' counterparty differs from the existing set");
        for (const auto& t : add_set.trades) target->trades.push_back(t);
    }
    return out;
}

}  // namespace xva
