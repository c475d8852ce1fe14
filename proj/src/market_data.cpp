#include "fxip/market_data.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fxip/math/normal.hpp"

namespace fxip {

Currency::Currency(std::string code) : code_(std::move(code)) {
    if (code_.size() != 3)
        throw market_error("currency code must have exactly 3 letters: '" + code_ + "'");
    for (char c : code_)
        if (!std::isupper(static_cast<unsigned char>(c)))
            throw market_error("currency code must be uppercase alphabetic: '" + code_ + "'");
}

double PairQuote::vol(SmileTag tag) const {
    switch (tag) {
        case SmileTag::Put25: return vol_put25;
        case SmileTag::Atm: return vol_atm;
        case SmileTag::Call25: return vol_call25;
    }
    throw market_error("unknown smile tag");
}

void PairQuote::validate() const {
    if (base == quote_ccy)
        throw market_error("pair " + base.code() + "/" + quote_ccy.code() +
                           ": base and quote currency must differ");
    if (!(spot > 0.0)) throw market_error("spot must be positive");
    if (!(maturity > 0.0)) throw market_error("maturity must be positive");
    if (!(vol_put25 > 0.0 && vol_atm > 0.0 && vol_call25 > 0.0))
        throw market_error("implied vols must be positive");
}

void MarketSnapshot::validate() const {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        pairs[i].validate();
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            const auto& a = pairs[i];
            const auto& b = pairs[j];
            if (a.base == b.base && a.quote_ccy == b.quote_ccy)
                throw market_error("duplicate pair " + a.base.code() + "/" + a.quote_ccy.code());
            if (a.base == b.quote_ccy && a.quote_ccy == b.base) {
                const double prod = a.spot * b.spot;
                if (std::fabs(prod - 1.0) > 1e-10)
                    throw market_error("inconsistent spots for " + a.base.code() + "/" +
                                       a.quote_ccy.code() + " and its inverse");
            }
        }
    }
}

PairQuote MarketSnapshot::find_pair(const Currency& base, const Currency& quote) const {
    for (const auto& p : pairs)
        if (p.base == base && p.quote_ccy == quote) return p;
    for (const auto& p : pairs)
        if (p.base == quote && p.quote_ccy == base) return invert_pair(p);
    throw market_error("pair " + base.code() + "/" + quote.code() + " not found in snapshot");
}

double forward_rate(const PairQuote& q) {
    return q.spot * std::exp((q.r_quote - q.r_base) * q.maturity);
}

double strike_from_delta(const PairQuote& q, SmileTag tag, AtmConvention atm) {
    const double f = forward_rate(q);
    const double sigma = q.vol(tag);
    const double t = q.maturity;
    const double half_var = 0.5 * sigma * sigma * t;
    switch (tag) {
        case SmileTag::Atm:
            return atm == AtmConvention::Forward ? f : f * std::exp(half_var);
        case SmileTag::Call25:
            return f * std::exp(-sigma * std::sqrt(t) * math::normal_ppf(0.25) + half_var);
        case SmileTag::Put25:
            return f * std::exp(sigma * std::sqrt(t) * math::normal_ppf(0.25) + half_var);
    }
    throw market_error("unknown smile tag");
}

PairQuote invert_pair(const PairQuote& q) {
    PairQuote r;
    r.base = q.quote_ccy;
    r.quote_ccy = q.base;
    r.spot = 1.0 / q.spot;
    r.maturity = q.maturity;
    r.r_base = q.r_quote;
    r.r_quote = q.r_base;
    r.vol_put25 = q.vol_call25;
    r.vol_atm = q.vol_atm;
    r.vol_call25 = q.vol_put25;
    return r;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json quote_to_json(const PairQuote& q) {
    return ordered_json{{"base", q.base.code()},
                        {"quote", q.quote_ccy.code()},
                        {"spot", q.spot},
                        {"T", q.maturity},
                        {"r_base", q.r_base},
                        {"r_quote", q.r_quote},
                        {"smile", ordered_json{{"put25", q.vol_put25},
                                               {"atm", q.vol_atm},
                                               {"call25", q.vol_call25}}}};
}

PairQuote quote_from_json(const ordered_json& j) {
    PairQuote q;
    q.base = Currency(j.at("base").get<std::string>());
    q.quote_ccy = Currency(j.at("quote").get<std::string>());
    q.spot = j.at("spot").get<double>();
    q.maturity = j.at("T").get<double>();
    q.r_base = j.at("r_base").get<double>();
    q.r_quote = j.at("r_quote").get<double>();
    const auto& s = j.at("smile");
    q.vol_put25 = s.at("put25").get<double>();
    q.vol_atm = s.at("atm").get<double>();
    q.vol_call25 = s.at("call25").get<double>();
    return q;
}

} // namespace

MarketSnapshot parse_snapshot(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw market_error(std::string("snapshot parse error: ") + e.what());
    }
    MarketSnapshot snap;
    try {
        snap.asof = j.at("asof").get<std::string>();
        for (const auto& p : j.at("pairs")) snap.pairs.push_back(quote_from_json(p));
    } catch (const nlohmann::json::exception& e) {
        throw market_error(std::string("snapshot schema error: ") + e.what());
    }
    snap.validate();
    return snap;
}

std::string serialize_snapshot(const MarketSnapshot& snap) {
    ordered_json j;
    j["asof"] = snap.asof;
    j["pairs"] = ordered_json::array();
    for (const auto& q : snap.pairs) j["pairs"].push_back(quote_to_json(q));
    return j.dump(2) + "\n";
}

MarketSnapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw market_error("cannot open snapshot file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_snapshot(buf.str());
}

void save_snapshot(const MarketSnapshot& snap, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw market_error("cannot write snapshot file: " + path);
    out << serialize_snapshot(snap);
}

} // namespace fxip
