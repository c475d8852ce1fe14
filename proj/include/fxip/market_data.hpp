#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace fxip {

/// Thrown for invalid market inputs and lookup failures.
class market_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Three-letter uppercase ISO-style currency code.
class Currency {
public:
    Currency() = default;
    explicit Currency(std::string code);

    const std::string& code() const { return code_; }
    friend bool operator==(const Currency& a, const Currency& b) = default;

private:
    std::string code_;
};

enum class SmileTag { Put25, Atm, Call25 };

/// ATM strike placement; see strike_from_delta.
enum class AtmConvention { Forward, DeltaNeutralStraddle };

/// One pair's spot, flat rates and three-point 25-delta smile.
/// spot is quoted as units of quote currency per 1 unit of base.
struct PairQuote {
    Currency base;
    Currency quote_ccy;
    double spot = 0.0;
    double maturity = 0.0;
    double r_base = 0.0;
    double r_quote = 0.0;
    double vol_put25 = 0.0;
    double vol_atm = 0.0;
    double vol_call25 = 0.0;

    double vol(SmileTag tag) const;
    void validate() const;
};

/// A dated set of pair quotes.
struct MarketSnapshot {
    std::string asof;
    std::vector<PairQuote> pairs;

    void validate() const;

    /// Finds base/quote, inverting a stored quote if only the reverse
    /// orientation is present.  Throws market_error when absent.
    PairQuote find_pair(const Currency& base, const Currency& quote) const;
};

/// Outright forward F = spot * exp((r_quote - r_base) * T).
double forward_rate(const PairQuote& q);

/// Strike for a smile tag.  Wings use the simple forward delta
/// (no premium adjustment):
///   Call25: K = F * exp(-sigma sqrt(T) q25 + sigma^2 T / 2)
///   Put25:  K = F * exp(+sigma sqrt(T) q25 + sigma^2 T / 2)
/// with q25 the normal quantile at 0.25.  ATM is delta-neutral straddle
/// K = F * exp(sigma^2 T / 2) by default; AtmConvention::Forward gives K = F.
double strike_from_delta(const PairQuote& q, SmileTag tag,
                         AtmConvention atm = AtmConvention::DeltaNeutralStraddle);

/// Same pair seen from the other side: spot inverted, rates swapped,
/// Put25/Call25 vols exchanged (a put on the pair is a call on the inverse).
PairQuote invert_pair(const PairQuote& q);

/// Canonical JSON snapshot format:
///   { "asof": "YYYY-MM-DD", "pairs": [ { "base": "GBP", "quote": "EUR",
///     "spot": 1.2935, "T": 1.0, "r_base": 0.0025, "r_quote": 0.0,
///     "smile": { "put25": 0.12435, "atm": 0.10945, "call25": 0.10345 } } ] }
/// Vols are decimals.  serialize(parse(s)) is byte-stable.
MarketSnapshot parse_snapshot(const std::string& json_text);
std::string serialize_snapshot(const MarketSnapshot& snap);
MarketSnapshot load_snapshot(const std::string& path);
void save_snapshot(const MarketSnapshot& snap, const std::string& path);

} // namespace fxip
