#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fxip/market_data.hpp"
#include "fxip/math/normal.hpp"

using namespace fxip;

namespace {

PairQuote gbp_eur() {
    PairQuote q;
    q.base = Currency("GBP");
    q.quote_ccy = Currency("EUR");
    q.spot = 1.2935;
    q.maturity = 1.0;
    q.r_base = 0.0025;
    q.r_quote = 0.0;
    q.vol_put25 = 0.12435;
    q.vol_atm = 0.10945;
    q.vol_call25 = 0.10345;
    return q;
}

PairQuote usd_eur() {
    PairQuote q;
    q.base = Currency("USD");
    q.quote_ccy = Currency("EUR");
    q.spot = 0.8968;
    q.maturity = 1.0;
    q.r_base = 0.0025;
    q.r_quote = 0.0;
    q.vol_put25 = 0.09005;
    q.vol_atm = 0.09250;
    q.vol_call25 = 0.10265;
    return q;
}

} // namespace

TEST_CASE("currency validation") {
    CHECK_NOTHROW(Currency("EUR"));
    CHECK_THROWS_AS(Currency("EU"), market_error);
    CHECK_THROWS_AS(Currency("eur"), market_error);
    CHECK_THROWS_AS(Currency("EUR1"), market_error);
}

TEST_CASE("forward rate") {
    // USD-EUR with r_eur = 0, r_usd = 0.0025: F = 0.8968 e^{-0.0025}
    auto q = usd_eur();
    CHECK(forward_rate(q) == doctest::Approx(0.8968 * std::exp(-0.0025)).epsilon(1e-15));
    CHECK(forward_rate(q) == doctest::Approx(0.89456).epsilon(1e-4));

    auto g = gbp_eur();
    CHECK(forward_rate(g) == doctest::Approx(1.2935 * std::exp(-0.0025)).epsilon(1e-15));

    // equal rates: forward equals spot
    g.r_quote = g.r_base = 0.01;
    CHECK(forward_rate(g) == doctest::Approx(g.spot).epsilon(1e-15));
}

TEST_CASE("strikes from delta") {
    const auto q = usd_eur();
    const double f = forward_rate(q);

    // ATM-forward convention puts the strike on the forward
    CHECK(strike_from_delta(q, SmileTag::Atm, AtmConvention::Forward) ==
          doctest::Approx(f).epsilon(1e-15));
    // default delta-neutral straddle
    CHECK(strike_from_delta(q, SmileTag::Atm) ==
          doctest::Approx(f * std::exp(0.5 * q.vol_atm * q.vol_atm)).epsilon(1e-15));

    const double q25 = math::normal_ppf(0.25);  // about -0.674489750
    const double sc = q.vol_call25;
    CHECK(strike_from_delta(q, SmileTag::Call25) ==
          doctest::Approx(f * std::exp(-sc * q25 + 0.5 * sc * sc)).epsilon(1e-15));

    // wings bracket the ATM strike
    const double kp = strike_from_delta(q, SmileTag::Put25);
    const double ka = strike_from_delta(q, SmileTag::Atm);
    const double kc = strike_from_delta(q, SmileTag::Call25);
    CHECK(kp < ka);
    CHECK(ka < kc);

    // call strike grows with the call vol
    auto hi = q;
    hi.vol_call25 += 0.02;
    CHECK(strike_from_delta(hi, SmileTag::Call25) > kc);
}

TEST_CASE("invert pair") {
    const auto q = gbp_eur();
    const auto r = invert_pair(q);
    CHECK(r.base.code() == "EUR");
    CHECK(r.quote_ccy.code() == "GBP");
    CHECK(r.spot == doctest::Approx(1.0 / 1.2935).epsilon(1e-15));
    CHECK(r.r_base == q.r_quote);
    // Table 1 GBP-EUR smile swaps the 25-delta tags
    CHECK(r.vol_put25 == doctest::Approx(0.10345));
    CHECK(r.vol_atm == doctest::Approx(0.10945));
    CHECK(r.vol_call25 == doctest::Approx(0.12435));

    const auto rr = invert_pair(r);
    CHECK(rr.spot == doctest::Approx(q.spot).epsilon(1e-15));
    CHECK(rr.vol_put25 == q.vol_put25);
    CHECK(rr.vol_call25 == q.vol_call25);

    // forward product identity
    CHECK(forward_rate(q) * forward_rate(r) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("snapshot validation") {
    MarketSnapshot snap;
    snap.asof = "2016-06-03";
    snap.pairs = {gbp_eur(), usd_eur()};
    CHECK_NOTHROW(snap.validate());

    snap.pairs.push_back(gbp_eur());
    CHECK_THROWS_AS(snap.validate(), market_error);

    snap.pairs.pop_back();
    auto inv = invert_pair(gbp_eur());
    inv.spot *= 1.0 + 1e-6;    // breaks the spot reciprocity
    snap.pairs.push_back(inv);
    CHECK_THROWS_AS(snap.validate(), market_error);
}

TEST_CASE("find pair orients quotes on demand") {
    MarketSnapshot snap;
    snap.asof = "2016-06-03";
    snap.pairs = {gbp_eur()};
    const auto direct = snap.find_pair(Currency("GBP"), Currency("EUR"));
    CHECK(direct.spot == doctest::Approx(1.2935));
    const auto inverse = snap.find_pair(Currency("EUR"), Currency("GBP"));
    CHECK(inverse.spot == doctest::Approx(1.0 / 1.2935));
    CHECK_THROWS_AS(snap.find_pair(Currency("EUR"), Currency("JPY")), market_error);
}

TEST_CASE("snapshot json round-trips byte exactly") {
    MarketSnapshot snap;
    snap.asof = "2016-06-03";
    snap.pairs = {gbp_eur(), usd_eur()};
    const std::string once = serialize_snapshot(snap);
    const MarketSnapshot back = parse_snapshot(once);
    CHECK(back.pairs.size() == 2);
    CHECK(back.pairs[0].spot == snap.pairs[0].spot);
    CHECK(back.pairs[1].vol_call25 == snap.pairs[1].vol_call25);
    CHECK(serialize_snapshot(back) == once);

    CHECK_THROWS_AS(parse_snapshot("{not json"), market_error);
    CHECK_THROWS_AS(parse_snapshot("{\"asof\": \"x\"}"), market_error);
}

TEST_CASE("table 1 snapshot loads from the repository data file") {
    const auto snap = load_snapshot(std::string(FXIP_SOURCE_DIR) + "/data/table1_market.json");
    CHECK(snap.pairs.size() == 3);
    const auto cross = snap.find_pair(Currency("GBP"), Currency("USD"));
    CHECK(cross.spot == doctest::Approx(1.4423));
    CHECK(cross.vol_atm == doctest::Approx(0.13072));
}
