#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>

#include "uivtsp/trust.hpp"

using namespace uivtsp;

namespace {

// Independent evaluation at extended precision.
long double reference_trust(std::int64_t sec, std::int64_t lek, PenaltyMode mode) {
  long double base = (1.0L + static_cast<long double>(sec)) /
                     (2.0L + static_cast<long double>(sec) + static_cast<long double>(lek));
  long double pen;
  if (mode == PenaltyMode::on_leak && lek == 0)
    pen = 1.0L;
  else if (sec == 0)
    pen = lek == 0 ? 1.0L : 0.0L;
  else
    pen = std::exp(-static_cast<long double>(sec + lek) / static_cast<long double>(sec));
  return base * pen;
}

}  // namespace

TEST_CASE("base trust beta form") {
  REQUIRE(base_trust(0, 0) == 0.5);
  REQUIRE(base_trust(1, 0) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  REQUIRE(base_trust(0, 1) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));
  REQUIRE(base_trust(3, 1) == Catch::Approx(4.0 / 6.0).epsilon(1e-15));
  REQUIRE_THROWS_AS(base_trust(-1, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(base_trust(0, -1), std::invalid_argument);
}

TEST_CASE("penalty factor cases") {
  // untouched record keeps factor 1 in both modes
  REQUIRE(penalty(0, 0, PenaltyMode::literal) == 1.0);
  REQUIRE(penalty(0, 0, PenaltyMode::on_leak) == 1.0);
  // clean history: literal mode still pays e^-1, on-leak mode does not
  REQUIRE(penalty(5, 0, PenaltyMode::literal) == Catch::Approx(std::exp(-1.0)).epsilon(1e-15));
  REQUIRE(penalty(5, 0, PenaltyMode::on_leak) == 1.0);
  // active record with nothing kept collapses
  REQUIRE(penalty(0, 3, PenaltyMode::literal) == 0.0);
  REQUIRE(penalty(0, 3, PenaltyMode::on_leak) == 0.0);
  REQUIRE(penalty(1, 1, PenaltyMode::literal) == Catch::Approx(std::exp(-2.0)).epsilon(1e-15));
  REQUIRE(penalty(1, 1, PenaltyMode::on_leak) == Catch::Approx(std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("trust value against extended-precision reference") {
  for (PenaltyMode mode : {PenaltyMode::literal, PenaltyMode::on_leak})
    for (std::int64_t sec = 0; sec <= 40; ++sec)
      for (std::int64_t lek = 0; lek <= 40; ++lek) {
        double got = trust_value(sec, lek, mode);
        double want = static_cast<double>(reference_trust(sec, lek, mode));
        REQUIRE(std::abs(got - want) <= 1e-12);
        REQUIRE(got >= 0.0);
        REQUIRE(got <= 1.0);
      }
}

TEST_CASE("specific trust values") {
  REQUIRE(trust_value(0, 0, PenaltyMode::on_leak) == 0.5);
  REQUIRE(trust_value(0, 0, PenaltyMode::literal) == 0.5);
  REQUIRE(trust_value(1, 1, PenaltyMode::literal) ==
          Catch::Approx(0.5 * std::exp(-2.0)).epsilon(1e-15));
  REQUIRE(trust_value(10, 0, PenaltyMode::on_leak) == Catch::Approx(11.0 / 12.0).epsilon(1e-15));
  REQUIRE(trust_value(0, 1, PenaltyMode::on_leak) == 0.0);
}

TEST_CASE("classification bands and boundaries") {
  Thresholds t;  // 0.2 / 0.5 / 0.8
  REQUIRE(classify(0.95, t) == Classification::honest);
  REQUIRE(classify(0.8, t) == Classification::honest);          // top band closed
  REQUIRE(classify(std::nextafter(0.8, 0.0), t) == Classification::monitored);
  REQUIRE(classify(0.5, t) == Classification::monitored);
  REQUIRE(classify(std::nextafter(0.5, 0.0), t) == Classification::semi_honest);
  REQUIRE(classify(0.2, t) == Classification::semi_honest);     // low edge belongs upward
  REQUIRE(classify(std::nextafter(0.2, 0.0), t) == Classification::dishonest);
  REQUIRE(classify(0.0, t) == Classification::dishonest);
}

TEST_CASE("threshold validation") {
  REQUIRE_NOTHROW(validate(Thresholds{0.1, 0.4, 0.7}));
  REQUIRE_THROWS_AS(validate(Thresholds{0.0, 0.5, 0.8}), std::invalid_argument);
  REQUIRE_THROWS_AS(validate(Thresholds{0.5, 0.5, 0.8}), std::invalid_argument);
  REQUIRE_THROWS_AS(validate(Thresholds{0.2, 0.8, 0.5}), std::invalid_argument);
  REQUIRE_THROWS_AS(validate(Thresholds{0.2, 0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("outcome bookkeeping") {
  TrustState s = initial_trust_state(PenaltyMode::on_leak);
  REQUIRE(s.sec == 0);
  REQUIRE(s.lek == 0);
  REQUIRE(s.tr == 0.5);
  s = register_outcome(s, Outcome::kept, PenaltyMode::on_leak);
  REQUIRE(s.sec == 1);
  REQUIRE(s.tr == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  s = register_outcome(s, Outcome::leaked, PenaltyMode::on_leak);
  REQUIRE(s.lek == 1);
  REQUIRE(s.tr == Catch::Approx((2.0 / 4.0) * std::exp(-2.0)).epsilon(1e-15));
}

TEST_CASE("conspirator accumulation deduplicates by mac") {
  ConspiracyState c;
  MacAddress m1{{1, 2, 3, 4, 5, 6}}, m2{{6, 5, 4, 3, 2, 1}};
  REQUIRE(c.mu() == 0);
  REQUIRE(c.add(m1));
  REQUIRE_FALSE(c.add(m1));
  REQUIRE(c.mu() == 1);
  REQUIRE(c.add(m2));
  REQUIRE(c.mu() == 2);
  REQUIRE(c.path.front() == m1);
  REQUIRE(c.path.back() == m2);
}

TEST_CASE("conspirator rule forces removal at mu >= 1") {
  Thresholds t;
  TrustState healthy{20, 0, trust_value(20, 0, PenaltyMode::on_leak)};
  ConspiracyState none;
  auto [s0, c0] = apply_conspirator_rule(healthy, none, t);
  REQUIRE(c0 == Classification::honest);
  REQUIRE(s0.tr == healthy.tr);

  ConspiracyState one;
  one.add(MacAddress{{9, 9, 9, 9, 9, 9}});
  auto [s1, c1] = apply_conspirator_rule(healthy, one, t);
  REQUIRE(c1 == Classification::removed);
  REQUIRE(s1.tr == 0.0);
  REQUIRE(s1.sec == healthy.sec);  // counts stay, only trust collapses
}
