#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "nnb/json_io.hpp"
#include "nnb/verify.hpp"

using namespace nnb;

namespace {

std::vector<Rational> rats(std::vector<long> v) {
  std::vector<Rational> out;
  out.reserve(v.size());
  for (long n : v) out.emplace_back(n);
  return out;
}

}  // namespace

TEST_CASE("two-sided norm bounds on documented coefficient vectors") {
  BasisContext ctx;
  FddBounds fb = fdd_bounds(ctx, rats({1}), rats({1}));
  CHECK(fb.lower == Rational(5, 8));
  CHECK(fb.middle == 3);
  CHECK(fb.upper == 4);
  CHECK(fb.holds());

  FddBounds only_u = fdd_bounds(ctx, rats({1}), {});
  CHECK(only_u.lower == Rational(1, 2));
  CHECK(only_u.middle == 3);
  CHECK(only_u.upper == 3);
  CHECK(only_u.holds());

  FddBounds only_h = fdd_bounds(ctx, {}, rats({1}));
  CHECK(only_h.lower == Rational(1, 8));
  CHECK(only_h.middle == 1);
  CHECK(only_h.upper == 1);
  CHECK(only_h.holds());

  FddBounds padded = fdd_bounds(ctx, rats({1}), rats({0, 1}));
  CHECK(padded.lower == Rational(5, 8));
  CHECK(padded.middle == 3);
  CHECK(padded.upper == 4);
}

TEST_CASE("norm bounds hold on random coefficient vectors") {
  BasisContext ctx;
  SplitMix64 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    auto n = static_cast<std::size_t>(rng.int_in(1, 12));
    std::vector<Rational> a(n), b(n);
    for (std::size_t k = 0; k < n; ++k) {
      a[k] = rng.rational(-30, 30, 30);
      b[k] = rng.rational(-30, 30, 30);
    }
    CHECK(fdd_bounds(ctx, a, b).holds());
  }
}

TEST_CASE("single block lower bounds, included case") {
  BasisContext ctx;
  Prop2Case c = prop2_case(ctx, 1, Rational(1), Rational(1));
  CHECK(c.included);
  CHECK(c.s == 0);
  CHECK(c.norm == 6);
  CHECK(c.intermediate == 6);
  CHECK(c.bound == 1);
  CHECK(c.margin == 0);
  CHECK(c.ok);

  Prop2Case z = prop2_case(ctx, 1, Rational(0), Rational(0));
  CHECK(z.norm == 0);
  CHECK(z.margin == 0);
  CHECK(z.ok);

  // Pairing a later block with its own host interval exercises s > 0.
  Permutation host = Permutation::from_function(
      "host", [](std::uint64_t i) { return i == 2 ? std::uint64_t(1) : i; });
  BasisContext hctx(host);
  Prop2Case d = prop2_case(hctx, 2, Rational(1), Rational(1));
  CHECK(d.included);
  CHECK(d.s == 1);
  CHECK(d.norm == 6);
  CHECK(d.intermediate == 4);
  CHECK(d.margin == 0);
  CHECK(d.ok);
}

TEST_CASE("single block lower bounds, disjoint case") {
  BasisContext ctx;
  Prop2Case c = prop2_case(ctx, 2, Rational(1), Rational(-1));
  CHECK_FALSE(c.included);
  CHECK(c.norm == 2);
  CHECK(c.bound == 2);
  CHECK(c.margin == 0);
  CHECK(c.ok);

  SplitMix64 rng(103);
  for (int trial = 0; trial < 40; ++trial) {
    auto i = static_cast<std::uint64_t>(rng.int_in(2, 300));
    Rational a = rng.rational(-40, 40, 40);
    Rational b = rng.rational(-40, 40, 40);
    Prop2Case r = prop2_case(ctx, i, a, b);
    CHECK_FALSE(r.included);
    CHECK(r.ok);
    Rational expect(2 * rational_abs(Rational(a + b)) + rational_abs(a) +
                    rational_abs(b));
    CHECK(r.norm == expect);
  }

  VerifyReport rep = prop2_lower(ctx, 7, Rational(2), Rational(-3));
  CHECK(rep.check == "prop2");
  CHECK(rep.violations == 0);
  CHECK(rep.witness.is_null());
}

TEST_CASE("averaging projection bounds") {
  VerifyReport r1 = projection_check(haar_fn(HaarIndex{1, 0, 1}));
  CHECK(r1.violations == 0);
  CHECK(std::get<Rational>(*r1.worst_margin) == 1);

  StepFunction half(1, 1, {Rational(1), Rational(0)});
  VerifyReport r2 = projection_check(half);
  CHECK(r2.violations == 0);
  CHECK(std::get<Rational>(*r2.worst_margin) == 0);
}

TEST_CASE("pointwise square function chain") {
  StepFunction one = StepFunction::unit_indicator(1);
  StepFunction two = StepFunction::unit_indicator(2);

  VerifyReport disjoint = pointwise_chain({one, two}, rats({1, 1}));
  CHECK(disjoint.violations == 0);
  CHECK(std::get<Rational>(*disjoint.worst_margin) == 0);

  VerifyReport stacked = pointwise_chain({one, one}, rats({1, 1}));
  CHECK(stacked.violations == 0);
  CHECK(std::get<Rational>(*stacked.worst_margin) == 1);

  CHECK_THROWS_AS(pointwise_chain({one}, rats({1, 2})),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      pointwise_chain({haar_fn(HaarIndex{1, 0, 1})}, rats({1})),
      std::invalid_argument);
}

TEST_CASE("rademacher ratio on closed-form families") {
  StepFunction one = StepFunction::unit_indicator(1);

  // Two copies of the same indicator at p = 1 give the extremal ratio
  // 1/sqrt(2); at p = 2 the ratio is identically 1.
  double r1 = rademacher_ratio({one, one}, rats({1, 1}), 1.0);
  CHECK(r1 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  double r2 = rademacher_ratio({one, one}, rats({1, 1}), 2.0);
  CHECK(r2 == doctest::Approx(1.0).epsilon(1e-12));

  SplitMix64 rng(107);
  auto fam = random_disjoint_normalized_family(rng, 6, 2.0);
  std::vector<Rational> a;
  for (int k = 0; k < 6; ++k) a.push_back(rng.rational(-8, 8, 8));
  a[0] = Rational(1);
  double rd = rademacher_ratio(fam, a, 2.0);
  CHECK(std::fabs(rd - 1.0) < 1e-12);

  auto exact2 = rademacher_ratio_exact(fam, a, 2);
  REQUIRE(exact2.has_value());
  CHECK(*exact2 == 1);

  auto fam1 = random_disjoint_normalized_family(rng, 5, 1.0);
  std::vector<Rational> a1;
  for (int k = 0; k < 5; ++k) a1.push_back(rng.rational(-8, 8, 8));
  a1[0] = Rational(-3, 2);
  double re = rademacher_ratio(fam1, a1, 1.0);
  CHECK(std::fabs(re - 1.0) < 1e-12);
  auto exact1 = rademacher_ratio_exact(fam1, a1, 1);
  REQUIRE(exact1.has_value());
  CHECK(*exact1 == 1);

  // Overlapping supports make the square function irrational cellwise.
  CHECK(rademacher_ratio_exact({one, one}, rats({1, 1}), 1) == std::nullopt);
}

TEST_CASE("rademacher ratio is invariant under relabeling and sign flips") {
  SplitMix64 rng(109);
  auto fam = random_disjoint_normalized_family(rng, 4, 3.0);
  std::vector<Rational> a = {Rational(1), Rational(-2), Rational(1, 3),
                             Rational(5, 4)};
  double base = rademacher_ratio(fam, a, 3.0);

  std::vector<StepFunction> swapped = {fam[2], fam[0], fam[3], fam[1]};
  std::vector<Rational> aswap = {a[2], a[0], a[3], a[1]};
  CHECK(rademacher_ratio(swapped, aswap, 3.0) ==
        doctest::Approx(base).epsilon(1e-12));

  std::vector<Rational> flipped = {a[0], Rational(-a[1]), a[2],
                                   Rational(-a[3])};
  CHECK(rademacher_ratio(fam, flipped, 3.0) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("rademacher ratio rejects bad input") {
  StepFunction one = StepFunction::unit_indicator(1);
  std::vector<StepFunction> big(15, one);
  std::vector<Rational> abig(15, Rational(1));
  CHECK_THROWS_AS(rademacher_ratio(big, abig, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(rademacher_ratio({scale(one, Rational(2))}, rats({1}), 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(rademacher_ratio({one}, rats({1}), 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(rademacher_ratio({one}, rats({0}), 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(rademacher_ratio_exact({one}, rats({1}), 3),
                  std::invalid_argument);
}

TEST_CASE("coefficient equivalence constants") {
  CHECK(lp_interpolation_theta(4.0) == doctest::Approx(1.0 / 3.0));
  CHECK(lp_interpolation_theta(3.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(lp_interpolation_theta(2.0), std::invalid_argument);

  auto below = lp_equivalence_constants(1.5, 2.0, 1.0);
  CHECK(below.first == doctest::Approx(1.0 / 1.5));
  CHECK(below.second == doctest::Approx(1.5));

  auto c1 = lp_equivalence_constants(1.0, 4.0, 2.0);
  CHECK(c1.first == doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
  auto c2 = lp_equivalence_constants(2.0, 4.0, 2.0);
  CHECK(c2.first == doctest::Approx(std::pow(8.0, -1.5)).epsilon(1e-14));
  auto c3 = lp_equivalence_constants(1.0, 3.0, std::sqrt(3.0));
  CHECK(c3.first == doctest::Approx(std::pow(3.0, -2.0 / 3.0)).epsilon(1e-14));

  CHECK(default_khintchine_bp(1.5) == 1.0);
  CHECK(default_khintchine_bp(9.0) == doctest::Approx(3.0));

  // Larger K or B_p can only widen the window.
  double prev = 1.0;
  for (double K : {1.0, 2.0, 4.0, 8.0}) {
    auto c = lp_equivalence_constants(K, 4.0, 2.0);
    CHECK(c.first <= prev);
    CHECK(c.second == doctest::Approx(K));
    prev = c.first;
  }
  CHECK_THROWS_AS(lp_equivalence_constants(0.5, 2.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("disjointly supported norm identity") {
  StepFunction one = StepFunction::unit_indicator(1);
  StepFunction two = StepFunction::unit_indicator(2);

  VerifyReport p1 = disjoint_lp_identity({one, two}, rats({1, -2}), 1.0);
  CHECK(p1.violations == 0);
  CHECK(std::get<Rational>(*p1.worst_margin) == 0);

  VerifyReport p2 = disjoint_lp_identity({one, two}, rats({3, 4}), 2.0);
  CHECK(p2.violations == 0);
  CHECK(std::get<Rational>(*p2.worst_margin) == 0);

  SplitMix64 rng(113);
  auto fam = random_disjoint_normalized_family(rng, 5, 3.0);
  std::vector<Rational> a;
  for (int k = 0; k < 5; ++k) a.push_back(rng.rational(-64, 64, 64));
  VerifyReport p3 = disjoint_lp_identity(fam, a, 3.0);
  CHECK(p3.violations == 0);

  CHECK_THROWS_AS(disjoint_lp_identity({one, one}, rats({1, 1}), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      disjoint_lp_identity({scale(one, Rational(2)), two}, rats({1, 1}), 1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      disjoint_lp_identity({haar_fn(HaarIndex{1, 0, 1})}, rats({1}), 1.0),
      std::invalid_argument);
}

TEST_CASE("trial runner aggregates deterministically") {
  TrialFn fn = [](std::uint64_t t, nlohmann::json* w) -> TrialResult {
    if (w) *w = nlohmann::json{{"t", t}};
    if (t == 3) return {true, Margin(-1.0)};
    return {false, Margin(double(t))};
  };
  VerifyReport serial = run_trials_serial("demo", 32, fn);
  CHECK(serial.trials == 32);
  CHECK(serial.violations == 1);
  CHECK(serial.worst_trial == 4);
  CHECK(margin_to_double(*serial.worst_margin) == -1.0);
  CHECK(serial.witness == nlohmann::json{{"t", 3}});

  for (int threads : {2, 4, 8}) {
    VerifyReport par = run_trials_parallel("demo", 32, fn, threads);
    CHECK(report_to_json(par) == report_to_json(serial));
  }
}

TEST_CASE("trial runner breaks margin ties toward the earliest trial") {
  TrialFn fn = [](std::uint64_t, nlohmann::json*) -> TrialResult {
    return {false, Margin(Rational(0))};
  };
  VerifyReport serial = run_trials_serial("ties", 100, fn);
  VerifyReport par = run_trials_parallel("ties", 100, fn, 4);
  CHECK(serial.worst_trial == 1);
  CHECK(par.worst_trial == 1);
  CHECK(serial.violations == 0);
  CHECK(serial.witness.is_null());
}

TEST_CASE("trial runner turns exceptions into violations") {
  TrialFn fn = [](std::uint64_t t, nlohmann::json* w) -> TrialResult {
    if (t == 2) throw std::runtime_error("boom");
    if (w) *w = nlohmann::json{{"t", t}};
    return {false, Margin(Rational(1))};
  };
  VerifyReport r = run_trials_serial("explode", 5, fn);
  CHECK(r.violations == 1);
  CHECK(r.worst_trial == 3);
  CHECK(margin_to_double(*r.worst_margin) ==
        -std::numeric_limits<double>::infinity());
  CHECK(r.witness == nlohmann::json{{"error", "boom"}});
}

TEST_CASE("margin ordering mixes exact and float values") {
  CHECK(margin_less(Margin(Rational(-1)), Margin(Rational(0))));
  CHECK(margin_less(Margin(-0.5), Margin(Rational(1, 4))));
  CHECK(margin_less(Margin(Rational(-3)), Margin(-2.5)));
  CHECK_FALSE(margin_less(Margin(Rational(1, 2)), Margin(0.5)));
  CHECK(margin_to_double(Margin(Rational(1, 2))) == 0.5);
}

TEST_CASE("suites run clean on the identity context") {
  BasisContext ctx;
  for (const auto& name : suite_names()) {
    SuiteConfig cfg;
    cfg.suite = name;
    cfg.seed = 7;
    cfg.trials = 20;
    cfg.imax = suite_uses_index_scan(name) ? 50 : 40;
    if (name == "rademacher") cfg.trials = 6;
    VerifyReport r = run_suite(ctx, cfg);
    CAPTURE(name);
    CHECK(r.check == name);
    CHECK(r.violations == 0);
    CHECK(r.witness.is_null());
    CHECK(r.worst_margin.has_value());
    CHECK(margin_to_double(*r.worst_margin) >= 0.0);
  }
  CHECK_THROWS_AS(run_suite(ctx, SuiteConfig{"nope", 1, 0, 0, 0.0, 1}),
                  std::invalid_argument);
}

TEST_CASE("suite reports do not depend on the thread count") {
  BasisContext ctx;
  for (const auto& name : {"fdd", "prop2", "chain"}) {
    SuiteConfig cfg;
    cfg.suite = name;
    cfg.seed = 99;
    cfg.trials = 48;
    cfg.imax = 60;
    cfg.threads = 1;
    VerifyReport serial = run_suite(ctx, cfg);
    cfg.threads = 4;
    VerifyReport par = run_suite(ctx, cfg);
    CHECK(report_to_json(serial) == report_to_json(par));
  }
}

TEST_CASE("permutation suite flags an inadmissible pairing") {
  Permutation swapped = Permutation::from_function(
      "swap12", [](std::uint64_t i) { return i == 1 ? 2 : i == 2 ? 1 : i; });
  BasisContext ctx(swapped);
  SuiteConfig cfg;
  cfg.suite = "permutation";
  cfg.imax = 10;
  VerifyReport r = run_suite(ctx, cfg);
  CHECK(r.violations > 0);
  CHECK_FALSE(r.witness.is_null());
}
