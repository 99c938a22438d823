#include <cmath>
#include <vector>

#include "doctest.h"
#include "nnb/rng.hpp"
#include "nnb/stepfn.hpp"

using namespace nnb;

namespace {

StepFunction fn(std::uint32_t J, std::uint32_t r,
                std::vector<long> numerators) {
  std::vector<Rational> v;
  v.reserve(numerators.size());
  for (long n : numerators) v.emplace_back(n);
  return StepFunction(J, r, std::move(v));
}

}  // namespace

TEST_CASE("construction validates the value count") {
  CHECK_NOTHROW(fn(2, 1, {1, 2, 3, 4}));
  CHECK_THROWS_AS(fn(2, 1, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction(0, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction(1, 27, {}), std::invalid_argument);
}

TEST_CASE("align refines and zero-extends") {
  StepFunction f = fn(1, 0, {1});
  StepFunction g = fn(1, 1, {1, 0});
  auto [fa, ga] = StepFunction::align(f, g);
  CHECK(fa.support_len() == 1);
  CHECK(fa.resolution() == 1);
  CHECK(fa.values() == std::vector<Rational>{Rational(1), Rational(1)});
  CHECK(ga.values() == g.values());

  StepFunction wide = fn(3, 0, {0, 5, 0});
  auto [fb, wb] = StepFunction::align(f, wide);
  CHECK(fb.support_len() == 3);
  CHECK(fb.values() ==
        std::vector<Rational>{Rational(1), Rational(0), Rational(0)});
  CHECK(sub(fb, f).norm_1() == 0);
  CHECK(wb == wide);
}

TEST_CASE("equality is representation independent") {
  StepFunction f = fn(1, 0, {2});
  StepFunction g = fn(2, 2, {2, 2, 2, 2, 0, 0, 0, 0});
  CHECK(f == g);
  CHECK(f.refined(4) == f);
  CHECK(f.extended(5) == f);
  CHECK_FALSE(f == fn(1, 1, {2, 1}));
}

TEST_CASE("canonicalized yields the shortest equal representation") {
  StepFunction g = fn(2, 2, {2, 2, 2, 2, 0, 0, 0, 0});
  StepFunction c = g.canonicalized();
  CHECK(c.support_len() == 1);
  CHECK(c.resolution() == 0);
  CHECK(c == g);
  CHECK(StepFunction::zero(4, 3).canonicalized().cell_count() == 1);
}

TEST_CASE("cellwise arithmetic") {
  CHECK(abs(fn(1, 1, {1, -1})) == fn(1, 1, {1, 1}));
  CHECK(scale(StepFunction::unit_indicator(1), Rational(3)) == fn(1, 0, {3}));
  CHECK(sub(fn(2, 0, {3, 1}), fn(1, 1, {1, 2})) ==
        fn(2, 1, {2, 1, 1, 1}));
  CHECK(add(scale(StepFunction::unit_indicator(2), Rational(2)),
            fn(1, 2, {2, 2, 0, 0})) == fn(2, 1, {2, 0, 2, 2}));
  CHECK(pointwise_max(fn(1, 1, {1, -1}), fn(1, 1, {0, 0})) ==
        fn(1, 1, {1, 0}));
  CHECK(pointwise_mul(fn(1, 1, {2, 3}), fn(1, 1, {-1, 2})) ==
        fn(1, 1, {-2, 6}));
}

TEST_CASE("norms and integral are exact") {
  StepFunction h = fn(1, 1, {1, -1});
  CHECK(h.norm_1() == 1);
  CHECK(h.integral() == 0);
  CHECK(h.norm_2_sq() == 1);

  StepFunction f(2, 1, {Rational(1, 2), Rational(-1, 2), Rational(3),
                        Rational(0)});
  CHECK(f.norm_1() == 2);
  CHECK(f.integral() == Rational(3, 2));
  CHECK(f.norm_p_float(1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.norm_p_float(2.0) ==
        doctest::Approx(std::sqrt(f.norm_2_sq().get_d())).epsilon(1e-14));
}

TEST_CASE("unit interval averages and conditional expectation") {
  StepFunction h = fn(1, 1, {1, -1});
  CHECK(h.unit_interval_averages() == std::vector<Rational>{Rational(0)});
  CHECK(fn(1, 1, {2, 0}).unit_interval_averages() ==
        std::vector<Rational>{Rational(1)});

  StepFunction f(2, 1, {Rational(1, 2), Rational(-1, 2), Rational(3),
                        Rational(0)});
  CHECK(f.unit_interval_averages() ==
        std::vector<Rational>{Rational(0), Rational(3, 2)});
  CHECK(f.conditional_expectation() ==
        StepFunction(2, 0, {Rational(0), Rational(3, 2)}));
}

TEST_CASE("min value and non-negativity") {
  CHECK(fn(1, 1, {1, -1}).min_value() == -1);
  CHECK_FALSE(fn(1, 1, {1, -1}).is_nonnegative());
  CHECK(fn(2, 0, {0, 3}).is_nonnegative());
}

TEST_CASE("weighted_sum matches pairwise composition") {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 25; ++trial) {
    auto draw = [&rng] {
      auto J = static_cast<std::uint32_t>(rng.int_in(1, 4));
      auto r = static_cast<std::uint32_t>(rng.int_in(0, 4));
      std::vector<Rational> v;
      for (std::uint64_t t = 0; t < (std::uint64_t(J) << r); ++t)
        v.push_back(rng.rational(-20, 20, 12));
      return StepFunction(J, r, std::move(v));
    };
    StepFunction f = draw(), g = draw(), h = draw();
    Rational cf = rng.rational(-6, 6, 4);
    Rational cg = rng.rational(-6, 6, 4);
    Rational ch = rng.rational(-6, 6, 4);
    StepFunction direct = StepFunction::weighted_sum(
        {{&f, cf}, {&g, cg}, {&h, ch}});
    StepFunction chained = add(add(scale(f, cf), scale(g, cg)), scale(h, ch));
    CHECK(direct == chained);
  }
}

TEST_CASE("norm properties on random functions") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto J = static_cast<std::uint32_t>(rng.int_in(1, 5));
    auto r = static_cast<std::uint32_t>(rng.int_in(0, 5));
    std::vector<Rational> v1, v2;
    for (std::uint64_t t = 0; t < (std::uint64_t(J) << r); ++t) {
      v1.push_back(rng.rational(-64, 64, 64));
      v2.push_back(rng.rational(-64, 64, 64));
    }
    StepFunction f(J, r, std::move(v1));
    StepFunction g(J, r, std::move(v2));
    Rational c = rng.rational(-10, 10, 10);

    CHECK(scale(f, c).norm_1() == Rational(rational_abs(c) * f.norm_1()));
    CHECK(add(f, g).norm_1() <= Rational(f.norm_1() + g.norm_1()));

    StepFunction ef = f.conditional_expectation();
    CHECK(ef.norm_1() <= f.norm_1());
    CHECK(sub(f, ef).norm_1() <= Rational(2 * f.norm_1()));
  }
}

TEST_CASE("dense accumulator agrees with the pure operations") {
  DenseAccumulator acc(2, 1);
  acc.add_unit(2, Rational(2));
  acc.add_scaled(fn(1, 1, {1, -1}), Rational(1, 2));
  StepFunction expect(2, 1, {Rational(1, 2), Rational(-1, 2), Rational(2),
                             Rational(2)});
  CHECK(acc.to_function() == expect);
  CHECK(acc.norm_1() == expect.norm_1());
}
