#include "nnb/verify.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "nnb/json_io.hpp"

namespace nnb {

using nlohmann::json;

double margin_to_double(const Margin& m) {
  if (const auto* q = std::get_if<Rational>(&m)) return q->get_d();
  return std::get<double>(m);
}

bool margin_less(const Margin& lhs, const Margin& rhs) {
  const auto* lq = std::get_if<Rational>(&lhs);
  const auto* rq = std::get_if<Rational>(&rhs);
  if (lq && rq) return *lq < *rq;
  return margin_to_double(lhs) < margin_to_double(rhs);
}

namespace {

bool margin_equal(const Margin& lhs, const Margin& rhs) {
  return !margin_less(lhs, rhs) && !margin_less(rhs, lhs);
}

json rationals_to_json(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(to_fraction_string(q));
  return out;
}

json functions_to_json(const std::vector<StepFunction>& v) {
  json out = json::array();
  for (const auto& f : v) out.push_back(function_to_json(f));
  return out;
}

// Every family member re-represented on the common grid.
struct FamilyGrid {
  std::uint32_t support_len = 1;
  std::uint32_t resolution = 0;
  std::vector<std::vector<Rational>> cells;  // [member][cell]
};

FamilyGrid align_family(const std::vector<StepFunction>& x) {
  FamilyGrid g;
  for (const auto& f : x) {
    g.support_len = std::max(g.support_len, f.support_len());
    g.resolution = std::max(g.resolution, f.resolution());
  }
  g.cells.reserve(x.size());
  for (const auto& f : x)
    g.cells.push_back(f.refined(g.resolution).extended(g.support_len).values());
  return g;
}

double pow_abs(double v, double p) {
  v = std::fabs(v);
  if (p == 1.0) return v;
  if (p == 2.0) return v * v;
  if (p == 3.0) return v * v * v;
  if (p == 4.0) return (v * v) * (v * v);
  return std::pow(v, p);
}

// Summation with log-depth rounding error; the Rademacher means feed a 1e-12
// comparison, where a naive left fold over 2^14 terms would already be close
// to the budget.
double pairwise_sum(std::vector<double>& v) {
  if (v.empty()) return 0.0;
  std::size_t n = v.size();
  while (n > 1) {
    std::size_t half = n / 2;
    for (std::size_t k = 0; k < half; ++k) v[k] = v[2 * k] + v[2 * k + 1];
    if (n % 2) {
      v[half] = v[n - 1];
      n = half + 1;
    } else {
      n = half;
    }
  }
  return v[0];
}

}  // namespace

FddBounds fdd_bounds(const BasisContext& ctx, const std::vector<Rational>& a,
                     const std::vector<Rational>& b) {
  std::size_t n = std::max(a.size(), b.size());
  Rational asum(0);
  for (const auto& v : a) asum += rational_abs(v);

  std::vector<HaarIndex> his;
  his.reserve(n);
  std::uint64_t B = 1;
  std::uint32_t hj = 1, rmax = 1;
  for (std::size_t k = 0; k < n; ++k) {
    his.push_back(global_to_index(k + 1));
    rmax = std::max(rmax, his[k].n + 1);
    bool has_a = k < a.size() && a[k] != 0;
    bool has_b = k < b.size() && b[k] != 0;
    if (has_b) hj = std::max(hj, his[k].j);
    if (has_a || has_b) {
      B = std::max<std::uint64_t>(B, his[k].j);
      if (has_a) B = std::max(B, ctx.permutation()(k + 1));
    }
  }
  DenseAccumulator hacc(hj, rmax);
  for (std::size_t k = 0; k < b.size(); ++k)
    accumulate_haar(hacc, his[k], b[k]);
  Rational hnorm = hacc.norm_1();

  if (B > StepFunction::kMaxCells)
    throw std::length_error("paired interval index out of range");
  DenseAccumulator macc(static_cast<std::uint32_t>(B), rmax);
  for (std::size_t k = 0; k < n; ++k) {
    if (k < a.size() && a[k] != 0) {
      auto p = static_cast<std::uint32_t>(ctx.permutation()(k + 1));
      macc.add_unit(p, Rational(2 * a[k]));
      accumulate_haar_abs(macc, his[k], a[k]);
    }
    if (k < b.size()) accumulate_haar(macc, his[k], b[k]);
  }

  FddBounds out;
  out.lower = Rational(asum / 2 + hnorm / 8);
  out.middle = macc.norm_1();
  out.upper = Rational(3 * asum + hnorm);
  return out;
}

Prop2Case prop2_case(const BasisContext& ctx, std::uint64_t i,
                     const Rational& a, const Rational& b) {
  HaarIndex hi = global_to_index(i);
  std::uint64_t p = ctx.permutation()(i);
  if (p == 0 || p > StepFunction::kMaxCells)
    throw std::length_error("paired interval index out of range");

  // a x_i + b y_i = (a+b) u_i + (a-b) h_i.
  auto J = static_cast<std::uint32_t>(std::max<std::uint64_t>(hi.j, p));
  std::uint32_t r = hi.n + 1;
  DenseAccumulator acc(J, r);
  Rational s(a + b), d(a - b);
  acc.add_unit(static_cast<std::uint32_t>(p), Rational(2 * s));
  accumulate_haar_abs(acc, hi, s);
  accumulate_haar(acc, hi, d);
  StepFunction g = acc.to_function();

  Prop2Case out;
  out.included = (p == hi.j);
  out.norm = g.norm_1();
  Rational absa = rational_abs(a), absb = rational_abs(b);
  if (!out.included) {
    out.bound = Rational(absa + absb);
    out.margin = Rational(out.norm - out.bound);
  } else {
    out.s = hi.n;
    out.bound = std::max(absa, absb);
    Rational c(pow2(static_cast<long>(hi.n) + 1) + 2);
    out.intermediate =
        Rational(pow2(-(static_cast<long>(hi.n) + 1)) *
                 (rational_abs(Rational(c * a + 2 * b)) +
                  rational_abs(Rational(c * b + 2 * a))));
    // At resolution n+1 the support of h_i is exactly two cells; their
    // contribution to the norm must reproduce the closed form above.
    std::uint64_t base =
        (std::uint64_t(hi.j - 1) << (hi.n + 1)) + 2 * (hi.i - 1);
    Rational restricted(
        (rational_abs(g.values()[base]) + rational_abs(g.values()[base + 1])) *
        pow2(-(static_cast<long>(hi.n) + 1)));
    Rational m1(out.norm - out.intermediate);
    Rational m2(out.intermediate - out.bound);
    Rational m3(-rational_abs(Rational(restricted - out.intermediate)));
    out.margin = std::min({m1, m2, m3});
  }
  out.ok = out.margin >= 0;
  return out;
}

VerifyReport prop2_lower(const BasisContext& ctx, std::uint64_t i,
                         const Rational& a, const Rational& b) {
  Prop2Case c = prop2_case(ctx, i, a, b);
  VerifyReport r;
  r.check = "prop2";
  r.trials = 1;
  r.violations = c.ok ? 0 : 1;
  r.worst_margin = Margin(c.margin);
  r.worst_trial = 1;
  if (!c.ok)
    r.witness = json{{"i", i},
                     {"a", to_fraction_string(a)},
                     {"b", to_fraction_string(b)},
                     {"included", c.included}};
  return r;
}

VerifyReport projection_check(const StepFunction& f) {
  StepFunction ef = f.conditional_expectation();
  Rational nf = f.norm_1();
  Rational m1(nf - ef.norm_1());
  Rational m2(2 * nf - sub(f, ef).norm_1());
  VerifyReport r;
  r.check = "projections";
  r.trials = 1;
  r.violations = (m1 < 0 || m2 < 0) ? 1 : 0;
  r.worst_margin = Margin(std::min(m1, m2));
  r.worst_trial = 1;
  if (r.violations) r.witness = json{{"f", function_to_json(f)}};
  return r;
}

VerifyReport pointwise_chain(const std::vector<StepFunction>& x,
                             const std::vector<Rational>& a) {
  if (x.empty() || a.size() != x.size())
    throw std::invalid_argument(
        "family and coefficients must have equal nonzero length");
  for (const auto& f : x)
    if (!f.is_nonnegative())
      throw std::invalid_argument("family must be non-negative");

  FamilyGrid g = align_family(x);
  std::size_t cells = g.cells[0].size();
  VerifyReport r;
  r.check = "chain";
  r.trials = 1;
  r.worst_trial = 1;
  Rational worst;
  bool first = true;
  for (std::size_t c = 0; c < cells; ++c) {
    Rational mx(0), s2(0), sm(0);
    for (std::size_t k = 0; k < x.size(); ++k) {
      Rational w(rational_abs(a[k]) * g.cells[k][c]);
      mx = std::max(mx, w);
      s2 += w * w;
      sm += w;
    }
    Rational m1(s2 - mx * mx);
    Rational m2(sm * sm - s2);
    Rational m(std::min(m1, m2));
    if (m < 0) ++r.violations;
    if (first || m < worst) {
      worst = m;
      first = false;
    }
  }
  r.worst_margin = Margin(worst);
  if (r.violations)
    r.witness = json{{"a", rationals_to_json(a)}, {"x", functions_to_json(x)}};
  return r;
}

namespace {

void check_rademacher_family(const std::vector<StepFunction>& x,
                             const std::vector<Rational>& a) {
  if (x.empty() || x.size() > 14)
    throw std::invalid_argument("family size must be between 1 and 14");
  if (a.size() != x.size())
    throw std::invalid_argument("coefficient count mismatch");
  for (const auto& f : x)
    if (!f.is_nonnegative())
      throw std::invalid_argument("family must be non-negative");
  if (std::all_of(a.begin(), a.end(), [](const Rational& q) { return q == 0; }))
    throw std::invalid_argument("coefficients must not all vanish");
}

std::vector<std::vector<std::size_t>> nonzero_cells(const FamilyGrid& g) {
  std::vector<std::vector<std::size_t>> touched(g.cells.size());
  for (std::size_t k = 0; k < g.cells.size(); ++k)
    for (std::size_t c = 0; c < g.cells[k].size(); ++c)
      if (g.cells[k][c] != 0) touched[k].push_back(c);
  return touched;
}

}  // namespace

double rademacher_ratio(const std::vector<StepFunction>& x,
                        const std::vector<Rational>& a, double p) {
  check_rademacher_family(x, a);
  if (p < 1.0) throw std::invalid_argument("p must be >= 1");
  for (const auto& f : x)
    if (std::fabs(f.norm_p_float(p) - 1.0) > 1e-12)
      throw std::invalid_argument("family must be p-normalized");

  FamilyGrid g = align_family(x);
  std::size_t N = x.size();
  std::size_t cells = g.cells[0].size();
  std::vector<std::vector<double>> w(N, std::vector<double>(cells, 0.0));
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t c = 0; c < cells; ++c)
      w[k][c] = Rational(a[k] * g.cells[k][c]).get_d();
  auto touched = nonzero_cells(g);

  // The grid cell length is a common factor of both norms and cancels in the
  // ratio, so it is dropped throughout.
  double den_pow = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    double s2 = 0.0;
    for (std::size_t k = 0; k < N; ++k) s2 += w[k][c] * w[k][c];
    den_pow += pow_abs(std::sqrt(s2), p);
  }
  if (den_pow == 0.0)
    throw std::invalid_argument("square function vanishes identically");

  std::vector<double> sums(cells, 0.0);
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t c : touched[k]) sums[c] += w[k][c];
  std::vector<int> sign(N, 1);
  std::vector<double> pattern_pow;
  pattern_pow.reserve(std::size_t(1) << N);
  auto norm_pow = [&]() {
    double t = 0.0;
    for (std::size_t c = 0; c < cells; ++c) t += pow_abs(sums[c], p);
    return t;
  };
  pattern_pow.push_back(norm_pow());
  for (std::uint64_t k = 1; k < (std::uint64_t(1) << N); ++k) {
    // Gray-code walk: exactly one sign flips between consecutive patterns.
    auto flip = static_cast<std::size_t>(std::countr_zero(k));
    sign[flip] = -sign[flip];
    double delta = 2.0 * sign[flip];
    for (std::size_t c : touched[flip]) sums[c] += delta * w[flip][c];
    pattern_pow.push_back(norm_pow());
  }
  double mean = pairwise_sum(pattern_pow) / std::ldexp(1.0, static_cast<int>(N));
  return std::pow(mean / den_pow, 1.0 / p);
}

std::optional<Rational> rademacher_ratio_exact(
    const std::vector<StepFunction>& x, const std::vector<Rational>& a,
    int p) {
  if (p != 1 && p != 2)
    throw std::invalid_argument("exact ratio supports p in {1, 2} only");
  check_rademacher_family(x, a);

  FamilyGrid g = align_family(x);
  std::size_t N = x.size();
  std::size_t cells = g.cells[0].size();
  std::vector<std::vector<Rational>> w(N, std::vector<Rational>(cells));
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t c = 0; c < cells; ++c)
      w[k][c] = Rational(a[k] * g.cells[k][c]);
  auto touched = nonzero_cells(g);

  Rational den(0);
  for (std::size_t c = 0; c < cells; ++c) {
    Rational s2(0);
    for (std::size_t k = 0; k < N; ++k) s2 += w[k][c] * w[k][c];
    if (p == 2) {
      den += s2;
    } else {
      auto root = exact_sqrt(s2);
      if (!root) return std::nullopt;
      den += *root;
    }
  }
  if (den == 0) return std::nullopt;

  std::vector<Rational> sums(cells, Rational(0));
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t c : touched[k]) sums[c] += w[k][c];
  auto cell_pow = [&](std::size_t c) {
    return p == 1 ? rational_abs(sums[c]) : Rational(sums[c] * sums[c]);
  };
  Rational total(0);
  for (std::size_t c = 0; c < cells; ++c) total += cell_pow(c);
  Rational acc = total;
  std::vector<int> sign(N, 1);
  for (std::uint64_t k = 1; k < (std::uint64_t(1) << N); ++k) {
    auto flip = static_cast<std::size_t>(std::countr_zero(k));
    sign[flip] = -sign[flip];
    Rational two_w(0);
    for (std::size_t c : touched[flip]) {
      total -= cell_pow(c);
      two_w = 2 * sign[flip] * w[flip][c];
      sums[c] += two_w;
      total += cell_pow(c);
    }
    acc += total;
  }
  Rational mean(acc * pow2(-static_cast<long>(N)));
  Rational ratio_pow(mean / den);
  if (p == 1) return ratio_pow;
  return exact_sqrt(ratio_pow);
}

double lp_interpolation_theta(double p) {
  if (p <= 2.0)
    throw std::invalid_argument("interpolation exponent needs p > 2");
  return (p - 2.0) / (2.0 * (p - 1.0));
}

std::pair<double, double> lp_equivalence_constants(double K, double p,
                                                   double B_p) {
  if (K < 1.0 || p < 1.0 || B_p <= 0.0)
    throw std::invalid_argument("need K >= 1, p >= 1, B_p > 0");
  if (p <= 2.0) return {1.0 / K, K};
  double theta = lp_interpolation_theta(p);
  return {std::pow(K * K * B_p, -1.0 / (1.0 - theta)), K};
}

double default_khintchine_bp(double p) {
  return p <= 2.0 ? 1.0 : std::sqrt(p);
}

VerifyReport disjoint_lp_identity(const std::vector<StepFunction>& x,
                                  const std::vector<Rational>& a, double p) {
  if (x.empty() || a.size() != x.size())
    throw std::invalid_argument(
        "family and coefficients must have equal nonzero length");
  if (p < 1.0) throw std::invalid_argument("p must be >= 1");
  for (const auto& f : x)
    if (!f.is_nonnegative())
      throw std::invalid_argument("family must be non-negative");

  FamilyGrid g = align_family(x);
  std::size_t cells = g.cells[0].size();
  for (std::size_t c = 0; c < cells; ++c) {
    int active = 0;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (g.cells[k][c] != 0) ++active;
    if (active > 1) throw std::invalid_argument("supports overlap");
  }
  for (const auto& f : x) {
    if (p == 1.0 && f.norm_1() != 1)
      throw std::invalid_argument("family must be p-normalized");
    if (p == 2.0 && f.norm_2_sq() != 1)
      throw std::invalid_argument("family must be p-normalized");
    if (p != 1.0 && p != 2.0 && std::fabs(f.norm_p_float(p) - 1.0) > 1e-12)
      throw std::invalid_argument("family must be p-normalized");
  }

  std::vector<StepFunction::Term> terms;
  terms.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    terms.push_back({&x[k], a[k]});
  StepFunction f = StepFunction::weighted_sum(terms);

  VerifyReport r;
  r.check = "disjoint-lp";
  r.trials = 1;
  r.worst_trial = 1;
  if (p == 1.0) {
    Rational lhs = f.norm_1();
    Rational rhs(0);
    for (const auto& q : a) rhs += rational_abs(q);
    Rational m(-rational_abs(Rational(lhs - rhs)));
    r.violations = (lhs != rhs) ? 1 : 0;
    r.worst_margin = Margin(m);
  } else if (p == 2.0) {
    Rational lhs = f.norm_2_sq();
    Rational rhs(0);
    for (const auto& q : a) rhs += q * q;
    Rational m(-rational_abs(Rational(lhs - rhs)));
    r.violations = (lhs != rhs) ? 1 : 0;
    r.worst_margin = Margin(m);
  } else {
    double lhs = f.norm_p_float(p);
    double rhs_pow = 0.0;
    for (const auto& q : a) rhs_pow += pow_abs(q.get_d(), p);
    double rhs = std::pow(rhs_pow, 1.0 / p);
    double rel = std::fabs(lhs - rhs) /
                 std::max(rhs, std::numeric_limits<double>::min());
    r.violations = (rel > 1e-12) ? 1 : 0;
    r.worst_margin = Margin(1e-12 - rel);
  }
  if (r.violations)
    r.witness = json{{"p", p},
                     {"a", rationals_to_json(a)},
                     {"x", functions_to_json(x)}};
  return r;
}

StepFunction random_step_function(SplitMix64& rng) {
  auto J = static_cast<std::uint32_t>(rng.int_in(1, 6));
  auto r = static_cast<std::uint32_t>(rng.int_in(0, 6));
  std::vector<Rational> v;
  v.reserve(std::size_t(J) << r);
  for (std::uint64_t t = 0; t < (std::uint64_t(J) << r); ++t)
    v.push_back(rng.rational(-64, 64, 64));
  return StepFunction(J, r, std::move(v));
}

StepFunction random_nonneg_step_function(SplitMix64& rng) {
  auto J = static_cast<std::uint32_t>(rng.int_in(1, 6));
  auto r = static_cast<std::uint32_t>(rng.int_in(0, 6));
  std::vector<Rational> v;
  v.reserve(std::size_t(J) << r);
  for (std::uint64_t t = 0; t < (std::uint64_t(J) << r); ++t)
    v.push_back(rng.rational(0, 64, 64));
  return StepFunction(J, r, std::move(v));
}

std::vector<StepFunction> random_disjoint_normalized_family(SplitMix64& rng,
                                                            std::size_t n,
                                                            double p) {
  std::vector<StepFunction> out;
  out.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    // A single dyadic bump inside (k-1, k) of width 2^-d; the height that
    // makes norm_p exactly 1 is 2^(d/p), which is rational for p = 1 and,
    // with even d, for p = 2.
    std::uint32_t d;
    Rational height;
    if (p == 2.0) {
      d = 2 * static_cast<std::uint32_t>(rng.int_in(0, 3));
      height = pow2(d / 2);
    } else if (p == 1.0) {
      d = static_cast<std::uint32_t>(rng.int_in(0, 6));
      height = pow2(d);
    } else {
      d = static_cast<std::uint32_t>(rng.int_in(0, 6));
      height = rational_from_double(std::exp2(double(d) / p));
    }
    auto offset = static_cast<std::uint64_t>(
        rng.int_in(0, (std::int64_t(1) << d) - 1));
    std::vector<Rational> v(std::size_t(k) << d, Rational(0));
    v[((std::uint64_t(k) - 1) << d) + offset] = height;
    out.emplace_back(static_cast<std::uint32_t>(k), d, std::move(v));
  }
  return out;
}

std::vector<StepFunction> random_nonneg_normalized_family(SplitMix64& rng,
                                                          std::size_t n,
                                                          double p) {
  std::vector<StepFunction> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    StepFunction f = random_nonneg_step_function(rng);
    while (f.norm_1() == 0) f = random_nonneg_step_function(rng);
    if (p == 1.0) {
      out.push_back(scale(f, Rational(1 / f.norm_1())));
    } else {
      out.push_back(
          scale(f, rational_from_double(1.0 / f.norm_p_float(p))));
    }
  }
  return out;
}

namespace {

struct Agg {
  std::uint64_t violations = 0;
  bool has = false;
  Margin margin = Rational(0);
  std::uint64_t trial = 0;  // 0-based

  void take(const TrialResult& res, std::uint64_t t) {
    if (res.violation) ++violations;
    if (!has || margin_less(res.margin, margin) ||
        (margin_equal(res.margin, margin) && t < trial)) {
      margin = res.margin;
      trial = t;
      has = true;
    }
  }
  void merge(const Agg& other) {
    violations += other.violations;
    if (!other.has) return;
    if (!has || margin_less(other.margin, margin) ||
        (margin_equal(other.margin, margin) && other.trial < trial)) {
      margin = other.margin;
      trial = other.trial;
      has = true;
    }
  }
};

TrialResult guarded(const TrialFn& fn, std::uint64_t t, json* witness) {
  try {
    return fn(t, witness);
  } catch (const std::exception& e) {
    if (witness) *witness = json{{"error", e.what()}};
    return {true, Margin(-std::numeric_limits<double>::infinity())};
  }
}

VerifyReport finish(std::string check, std::uint64_t trials, const TrialFn& fn,
                    const Agg& agg) {
  VerifyReport r;
  r.check = std::move(check);
  r.trials = trials;
  r.violations = agg.violations;
  if (agg.has) {
    r.worst_margin = agg.margin;
    r.worst_trial = agg.trial + 1;
    if (agg.violations > 0) {
      json witness;
      guarded(fn, agg.trial, &witness);
      r.witness = std::move(witness);
    }
  }
  return r;
}

}  // namespace

VerifyReport run_trials_serial(std::string check, std::uint64_t trials,
                               const TrialFn& fn) {
  Agg agg;
  for (std::uint64_t t = 0; t < trials; ++t) agg.take(guarded(fn, t, nullptr), t);
  return finish(std::move(check), trials, fn, agg);
}

VerifyReport run_trials_parallel(std::string check, std::uint64_t trials,
                                 const TrialFn& fn, int threads) {
  if (threads <= 1 || trials <= 1)
    return run_trials_serial(std::move(check), trials, fn);
  Agg agg;
#pragma omp parallel num_threads(threads)
  {
    Agg local;
#pragma omp for schedule(dynamic, 8) nowait
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t) {
      auto u = static_cast<std::uint64_t>(t);
      local.take(guarded(fn, u, nullptr), u);
    }
#pragma omp critical
    agg.merge(local);
  }
  return finish(std::move(check), trials, fn, agg);
}

std::vector<std::string> suite_names() {
  return {"fdd",   "prop2",      "norms",       "projections",
          "chain", "rademacher", "disjoint-lp", "permutation"};
}

bool suite_uses_index_scan(const std::string& suite) {
  return suite == "norms" || suite == "permutation";
}

namespace {

struct SuiteSpec {
  std::uint64_t trials = 0;
  TrialFn fn;
};

SuiteSpec build_suite(const BasisContext& ctx, const SuiteConfig& cfg) {
  std::uint64_t seed = cfg.seed;
  SuiteSpec spec;
  if (cfg.suite == "fdd") {
    spec.trials = cfg.trials ? cfg.trials : 1000;
    spec.fn = [&ctx, seed](std::uint64_t t, json* w) -> TrialResult {
      SplitMix64 rng(trial_seed(seed, t));
      auto n = static_cast<std::size_t>(rng.int_in(1, 50));
      std::vector<Rational> a(n), b(n);
      for (std::size_t k = 0; k < n; ++k) {
        a[k] = rng.rational(-64, 64, 64);
        b[k] = rng.rational(-64, 64, 64);
      }
      FddBounds fb = fdd_bounds(ctx, a, b);
      Rational margin(std::min(Rational(fb.middle - fb.lower),
                               Rational(fb.upper - fb.middle)));
      if (w) *w = json{{"a", rationals_to_json(a)}, {"b", rationals_to_json(b)}};
      return {margin < 0, Margin(margin)};
    };
  } else if (cfg.suite == "prop2") {
    spec.trials = cfg.trials ? cfg.trials : 1000;
    std::uint64_t imax = cfg.imax ? cfg.imax : 500;
    spec.fn = [&ctx, seed, imax](std::uint64_t t, json* w) -> TrialResult {
      SplitMix64 rng(trial_seed(seed, t));
      auto i = static_cast<std::uint64_t>(
          rng.int_in(1, static_cast<std::int64_t>(imax)));
      Rational a = rng.rational(-64, 64, 64);
      Rational b = rng.rational(-64, 64, 64);
      Prop2Case c = prop2_case(ctx, i, a, b);
      if (w)
        *w = json{{"i", i},
                  {"a", to_fraction_string(a)},
                  {"b", to_fraction_string(b)},
                  {"included", c.included}};
      return {!c.ok, Margin(c.margin)};
    };
  } else if (cfg.suite == "norms") {
    spec.trials = cfg.imax ? cfg.imax : 2000;
    spec.fn = [&ctx](std::uint64_t t, json* w) -> TrialResult {
      std::uint64_t i = t + 1;
      // Materialize x and y on the minimal grid covering the Haar support.
      // When the paired interval lies elsewhere it holds the constant 2,
      // which adds exactly 2 to the norm and only positive cells, so the
      // check stays exact without a grid out to interval pi(i).
      HaarIndex hi = global_to_index(i);
      std::uint64_t p = ctx.permutation()(i);
      if (p == 0 || p > StepFunction::kMaxCells)
        throw std::length_error("paired interval index out of range");
      bool included = (p == hi.j);
      DenseAccumulator ax(hi.j, hi.n + 1);
      if (included) ax.add_unit(hi.j, Rational(2));
      accumulate_haar_abs(ax, hi, Rational(1));
      DenseAccumulator ay = ax;
      accumulate_haar(ax, hi, Rational(1));
      accumulate_haar(ay, hi, Rational(-1));
      StepFunction xl = ax.to_function();
      StepFunction yl = ay.to_function();
      Rational far(included ? 0 : 2);
      Rational mx(-rational_abs(Rational(xl.norm_1() + far - 3)));
      Rational my(-rational_abs(Rational(yl.norm_1() + far - 3)));
      Rational cells(std::min(xl.min_value(), yl.min_value()));
      if (!included) cells = std::min(cells, Rational(0));
      Rational margin(std::min({mx, my, cells}));
      if (w) *w = json{{"i", i}};
      return {margin < 0, Margin(margin)};
    };
  } else if (cfg.suite == "projections") {
    spec.trials = cfg.trials ? cfg.trials : 1000;
    spec.fn = [seed](std::uint64_t t, json* w) -> TrialResult {
      SplitMix64 rng(trial_seed(seed, t));
      StepFunction f = random_step_function(rng);
      VerifyReport r = projection_check(f);
      if (w) *w = json{{"f", function_to_json(f)}};
      return {r.violations > 0, *r.worst_margin};
    };
  } else if (cfg.suite == "chain") {
    spec.trials = cfg.trials ? cfg.trials : 200;
    spec.fn = [seed](std::uint64_t t, json* w) -> TrialResult {
      SplitMix64 rng(trial_seed(seed, t));
      auto n = static_cast<std::size_t>(rng.int_in(1, 8));
      std::vector<StepFunction> x;
      std::vector<Rational> a;
      for (std::size_t k = 0; k < n; ++k) {
        x.push_back(random_nonneg_step_function(rng));
        a.push_back(rng.rational(-64, 64, 64));
      }
      VerifyReport r = pointwise_chain(x, a);
      if (w)
        *w = json{{"a", rationals_to_json(a)}, {"x", functions_to_json(x)}};
      return {r.violations > 0, *r.worst_margin};
    };
  } else if (cfg.suite == "rademacher") {
    spec.trials = cfg.trials ? cfg.trials : 50;
    double p = cfg.p > 0 ? cfg.p : 2.0;
    spec.fn = [seed, p](std::uint64_t t, json* w) -> TrialResult {
      SplitMix64 rng(trial_seed(seed, t));
      auto n = static_cast<std::size_t>(rng.int_in(1, 12));
      bool disjoint = (t % 2 == 0);
      std::vector<StepFunction> x =
          disjoint ? random_disjoint_normalized_family(rng, n, p)
                   : random_nonneg_normalized_family(rng, n, p);
      std::vector<Rational> a(n);
      bool nonzero = false;
      while (!nonzero)
        for (std::size_t k = 0; k < n; ++k) {
          a[k] = rng.rational(-8, 8, 8);
          nonzero = nonzero || a[k] != 0;
        }
      double R = rademacher_ratio(x, a, p);
      double window = std::min(R - 0.70, std::max(1.0, std::sqrt(p)) - R);
      double margin = window;
      if (disjoint) {
        margin = std::min(margin, 1e-12 - std::fabs(R - 1.0));
        if (p == 1.0 || p == 2.0) {
          auto exact = rademacher_ratio_exact(x, a, static_cast<int>(p));
          if (!exact || *exact != 1) margin = std::min(margin, -1.0);
        }
      }
      if (w)
        *w = json{{"p", p},
                  {"disjoint", disjoint},
                  {"ratio", R},
                  {"a", rationals_to_json(a)},
                  {"x", functions_to_json(x)}};
      return {margin < 0, Margin(margin)};
    };
  } else if (cfg.suite == "disjoint-lp") {
    spec.trials = cfg.trials ? cfg.trials : 100;
    double p = cfg.p > 0 ? cfg.p : 3.0;
    spec.fn = [seed, p](std::uint64_t t, json* w) -> TrialResult {
      SplitMix64 rng(trial_seed(seed, t));
      auto n = static_cast<std::size_t>(rng.int_in(1, 8));
      std::vector<StepFunction> x = random_disjoint_normalized_family(rng, n, p);
      std::vector<Rational> a(n);
      for (std::size_t k = 0; k < n; ++k) a[k] = rng.rational(-64, 64, 64);
      VerifyReport r = disjoint_lp_identity(x, a, p);
      if (w)
        *w = json{{"p", p},
                  {"a", rationals_to_json(a)},
                  {"x", functions_to_json(x)}};
      return {r.violations > 0, *r.worst_margin};
    };
  } else if (cfg.suite == "permutation") {
    spec.trials = cfg.imax ? cfg.imax : 100000;
    spec.fn = [&ctx](std::uint64_t t, json* w) -> TrialResult {
      std::uint64_t i = t + 1;
      std::uint64_t v = ctx.permutation()(i);
      Rational margin;
      if (i == 1) {
        margin = (v == 1) ? 0 : -1;
      } else {
        margin = Rational(static_cast<unsigned long>(v));
        margin -= host_interval(i);
        margin -= 1;
      }
      if (w) *w = json{{"i", i}, {"pi", v}};
      return {margin < 0, Margin(margin)};
    };
  } else {
    throw std::invalid_argument("unknown suite \"" + cfg.suite + "\"");
  }
  return spec;
}

}  // namespace

VerifyReport run_suite(const BasisContext& ctx, const SuiteConfig& cfg) {
  SuiteSpec spec = build_suite(ctx, cfg);
  VerifyReport r =
      cfg.threads > 1
          ? run_trials_parallel(cfg.suite, spec.trials, spec.fn, cfg.threads)
          : run_trials_serial(cfg.suite, spec.trials, spec.fn);
  if (cfg.suite == "permutation") {
    // The per-index scan cannot see duplicates; close that gap with the
    // sequential check.
    AdmissibilityResult adm = is_admissible(ctx.permutation(), spec.trials);
    if (!adm.ok) {
      ++r.violations;
      Margin bad = Rational(-1);
      if (!r.worst_margin || margin_less(bad, *r.worst_margin)) {
        r.worst_margin = bad;
        r.worst_trial = adm.witness;
      }
      r.witness = json{{"i", adm.witness}, {"reason", adm.reason}};
    }
  }
  return r;
}

}  // namespace nnb
