#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nnb/basis.hpp"
#include "nnb/rng.hpp"

namespace nnb {

/// Slack of a checked inequality: non-negative when it holds, negative on a
/// violation. Exact checks carry rationals, float checks carry doubles; a
/// given check uses one kind throughout.
using Margin = std::variant<Rational, double>;

bool margin_less(const Margin& lhs, const Margin& rhs);
double margin_to_double(const Margin& m);

struct VerifyReport {
  std::string check;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  std::optional<Margin> worst_margin;
  std::uint64_t worst_trial = 0;  // 1-based trial with the smallest margin
  nlohmann::json witness;         // inputs of the worst trial when violations > 0
};

/// The two-sided comparison behind the finite-dimensional decomposition:
///   (1/2) sum|a_i| + (1/8) norm_1(sum b_i h_i)
///     <= norm_1(sum a_i u_i + sum b_i h_i)
///     <= 3 sum|a_i| + norm_1(sum b_i h_i).
/// Coefficients index blocks 1..N; shorter vectors are zero-padded.
struct FddBounds {
  Rational lower, middle, upper;
  bool holds() const { return lower <= middle && middle <= upper; }
};
FddBounds fdd_bounds(const BasisContext& ctx, const std::vector<Rational>& a,
                     const std::vector<Rational>& b);

/// Lower bounds for norm_1(a x_i + b y_i). When the paired interval hosts the
/// support of h_i (included case, support size 2^-s) the bound is
/// max(|a|,|b|), reached through the restricted-norm expression
///   2^(-s-1) (|(2^(s+1)+2)a + 2b| + |(2^(s+1)+2)b + 2a|);
/// when the interval is disjoint from the support the bound is |a|+|b|.
struct Prop2Case {
  bool included = false;
  std::uint32_t s = 0;  // set in the included case
  Rational norm;
  Rational bound;
  Rational intermediate;  // included case: the restricted-norm expression
  Rational margin;
  bool ok = true;
};
Prop2Case prop2_case(const BasisContext& ctx, std::uint64_t i,
                     const Rational& a, const Rational& b);
VerifyReport prop2_lower(const BasisContext& ctx, std::uint64_t i,
                         const Rational& a, const Rational& b);

/// norm_1(Ef) <= norm_1(f) and norm_1(f - Ef) <= 2 norm_1(f), E being the
/// conditional expectation onto unit intervals.
VerifyReport projection_check(const StepFunction& f);

/// Cellwise max_n |a_n| x_n <= (sum a_n^2 x_n^2)^(1/2) <= sum |a_n| x_n for
/// non-negative families, compared through exact squares. Throws
/// std::invalid_argument if some x_n has a negative cell.
VerifyReport pointwise_chain(const std::vector<StepFunction>& x,
                             const std::vector<Rational>& a);

/// Exhaustive Rademacher average against the square function:
///   R = (2^-N sum_eps norm_p(sum_n eps_n a_n x_n)^p)^(1/p)
///       / norm_p((sum_n a_n^2 x_n^2)^(1/2)).
/// Requires 1 <= N <= 14 (cost guard) and every norm_p(x_n) = 1 within
/// 1e-12; throws std::invalid_argument otherwise.
double rademacher_ratio(const std::vector<StepFunction>& x,
                        const std::vector<Rational>& a, double p);

/// Exact-rational variant for p in {1, 2}. Works whenever the square
/// function is cellwise rational (disjoint supports in particular) and the
/// final ratio is rational; returns nullopt when a square root fails to be
/// exact. Same guards as rademacher_ratio minus the normalization precheck.
std::optional<Rational> rademacher_ratio_exact(
    const std::vector<StepFunction>& x, const std::vector<Rational>& a, int p);

/// Two-sided constants for comparing norm_p(sum a_n x_n) with the
/// coefficient l_p norm: (1/K, K) for p <= 2; for p > 2 the lower constant
/// degrades to (K^2 B_p)^(-1/(1-theta)) with theta = (p-2)/(2(p-1)) solving
/// 1/2 = theta + (1-theta)/p.
std::pair<double, double> lp_equivalence_constants(double K, double p,
                                                   double B_p);
double lp_interpolation_theta(double p);
/// Default moment constant: 1 for p <= 2, sqrt(p) above.
double default_khintchine_bp(double p);

/// norm_p(sum a_n x_n) = (sum |a_n|^p)^(1/p) for disjointly supported
/// p-normalized non-negative x_n; exact for p in {1, 2}, relative tolerance
/// 1e-12 otherwise. Throws std::invalid_argument on overlapping supports,
/// a negative cell, or a non-normalized x_n.
VerifyReport disjoint_lp_identity(const std::vector<StepFunction>& x,
                                  const std::vector<Rational>& a, double p);

// Seeded generators shared by the verification suites and the tests. All
// draw from an explicit stream so a trial is a pure function of its seed.

/// J in [1,6], r in [0,6], cell values with numerators in [-64,64] and
/// denominators in [1,64].
StepFunction random_step_function(SplitMix64& rng);
/// Same shape, numerators in [0,64].
StepFunction random_nonneg_step_function(SplitMix64& rng);
/// n pairwise disjoint dyadic bumps, bump k inside (k-1, k), each exactly
/// p-normalized for p in {1,2} and float-normalized otherwise.
std::vector<StepFunction> random_disjoint_normalized_family(SplitMix64& rng,
                                                            std::size_t n,
                                                            double p);
/// n independent non-negative nonzero functions scaled to norm_p 1 in double
/// precision.
std::vector<StepFunction> random_nonneg_normalized_family(SplitMix64& rng,
                                                          std::size_t n,
                                                          double p);

// Suite runner. A trial is (violation flag, margin) as a pure function of
// its 0-based index; the aggregate is order-independent (violations summed,
// (margin, index) min-reduced), so thread count cannot change the report.
// The witness is produced by re-running the worst trial once.

struct TrialResult {
  bool violation = false;
  Margin margin = Rational(0);
};
using TrialFn =
    std::function<TrialResult(std::uint64_t t, nlohmann::json* witness)>;

VerifyReport run_trials_serial(std::string check, std::uint64_t trials,
                               const TrialFn& fn);
VerifyReport run_trials_parallel(std::string check, std::uint64_t trials,
                                 const TrialFn& fn, int threads);

/// Named suites behind `verify <suite>`. Zero-valued fields take the suite's
/// defaults (trials, imax, p as documented in the README).
struct SuiteConfig {
  std::string suite;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t imax = 0;
  double p = 0.0;
  int threads = 1;
};

std::vector<std::string> suite_names();
bool suite_uses_index_scan(const std::string& suite);
VerifyReport run_suite(const BasisContext& ctx, const SuiteConfig& cfg);

}  // namespace nnb
