#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nnb/rational.hpp"

namespace nnb {

/// Piecewise-constant function on (0, infinity) with dyadic breakpoints.
///
/// A function is stored as its values on the open cells
/// (t * 2^-r, (t+1) * 2^-r), t = 0 .. J*2^r - 1, and vanishes beyond (0, J).
/// Values are exact rationals. Functions are immutable once constructed and
/// may be shared freely across threads.
///
/// Two instances are mathematically equal when they agree after refining to a
/// common resolution and support length; no canonical form is enforced, and
/// every operation aligns its operands itself.
class StepFunction {
 public:
  // Guards against runaway grids; j * 2^r cells must stay below kMaxCells.
  static constexpr std::uint32_t kMaxResolution = 26;
  static constexpr std::uint64_t kMaxCells = std::uint64_t(1) << 28;

  /// Zero function on (0,1).
  StepFunction();

  /// Throws std::invalid_argument unless values.size() == support_len * 2^resolution.
  StepFunction(std::uint32_t support_len, std::uint32_t resolution,
               std::vector<Rational> values);

  static StepFunction zero(std::uint32_t support_len = 1,
                           std::uint32_t resolution = 0);
  /// Indicator of the unit interval (m-1, m), m >= 1.
  static StepFunction unit_indicator(std::uint32_t m);
  /// c * 1_{(m-1, m)}.
  static StepFunction unit_scaled(std::uint32_t m, const Rational& c);

  std::uint32_t support_len() const { return support_len_; }
  std::uint32_t resolution() const { return resolution_; }
  const std::vector<Rational>& values() const { return values_; }
  std::uint64_t cell_count() const { return values_.size(); }

  /// Same function on a finer grid (r >= resolution) or wider support
  /// (j >= support_len).
  StepFunction refined(std::uint32_t r) const;
  StepFunction extended(std::uint32_t j) const;

  /// Shortest representation of the same function: trailing zero unit
  /// intervals trimmed, equal cell pairs merged.
  StepFunction canonicalized() const;

  Rational norm_1() const;
  Rational norm_2_sq() const;
  Rational integral() const;
  /// (2^-r * sum |v|^p)^(1/p) in double precision; requires p >= 1.
  double norm_p_float(double p) const;

  /// Mean of the function over (m-1, m) for m = 1..J. These are the
  /// coefficients of the conditional expectation onto unit-interval
  /// indicators.
  std::vector<Rational> unit_interval_averages() const;
  /// E f as a step function at resolution 0.
  StepFunction conditional_expectation() const;

  bool is_nonnegative() const;
  Rational min_value() const;

  /// Mathematical equality (representation independent).
  bool operator==(const StepFunction& other) const;

  /// Both inputs re-represented on the common grid
  /// (max support, max resolution).
  static std::pair<StepFunction, StepFunction> align(const StepFunction& f,
                                                     const StepFunction& g);

  /// sum_k coeff_k * fn_k on the joint grid, one pass. Null/zero terms are
  /// skipped.
  struct Term {
    const StepFunction* fn;
    Rational coeff;
  };
  static StepFunction weighted_sum(const std::vector<Term>& terms);

 private:
  std::uint32_t support_len_;
  std::uint32_t resolution_;
  std::vector<Rational> values_;
};

StepFunction add(const StepFunction& f, const StepFunction& g);
StepFunction sub(const StepFunction& f, const StepFunction& g);
StepFunction scale(const StepFunction& f, const Rational& c);
StepFunction abs(const StepFunction& f);
StepFunction pointwise_max(const StepFunction& f, const StepFunction& g);
StepFunction pointwise_mul(const StepFunction& f, const StepFunction& g);

/// Mutable dense grid for incremental accumulation; used by the partial-sum
/// profile and the verification kernels, where building a fresh StepFunction
/// per term would dominate the runtime. Not part of the immutable function
/// algebra.
class DenseAccumulator {
 public:
  DenseAccumulator(std::uint32_t support_len, std::uint32_t resolution);

  /// acc += coeff * fn. Requires fn.support_len <= support_len and
  /// fn.resolution <= resolution.
  void add_scaled(const StepFunction& fn, const Rational& coeff);
  /// acc += coeff on the unit interval (m-1, m).
  void add_unit(std::uint32_t m, const Rational& coeff);

  void add_cell(std::uint64_t t, const Rational& v) {
    cells_.at(static_cast<std::size_t>(t)) += v;
  }
  void sub_cell(std::uint64_t t, const Rational& v) {
    cells_.at(static_cast<std::size_t>(t)) -= v;
  }

  Rational norm_1() const;
  StepFunction to_function() const;

  std::uint32_t support_len() const { return support_len_; }
  std::uint32_t resolution() const { return resolution_; }

 private:
  std::uint32_t support_len_;
  std::uint32_t resolution_;
  std::vector<Rational> cells_;
};

}  // namespace nnb
