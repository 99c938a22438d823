#include "nnb/stepfn.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace nnb {

namespace {

std::uint64_t checked_cells(std::uint32_t support_len,
                            std::uint32_t resolution) {
  if (support_len == 0) throw std::invalid_argument("support_len must be >= 1");
  if (resolution > StepFunction::kMaxResolution)
    throw std::invalid_argument("resolution exceeds limit");
  std::uint64_t cells = std::uint64_t(support_len) << resolution;
  if (cells > StepFunction::kMaxCells)
    throw std::length_error("grid too large");
  return cells;
}

}  // namespace

StepFunction::StepFunction() : support_len_(1), resolution_(0), values_(1) {}

StepFunction::StepFunction(std::uint32_t support_len, std::uint32_t resolution,
                           std::vector<Rational> values)
    : support_len_(support_len),
      resolution_(resolution),
      values_(std::move(values)) {
  if (values_.size() != checked_cells(support_len, resolution))
    throw std::invalid_argument("values length must equal support_len * 2^resolution");
}

StepFunction StepFunction::zero(std::uint32_t support_len,
                                std::uint32_t resolution) {
  std::uint64_t cells = checked_cells(support_len, resolution);
  return StepFunction(support_len, resolution,
                      std::vector<Rational>(static_cast<std::size_t>(cells)));
}

StepFunction StepFunction::unit_indicator(std::uint32_t m) {
  return unit_scaled(m, Rational(1));
}

StepFunction StepFunction::unit_scaled(std::uint32_t m, const Rational& c) {
  if (m == 0) throw std::invalid_argument("unit interval index must be >= 1");
  std::vector<Rational> v(m);
  v[m - 1] = c;
  return StepFunction(m, 0, std::move(v));
}

StepFunction StepFunction::refined(std::uint32_t r) const {
  if (r < resolution_)
    throw std::invalid_argument("refinement must not lower the resolution");
  if (r == resolution_) return *this;
  checked_cells(support_len_, r);
  std::uint32_t factor = std::uint32_t(1) << (r - resolution_);
  std::vector<Rational> v;
  v.reserve(values_.size() * factor);
  for (const Rational& x : values_)
    for (std::uint32_t k = 0; k < factor; ++k) v.push_back(x);
  return StepFunction(support_len_, r, std::move(v));
}

StepFunction StepFunction::extended(std::uint32_t j) const {
  if (j < support_len_)
    throw std::invalid_argument("extension must not shrink the support");
  if (j == support_len_) return *this;
  checked_cells(j, resolution_);
  std::vector<Rational> v = values_;
  v.resize(std::size_t(j) << resolution_);
  return StepFunction(j, resolution_, std::move(v));
}

StepFunction StepFunction::canonicalized() const {
  // Trim trailing all-zero unit intervals (keep at least one).
  std::uint64_t per_unit = std::uint64_t(1) << resolution_;
  std::uint32_t j = support_len_;
  while (j > 1) {
    bool all_zero = true;
    for (std::uint64_t t = (j - 1) * per_unit; t < j * per_unit; ++t)
      if (values_[static_cast<std::size_t>(t)] != 0) {
        all_zero = false;
        break;
      }
    if (!all_zero) break;
    --j;
  }
  std::vector<Rational> v(values_.begin(),
                          values_.begin() + static_cast<std::ptrdiff_t>(
                                                std::uint64_t(j) << resolution_));
  std::uint32_t r = resolution_;
  while (r > 0) {
    bool mergeable = true;
    for (std::size_t t = 0; t + 1 < v.size(); t += 2)
      if (v[t] != v[t + 1]) {
        mergeable = false;
        break;
      }
    if (!mergeable) break;
    std::vector<Rational> half(v.size() / 2);
    for (std::size_t t = 0; t < half.size(); ++t) half[t] = v[2 * t];
    v = std::move(half);
    --r;
  }
  return StepFunction(j, r, std::move(v));
}

Rational StepFunction::norm_1() const {
  Rational sum(0);
  for (const Rational& x : values_) {
    if (sgn(x) >= 0)
      sum += x;
    else
      sum -= x;
  }
  return Rational(sum * pow2(-static_cast<long>(resolution_)));
}

Rational StepFunction::norm_2_sq() const {
  Rational sum(0);
  for (const Rational& x : values_) sum += x * x;
  return Rational(sum * pow2(-static_cast<long>(resolution_)));
}

Rational StepFunction::integral() const {
  Rational sum(0);
  for (const Rational& x : values_) sum += x;
  return Rational(sum * pow2(-static_cast<long>(resolution_)));
}

double StepFunction::norm_p_float(double p) const {
  if (!(p >= 1.0)) throw std::invalid_argument("norm_p_float requires p >= 1");
  double cell = std::ldexp(1.0, -static_cast<int>(resolution_));
  double sum = 0.0;
  bool int_p = p == std::floor(p) && p <= 8.0;
  int ip = static_cast<int>(p);
  for (const Rational& x : values_) {
    if (sgn(x) == 0) continue;
    double v = std::fabs(x.get_d());
    if (int_p) {
      double acc = v;
      for (int k = 1; k < ip; ++k) acc *= v;
      sum += acc;
    } else {
      sum += std::pow(v, p);
    }
  }
  return std::pow(sum * cell, 1.0 / p);
}

std::vector<Rational> StepFunction::unit_interval_averages() const {
  std::uint64_t per_unit = std::uint64_t(1) << resolution_;
  Rational weight = pow2(-static_cast<long>(resolution_));
  std::vector<Rational> means(support_len_);
  for (std::uint32_t m = 0; m < support_len_; ++m) {
    Rational sum(0);
    for (std::uint64_t t = m * per_unit; t < (m + 1) * per_unit; ++t)
      sum += values_[static_cast<std::size_t>(t)];
    means[m] = sum * weight;
  }
  return means;
}

StepFunction StepFunction::conditional_expectation() const {
  return StepFunction(support_len_, 0, unit_interval_averages());
}

bool StepFunction::is_nonnegative() const {
  for (const Rational& x : values_)
    if (sgn(x) < 0) return false;
  return true;
}

Rational StepFunction::min_value() const {
  Rational m = values_.front();
  for (const Rational& x : values_)
    if (x < m) m = x;
  return m;
}

bool StepFunction::operator==(const StepFunction& other) const {
  auto [a, b] = align(*this, other);
  return a.values_ == b.values_;
}

std::pair<StepFunction, StepFunction> StepFunction::align(
    const StepFunction& f, const StepFunction& g) {
  std::uint32_t j = std::max(f.support_len_, g.support_len_);
  std::uint32_t r = std::max(f.resolution_, g.resolution_);
  return {f.refined(r).extended(j), g.refined(r).extended(j)};
}

StepFunction StepFunction::weighted_sum(const std::vector<Term>& terms) {
  std::uint32_t j = 1, r = 0;
  for (const Term& t : terms) {
    if (!t.fn || sgn(t.coeff) == 0) continue;
    j = std::max(j, t.fn->support_len());
    r = std::max(r, t.fn->resolution());
  }
  DenseAccumulator acc(j, r);
  for (const Term& t : terms) {
    if (!t.fn || sgn(t.coeff) == 0) continue;
    acc.add_scaled(*t.fn, t.coeff);
  }
  return acc.to_function();
}

namespace {

template <typename Op>
StepFunction cellwise(const StepFunction& f, const StepFunction& g, Op op) {
  auto [a, b] = StepFunction::align(f, g);
  std::vector<Rational> v(a.values().size());
  for (std::size_t t = 0; t < v.size(); ++t)
    v[t] = op(a.values()[t], b.values()[t]);
  return StepFunction(a.support_len(), a.resolution(), std::move(v));
}

}  // namespace

StepFunction add(const StepFunction& f, const StepFunction& g) {
  return cellwise(f, g,
                  [](const Rational& x, const Rational& y) { return Rational(x + y); });
}

StepFunction sub(const StepFunction& f, const StepFunction& g) {
  return cellwise(f, g,
                  [](const Rational& x, const Rational& y) { return Rational(x - y); });
}

StepFunction scale(const StepFunction& f, const Rational& c) {
  std::vector<Rational> v(f.values().size());
  for (std::size_t t = 0; t < v.size(); ++t) v[t] = f.values()[t] * c;
  return StepFunction(f.support_len(), f.resolution(), std::move(v));
}

StepFunction abs(const StepFunction& f) {
  std::vector<Rational> v(f.values().size());
  for (std::size_t t = 0; t < v.size(); ++t) v[t] = rational_abs(f.values()[t]);
  return StepFunction(f.support_len(), f.resolution(), std::move(v));
}

StepFunction pointwise_max(const StepFunction& f, const StepFunction& g) {
  return cellwise(f, g, [](const Rational& x, const Rational& y) {
    return x >= y ? x : y;
  });
}

StepFunction pointwise_mul(const StepFunction& f, const StepFunction& g) {
  return cellwise(f, g,
                  [](const Rational& x, const Rational& y) { return Rational(x * y); });
}

DenseAccumulator::DenseAccumulator(std::uint32_t support_len,
                                   std::uint32_t resolution)
    : support_len_(support_len),
      resolution_(resolution),
      cells_(static_cast<std::size_t>(checked_cells(support_len, resolution))) {}

void DenseAccumulator::add_scaled(const StepFunction& fn,
                                  const Rational& coeff) {
  if (fn.support_len() > support_len_ || fn.resolution() > resolution_)
    throw std::invalid_argument("accumulator grid too coarse for operand");
  if (sgn(coeff) == 0) return;
  std::uint32_t shift = resolution_ - fn.resolution();
  std::uint64_t span = std::uint64_t(1) << shift;
  const std::vector<Rational>& v = fn.values();
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (sgn(v[t]) == 0) continue;
    Rational contribution = v[t] * coeff;
    std::uint64_t base = std::uint64_t(t) << shift;
    for (std::uint64_t k = 0; k < span; ++k)
      cells_[static_cast<std::size_t>(base + k)] += contribution;
  }
}

void DenseAccumulator::add_unit(std::uint32_t m, const Rational& coeff) {
  if (m == 0 || m > support_len_)
    throw std::invalid_argument("unit interval outside accumulator support");
  if (sgn(coeff) == 0) return;
  std::uint64_t per_unit = std::uint64_t(1) << resolution_;
  for (std::uint64_t t = (m - 1) * per_unit; t < m * per_unit; ++t)
    cells_[static_cast<std::size_t>(t)] += coeff;
}

Rational DenseAccumulator::norm_1() const {
  Rational sum(0);
  for (const Rational& x : cells_) {
    if (sgn(x) >= 0)
      sum += x;
    else
      sum -= x;
  }
  return Rational(sum * pow2(-static_cast<long>(resolution_)));
}

StepFunction DenseAccumulator::to_function() const {
  return StepFunction(support_len_, resolution_, cells_);
}

}  // namespace nnb
