#include "nnb/haar.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace nnb {

namespace {

void require_valid(const HaarIndex& idx) {
  if (!idx.valid()) throw std::invalid_argument("invalid Haar index");
}

std::uint64_t triangle(std::uint64_t s) {
  unsigned __int128 t = static_cast<unsigned __int128>(s) * (s - 1) / 2;
  if (t > UINT64_MAX) throw std::overflow_error("global index overflow");
  return static_cast<std::uint64_t>(t);
}

}  // namespace

std::uint64_t lex_rank(const HaarIndex& idx) {
  require_valid(idx);
  return (std::uint64_t(1) << idx.n) + idx.i - 1;
}

HaarIndex from_lex_rank(std::uint32_t j, std::uint64_t l) {
  if (j == 0 || l == 0) throw std::invalid_argument("lex rank must be >= 1");
  std::uint32_t n = static_cast<std::uint32_t>(std::bit_width(l) - 1);
  return HaarIndex{j, n, l - (std::uint64_t(1) << n) + 1};
}

HaarIndex global_to_index(std::uint64_t g) {
  if (g == 0) throw std::invalid_argument("global index must be >= 1");
  // Smallest s with g <= s(s-1)/2; diagonal s holds pairs j + l = s.
  std::uint64_t s =
      static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * double(g))) / 2.0);
  while (s >= 2 && triangle(s - 1) >= g) --s;
  while (triangle(s) < g) ++s;
  std::uint64_t j = g - triangle(s - 1);
  std::uint64_t l = s - j;
  return from_lex_rank(static_cast<std::uint32_t>(j), l);
}

std::uint64_t index_to_global(const HaarIndex& idx) {
  std::uint64_t l = lex_rank(idx);
  std::uint64_t s = idx.j + l;
  return triangle(s - 1) + idx.j;
}

std::uint32_t host_interval(std::uint64_t g) { return global_to_index(g).j; }

StepFunction haar_fn(const HaarIndex& idx) {
  require_valid(idx);
  DenseAccumulator acc(idx.j, idx.n + 1);
  accumulate_haar(acc, idx, Rational(1));
  return acc.to_function();
}

void accumulate_haar(DenseAccumulator& acc, const HaarIndex& idx,
                     const Rational& coeff) {
  require_valid(idx);
  if (sgn(coeff) == 0) return;
  if (acc.support_len() < idx.j || acc.resolution() < idx.n + 1)
    throw std::invalid_argument("accumulator grid too coarse for Haar index");
  std::uint32_t shift = acc.resolution() - (idx.n + 1);
  std::uint64_t cells_per_half = std::uint64_t(1) << shift;
  std::uint64_t base =
      ((std::uint64_t(idx.j - 1) << (idx.n + 1)) + 2 * (idx.i - 1)) << shift;
  // +2^n on the left half-support, -2^n on the right.
  Rational height(coeff * pow2(static_cast<long>(idx.n)));
  for (std::uint64_t k = 0; k < cells_per_half; ++k) {
    acc.add_cell(base + k, height);
    acc.sub_cell(base + cells_per_half + k, height);
  }
}

void accumulate_haar_abs(DenseAccumulator& acc, const HaarIndex& idx,
                         const Rational& coeff) {
  require_valid(idx);
  if (sgn(coeff) == 0) return;
  if (acc.support_len() < idx.j || acc.resolution() < idx.n + 1)
    throw std::invalid_argument("accumulator grid too coarse for Haar index");
  std::uint32_t shift = acc.resolution() - (idx.n + 1);
  std::uint64_t cells = std::uint64_t(2) << shift;
  std::uint64_t base =
      ((std::uint64_t(idx.j - 1) << (idx.n + 1)) + 2 * (idx.i - 1)) << shift;
  Rational height(coeff * pow2(static_cast<long>(idx.n)));
  for (std::uint64_t k = 0; k < cells; ++k) acc.add_cell(base + k, height);
}

Rational haar_coeff(const StepFunction& f, const HaarIndex& idx) {
  require_valid(idx);
  if (idx.j > f.support_len()) return Rational(0);
  // 2^-n * integral(f * h) = integral of f over the left half-support minus
  // the right half-support.
  std::uint32_t r = std::max(f.resolution(), idx.n + 1);
  StepFunction g = f.refined(r);
  std::uint32_t shift = r - (idx.n + 1);
  std::uint64_t cells_per_half = std::uint64_t(1) << shift;
  std::uint64_t base =
      ((std::uint64_t(idx.j - 1) << (idx.n + 1)) + 2 * (idx.i - 1)) << shift;
  Rational sum(0);
  for (std::uint64_t k = 0; k < cells_per_half; ++k) {
    sum += g.values()[static_cast<std::size_t>(base + k)];
    sum -= g.values()[static_cast<std::size_t>(base + cells_per_half + k)];
  }
  return Rational(sum * pow2(-static_cast<long>(r)));
}

HaarDecomposition haar_analysis(const StepFunction& f) {
  HaarDecomposition out;
  std::uint32_t r = f.resolution();
  std::uint64_t per_unit = std::uint64_t(1) << r;
  out.unit_means.resize(f.support_len());
  for (std::uint32_t m = 1; m <= f.support_len(); ++m) {
    // Bottom-up averages over one unit interval; the detail coefficient at
    // level n is half the difference of the two child averages, scaled by
    // 2^-n (so self-coefficients come out as 1).
    std::vector<Rational> avg(f.values().begin() + static_cast<std::ptrdiff_t>((m - 1) * per_unit),
                              f.values().begin() + static_cast<std::ptrdiff_t>(m * per_unit));
    for (std::uint32_t level = r; level > 0; --level) {
      std::uint32_t n = level - 1;
      std::vector<Rational> up(avg.size() / 2);
      Rational half_weight = pow2(-static_cast<long>(n + 1));
      for (std::size_t k = 0; k < up.size(); ++k) {
        Rational diff(avg[2 * k] - avg[2 * k + 1]);
        if (sgn(diff) != 0)
          out.details[HaarIndex{m, n, k + 1}] = Rational(diff * half_weight);
        up[k] = Rational((avg[2 * k] + avg[2 * k + 1]) / 2);
      }
      avg = std::move(up);
    }
    out.unit_means[m - 1] = avg[0];
  }
  return out;
}

StepFunction haar_synthesis(const std::vector<Rational>& unit_means,
                            const std::map<HaarIndex, Rational>& details) {
  if (unit_means.empty())
    throw std::invalid_argument("synthesis needs at least one unit interval");
  std::uint32_t j = static_cast<std::uint32_t>(unit_means.size());
  std::uint32_t r = 0;
  for (const auto& [idx, coeff] : details) {
    require_valid(idx);
    if (idx.j > j)
      throw std::invalid_argument("detail index outside the unit-mean range");
    r = std::max(r, idx.n + 1);
  }
  DenseAccumulator acc(j, r);
  for (std::uint32_t m = 1; m <= j; ++m) acc.add_unit(m, unit_means[m - 1]);
  for (const auto& [idx, coeff] : details) accumulate_haar(acc, idx, coeff);
  return acc.to_function();
}

AbsExpansion abs_expansion(const HaarIndex& idx) {
  require_valid(idx);
  AbsExpansion out;
  out.base_interval = idx.j;
  out.chain.reserve(idx.n);
  std::uint64_t offset = idx.i - 1;  // support start in units of 2^-n
  for (std::uint32_t m = 0; m < idx.n; ++m) {
    std::uint64_t ancestor = (offset >> (idx.n - m)) + 1;
    int sign = ((offset >> (idx.n - m - 1)) & 1) ? -1 : +1;
    out.chain.emplace_back(HaarIndex{idx.j, m, ancestor}, sign);
  }
  return out;
}

}  // namespace nnb
