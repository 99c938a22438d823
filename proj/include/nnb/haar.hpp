#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <vector>

#include "nnb/stepfn.hpp"

namespace nnb {

/// Index of the L1-normalized mean-zero Haar function on (j-1, j) at level n,
/// position i. The function takes the value +2^n on the left half of its
/// support, -2^n on the right half, and 0 elsewhere; the support is the
/// dyadic interval of length 2^-n starting at j-1 + (i-1)*2^-n.
struct HaarIndex {
  std::uint32_t j = 1;  // host unit interval (j-1, j), j >= 1
  std::uint32_t n = 0;  // level, n >= 0
  std::uint64_t i = 1;  // position, 1 <= i <= 2^n

  bool valid() const {
    return j >= 1 && n < 63 && i >= 1 && i <= (std::uint64_t(1) << n);
  }
  auto operator<=>(const HaarIndex&) const = default;
};

/// Rank of (n, i) in the lexicographic order of one interval's system:
/// l = 2^n + i - 1, so (0,1) -> 1, (1,1) -> 2, (1,2) -> 3, ...
std::uint64_t lex_rank(const HaarIndex& idx);
HaarIndex from_lex_rank(std::uint32_t j, std::uint64_t l);

/// Global enumeration of the union over j: diagonals s = j + l = 2, 3, ...,
/// each listed j = 1 .. s-1, so g = (s-1)(s-2)/2 + j. This respects every
/// per-interval lexicographic order and puts the first mean-zero Haar
/// function on (0,1) at g = 1.
HaarIndex global_to_index(std::uint64_t g);
std::uint64_t index_to_global(const HaarIndex& idx);
/// Host interval j of the g-th function, without building the full index.
std::uint32_t host_interval(std::uint64_t g);

StepFunction haar_fn(const HaarIndex& idx);

/// Expansion coefficient of f against h_idx, normalized so the
/// self-coefficient is 1: 2^-n * integral(f * h_idx).
Rational haar_coeff(const StepFunction& f, const HaarIndex& idx);

/// Coordinates of a step function in the indicator + Haar system:
/// f = sum_m unit_means[m-1] * 1_{(m-1,m)} + sum_idx details[idx] * h_idx.
/// Only indices with j <= support_len and n < resolution can appear.
struct HaarDecomposition {
  std::vector<Rational> unit_means;
  std::map<HaarIndex, Rational> details;
};

HaarDecomposition haar_analysis(const StepFunction& f);
StepFunction haar_synthesis(const std::vector<Rational>& unit_means,
                            const std::map<HaarIndex, Rational>& details);

/// The exact identity |h_idx| = 1_{(j-1,j)} + sum_(m,sign) sign * h_m, where
/// the chain runs over the level-0..n-1 Haar ancestors of the support of
/// h_idx, signed + when the support sits in the ancestor's left half and -
/// when in the right half.
struct AbsExpansion {
  std::uint32_t base_interval;
  std::vector<std::pair<HaarIndex, int>> chain;
};

AbsExpansion abs_expansion(const HaarIndex& idx);

/// acc += coeff * h_idx without materializing the function.
void accumulate_haar(DenseAccumulator& acc, const HaarIndex& idx,
                     const Rational& coeff);
/// acc += coeff * |h_idx|, i.e. coeff * 2^n on the whole support.
void accumulate_haar_abs(DenseAccumulator& acc, const HaarIndex& idx,
                         const Rational& coeff);

}  // namespace nnb
