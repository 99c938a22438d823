#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "nnb/haar.hpp"

namespace nnb {

/// Rule pairing block i with the unit interval (pi(i)-1, pi(i)). Admissible
/// rules fix pi(1) = 1 and send every later block past the host interval of
/// its Haar function, so that the indicator bump of block i is disjoint from
/// the support of h_i for all i > 1.
class Permutation {
 public:
  /// pi(i) = i. Admissible under the diagonal enumeration since i > j(i)
  /// for every i > 1.
  static Permutation identity();
  static Permutation from_function(
      std::string name, std::function<std::uint64_t(std::uint64_t)> fn);

  std::uint64_t operator()(std::uint64_t i) const;

  /// The i with pi(i) == m. For non-identity rules this scans the rule and
  /// memoizes what it sees; throws std::runtime_error if m is not hit within
  /// the scan limit (the rule is then not a permutation as far as we can
  /// tell).
  std::uint64_t inverse(std::uint64_t m) const;

  const std::string& name() const { return name_; }
  bool is_identity() const { return fn_ == nullptr; }

  static constexpr std::uint64_t kInverseScanLimit = std::uint64_t(1) << 24;

 private:
  struct InverseCache {
    std::mutex mu;
    std::map<std::uint64_t, std::uint64_t> index_by_value;
    std::uint64_t scanned = 0;
  };

  Permutation(std::string name,
              std::function<std::uint64_t(std::uint64_t)> fn);

  std::string name_;
  std::function<std::uint64_t(std::uint64_t)> fn_;
  std::shared_ptr<InverseCache> cache_;
};

struct AdmissibilityResult {
  bool ok = true;
  std::uint64_t witness = 0;  // first offending index when !ok
  std::string reason;
};

/// Checks on the prefix 1..N: pi(1) = 1, injectivity, and pi(i) > j(i) for
/// i > 1, where j(i) is the host interval of the i-th Haar function.
AdmissibilityResult is_admissible(const Permutation& pi, std::uint64_t N);

/// Block i of the construction: the Haar function h_i, its paired indicator
/// interval pi(i), and
///   u = 2 * 1_{(pi-1, pi)} + |h|,   x = u + h,   y = u - h.
/// x and y are non-negative with L1 norm 3, and span the same two-dimensional
/// space as (u, h).
struct BasisBlock {
  std::uint64_t index = 0;
  HaarIndex haar;
  std::uint64_t pi = 0;
  StepFunction u, h, x, y;
};

BasisBlock make_block(const Permutation& pi, std::uint64_t i);

/// Finite expansion over blocks: i -> (a_i, b_i) on (u_i, h_i). The derived
/// Schauder coefficients are alpha_i = (a_i+b_i)/2 on x_i at position 2i-1
/// and beta_i = (a_i-b_i)/2 on y_i at position 2i.
class Expansion {
 public:
  using BlockCoeffs =
      std::map<std::uint64_t, std::pair<Rational, Rational>>;

  Expansion() = default;
  explicit Expansion(BlockCoeffs blocks) : blocks_(std::move(blocks)) {
    prune_zeros();
  }

  const BlockCoeffs& blocks() const { return blocks_; }
  bool empty() const { return blocks_.empty(); }
  std::uint64_t max_block() const {
    return blocks_.empty() ? 0 : blocks_.rbegin()->first;
  }

  Rational a(std::uint64_t i) const;
  Rational b(std::uint64_t i) const;
  Rational alpha(std::uint64_t i) const { return Rational((a(i) + b(i)) / 2); }
  Rational beta(std::uint64_t i) const { return Rational((a(i) - b(i)) / 2); }
  /// Coefficient at Schauder position k (1-based; odd -> x, even -> y).
  Rational schauder_coeff(std::uint64_t k) const {
    std::uint64_t i = (k + 1) / 2;
    return k % 2 ? alpha(i) : beta(i);
  }

  void add(std::uint64_t i, const Rational& da, const Rational& db);
  void add_scaled(const Expansion& other, const Rational& factor);
  void prune_zeros();

  bool operator==(const Expansion& other) const {
    return blocks_ == other.blocks_;
  }

 private:
  BlockCoeffs blocks_;
};

/// Permutation plus caches for blocks and unit-indicator expansions. The
/// caches are guarded for concurrent readers; everything handed out is
/// immutable.
class BasisContext {
 public:
  explicit BasisContext(Permutation pi = Permutation::identity());

  const Permutation& permutation() const { return pi_; }

  std::shared_ptr<const BasisBlock> block(std::uint64_t i) const;

  /// Expansion of the unit indicator 1_{(m-1,m)} over the blocks. This is the
  /// inductive recursion behind the basis: e_1 = u_1/3, and for m > 1 with
  /// i = pi^-1(m),
  ///   e_m = (u_i - e_{j(i)} - sum_(anc,sign) sign * h_anc) / 2,
  /// the chain being the abs expansion of h_i. Terminates since j(i) < m.
  std::shared_ptr<const Expansion> unit_expansion(std::uint32_t m) const;

 private:
  Permutation pi_;
  mutable std::mutex mu_;
  mutable std::map<std::uint64_t, std::shared_ptr<const BasisBlock>> blocks_;
  mutable std::map<std::uint32_t, std::shared_ptr<const Expansion>> units_;
};

/// Exact expansion of a dyadic step function; synthesize(analyze(f)) == f.
Expansion analyze(const BasisContext& ctx, const StepFunction& f);
StepFunction synthesize(const BasisContext& ctx, const Expansion& e);

/// Sum of the first K Schauder terms x_1, y_1, x_2, y_2, ... of analyze(f).
/// K at or beyond twice the largest expansion block returns f itself.
StepFunction partial_sum(const BasisContext& ctx, const StepFunction& f,
                         std::uint64_t K);

/// Ratios norm_1(S_K f) / norm_1(f) for K = 1..k_max. Far indicator bumps are
/// tracked sparsely, so the cost per K is the size of f's own grid.
std::vector<Rational> partial_sum_profile(const BasisContext& ctx,
                                          const StepFunction& f,
                                          std::uint64_t k_max);

/// Same values through the plain dense path; reference for tests.
std::vector<Rational> partial_sum_profile_reference(const BasisContext& ctx,
                                                    const StepFunction& f,
                                                    std::uint64_t k_max);

}  // namespace nnb
