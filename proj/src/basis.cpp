#include "nnb/basis.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace nnb {

Permutation::Permutation(std::string name,
                         std::function<std::uint64_t(std::uint64_t)> fn)
    : name_(std::move(name)),
      fn_(std::move(fn)),
      cache_(fn_ ? std::make_shared<InverseCache>() : nullptr) {}

Permutation Permutation::identity() { return Permutation("identity", nullptr); }

Permutation Permutation::from_function(
    std::string name, std::function<std::uint64_t(std::uint64_t)> fn) {
  if (!fn) throw std::invalid_argument("permutation rule must be callable");
  return Permutation(std::move(name), std::move(fn));
}

std::uint64_t Permutation::operator()(std::uint64_t i) const {
  if (i == 0) throw std::invalid_argument("block indices start at 1");
  return fn_ ? fn_(i) : i;
}

std::uint64_t Permutation::inverse(std::uint64_t m) const {
  if (m == 0) throw std::invalid_argument("interval indices start at 1");
  if (!fn_) return m;
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->index_by_value.find(m);
  if (it != cache_->index_by_value.end()) return it->second;
  while (cache_->scanned < kInverseScanLimit) {
    std::uint64_t i = ++cache_->scanned;
    cache_->index_by_value.emplace(fn_(i), i);
    it = cache_->index_by_value.find(m);
    if (it != cache_->index_by_value.end()) return it->second;
  }
  throw std::runtime_error("no index maps to interval " + std::to_string(m) +
                           " within the inverse scan limit");
}

AdmissibilityResult is_admissible(const Permutation& pi, std::uint64_t N) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(N, 1 << 22)));
  for (std::uint64_t i = 1; i <= N; ++i) {
    std::uint64_t v = pi(i);
    if (i == 1 && v != 1)
      return {false, 1, "pi(1) must be 1"};
    if (i > 1 && v <= host_interval(i))
      return {false, i, "pi(i) must exceed the host interval of h_i"};
    if (!seen.insert(v).second)
      return {false, i, "pi repeats the value " + std::to_string(v)};
  }
  return {};
}

BasisBlock make_block(const Permutation& pi, std::uint64_t i) {
  HaarIndex hi = global_to_index(i);
  std::uint64_t p = pi(i);
  if (p == 0 || p > StepFunction::kMaxCells)
    throw std::length_error("paired interval index out of range");
  auto J = static_cast<std::uint32_t>(std::max<std::uint64_t>(hi.j, p));
  std::uint32_t r = hi.n + 1;
  DenseAccumulator au(J, r);
  au.add_unit(static_cast<std::uint32_t>(p), Rational(2));
  accumulate_haar_abs(au, hi, Rational(1));
  DenseAccumulator ax = au;
  DenseAccumulator ay = au;
  accumulate_haar(ax, hi, Rational(1));
  accumulate_haar(ay, hi, Rational(-1));
  BasisBlock blk;
  blk.index = i;
  blk.haar = hi;
  blk.pi = p;
  blk.u = au.to_function();
  blk.h = haar_fn(hi);
  blk.x = ax.to_function();
  blk.y = ay.to_function();
  return blk;
}

Rational Expansion::a(std::uint64_t i) const {
  auto it = blocks_.find(i);
  return it == blocks_.end() ? Rational(0) : it->second.first;
}

Rational Expansion::b(std::uint64_t i) const {
  auto it = blocks_.find(i);
  return it == blocks_.end() ? Rational(0) : it->second.second;
}

void Expansion::add(std::uint64_t i, const Rational& da, const Rational& db) {
  auto& slot = blocks_[i];
  slot.first += da;
  slot.second += db;
}

void Expansion::add_scaled(const Expansion& other, const Rational& factor) {
  for (const auto& [i, ab] : other.blocks_)
    add(i, Rational(ab.first * factor), Rational(ab.second * factor));
}

void Expansion::prune_zeros() {
  std::erase_if(blocks_, [](const auto& kv) {
    return kv.second.first == 0 && kv.second.second == 0;
  });
}

BasisContext::BasisContext(Permutation pi) : pi_(std::move(pi)) {}

std::shared_ptr<const BasisBlock> BasisContext::block(std::uint64_t i) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = blocks_.find(i);
    if (it != blocks_.end()) return it->second;
  }
  auto sp = std::make_shared<const BasisBlock>(make_block(pi_, i));
  std::lock_guard<std::mutex> lock(mu_);
  return blocks_.emplace(i, std::move(sp)).first->second;
}

std::shared_ptr<const Expansion> BasisContext::unit_expansion(
    std::uint32_t m) const {
  if (m == 0) throw std::invalid_argument("interval indices start at 1");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = units_.find(m);
    if (it != units_.end()) return it->second;
  }
  Expansion res;
  if (m == 1) {
    res.add(1, Rational(1, 3), Rational(0));
  } else {
    std::uint64_t i = pi_.inverse(m);
    HaarIndex hi = global_to_index(i);
    res.add(i, Rational(1, 2), Rational(0));
    for (const auto& [anc, sign] : abs_expansion(hi).chain)
      res.add(index_to_global(anc), Rational(0), Rational(-sign, 2));
    res.add_scaled(*unit_expansion(hi.j), Rational(-1, 2));
  }
  auto sp = std::make_shared<const Expansion>(std::move(res));
  std::lock_guard<std::mutex> lock(mu_);
  return units_.emplace(m, std::move(sp)).first->second;
}

Expansion analyze(const BasisContext& ctx, const StepFunction& f) {
  HaarDecomposition hd = haar_analysis(f);
  Expansion out;
  for (const auto& [idx, coeff] : hd.details)
    out.add(index_to_global(idx), Rational(0), coeff);
  for (std::uint32_t m = 1; m <= hd.unit_means.size(); ++m) {
    const Rational& c = hd.unit_means[m - 1];
    if (c == 0) continue;
    out.add_scaled(*ctx.unit_expansion(m), c);
  }
  out.prune_zeros();
  return out;
}

StepFunction synthesize(const BasisContext& ctx, const Expansion& e) {
  if (e.empty()) return StepFunction::zero();
  std::uint64_t B = 1;
  std::uint32_t rmax = 1;
  for (const auto& [i, ab] : e.blocks()) {
    HaarIndex hi = global_to_index(i);
    rmax = std::max(rmax, hi.n + 1);
    B = std::max<std::uint64_t>(B, hi.j);
    if (ab.first != 0)
      B = std::max<std::uint64_t>(B, ctx.permutation()(i));
  }
  if (B > StepFunction::kMaxCells)
    throw std::length_error("expansion needs an indicator interval out of range");
  DenseAccumulator acc(static_cast<std::uint32_t>(B), rmax);
  for (const auto& [i, ab] : e.blocks()) {
    HaarIndex hi = global_to_index(i);
    if (ab.first != 0) {
      auto p = static_cast<std::uint32_t>(ctx.permutation()(i));
      acc.add_unit(p, Rational(2 * ab.first));
      accumulate_haar_abs(acc, hi, ab.first);
    }
    accumulate_haar(acc, hi, ab.second);
  }
  return acc.to_function().canonicalized();
}

StepFunction partial_sum(const BasisContext& ctx, const StepFunction& f,
                         std::uint64_t K) {
  Expansion e = analyze(ctx, f);
  if (K >= 2 * e.max_block()) return f;
  Expansion trunc;
  for (const auto& [i, ab] : e.blocks()) {
    if (2 * i <= K) {
      trunc.add(i, ab.first, ab.second);
    } else if (2 * i - 1 == K) {
      // Odd cut keeps only the x term of the last block: alpha * x_i has
      // coordinates (alpha, alpha) on (u_i, h_i).
      Rational alpha((ab.first + ab.second) / 2);
      trunc.add(i, alpha, alpha);
    }
  }
  return synthesize(ctx, trunc);
}

std::vector<Rational> partial_sum_profile(const BasisContext& ctx,
                                          const StepFunction& f,
                                          std::uint64_t k_max) {
  Expansion e = analyze(ctx, f);
  std::vector<Rational> out(k_max, Rational(0));
  Rational nf = f.norm_1();
  if (nf == 0) return out;

  struct Item {
    HaarIndex hi;
    std::uint64_t pi;
    Rational alpha, beta;
  };
  std::map<std::uint64_t, Item> items;
  std::uint64_t B = f.support_len();
  std::uint32_t rmax = std::max<std::uint32_t>(f.resolution(), 1);
  for (const auto& [i, ab] : e.blocks()) {
    Item item;
    item.hi = global_to_index(i);
    item.pi = ctx.permutation()(i);
    item.alpha = Rational((ab.first + ab.second) / 2);
    item.beta = Rational((ab.first - ab.second) / 2);
    rmax = std::max(rmax, item.hi.n + 1);
    B = std::max<std::uint64_t>(B, item.hi.j);
    // Blocks with a nonzero u coordinate sit inside f's own support, so the
    // dense grid stays the size of f; the rest only touch the far map below.
    if (ab.first != 0) B = std::max(B, item.pi);
    items.emplace(i, std::move(item));
  }
  if (B > StepFunction::kMaxCells)
    throw std::length_error("expansion needs an indicator interval out of range");

  DenseAccumulator dense(static_cast<std::uint32_t>(B), rmax);
  std::map<std::uint64_t, Rational> far;
  Rational far_sum(0);
  for (std::uint64_t K = 1; K <= k_max; ++K) {
    std::uint64_t i = (K + 1) / 2;
    auto it = items.find(i);
    if (it != items.end()) {
      bool on_x = (K % 2 == 1);
      const Rational& coeff = on_x ? it->second.alpha : it->second.beta;
      if (coeff != 0) {
        accumulate_haar_abs(dense, it->second.hi, coeff);
        accumulate_haar(dense, it->second.hi,
                        on_x ? coeff : Rational(-coeff));
        std::uint64_t p = it->second.pi;
        if (p <= dense.support_len()) {
          dense.add_unit(static_cast<std::uint32_t>(p), Rational(2 * coeff));
        } else {
          Rational& slot = far[p];
          far_sum -= rational_abs(slot);
          slot += Rational(2 * coeff);
          far_sum += rational_abs(slot);
          if (slot == 0) far.erase(p);
        }
      }
    }
    out[K - 1] = Rational((dense.norm_1() + far_sum) / nf);
  }
  return out;
}

std::vector<Rational> partial_sum_profile_reference(const BasisContext& ctx,
                                                    const StepFunction& f,
                                                    std::uint64_t k_max) {
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(k_max));
  Rational nf = f.norm_1();
  for (std::uint64_t K = 1; K <= k_max; ++K) {
    if (nf == 0) {
      out.emplace_back(0);
      continue;
    }
    out.emplace_back(Rational(partial_sum(ctx, f, K).norm_1() / nf));
  }
  return out;
}

}  // namespace nnb
