#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ansgd/errors.hpp"
#include "ansgd/losses.hpp"
#include "ansgd/reference.hpp"
#include "ansgd/sparse_data.hpp"

namespace ansgd {

namespace detail {

struct SampleHash {
  std::size_t operator()(const Sample& s) const noexcept {
    std::uint64_t h = std::bit_cast<std::uint64_t>(s.label) * 0x9E3779B97F4A7C15ULL;
    for (const auto& e : s.features.entries()) {
      h ^= e.index + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
      h ^= std::bit_cast<std::uint64_t>(e.value) + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Online regret of a played sequence against the best fixed point in
/// hindsight:
///   R(t) = sum_{i<t} [Phi(x_i; xi_{i+1}) - Phi(x*_t; xi_{i+1})],
/// Phi(x; xi) = exact loss + (lambda/2)||x||². Observations are accumulated
/// incrementally; repeated samples are merged so the comparator solve scales
/// with the number of distinct samples.
class RegretProbe {
 public:
  RegretProbe(std::size_t dim, LossFamily family, double lambda, std::uint64_t budget)
      : dim_(dim), family_(family), reg_(lambda), budget_(budget) {}

  /// Records the point played before `sample` was revealed.
  void observe(std::span<const double> played, const Sample& sample) {
    if (played.size() != dim_) throw ArgumentError("played point has wrong dimension");
    online_loss_ += exact_loss(family_, played, sample) + reg_.value(played);
    auto [it, inserted] = index_.try_emplace(sample, distinct_.size());
    if (inserted) {
      distinct_.push_back(sample);
      counts_.push_back(0);
    }
    ++counts_[it->second];
    ++t_;
  }

  std::uint64_t rounds() const noexcept { return t_; }
  double online_loss() const noexcept { return online_loss_; }

  /// Hindsight comparator on the stream observed so far.
  ReferenceSolution comparator(const ReferenceOptions& opt = {}) const {
    if (t_ == 0) throw ArgumentError("regret of an empty stream");
    WeightedProblem p;
    p.dim = dim_;
    p.family = family_;
    p.lambda = reg_.lambda();
    for (std::size_t i = 0; i < distinct_.size(); ++i) {
      p.samples.push_back(&distinct_[i]);
      p.weights.push_back(static_cast<double>(counts_[i]) / static_cast<double>(t_));
    }
    return solve_reference(p, budget_, opt);
  }

  double regret(const ReferenceOptions& opt = {}) const {
    const auto best = comparator(opt);
    return online_loss_ - static_cast<double>(t_) * best.phi_star;
  }

 private:
  std::size_t dim_;
  LossFamily family_;
  Regularizer reg_;
  std::uint64_t budget_;
  double online_loss_ = 0.0;
  std::uint64_t t_ = 0;
  std::vector<Sample> distinct_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<Sample, std::size_t, detail::SampleHash> index_;
};

/// R(t) for trajectory x_0..x_{t-1} and stream xi_1..xi_t.
inline double empirical_regret(std::span<const std::vector<double>> trajectory, std::span<const Sample> stream,
                               LossFamily family, double lambda, std::uint64_t budget = 1'000'000,
                               const ReferenceOptions& opt = {}) {
  if (trajectory.size() != stream.size()) throw ArgumentError("trajectory and stream lengths differ");
  if (trajectory.empty()) throw ArgumentError("regret of an empty stream");
  RegretProbe probe(trajectory.front().size(), family, lambda, budget);
  for (std::size_t i = 0; i < stream.size(); ++i) probe.observe(trajectory[i], stream[i]);
  return probe.regret(opt);
}

}  // namespace ansgd
