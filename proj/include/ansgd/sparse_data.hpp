#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ansgd/errors.hpp"
#include "ansgd/rng.hpp"

namespace ansgd {

struct Entry {
  std::uint32_t index;  // 1-based
  double value;
  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Feature vector in canonical sparse form: strictly increasing 1-based
/// indices, no stored zeros.
class SparseVector {
 public:
  SparseVector() = default;

  /// Validates ordering; explicit zeros are dropped.
  explicit SparseVector(std::vector<Entry> entries) {
    std::uint32_t prev = 0;
    for (const auto& e : entries) {
      if (e.index < 1) throw ArgumentError("SparseVector: index must be >= 1");
      if (e.index <= prev) throw ArgumentError("SparseVector: indices must strictly increase");
      prev = e.index;
      if (e.value != 0.0) entries_.push_back(e);
    }
  }

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint32_t max_index() const noexcept { return entries_.empty() ? 0 : entries_.back().index; }

  double norm_sq() const noexcept {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * e.value;
    return s;
  }

  /// sᵀx for a dense x indexed from 0 (feature i lives at x[i-1]).
  double dot(std::span<const double> x) const noexcept {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * x[e.index - 1];
    return s;
  }

  /// x += a·s
  void axpy_into(double a, std::span<double> x) const noexcept {
    for (const auto& e : entries_) x[e.index - 1] += a * e.value;
  }

  SparseVector scaled(double a) const {
    SparseVector out;
    if (a == 0.0) return out;
    out.entries_.reserve(entries_.size());
    for (const auto& e : entries_) out.entries_.push_back({e.index, a * e.value});
    return out;
  }

  std::vector<double> to_dense(std::size_t dim) const {
    std::vector<double> out(dim, 0.0);
    for (const auto& e : entries_) out.at(e.index - 1) = e.value;
    return out;
  }

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::vector<Entry> entries_;
};

struct Sample {
  SparseVector features;
  double label = 0.0;
  friend bool operator==(const Sample&, const Sample&) = default;
};

enum class Task { classification, regression };

struct Dataset {
  std::vector<Sample> samples;
  std::size_t dim = 0;
  Task task = Task::classification;

  std::size_t size() const noexcept { return samples.size(); }

  void validate() const {
    if (samples.empty()) throw ArgumentError("dataset is empty");
    if (dim == 0) throw ArgumentError("dataset dimension must be positive");
    for (const auto& s : samples) {
      if (s.features.max_index() > dim) throw ArgumentError("sample index exceeds dataset dimension");
      if (task == Task::classification && s.label != 1.0 && s.label != -1.0)
        throw ArgumentError("classification labels must be -1 or +1");
    }
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

namespace detail {

inline bool parse_real(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

inline bool parse_index(std::string_view tok, std::uint32_t& out) {
  if (tok.empty()) return false;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

// Maps binary labels onto {-1, +1}: the smaller of two distinct values becomes
// -1. A single distinct value is mapped by sign.
inline void canonicalize_labels(std::vector<Sample>& samples) {
  std::vector<double> distinct;
  for (const auto& s : samples) {
    if (std::find(distinct.begin(), distinct.end(), s.label) == distinct.end()) {
      distinct.push_back(s.label);
      if (distinct.size() > 2)
        throw ParseError(0, "classification data has more than two distinct labels");
    }
  }
  std::sort(distinct.begin(), distinct.end());
  for (auto& s : samples) {
    if (distinct.size() == 2)
      s.label = s.label == distinct[0] ? -1.0 : 1.0;
    else
      s.label = s.label > 0.0 ? 1.0 : -1.0;
  }
}

}  // namespace detail

/// Parses LIBSVM text ("label idx:val idx:val ..."). When `task` is not
/// given, data whose labels take at most two values drawn from {-1, 0, +1}
/// is treated as classification, anything else as regression.
/// Classification labels are canonicalized to {-1, +1}.
inline Dataset parse_libsvm(std::string_view text, std::optional<Task> task = std::nullopt) {
  Dataset ds;
  std::size_t line_no = 0;
  std::size_t max_seen = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && detail::is_space(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !detail::is_space(line[j])) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }
    if (tokens.empty()) continue;

    Sample sample;
    if (!detail::parse_real(tokens[0], sample.label))
      throw ParseError(line_no, "invalid label '" + std::string(tokens[0]) + "'");

    std::vector<Entry> entries;
    entries.reserve(tokens.size() - 1);
    std::uint32_t prev = 0;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      auto tok = tokens[k];
      auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      std::uint32_t idx = 0;
      double val = 0.0;
      if (!detail::parse_index(tok.substr(0, colon), idx))
        throw ParseError(line_no, "invalid feature index in '" + std::string(tok) + "'");
      if (idx < 1) throw ParseError(line_no, "feature index must be >= 1");
      if (idx <= prev) throw ParseError(line_no, "feature indices must be strictly increasing");
      if (!detail::parse_real(tok.substr(colon + 1), val))
        throw ParseError(line_no, "invalid feature value in '" + std::string(tok) + "'");
      prev = idx;
      max_seen = std::max<std::size_t>(max_seen, idx);
      entries.push_back({idx, val});
    }
    sample.features = SparseVector(std::move(entries));
    ds.samples.push_back(std::move(sample));
  }
  if (ds.samples.empty()) throw ParseError(0, "empty dataset");

  if (task) {
    ds.task = *task;
  } else {
    std::vector<double> distinct;
    bool binary = true;
    for (const auto& s : ds.samples) {
      if (s.label != -1.0 && s.label != 0.0 && s.label != 1.0) { binary = false; break; }
      if (std::find(distinct.begin(), distinct.end(), s.label) == distinct.end()) distinct.push_back(s.label);
    }
    ds.task = binary && distinct.size() <= 2 ? Task::classification : Task::regression;
  }
  if (ds.task == Task::classification) detail::canonicalize_labels(ds.samples);
  ds.dim = std::max<std::size_t>(max_seen, 1);
  return ds;
}

inline Dataset load_libsvm(const std::string& path, std::optional<Task> task = std::nullopt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_libsvm(text, task);
}

/// Canonical LIBSVM text; values use 17 significant digits so parsing the
/// output reproduces every stored double.
inline std::string serialize_libsvm(const Dataset& ds) {
  std::string out;
  char buf[64];
  for (const auto& s : ds.samples) {
    std::snprintf(buf, sizeof buf, "%.17g", s.label);
    out += buf;
    for (const auto& e : s.features.entries()) {
      std::snprintf(buf, sizeof buf, " %u:%.17g", e.index, e.value);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

/// Deterministic shuffle-and-cut. Train gets ceil(n * train_fraction)
/// samples, test the remainder.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ArgumentError("train fraction must lie in (0, 1)");
  const std::size_t n = ds.size();
  if (n == 0) throw ArgumentError("cannot split an empty dataset");
  // The small slack keeps products such as 10 * 0.6 from rounding up to 7.
  const double raw = static_cast<double>(n) * train_fraction;
  const auto n_train = static_cast<std::size_t>(std::ceil(raw - 1e-9 * raw));
  if (n_train == 0 || n_train >= n)
    throw ArgumentError("split leaves the train or test partition empty");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_index(i + 1)]);

  Dataset train{{}, ds.dim, ds.task};
  Dataset test{{}, ds.dim, ds.task};
  train.samples.reserve(n_train);
  test.samples.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i)
    (i < n_train ? train : test).samples.push_back(ds.samples[order[i]]);
  return {std::move(train), std::move(test)};
}

/// One uniform draw with replacement.
inline const Sample& draw(const Dataset& ds, Rng& rng) {
  if (ds.samples.empty()) throw ArgumentError("draw from an empty dataset");
  return ds.samples[rng.uniform_index(ds.size())];
}

/// Estimate of E||A_xi||^2 for the linear-model losses: the mean squared
/// norm of k samples drawn with replacement.
inline double estimate_A_norm_sq(const Dataset& ds, std::size_t k, Rng& rng) {
  if (k == 0) throw ArgumentError("norm estimator needs k >= 1");
  if (ds.samples.empty()) throw ArgumentError("norm estimate on an empty dataset");
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += draw(ds, rng).features.norm_sq();
  return sum / static_cast<double>(k);
}

inline std::size_t default_norm_sample_k(const Dataset& ds, std::size_t requested = 100) {
  return std::max<std::size_t>(1, std::min(requested, ds.size()));
}

}  // namespace ansgd
