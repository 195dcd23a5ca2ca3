#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "ansgd/baselines.hpp"
#include "ansgd/engine.hpp"
#include "ansgd/errors.hpp"
#include "ansgd/losses.hpp"
#include "ansgd/schedule.hpp"
#include "ansgd/sparse_data.hpp"

namespace ansgd {

enum class Algorithm { ansgd, sgd, averaged_sgd };

struct ExperimentConfig {
  std::string dataset_path;
  Task task = Task::classification;
  Algorithm algorithm = Algorithm::ansgd;
  Mode mode = Mode::convex;
  double lambda = 0.0;
  // Unset only for the accelerated method in strongly convex mode, where
  // it selects the parameter-free schedule.
  std::optional<double> omega;
  std::uint64_t iterations = 0;
  std::uint64_t repeats = 10;
  std::uint64_t seed = 0;
  std::uint64_t eval_every = 100;
  double train_fraction = 0.6;
  std::uint64_t norm_sample_k = 100;
  std::string output_path;
  // Wall-clock timings make output nondeterministic; off by default, in which
  // case wall_clock_s is written as 0.
  bool record_wall_clock = false;
  unsigned threads = 1;

  void validate() const {
    if (iterations == 0) throw ArgumentError("iterations must be positive");
    if (repeats == 0) throw ArgumentError("repeats must be positive");
    if (eval_every == 0) throw ArgumentError("eval_every must be positive");
    if (norm_sample_k == 0) throw ArgumentError("norm sample size must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ArgumentError("train fraction must lie in (0, 1)");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be >= 0");
    if (mode == Mode::strongly_convex && !(lambda > 0.0))
      throw ConfigError("strongly convex mode requires lambda > 0");
    if (omega && (!(*omega > 0.0) || !std::isfinite(*omega))) throw ConfigError("omega must be positive");
    if (!omega && !(algorithm == Algorithm::ansgd && mode == Mode::strongly_convex))
      throw ConfigError("omega is required for this algorithm/mode");
  }
};

struct MetricRow {
  std::uint64_t run_id = 0;
  std::uint64_t iteration = 0;
  double test_objective = 0.0;
  std::optional<double> test_accuracy;
  double wall_clock_s = 0.0;
  friend bool operator==(const MetricRow&, const MetricRow&) = default;
};

struct ExperimentResult {
  std::vector<MetricRow> rows;
  double a_norm_sq = 0.0;
  std::optional<Schedule> schedule;  // accelerated method only
};

inline LossFamily family_for(Task task) {
  return task == Task::classification ? LossFamily::hinge : LossFamily::absolute;
}

/// Iterations at which a run is evaluated: every `eval_every` steps plus the
/// final iteration.
inline std::vector<std::uint64_t> evaluation_iterations(std::uint64_t iterations, std::uint64_t eval_every) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = eval_every; i <= iterations; i += eval_every) out.push_back(i);
  if (out.empty() || out.back() != iterations) out.push_back(iterations);
  return out;
}

class RunError : public DivergenceError {
 public:
  RunError(std::uint64_t run_id, const DivergenceError& e)
      : DivergenceError(e.iteration(), "run " + std::to_string(run_id) + ": " + e.what()), run_id_(run_id) {}
  std::uint64_t run_id() const noexcept { return run_id_; }

 private:
  std::uint64_t run_id_;
};

namespace detail {

inline std::vector<MetricRow> run_single(const ExperimentConfig& cfg, const Dataset& train, const Dataset& test,
                                         const std::optional<Schedule>& sched, std::uint64_t run_id) {
  const LossFamily family = family_for(cfg.task);
  const Regularizer reg(cfg.lambda);
  const std::uint64_t seed = cfg.seed + run_id;
  const auto checkpoints = evaluation_iterations(cfg.iterations, cfg.eval_every);

  std::vector<MetricRow> rows;
  rows.reserve(checkpoints.size());
  const auto start = std::chrono::steady_clock::now();
  auto record = [&](std::uint64_t it, std::span<const double> x) {
    MetricRow row;
    row.run_id = run_id;
    row.iteration = it;
    row.test_objective = composite_objective(test, family, reg, x);
    if (cfg.task == Task::classification) row.test_accuracy = accuracy(test, x);
    if (cfg.record_wall_clock)
      row.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
  };

  std::size_t next = 0;
  if (cfg.algorithm == Algorithm::ansgd) {
    auto state = OptimizerState::zeros(train.dim, seed);
    while (state.t < cfg.iterations) {
      step(state, *sched, family, reg, train);
      if (state.t == checkpoints[next]) record(checkpoints[next++], state.x);
    }
  } else {
    const auto variant = cfg.algorithm == Algorithm::sgd ? BaselineVariant::sgd : BaselineVariant::averaged_sgd;
    auto state = BaselineState::zeros(train.dim, seed, variant, cfg.mode, *cfg.omega, cfg.lambda);
    while (state.t < cfg.iterations) {
      baseline_step(state, reg, family, train);
      if (state.t == checkpoints[next]) record(checkpoints[next++], evaluation_point(state));
    }
  }
  return rows;
}

}  // namespace detail

/// Runs `cfg.repeats` seeded trials on `full`, split into train/test with
/// `cfg.seed`. Run r draws its samples from seed + r. Rows are ordered by
/// (run_id, iteration).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const Dataset& full) {
  cfg.validate();
  full.validate();
  if (full.task != cfg.task) throw ConfigError("dataset task does not match configuration");

  auto [train, test] = split(full, cfg.train_fraction, cfg.seed);

  ExperimentResult result;
  Rng norm_rng(cfg.seed);
  result.a_norm_sq = estimate_A_norm_sq(train, std::min<std::uint64_t>(cfg.norm_sample_k, train.size()), norm_rng);
  if (cfg.algorithm == Algorithm::ansgd) {
    if (cfg.mode == Mode::convex)
      result.schedule = Schedule::convex(cfg.lambda, result.a_norm_sq, *cfg.omega);
    else if (cfg.omega)
      result.schedule = Schedule::strongly_convex(cfg.lambda, cfg.lambda, result.a_norm_sq, *cfg.omega);
    else
      result.schedule = Schedule::strongly_convex_default(cfg.lambda, cfg.lambda);
  }

  std::vector<std::vector<MetricRow>> per_run(cfg.repeats);
  std::vector<std::exception_ptr> errors(cfg.repeats);
  auto work = [&](std::uint64_t r) {
    try {
      per_run[r] = detail::run_single(cfg, train, test, result.schedule, r);
    } catch (const DivergenceError& e) {
      errors[r] = std::make_exception_ptr(RunError(r, e));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(cfg.repeats)));
  if (threads == 1) {
    for (std::uint64_t r = 0; r < cfg.repeats; ++r) work(r);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (std::uint64_t r = w; r < cfg.repeats; r += threads) work(r);
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (auto& rows : per_run) result.rows.insert(result.rows.end(), rows.begin(), rows.end());
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, load_libsvm(cfg.dataset_path, cfg.task));
}

inline constexpr std::string_view csv_header = "run_id,iteration,test_objective,test_accuracy,wall_clock_s";

namespace detail {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string format_csv(std::span<const MetricRow> rows) {
  if (rows.empty()) throw ArgumentError("no rows to write");
  std::string out(csv_header);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.run_id);
    out += ',';
    out += std::to_string(r.iteration);
    out += ',';
    out += detail::format_real(r.test_objective);
    out += ',';
    if (r.test_accuracy) out += detail::format_real(*r.test_accuracy);
    out += ',';
    out += detail::format_real(r.wall_clock_s);
    out += '\n';
  }
  return out;
}

inline void write_csv(std::span<const MetricRow> rows, const std::string& path) {
  const std::string text = format_csv(rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline std::vector<MetricRow> parse_csv(std::string_view text) {
  std::vector<MetricRow> rows;
  bool header = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (header) {
      if (line != csv_header) throw ParseError(line_no, "unexpected CSV header");
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t pos = 0;
    for (;;) {
      auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 5) throw ParseError(line_no, "expected 5 fields");
    MetricRow r;
    double obj = 0.0, acc = 0.0, wall = 0.0;
    auto ok_int = [](std::string_view s, std::uint64_t& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      return ec == std::errc() && p == s.data() + s.size();
    };
    if (!ok_int(f[0], r.run_id) || !ok_int(f[1], r.iteration) || !detail::parse_real(f[2], obj) ||
        !detail::parse_real(f[4], wall))
      throw ParseError(line_no, "malformed metric row");
    r.test_objective = obj;
    r.wall_clock_s = wall;
    if (!f[3].empty()) {
      if (!detail::parse_real(f[3], acc)) throw ParseError(line_no, "malformed accuracy");
      r.test_accuracy = acc;
    }
    rows.push_back(r);
  }
  return rows;
}

/// Mean and sample standard deviation across runs at one iteration.
struct SummaryRow {
  std::uint64_t iteration = 0;
  std::uint64_t runs = 0;
  double objective_mean = 0.0;
  double objective_std = 0.0;
  std::optional<double> accuracy_mean;
  std::optional<double> accuracy_std;
};

inline std::vector<SummaryRow> aggregate(std::span<const MetricRow> rows) {
  std::map<std::uint64_t, std::vector<const MetricRow*>> by_iter;
  for (const auto& r : rows) by_iter[r.iteration].push_back(&r);

  auto mean_std = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double d : v) m += d;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double d : v) ss += (d - m) * (d - m);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    return std::pair{m, sd};
  };

  std::vector<SummaryRow> out;
  for (const auto& [it, group] : by_iter) {
    SummaryRow s;
    s.iteration = it;
    s.runs = group.size();
    std::vector<double> obj, acc;
    for (const auto* r : group) {
      obj.push_back(r->test_objective);
      if (r->test_accuracy) acc.push_back(*r->test_accuracy);
    }
    std::tie(s.objective_mean, s.objective_std) = mean_std(obj);
    if (acc.size() == group.size()) {
      auto [m, sd] = mean_std(acc);
      s.accuracy_mean = m;
      s.accuracy_std = sd;
    }
    out.push_back(s);
  }
  return out;
}

inline void write_summary_csv(std::span<const SummaryRow> rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "iteration,runs,objective_mean,objective_std,accuracy_mean,accuracy_std\n";
  for (const auto& s : rows) {
    out << s.iteration << ',' << s.runs << ',' << detail::format_real(s.objective_mean) << ','
        << detail::format_real(s.objective_std) << ',';
    if (s.accuracy_mean) out << detail::format_real(*s.accuracy_mean);
    out << ',';
    if (s.accuracy_std) out << detail::format_real(*s.accuracy_std);
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace ansgd
