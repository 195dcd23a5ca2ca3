// Benchmark runner: repeated seeded trials of the accelerated method or a
// subgradient baseline on a LIBSVM dataset, written as a CSV of test curves.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "ansgd/ansgd.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kDivergence = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated nonsmooth SGD benchmark"};

  ansgd::ExperimentConfig cfg;
  double omega = 0.0;
  std::string summary_path;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());

  const std::map<std::string, ansgd::Task> tasks{{"classification", ansgd::Task::classification},
                                                 {"regression", ansgd::Task::regression}};
  const std::map<std::string, ansgd::Algorithm> algos{{"ansgd", ansgd::Algorithm::ansgd},
                                                      {"sgd", ansgd::Algorithm::sgd},
                                                      {"avg-sgd", ansgd::Algorithm::averaged_sgd}};
  const std::map<std::string, ansgd::Mode> modes{{"convex", ansgd::Mode::convex},
                                                 {"strong", ansgd::Mode::strongly_convex}};

  app.add_option("--data", cfg.dataset_path, "LIBSVM dataset")->required()->check(CLI::ExistingFile);
  app.add_option("--task", cfg.task, "classification|regression")
      ->required()
      ->transform(CLI::CheckedTransformer(tasks, CLI::ignore_case));
  app.add_option("--algo", cfg.algorithm, "ansgd|sgd|avg-sgd")
      ->required()
      ->transform(CLI::CheckedTransformer(algos, CLI::ignore_case));
  app.add_option("--mode", cfg.mode, "convex|strong")
      ->required()
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app.add_option("--lambda", cfg.lambda, "l2 regularization weight (mu = lambda in strong mode)")->required();
  auto* omega_opt = app.add_option("--omega", omega,
                                   "tuning constant; optional for ansgd in strong mode (parameter-free schedule)");
  app.add_option("--iters", cfg.iterations, "iterations per run")->required();
  app.add_option("--repeats", cfg.repeats, "independent runs")->capture_default_str();
  app.add_option("--seed", cfg.seed, "base seed; run r uses seed + r")->required();
  app.add_option("--eval-every", cfg.eval_every, "evaluation stride")->capture_default_str();
  app.add_option("--train-frac", cfg.train_fraction, "training fraction of the split")->capture_default_str();
  app.add_option("--norm-k", cfg.norm_sample_k, "samples for the squared-norm estimate")->capture_default_str();
  app.add_option("--out", cfg.output_path, "CSV output path")->required();
  app.add_option("--summary", summary_path, "optional per-iteration mean/std CSV");
  app.add_option("--threads", cfg.threads, "worker threads for repeats");
  app.add_flag("--timing", cfg.record_wall_clock, "record wall-clock seconds (output no longer reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (omega_opt->count() > 0) cfg.omega = omega;

  try {
    const auto result = ansgd::run_experiment(cfg);
    ansgd::write_csv(result.rows, cfg.output_path);
    if (!summary_path.empty()) {
      const auto summary = ansgd::aggregate(result.rows);
      ansgd::write_summary_csv(summary, summary_path);
    }
    std::fprintf(stderr, "E||A||^2 estimate: %.6g\n", result.a_norm_sq);
    if (result.schedule && result.schedule->mode == ansgd::Mode::strongly_convex)
      std::fprintf(stderr, "C = %.6g\n", ansgd::constant_C(*result.schedule));
    const auto& last = result.rows.back();
    std::fprintf(stderr, "run %llu, iteration %llu: test objective %.6g\n",
                 static_cast<unsigned long long>(last.run_id), static_cast<unsigned long long>(last.iteration),
                 last.test_objective);
  } catch (const ansgd::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return 0;
}
