#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "solon/adversary.hpp"
#include "solon/allocation.hpp"
#include "solon/codec.hpp"
#include "solon/config.hpp"
#include "solon/decoder.hpp"
#include "solon/errors.hpp"
#include "solon/probe.hpp"
#include "solon/rng.hpp"
#include "solon/weights.hpp"

namespace solon {

/// Synthetic least-squares problem with a planted parameter vector. Strongly
/// convex with a closed-form optimum, so recovery and convergence are
/// checkable against ground truth.
struct LeastSquaresProblem {
  Eigen::MatrixXd design;   // n x m
  Eigen::VectorXd targets;  // n
  Eigen::VectorXd planted;  // m, the generating parameter vector
  double noise_sigma = 0.0;
};

inline LeastSquaresProblem gen_dataset(std::uint64_t seed, int n_samples,
                                       int dim, double noise_sigma) {
  if (n_samples < 1 || dim < 1)
    throw DimensionMismatch("gen_dataset: n and m must be >= 1");
  LeastSquaresProblem p;
  p.noise_sigma = noise_sigma;
  p.design.resize(n_samples, dim);
  NormalSampler design_stream(substream(seed, stream::kDataset, 0));
  for (int i = 0; i < n_samples; ++i)
    for (int j = 0; j < dim; ++j) p.design(i, j) = design_stream.next();
  p.planted.resize(dim);
  NormalSampler planted_stream(substream(seed, stream::kDataset, 1));
  for (int j = 0; j < dim; ++j) p.planted[j] = planted_stream.next();
  p.targets = p.design * p.planted;
  if (noise_sigma > 0.0) {
    NormalSampler noise_stream(substream(seed, stream::kDataset, 2));
    for (int i = 0; i < n_samples; ++i)
      p.targets[i] += noise_sigma * noise_stream.next();
  }
  return p;
}

/// Mean squared-error loss (1 / 2n) ||X w - y||^2.
inline double full_loss(const LeastSquaresProblem& p, const Eigen::VectorXd& w) {
  const Eigen::VectorXd res = p.design * w - p.targets;
  return 0.5 * res.squaredNorm() / static_cast<double>(p.design.rows());
}

/// Closed-form normal-equations optimum.
inline Eigen::VectorXd least_squares_optimum(const LeastSquaresProblem& p) {
  return (p.design.transpose() * p.design)
      .ldlt()
      .solve(p.design.transpose() * p.targets);
}

/// Gradient of the per-sample loss 0.5 (x.w - y)^2.
inline Eigen::VectorXd sample_gradient(const LeastSquaresProblem& p, int sample,
                                       const Eigen::VectorXd& w) {
  const double residual = p.design.row(sample).dot(w) - p.targets[sample];
  return residual * p.design.row(sample).transpose();
}

struct TrainTask {
  LeastSquaresProblem problem;
  double learning_rate = 0.1;
  int iterations = 100;
  std::uint64_t master_seed = 0;
};

/// Batch of the round: one sample index per worker slot (B = P), drawn
/// uniformly with replacement from a per-iteration stream.
inline std::vector<int> batch_indices(const TrainTask& task,
                                      const MechanismConfig& cfg,
                                      std::uint64_t iteration) {
  SplitMix64 gen = substream(task.master_seed, stream::kBatch, iteration);
  const int n = static_cast<int>(task.problem.design.rows());
  std::vector<int> idx(cfg.workers);
  for (int k = 0; k < cfg.workers; ++k)
    idx[k] = static_cast<int>(gen.below(static_cast<std::uint64_t>(n)));
  return idx;
}

/// Column k = gradient of the squared loss on shard k of the round's batch.
inline GradientMatrix worker_gradients(const TrainTask& task,
                                       const MechanismConfig& cfg,
                                       std::uint64_t iteration,
                                       const Eigen::VectorXd& w) {
  if (w.size() != cfg.model_dim)
    throw DimensionMismatch("worker_gradients: model dimension mismatch");
  const std::vector<int> batch = batch_indices(task, cfg, iteration);
  Eigen::MatrixXd g(cfg.model_dim, cfg.workers);
  for (int k = 0; k < cfg.workers; ++k)
    g.col(k) = sample_gradient(task.problem, batch[k], w);
  return pad_gradients(g, cfg);
}

struct MetricsRow {
  int iteration = 0;
  double loss = 0.0;            // full training loss after the update
  double recovery_error = 0.0;  // ||u - G 1|| / ||G 1||
  int n_located = 0;
  int located_correct = 0;      // located set equals the injected set
  long t_encode_us = 0;
  long t_inject_us = 0;
  long t_decode_us = 0;
};

struct RoundResult {
  Eigen::VectorXd next_weights;
  MetricsRow row;
  std::vector<int> located;  // global worker indices
  std::vector<int> truth;    // nonzero noise columns
};

inline double relative_error(const Eigen::VectorXd& value,
                             const Eigen::VectorXd& reference) {
  const double ref_norm = reference.norm();
  return (value - reference).norm() / (ref_norm > 0.0 ? ref_norm : 1.0);
}

/// One synchronous round: gradients, encode, inject, decode, SGD step
/// w - (gamma / P) u with the recovered sum u.
inline RoundResult run_round(const TrainTask& task, const MechanismConfig& cfg,
                             const WeightSet& weights,
                             const AllocationMatrix& alloc,
                             const AttackSpec& attack, std::uint64_t iteration,
                             const Eigen::VectorXd& w,
                             const DecodeOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  const GradientMatrix g = worker_gradients(task, cfg, iteration, w);

  const auto t0 = clock::now();
  const EncodedMatrix z = encode_all(g, alloc, weights, cfg, opts.threads);
  const auto t1 = clock::now();

  const InjectResult injected =
      inject(z, attack, cfg, InjectContext{task.master_seed, iteration});
  const auto t2 = clock::now();

  const std::vector<ProbeVector> probes =
      probes_for_iteration(cfg, task.master_seed, iteration);
  const auto t3 = clock::now();
  const DecodeReport report = decode(cfg, weights, injected.received, probes, opts);
  const auto t4 = clock::now();

  RoundResult out;
  out.next_weights =
      w - (task.learning_rate / cfg.workers) * report.sum;
  out.located = report.located;
  out.truth = injected.truth;

  const Eigen::VectorXd true_sum =
      g.values.rowwise().sum().head(cfg.model_dim);
  out.row.iteration = static_cast<int>(iteration);
  out.row.loss = full_loss(task.problem, out.next_weights);
  out.row.recovery_error = relative_error(report.sum, true_sum);
  out.row.n_located = static_cast<int>(report.located.size());
  out.row.located_correct = (report.located == injected.truth) ? 1 : 0;
  out.row.t_encode_us =
      std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  out.row.t_inject_us =
      std::chrono::duration_cast<std::chrono::microseconds>(t2 - t1).count();
  out.row.t_decode_us =
      std::chrono::duration_cast<std::chrono::microseconds>(t4 - t3).count();
  return out;
}

struct RunMetrics {
  std::vector<MetricsRow> rows;
  std::vector<std::vector<int>> located_sets;  // per iteration, global indices
  double final_loss = 0.0;
  long true_positives = 0;
  long false_positives = 0;
  long false_negatives = 0;
  int exact_detection_rounds = 0;
};

using TrajectoryObserver =
    std::function<void(int iteration, const Eigen::VectorXd& weights)>;

/// Run the full training loop from w = 0. Decode failures propagate with the
/// iteration index. The observer, when set, sees the post-update weights.
inline RunMetrics run_training(const TrainTask& task,
                               const MechanismConfig& cfg,
                               const AttackSpec& attack,
                               const DecodeOptions& opts = {},
                               const TrajectoryObserver& observer = nullptr) {
  if (static_cast<int>(task.problem.design.cols()) != cfg.model_dim)
    throw DimensionMismatch(
        "run_training: problem dimension must equal the mechanism dimension");
  const WeightSet weights = make_weights(cfg);
  const AllocationMatrix alloc = build_allocation(cfg);

  RunMetrics metrics;
  metrics.rows.reserve(task.iterations);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(cfg.model_dim);
  for (int t = 0; t < task.iterations; ++t) {
    RoundResult round;
    try {
      round = run_round(task, cfg, weights, alloc, attack,
                        static_cast<std::uint64_t>(t), w, opts);
    } catch (const Error& e) {
      throw Error("iteration " + std::to_string(t) + ": " + e.what());
    }
    w = round.next_weights;
    metrics.rows.push_back(round.row);
    metrics.located_sets.push_back(round.located);
    metrics.exact_detection_rounds += round.row.located_correct;
    for (int a : round.located)
      if (std::binary_search(round.truth.begin(), round.truth.end(), a))
        ++metrics.true_positives;
      else
        ++metrics.false_positives;
    for (int a : round.truth)
      if (!std::binary_search(round.located.begin(), round.located.end(), a))
        ++metrics.false_negatives;
    if (observer) observer(t, w);
  }
  metrics.final_loss =
      metrics.rows.empty() ? full_loss(task.problem, w) : metrics.rows.back().loss;
  return metrics;
}

}  // namespace solon
