#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "solon/sim.hpp"

namespace solon {

struct TaskConfig {
  int n_samples = 0;
  int dim = 0;
  double noise_sigma = 0.0;
  double gamma = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;

  bool operator==(const TaskConfig&) const = default;
};

struct ExperimentConfig {
  MechanismConfig mechanism;
  TaskConfig task;
  AttackSpec attack;
  std::string weights_scheme = "equispaced";
};

inline bool operator==(const AttackSpec& a, const AttackSpec& b) {
  return a.kind == b.kind && a.param == b.param &&
         a.adversaries == b.adversaries && a.count == b.count &&
         a.resample == b.resample;
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.mechanism.workers == b.mechanism.workers &&
         a.mechanism.max_byzantine == b.mechanism.max_byzantine &&
         a.mechanism.compression == b.mechanism.compression &&
         a.mechanism.model_dim == b.mechanism.model_dim && a.task == b.task &&
         a.attack == b.attack && a.weights_scheme == b.weights_scheme;
}

namespace detail {

template <typename T>
T require_field(const nlohmann::json& j, const std::string& object,
                const std::string& key) {
  const std::string path = object.empty() ? key : object + "." + key;
  if (!j.contains(key)) throw ParseError("missing field '" + path + "'", path);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("field '" + path + "': " + e.what(), path);
  }
}

}  // namespace detail

/// Parse and fully validate an experiment bundle. Mechanism feasibility
/// errors carry a nearest-feasible-P remediation hint.
inline ExperimentConfig parse_config_json(const nlohmann::json& j) {
  for (const char* key : {"mechanism", "task", "attack", "weights"})
    if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'", key);

  const auto& jm = j.at("mechanism");
  const int workers = detail::require_field<int>(jm, "mechanism", "P");
  const int byz = detail::require_field<int>(jm, "mechanism", "s");
  const int compression = detail::require_field<int>(jm, "mechanism", "r_c");
  const int dim = detail::require_field<int>(jm, "mechanism", "d");

  ExperimentConfig cfg;
  try {
    cfg.mechanism = validate_config(workers, byz, compression, dim);
  } catch (const InfeasibleConfig& e) {
    throw InfeasibleConfig(std::string(e.what()) + "; nearest feasible P is " +
                           std::to_string(nearest_feasible_workers(
                               workers, byz, compression)));
  } catch (const NotDivisible& e) {
    throw NotDivisible(std::string(e.what()) + "; nearest feasible P is " +
                       std::to_string(nearest_feasible_workers(workers, byz,
                                                               compression)));
  }

  const auto& jt = j.at("task");
  cfg.task.n_samples = detail::require_field<int>(jt, "task", "n");
  cfg.task.dim = detail::require_field<int>(jt, "task", "m");
  cfg.task.noise_sigma = detail::require_field<double>(jt, "task", "noise_sigma");
  cfg.task.gamma = detail::require_field<double>(jt, "task", "gamma");
  cfg.task.iterations = detail::require_field<int>(jt, "task", "iterations");
  cfg.task.seed = detail::require_field<std::uint64_t>(jt, "task", "seed");
  if (cfg.task.dim != cfg.mechanism.model_dim)
    throw ParseError("task.m = " + std::to_string(cfg.task.dim) +
                         " must equal mechanism.d = " +
                         std::to_string(cfg.mechanism.model_dim),
                     "task.m");
  if (cfg.task.n_samples < 1)
    throw ParseError("task.n must be positive", "task.n");
  if (cfg.task.iterations < 0)
    throw ParseError("task.iterations must be non-negative", "task.iterations");

  const auto& ja = j.at("attack");
  cfg.attack.kind = attack_kind_from_string(
      detail::require_field<std::string>(ja, "attack", "kind"));
  cfg.attack.param = ja.value("param", 0.0);
  cfg.attack.resample = ja.value("resample", false);
  if (cfg.attack.resample) {
    cfg.attack.count = detail::require_field<int>(ja, "attack", "count");
  } else if (ja.contains("adversaries")) {
    cfg.attack.adversaries =
        detail::require_field<std::vector<int>>(ja, "attack", "adversaries");
  } else if (ja.contains("count")) {
    // Fixed selection by count: the first `count` workers.
    const int count = detail::require_field<int>(ja, "attack", "count");
    for (int i = 0; i < count; ++i) cfg.attack.adversaries.push_back(i);
  }
  // Early bound/index validation with the parsed mechanism.
  if (cfg.attack.kind != AttackKind::None)
    select_adversaries(cfg.attack, cfg.mechanism, InjectContext{0, 0});

  const auto& jw = j.at("weights");
  cfg.weights_scheme = detail::require_field<std::string>(jw, "weights", "scheme");
  if (cfg.weights_scheme != "equispaced")
    throw ParseError("weights.scheme must be 'equispaced', got '" +
                         cfg.weights_scheme + "'",
                     "weights.scheme");
  return cfg;
}

inline ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config_json(j);
}

inline nlohmann::json serialize_config(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["mechanism"] = {{"P", cfg.mechanism.workers},
                    {"s", cfg.mechanism.max_byzantine},
                    {"r_c", cfg.mechanism.compression},
                    {"d", cfg.mechanism.model_dim}};
  j["task"] = {{"n", cfg.task.n_samples},       {"m", cfg.task.dim},
               {"noise_sigma", cfg.task.noise_sigma},
               {"gamma", cfg.task.gamma},       {"iterations", cfg.task.iterations},
               {"seed", cfg.task.seed}};
  j["attack"] = {{"kind", to_string(cfg.attack.kind)},
                 {"param", cfg.attack.param},
                 {"resample", cfg.attack.resample}};
  if (cfg.attack.resample)
    j["attack"]["count"] = cfg.attack.count;
  else
    j["attack"]["adversaries"] = cfg.attack.adversaries;
  j["weights"] = {{"scheme", cfg.weights_scheme}};
  return j;
}

namespace detail {
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

/// metrics.csv, one row per iteration. The two wall-time columns are written
/// as 0 unless emit_wall_times is set: measured microseconds are not
/// reproducible and the file contract is byte-identical reruns. Measured
/// times always land in summary.json.
inline void write_metrics_csv(const std::filesystem::path& path,
                              const RunMetrics& metrics, bool emit_wall_times) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "iteration,loss,recovery_error,n_located,located_correct,"
         "t_encode_us,t_decode_us\n";
  for (const MetricsRow& row : metrics.rows) {
    out << row.iteration << ',' << detail::format_double(row.loss) << ','
        << detail::format_double(row.recovery_error) << ',' << row.n_located
        << ',' << row.located_correct << ','
        << (emit_wall_times ? row.t_encode_us : 0) << ','
        << (emit_wall_times ? row.t_decode_us : 0) << '\n';
  }
}

inline void write_summary_json(const std::filesystem::path& path,
                               const ExperimentConfig& cfg,
                               const RunMetrics& metrics) {
  double enc_us = 0.0, inj_us = 0.0, dec_us = 0.0;
  for (const MetricsRow& row : metrics.rows) {
    enc_us += static_cast<double>(row.t_encode_us);
    inj_us += static_cast<double>(row.t_inject_us);
    dec_us += static_cast<double>(row.t_decode_us);
  }
  const double n = metrics.rows.empty() ? 1.0 : double(metrics.rows.size());
  nlohmann::json j;
  j["config"] = serialize_config(cfg);
  j["iterations"] = metrics.rows.size();
  j["final_loss"] = metrics.final_loss;
  j["mean_t_encode_us"] = enc_us / n;
  j["mean_t_inject_us"] = inj_us / n;
  j["mean_t_decode_us"] = dec_us / n;
  j["detection"] = {{"exact_rounds", metrics.exact_detection_rounds},
                    {"true_positives", metrics.true_positives},
                    {"false_positives", metrics.false_positives},
                    {"false_negatives", metrics.false_negatives}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

/// Execute one experiment and write metrics.csv + summary.json into out_dir.
/// Returns 0 on success, 1 on decode failure (diagnostic on `diag`).
inline int cmd_run(const ExperimentConfig& config, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_override, int threads,
                   bool emit_wall_times, std::ostream& diag) {
  ExperimentConfig cfg = config;
  if (seed_override) cfg.task.seed = *seed_override;

  TrainTask task;
  task.problem = gen_dataset(cfg.task.seed, cfg.task.n_samples, cfg.task.dim,
                             cfg.task.noise_sigma);
  task.learning_rate = cfg.task.gamma;
  task.iterations = cfg.task.iterations;
  task.master_seed = cfg.task.seed;

  DecodeOptions opts;
  opts.threads = threads;

  std::filesystem::create_directories(out_dir);
  RunMetrics metrics;
  try {
    metrics = run_training(task, cfg.mechanism, cfg.attack, opts);
  } catch (const Error& e) {
    diag << "run failed: " << e.what() << '\n';
    return 1;
  }
  write_metrics_csv(std::filesystem::path(out_dir) / "metrics.csv", metrics,
                    emit_wall_times);
  write_summary_json(std::filesystem::path(out_dir) / "summary.json", cfg,
                     metrics);
  return 0;
}

/// Feasibility report for `check`: derived quantities, or the violated
/// constraint plus the nearest feasible worker count.
inline std::string check_report(int workers, int byzantine, int compression,
                                std::optional<int> dim) {
  try {
    const MechanismConfig cfg =
        validate_config(workers, byzantine, compression,
                        dim.value_or(compression));
    std::string out = "feasible: P=" + std::to_string(workers) +
                      " s=" + std::to_string(byzantine) +
                      " r_c=" + std::to_string(compression) +
                      " -> r=" + std::to_string(cfg.redundancy) +
                      " q=" + std::to_string(cfg.group_count);
    if (dim)
      out += " d_c=" + std::to_string(cfg.compressed_dim) +
             " (d=" + std::to_string(*dim) +
             " padded to " + std::to_string(cfg.padded_dim) + ")";
    else
      out += " d_c=ceil(d/" + std::to_string(compression) + ")";
    return out;
  } catch (const Error& e) {
    return std::string("infeasible: ") + e.what() + "; nearest feasible P is " +
           std::to_string(
               nearest_feasible_workers(workers, byzantine, compression));
  }
}

}  // namespace solon
