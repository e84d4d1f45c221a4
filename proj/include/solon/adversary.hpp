#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "solon/codec.hpp"
#include "solon/config.hpp"
#include "solon/errors.hpp"
#include "solon/rng.hpp"

namespace solon {

enum class AttackKind {
  None,
  ReverseGradient,  // send kappa times the honest encoding
  Constant,         // send c * ones
  Alie,             // send mean + z * stddev of the group's honest encodings
  GaussianNoise,    // add sigma * N(0, I) to the honest encoding
};

/// Which workers misbehave this round and how their outputs are replaced.
/// Either a fixed index set or a per-iteration resampled count.
struct AttackSpec {
  AttackKind kind = AttackKind::None;
  double param = 0.0;            // kappa / c / z / sigma
  std::vector<int> adversaries;  // fixed selection (0-based worker indices)
  int count = 0;                 // resampled selection size
  bool resample = false;
};

inline Eigen::VectorXd reverse_gradient(const Eigen::VectorXd& honest,
                                        double kappa) {
  return kappa * honest;
}

inline Eigen::VectorXd constant_attack(int compressed_dim, double c) {
  if (compressed_dim < 1)
    throw DimensionMismatch("constant_attack: dimension must be >= 1");
  return Eigen::VectorXd::Constant(compressed_dim, c);
}

/// Coordinatewise mean plus z times the population standard deviation
/// (divisor m) of the given columns.
inline Eigen::VectorXd alie(const Eigen::MatrixXd& honest_columns, double z) {
  const Eigen::Index m = honest_columns.cols();
  if (m < 1) throw DimensionMismatch("alie: needs at least one column");
  const Eigen::VectorXd mean = honest_columns.rowwise().mean();
  Eigen::VectorXd var = Eigen::VectorXd::Zero(honest_columns.rows());
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::VectorXd d = honest_columns.col(c) - mean;
    var += d.cwiseProduct(d);
  }
  var /= static_cast<double>(m);
  return mean + z * var.cwiseSqrt();
}

struct InjectContext {
  std::uint64_t master_seed = 0;
  std::uint64_t iteration = 0;
};

struct InjectResult {
  EncodedMatrix received;       // R = Z + N
  std::vector<int> adversaries; // selected workers (sorted)
  std::vector<int> truth;       // workers whose noise column is nonzero
};

/// The adversary set for the given round: the fixed set, or `count` distinct
/// workers drawn from the per-iteration stream.
inline std::vector<int> select_adversaries(const AttackSpec& spec,
                                           const MechanismConfig& cfg,
                                           const InjectContext& ctx) {
  std::vector<int> chosen;
  if (spec.resample) {
    if (spec.count < 0 || spec.count > cfg.max_byzantine)
      throw TooManyInSpec("attack count " + std::to_string(spec.count) +
                          " exceeds the adversary bound s = " +
                          std::to_string(cfg.max_byzantine));
    SplitMix64 gen = substream(ctx.master_seed, stream::kAdversaries,
                               ctx.iteration);
    chosen = sample_distinct(gen, cfg.workers, spec.count);
  } else {
    chosen = spec.adversaries;
    std::sort(chosen.begin(), chosen.end());
    if (static_cast<int>(chosen.size()) > cfg.max_byzantine)
      throw TooManyInSpec("attack lists " + std::to_string(chosen.size()) +
                          " adversaries, bound is s = " +
                          std::to_string(cfg.max_byzantine));
    for (size_t i = 0; i < chosen.size(); ++i) {
      if (chosen[i] < 0 || chosen[i] >= cfg.workers)
        throw TooManyInSpec("adversary index " + std::to_string(chosen[i]) +
                            " outside [0, P)");
      if (i > 0 && chosen[i] == chosen[i - 1])
        throw TooManyInSpec("duplicate adversary index " +
                            std::to_string(chosen[i]));
    }
  }
  return chosen;
}

/// Replace the adversarial columns of Z with the attack output. `truth`
/// reports where R actually differs from Z (a kappa = 1 reverse-gradient
/// column carries zero noise and is honest in substance).
inline InjectResult inject(const EncodedMatrix& honest, const AttackSpec& spec,
                           const MechanismConfig& cfg,
                           const InjectContext& ctx) {
  if (honest.values.rows() != cfg.compressed_dim ||
      honest.values.cols() != cfg.workers)
    throw DimensionMismatch("inject: encoded matrix must be d_c x P");

  InjectResult out;
  out.received = honest;
  out.adversaries =
      (spec.kind == AttackKind::None) ? std::vector<int>{}
                                      : select_adversaries(spec, cfg, ctx);

  for (int a : out.adversaries) {
    Eigen::VectorXd column;
    switch (spec.kind) {
      case AttackKind::ReverseGradient:
        column = reverse_gradient(honest.values.col(a), spec.param);
        break;
      case AttackKind::Constant:
        column = constant_attack(cfg.compressed_dim, spec.param);
        break;
      case AttackKind::Alie: {
        // Group-local estimation from honest columns only.
        const int group = a / cfg.redundancy;
        std::vector<int> honest_members;
        for (int k = 0; k < cfg.redundancy; ++k) {
          const int worker = group * cfg.redundancy + k;
          if (!std::binary_search(out.adversaries.begin(),
                                  out.adversaries.end(), worker))
            honest_members.push_back(worker);
        }
        Eigen::MatrixXd cols(cfg.compressed_dim, honest_members.size());
        for (size_t i = 0; i < honest_members.size(); ++i)
          cols.col(i) = honest.values.col(honest_members[i]);
        column = alie(cols, spec.param);
        break;
      }
      case AttackKind::GaussianNoise: {
        NormalSampler normal(substream(ctx.master_seed, stream::kAttackNoise,
                                       ctx.iteration,
                                       static_cast<std::uint64_t>(a)));
        column = honest.values.col(a);
        for (int i = 0; i < cfg.compressed_dim; ++i)
          column[i] += spec.param * normal.next();
        break;
      }
      case AttackKind::None:
        column = honest.values.col(a);
        break;
    }
    out.received.values.col(a) = column;
    if ((out.received.values.col(a).array() != honest.values.col(a).array())
            .any())
      out.truth.push_back(a);
  }
  return out;
}

inline AttackKind attack_kind_from_string(const std::string& name) {
  if (name == "none") return AttackKind::None;
  if (name == "reverse_gradient" || name == "rev_grad")
    return AttackKind::ReverseGradient;
  if (name == "constant") return AttackKind::Constant;
  if (name == "alie") return AttackKind::Alie;
  if (name == "gaussian_noise") return AttackKind::GaussianNoise;
  throw ParseError("unknown attack kind '" + name + "'", "attack.kind");
}

inline std::string to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::ReverseGradient: return "reverse_gradient";
    case AttackKind::Constant: return "constant";
    case AttackKind::Alie: return "alie";
    case AttackKind::GaussianNoise: return "gaussian_noise";
  }
  return "none";
}

}  // namespace solon
