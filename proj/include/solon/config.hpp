#pragma once

#include <cstdio>
#include <string>

#include "solon/errors.hpp"

namespace solon {

/// Validated mechanism tuple. Derived quantities:
///   redundancy     r  = 2s + r_c   (gradients assigned per worker)
///   group_count    q  = P / r
///   compressed_dim d_c = ceil(d / r_c)
///   padded_dim         = d_c * r_c  (gradients are zero-padded to this)
struct MechanismConfig {
  int workers = 0;          // P
  int max_byzantine = 0;    // s
  int compression = 0;      // r_c
  int model_dim = 0;        // d
  int redundancy = 0;       // r
  int group_count = 0;      // q
  int compressed_dim = 0;   // d_c
  int padded_dim = 0;       // d_c * r_c
  // Set when compression exceeds the default cap but was allowed explicitly;
  // double precision decoding degrades beyond r_c = 14.
  bool numerically_risky = false;
};

struct ConfigLimits {
  int max_compression = 14;
};

/// Validate (P, s, r_c, d) and derive the dependent quantities.
/// Throws InfeasibleConfig when s > (P - r_c) / 2 (equivalently 2s + r_c > P)
/// or on non-positive inputs, NotDivisible when (2s + r_c) does not divide P.
inline MechanismConfig validate_config(int workers, int max_byzantine,
                                       int compression, int model_dim,
                                       ConfigLimits limits = {}) {
  if (workers < 1)
    throw InfeasibleConfig("worker count P must be positive, got " +
                           std::to_string(workers));
  if (max_byzantine < 0)
    throw InfeasibleConfig("adversary bound s must be non-negative, got " +
                           std::to_string(max_byzantine));
  if (compression < 1)
    throw InfeasibleConfig("compression ratio r_c must be positive, got " +
                           std::to_string(compression));
  if (model_dim < 1)
    throw InfeasibleConfig("model dimension d must be positive, got " +
                           std::to_string(model_dim));
  if (compression > limits.max_compression)
    throw InfeasibleConfig(
        "compression ratio r_c = " + std::to_string(compression) +
        " exceeds the configured cap " + std::to_string(limits.max_compression) +
        "; double precision decoding is unreliable beyond r_c = 14");

  const int redundancy = 2 * max_byzantine + compression;
  if (redundancy > workers) {
    const double bound = (workers - compression) / 2.0;
    char bound_text[32];
    std::snprintf(bound_text, sizeof(bound_text), "%g", bound);
    throw InfeasibleConfig(
        "s = " + std::to_string(max_byzantine) + " exceeds (P - r_c)/2 = " +
        bound_text + " for P = " + std::to_string(workers) + ", r_c = " +
        std::to_string(compression));
  }
  if (workers % redundancy != 0)
    throw NotDivisible("redundancy ratio r = 2s + r_c = " +
                       std::to_string(redundancy) + " does not divide P = " +
                       std::to_string(workers));

  MechanismConfig cfg;
  cfg.workers = workers;
  cfg.max_byzantine = max_byzantine;
  cfg.compression = compression;
  cfg.model_dim = model_dim;
  cfg.redundancy = redundancy;
  cfg.group_count = workers / redundancy;
  cfg.compressed_dim = (model_dim + compression - 1) / compression;
  cfg.padded_dim = cfg.compressed_dim * compression;
  cfg.numerically_risky = compression > 14;
  return cfg;
}

/// Nearest worker count for which (s, r_c) becomes feasible: the nonzero
/// multiple of 2s + r_c closest to P. Used for error remediation hints.
inline int nearest_feasible_workers(int workers, int max_byzantine,
                                    int compression) {
  const int redundancy = 2 * max_byzantine + compression;
  const int down = (workers / redundancy) * redundancy;
  const int up = down + redundancy;
  if (down < redundancy) return redundancy;
  return (workers - down <= up - workers) ? down : up;
}

}  // namespace solon
