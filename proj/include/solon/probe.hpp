#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "solon/config.hpp"
#include "solon/rng.hpp"

namespace solon {

/// Random detection vector f ~ N(1, I_{d_c}) plus the provenance triple it was
/// derived from. Fresh per (iteration, group); never reused across iterations.
struct ProbeVector {
  Eigen::VectorXd f;
  std::uint64_t master_seed = 0;
  std::uint64_t iteration = 0;
  int group = 0;
};

inline ProbeVector probe(const MechanismConfig& cfg, std::uint64_t master_seed,
                         std::uint64_t iteration, int group) {
  NormalSampler normal(
      substream(master_seed, stream::kProbe, iteration,
                static_cast<std::uint64_t>(group)));
  ProbeVector p;
  p.master_seed = master_seed;
  p.iteration = iteration;
  p.group = group;
  p.f.resize(cfg.compressed_dim);
  for (int i = 0; i < cfg.compressed_dim; ++i) p.f[i] = 1.0 + normal.next();
  return p;
}

/// One probe per group for the given iteration.
inline std::vector<ProbeVector> probes_for_iteration(const MechanismConfig& cfg,
                                                     std::uint64_t master_seed,
                                                     std::uint64_t iteration) {
  std::vector<ProbeVector> out;
  out.reserve(cfg.group_count);
  for (int j = 0; j < cfg.group_count; ++j)
    out.push_back(probe(cfg, master_seed, iteration, j));
  return out;
}

}  // namespace solon
