#pragma once

#include <Eigen/Dense>

#include "solon/config.hpp"

namespace solon {

/// P x P binary assignment: q diagonal blocks of all-ones r x r. Workers of a
/// group compute exactly the gradients owned by that group.
struct AllocationMatrix {
  Eigen::MatrixXi entries;
  int group_size = 0;  // r
};

inline AllocationMatrix build_allocation(const MechanismConfig& cfg) {
  const int P = cfg.workers;
  const int r = cfg.redundancy;
  AllocationMatrix a;
  a.group_size = r;
  a.entries = Eigen::MatrixXi::Zero(P, P);
  for (int row = 0; row < P; ++row) {
    const int g = row / r;
    a.entries.block(row, g * r, 1, r).setOnes();
  }
  return a;
}

}  // namespace solon
