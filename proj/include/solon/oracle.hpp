#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "solon/config.hpp"
#include "solon/errors.hpp"
#include "solon/weights.hpp"

namespace solon {

/// The full d_c x padded_dim encoder matrix I_{d_c} (x) [1, w, ..., w^{r_c-1}],
/// materialized literally. Reference path only.
inline Eigen::MatrixXd dense_encoder_matrix(double weight, int compression,
                                            int compressed_dim) {
  Eigen::MatrixXd w =
      Eigen::MatrixXd::Zero(compressed_dim,
                            static_cast<Eigen::Index>(compressed_dim) * compression);
  Eigen::RowVectorXd powers(compression);
  double p = 1.0;
  for (int l = 0; l < compression; ++l) {
    powers[l] = p;
    p *= weight;
  }
  for (int v = 0; v < compressed_dim; ++v)
    w.block(v, static_cast<Eigen::Index>(v) * compression, 1, compression) =
        powers;
  return w;
}

/// Reference encoder: build the dense matrix and multiply.
inline Eigen::VectorXd dense_encode(const Eigen::VectorXd& ybar, double weight,
                                    const MechanismConfig& cfg) {
  if (ybar.size() != cfg.padded_dim)
    throw DimensionMismatch("dense_encode expects a vector of length " +
                            std::to_string(cfg.padded_dim));
  return dense_encoder_matrix(weight, cfg.compression, cfg.compressed_dim) *
         ybar;
}

struct BruteForceResult {
  Eigen::VectorXd group_sum;          // recovered ybar (padded_dim)
  std::vector<int> assumed_corrupted; // the accepted subset
  long subsets_examined = 0;
};

/// Combinatorial reference decoder: enumerate every subset S of at most
/// `max_corrupted` columns, stack the encoder equations of the complement,
/// solve least squares, and accept when the residual is below
/// accept_tol * (1 + ||R_j||_F). All subsets are always examined and every
/// accepted solution is compared against the first so that a uniqueness
/// violation surfaces as AmbiguousRecovery instead of being masked.
/// Exponential by design; node counts above 12 are rejected.
inline BruteForceResult brute_force_group_decode(
    const Eigen::VectorXd& nodes, int compression, int max_corrupted,
    const Eigen::MatrixXd& group_block, double accept_tol = 1e-8) {
  const int r = static_cast<int>(nodes.size());
  if (r > 12)
    throw Error("brute_force_group_decode: capped at 12 nodes, got " +
                std::to_string(r));
  if (group_block.cols() != r)
    throw DimensionMismatch("brute force: block columns must match node count");
  const int dc = static_cast<int>(group_block.rows());
  const int dim = dc * compression;
  if ((r - max_corrupted) * dc < dim)
    throw DimensionMismatch(
        "brute force: too few honest equations to determine the gradient");

  const double accept = accept_tol * (1.0 + group_block.norm());
  BruteForceResult result;
  bool found = false;

  std::vector<Eigen::MatrixXd> encoders(r);
  for (int k = 0; k < r; ++k)
    encoders[k] = dense_encoder_matrix(nodes[k], compression, dc);

  for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
    const int excluded = __builtin_popcount(mask);
    if (excluded > max_corrupted) continue;
    ++result.subsets_examined;

    const int kept = r - excluded;
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(kept) * dc, dim);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(kept) * dc);
    int rowblock = 0;
    for (int k = 0; k < r; ++k) {
      if (mask & (1u << k)) continue;
      stacked.middleRows(static_cast<Eigen::Index>(rowblock) * dc, dc) =
          encoders[k];
      rhs.segment(static_cast<Eigen::Index>(rowblock) * dc, dc) =
          group_block.col(k);
      ++rowblock;
    }
    const Eigen::VectorXd g =
        stacked.completeOrthogonalDecomposition().solve(rhs);
    const double residual = (stacked * g - rhs).norm();
    if (residual >= accept) continue;

    if (!found) {
      found = true;
      result.group_sum = g;
      for (int k = 0; k < r; ++k)
        if (mask & (1u << k)) result.assumed_corrupted.push_back(k);
    } else {
      const double gap = (g - result.group_sum).norm();
      if (gap > accept_tol * (1.0 + result.group_sum.norm()))
        throw AmbiguousRecovery(
            "two corruption subsets explain the data with different "
            "gradients; the node count is below the uniqueness regime");
    }
  }
  if (!found)
    throw NoConsistentSubset(
        "no subset of at most " + std::to_string(max_corrupted) +
        " corrupted columns explains the received block");
  return result;
}

/// Config-shaped convenience wrapper for one group.
inline BruteForceResult brute_force_group_decode(
    const MechanismConfig& cfg, const WeightSet& weights, int group,
    const Eigen::MatrixXd& group_block, double accept_tol = 1e-8) {
  return brute_force_group_decode(group_nodes(cfg, weights, group),
                                  cfg.compression, cfg.max_byzantine,
                                  group_block, accept_tol);
}

}  // namespace solon
