#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "solon/allocation.hpp"
#include "solon/config.hpp"
#include "solon/errors.hpp"
#include "solon/parallel.hpp"
#include "solon/weights.hpp"

namespace solon {

/// Column-stacked gradients, zero-padded to padded_dim rows. Rows beyond
/// logical_dim are identically zero.
struct GradientMatrix {
  Eigen::MatrixXd values;       // padded_dim x P
  Eigen::Index logical_dim = 0; // d
};

/// d_c x P worker outputs: honest encodings Z, or the received matrix R = Z + N.
struct EncodedMatrix {
  Eigen::MatrixXd values;
};

/// Zero-pad a d x P gradient matrix to padded_dim rows.
inline GradientMatrix pad_gradients(const Eigen::MatrixXd& gradients,
                                    const MechanismConfig& cfg) {
  if (gradients.rows() != cfg.model_dim || gradients.cols() != cfg.workers)
    throw DimensionMismatch(
        "gradient matrix must be d x P = " + std::to_string(cfg.model_dim) +
        " x " + std::to_string(cfg.workers) + ", got " +
        std::to_string(gradients.rows()) + " x " +
        std::to_string(gradients.cols()));
  GradientMatrix g;
  g.logical_dim = cfg.model_dim;
  g.values = Eigen::MatrixXd::Zero(cfg.padded_dim, cfg.workers);
  g.values.topRows(cfg.model_dim) = gradients;
  return g;
}

/// Encode one worker's summed gradient vector: block v of the output is the
/// dot product of [1, w, ..., w^{r_c-1}] with block v of ybar. This is the
/// sparse Kronecker product I_{d_c} (x) [1, w, ..., w^{r_c-1}] applied in
/// O(padded_dim) multiply-adds; the d_c x padded_dim matrix is never formed.
inline Eigen::VectorXd encode_worker(const Eigen::VectorXd& ybar, double weight,
                                     const MechanismConfig& cfg) {
  if (ybar.size() != cfg.padded_dim)
    throw DimensionMismatch("encode_worker expects a vector of length " +
                            std::to_string(cfg.padded_dim) + ", got " +
                            std::to_string(ybar.size()));
  const int rc = cfg.compression;
  Eigen::VectorXd powers(rc);
  double p = 1.0;
  for (int l = 0; l < rc; ++l) {
    powers[l] = p;
    p *= weight;
  }
  Eigen::VectorXd out(cfg.compressed_dim);
  for (int v = 0; v < cfg.compressed_dim; ++v) {
    double acc = 0.0;
    const Eigen::Index base = static_cast<Eigen::Index>(v) * rc;
    for (int l = 0; l < rc; ++l) acc += powers[l] * ybar[base + l];
    out[v] = acc;
  }
  return out;
}

/// Sum of the gradients assigned to the given group (the columns selected by
/// any of the group's allocation rows; they are identical within a group).
inline Eigen::VectorXd group_gradient_sum(const GradientMatrix& g,
                                          const AllocationMatrix& alloc,
                                          const MechanismConfig& cfg,
                                          int group) {
  const int row = group * cfg.redundancy;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(g.values.rows());
  for (int k = 0; k < cfg.workers; ++k)
    if (alloc.entries(row, k) != 0) sum += g.values.col(k);
  return sum;
}

/// Encode all P workers. The group-shared sum ybar is computed once per group
/// and reused for the group's r columns. Groups may encode concurrently;
/// the result is bit-identical to the serial order.
inline EncodedMatrix encode_all(const GradientMatrix& g,
                                const AllocationMatrix& alloc,
                                const WeightSet& weights,
                                const MechanismConfig& cfg, int threads = 1) {
  if (g.values.rows() != cfg.padded_dim || g.values.cols() != cfg.workers)
    throw DimensionMismatch("encode_all: gradient matrix must be " +
                            std::to_string(cfg.padded_dim) + " x " +
                            std::to_string(cfg.workers));
  if (alloc.entries.rows() != cfg.workers ||
      alloc.entries.cols() != cfg.workers)
    throw DimensionMismatch("encode_all: allocation matrix must be P x P");
  if (weights.values.size() != cfg.workers)
    throw DimensionMismatch("encode_all: one weight per worker required");

  EncodedMatrix z;
  z.values.resize(cfg.compressed_dim, cfg.workers);
  parallel_for(cfg.group_count, threads, [&](int j) {
    const Eigen::VectorXd ybar = group_gradient_sum(g, alloc, cfg, j);
    for (int k = 0; k < cfg.redundancy; ++k) {
      const int worker = j * cfg.redundancy + k;
      z.values.col(worker) = encode_worker(ybar, weights.values[worker], cfg);
    }
  });
  return z;
}

}  // namespace solon
