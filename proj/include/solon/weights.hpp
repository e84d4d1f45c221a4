#pragma once

#include <Eigen/Dense>

#include "solon/config.hpp"
#include "solon/errors.hpp"

namespace solon {

/// One distinct nonzero encoding scalar per worker.
struct WeightSet {
  Eigen::VectorXd values;  // indexed by worker
};

/// Deterministic weights: the value set {1/P, 2/P, ..., P/P} assigned so that
/// group j (0-based) member k holds (k*q + j + 1)/P. Each group then sees
/// nodes equispaced at gap 1/r across (0, 1], which keeps the per-group
/// Vandermonde systems well conditioned independently of P; the global min
/// pairwise gap is exactly 1/P. With a single group this is plain k/P.
inline WeightSet make_weights(const MechanismConfig& cfg) {
  const int P = cfg.workers;
  const int r = cfg.redundancy;
  const int q = cfg.group_count;
  WeightSet w;
  w.values.resize(P);
  for (int j = 0; j < q; ++j)
    for (int k = 0; k < r; ++k)
      w.values[j * r + k] = static_cast<double>(k * q + j + 1) / P;
  return w;
}

/// Weight of member k (0-based) of group j (0-based).
inline double group_weight(const MechanismConfig& cfg, const WeightSet& w,
                           int group, int member) {
  return w.values[group * cfg.redundancy + member];
}

namespace detail {
/// Rows are geometric progressions of the given nodes: entry (k, l) = node_k^l.
/// Powers accumulate by repeated multiplication so encoder and decoder see
/// bit-identical values.
inline Eigen::MatrixXd vandermonde_from_nodes(const Eigen::VectorXd& nodes,
                                              int degree) {
  Eigen::MatrixXd m(nodes.size(), degree + 1);
  for (Eigen::Index k = 0; k < nodes.size(); ++k) {
    double p = 1.0;
    for (int l = 0; l <= degree; ++l) {
      m(k, l) = p;
      p *= nodes[k];
    }
  }
  return m;
}
}  // namespace detail

/// The r x (degree+1) matrix with row k = [1, w, w^2, ...] for member k of
/// the given group.
inline Eigen::MatrixXd vandermonde(const MechanismConfig& cfg,
                                   const WeightSet& w, int group, int degree) {
  if (group < 0 || group >= cfg.group_count)
    throw DimensionMismatch("group index out of range");
  if (degree < 0) throw DimensionMismatch("vandermonde degree must be >= 0");
  const Eigen::VectorXd nodes =
      w.values.segment(static_cast<Eigen::Index>(group) * cfg.redundancy,
                       cfg.redundancy);
  return detail::vandermonde_from_nodes(nodes, degree);
}

/// All r weights of one group, in member order.
inline Eigen::VectorXd group_nodes(const MechanismConfig& cfg,
                                   const WeightSet& w, int group) {
  return w.values.segment(static_cast<Eigen::Index>(group) * cfg.redundancy,
                          cfg.redundancy);
}

}  // namespace solon
