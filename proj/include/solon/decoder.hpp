#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "solon/codec.hpp"
#include "solon/config.hpp"
#include "solon/errors.hpp"
#include "solon/parallel.hpp"
#include "solon/probe.hpp"
#include "solon/weights.hpp"

namespace solon {

struct DecodeOptions {
  // Flag node i when |P_j(w_i) - r_jc[i]| > mismatch_tol * (1 + |r_jc[i]|).
  double mismatch_tol = 1e-6;
  // A denominator below pole_tol * (1 + |numerator|) marks the node; the true
  // locator denominator vanishes exactly at adversarial weights.
  double pole_tol = 1e-12;
  // Locator solve residual bound, relative to (1 + ||rhs||).
  double residual_tol = 1e-6;
  int threads = 1;
};

/// Solution of the locator linear system. coeffs holds the r_c + s' numerator
/// coefficients (ascending powers) followed by the s' non-leading denominator
/// coefficients; the denominator is monic of degree s'.
struct LocatorSolution {
  Eigen::VectorXd coeffs;
  int numerator_terms = 0;
  int denominator_terms = 0;
  double residual = 0.0;
};

struct RationalValue {
  double value = 0.0;
  bool pole = false;
};

/// Collapse the received d_c x r group block to one row: r_jc = f R_j.
inline Eigen::VectorXd compress_received(const Eigen::MatrixXd& group_block,
                                         const ProbeVector& probe) {
  if (group_block.rows() != probe.f.size())
    throw DimensionMismatch(
        "compress_received: block has " + std::to_string(group_block.rows()) +
        " rows but probe has " + std::to_string(probe.f.size()) + " entries");
  return group_block.transpose() * probe.f;
}

/// Solve [ W_{r_c+s'-1} | -W_{s'-1} (.) vals ] a = vals (.) nodes^s' in the
/// least-squares sense (minimum-norm, column-equilibrated). Any solution
/// determines the same rational function at the nodes, so non-uniqueness is
/// harmless; the residual is recorded.
inline LocatorSolution solve_locator_system(const Eigen::VectorXd& nodes,
                                            int compression, int denom_degree,
                                            const Eigen::VectorXd& vals,
                                            double residual_tol = 1e-6,
                                            int group = -1) {
  const Eigen::Index n = nodes.size();
  if (vals.size() != n)
    throw DimensionMismatch("locator: node and value counts differ");
  const int num_terms = compression + denom_degree;
  if (n < num_terms + denom_degree)
    throw DimensionMismatch("locator: underdetermined system");

  Eigen::MatrixXd m(n, num_terms + denom_degree);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double p = 1.0;
    for (int l = 0; l < num_terms; ++l) {
      m(k, l) = p;
      p *= nodes[k];
    }
    p = 1.0;
    for (int l = 0; l < denom_degree; ++l) {
      m(k, num_terms + l) = -vals[k] * p;
      p *= nodes[k];
    }
    // p is now nodes[k]^denom_degree
    rhs[k] = vals[k] * p;
  }

  // Column equilibration; unscaled Vandermonde blocks lose several digits.
  Eigen::VectorXd scale(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const double s = m.col(c).norm();
    scale[c] = (s > 0.0) ? s : 1.0;
  }
  Eigen::MatrixXd ms = m * scale.cwiseInverse().asDiagonal();
  Eigen::VectorXd y = ms.completeOrthogonalDecomposition().solve(rhs);
  LocatorSolution sol;
  sol.coeffs = y.cwiseQuotient(scale);
  sol.numerator_terms = num_terms;
  sol.denominator_terms = denom_degree;
  sol.residual = (m * sol.coeffs - rhs).norm();
  if (sol.residual > residual_tol * (1.0 + rhs.norm()))
    throw NumericalFailure(
        "locator solve residual " + std::to_string(sol.residual) +
        " exceeds tolerance relative to the right-hand side",
        group);
  return sol;
}

/// Locator system for a full group with denominator degree s.
inline LocatorSolution solve_locator(const MechanismConfig& cfg,
                                     const WeightSet& weights, int group,
                                     const Eigen::VectorXd& r_jc,
                                     double residual_tol = 1e-6) {
  if (r_jc.size() != cfg.redundancy)
    throw DimensionMismatch("solve_locator expects an r-vector");
  return solve_locator_system(group_nodes(cfg, weights, group),
                              cfg.compression, cfg.max_byzantine, r_jc,
                              residual_tol, group);
}

/// Evaluate P_j(w) = numerator(w) / denominator(w) by Horner's rule.
/// A vanishing denominator is reported as a pole, not an error; callers treat
/// the node as flagged.
inline RationalValue eval_locator(const LocatorSolution& sol, double w,
                                  double pole_tol = 1e-12) {
  const auto& c = sol.coeffs;
  double num = 0.0;
  for (int i = sol.numerator_terms - 1; i >= 0; --i) num = num * w + c[i];
  double den = 1.0;  // monic leading coefficient
  for (int i = sol.denominator_terms - 1; i >= 0; --i)
    den = den * w + c[sol.numerator_terms + i];
  RationalValue out;
  if (std::abs(den) < pole_tol * (1.0 + std::abs(num))) {
    out.pole = true;
    return out;
  }
  out.value = num / den;
  return out;
}

struct LocateDiagnostics {
  double locator_residual = 0.0;  // last locator solve
  int rounds = 0;                 // peeling rounds executed
  double max_kept_mismatch = 0.0; // worst verified residual among kept nodes,
                                  // normalized by (1 + |r_jc|)
};

namespace detail {

/// Least-squares fit of a degree-(terms-1) polynomial through the given
/// (node, value) pairs; returns per-node absolute residuals.
inline Eigen::VectorXd interpolation_residuals(const Eigen::VectorXd& nodes,
                                               const Eigen::VectorXd& vals,
                                               int terms) {
  Eigen::MatrixXd v = vandermonde_from_nodes(nodes, terms - 1);
  Eigen::VectorXd coeff = v.completeOrthogonalDecomposition().solve(vals);
  return (v * coeff - vals).cwiseAbs();
}

}  // namespace detail

/// Adversary locator phi. Flags every node whose received value disagrees with
/// the rational locator fit (mismatch beyond tolerance, or a denominator pole).
///
/// Location runs in rounds: flagged nodes are removed and the locator is
/// re-solved on the survivors with denominator degree s - |V| (the identity
/// r - |V| = r_c + 2(s - |V|) keeps the reduced system well posed), ending in
/// a degree-(r_c - 1) consistency verification of the kept nodes. A lingering
/// inconsistency flags the worst offender; more than s flags raise
/// TooManyAdversaries. Returns sorted local indices in [0, r).
inline std::vector<int> locate_adversaries(const MechanismConfig& cfg,
                                           const WeightSet& weights, int group,
                                           const Eigen::MatrixXd& group_block,
                                           const ProbeVector& probe,
                                           const DecodeOptions& opts = {},
                                           LocateDiagnostics* diag = nullptr) {
  const int r = cfg.redundancy;
  const int s = cfg.max_byzantine;
  if (group_block.cols() != r)
    throw DimensionMismatch("locate_adversaries expects a d_c x r block");
  const Eigen::VectorXd nodes = group_nodes(cfg, weights, group);
  const Eigen::VectorXd r_jc = compress_received(group_block, probe);

  std::vector<bool> flagged(r, false);
  int flag_count = 0;
  LocateDiagnostics local_diag;

  const auto tol_at = [&](int k) {
    return opts.mismatch_tol * (1.0 + std::abs(r_jc[k]));
  };

  for (int round = 0; round <= s + 2; ++round) {
    local_diag.rounds = round + 1;
    std::vector<int> kept;
    kept.reserve(r - flag_count);
    for (int k = 0; k < r; ++k)
      if (!flagged[k]) kept.push_back(k);
    Eigen::VectorXd sub_nodes(kept.size()), sub_vals(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) {
      sub_nodes[i] = nodes[kept[i]];
      sub_vals[i] = r_jc[kept[i]];
    }

    const int s_round = s - flag_count;
    if (s_round > 0) {
      bool solved = true;
      LocatorSolution sol;
      try {
        sol = solve_locator_system(sub_nodes, cfg.compression, s_round,
                                   sub_vals, opts.residual_tol, group);
      } catch (const NumericalFailure&) {
        // An inconsistent locator system means the data cannot be explained
        // by s_round corruptions; let the verification pass flag offenders.
        solved = false;
      }
      if (solved) {
        local_diag.locator_residual = sol.residual;
        int newly = 0;
        for (int k : kept) {
          const RationalValue ev = eval_locator(sol, nodes[k], opts.pole_tol);
          if (ev.pole || std::abs(ev.value - r_jc[k]) > tol_at(k)) {
            flagged[k] = true;
            ++newly;
          }
        }
        flag_count += newly;
        if (flag_count > s)
          throw TooManyAdversaries(
              "group " + std::to_string(group) + ": located " +
                  std::to_string(flag_count) + " mismatching nodes, bound is " +
                  std::to_string(s),
              group);
        if (newly > 0) continue;
      }
    }

    // Verification: kept values must lie on one degree-(r_c - 1) polynomial.
    const Eigen::VectorXd res =
        detail::interpolation_residuals(sub_nodes, sub_vals, cfg.compression);
    int worst = -1;
    double worst_norm = 0.0;
    bool consistent = true;
    for (size_t i = 0; i < kept.size(); ++i) {
      const double norm = res[i] / (1.0 + std::abs(r_jc[kept[i]]));
      if (res[i] > tol_at(kept[i])) consistent = false;
      if (norm > worst_norm) {
        worst_norm = norm;
        worst = static_cast<int>(i);
      }
    }
    if (consistent) {
      local_diag.max_kept_mismatch = worst_norm;
      if (diag) *diag = local_diag;
      std::vector<int> located;
      for (int k = 0; k < r; ++k)
        if (flagged[k]) located.push_back(k);
      return located;
    }
    if (flag_count + 1 > s)
      throw TooManyAdversaries(
          "group " + std::to_string(group) +
              ": received values inconsistent beyond the adversary bound",
          group);
    flagged[kept[worst]] = true;
    ++flag_count;
  }
  throw NumericalFailure(
      "group " + std::to_string(group) + ": adversary location did not settle",
      group);
}

/// Block decoder psi. Recovers the group gradient sum from the first r_c
/// honest columns: with B the d_c x r_c block layout of ybar, the honest
/// columns satisfy B W^T = R, so one square transposed Vandermonde solve and a
/// row-major vectorization return ybar.
inline Eigen::VectorXd block_decode(const MechanismConfig& cfg,
                                    const WeightSet& weights, int group,
                                    const Eigen::MatrixXd& group_block,
                                    const std::vector<int>& honest,
                                    double* rcond_estimate = nullptr) {
  const int rc = cfg.compression;
  if (group_block.rows() != cfg.compressed_dim)
    throw DimensionMismatch("block_decode expects a d_c x r block");
  if (static_cast<int>(honest.size()) < rc)
    throw InsufficientHonest(
        "group " + std::to_string(group) + ": need " + std::to_string(rc) +
            " honest nodes for recovery, have " + std::to_string(honest.size()),
        group);
  // First r_c honest indices in ascending order.
  std::vector<int> sel(honest.begin(), honest.end());
  std::sort(sel.begin(), sel.end());
  sel.resize(rc);

  Eigen::VectorXd sel_nodes(rc);
  Eigen::MatrixXd received(group_block.rows(), rc);
  const Eigen::VectorXd nodes = group_nodes(cfg, weights, group);
  for (int i = 0; i < rc; ++i) {
    if (sel[i] < 0 || sel[i] >= cfg.redundancy)
      throw DimensionMismatch("block_decode: node index out of range");
    sel_nodes[i] = nodes[sel[i]];
    received.col(i) = group_block.col(sel[i]);
  }

  const Eigen::MatrixXd v = detail::vandermonde_from_nodes(sel_nodes, rc - 1);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  qr.setThreshold(1e-15);
  if (qr.rank() < rc)
    throw SingularSubmatrix(
        "group " + std::to_string(group) + ": Vandermonde restriction singular",
        group);
  if (rcond_estimate) {
    const auto& rdiag = qr.matrixR();
    *rcond_estimate =
        std::abs(rdiag(rc - 1, rc - 1)) / std::abs(rdiag(0, 0));
  }
  // v * Bt = received^T, then ybar is the column-major layout of Bt.
  Eigen::MatrixXd bt = qr.solve(received.transpose());
  return Eigen::Map<Eigen::VectorXd>(bt.data(), cfg.padded_dim);
}

struct GroupReport {
  int group = 0;
  std::vector<int> located;        // global worker indices
  double locator_residual = 0.0;
  int peel_rounds = 0;
  double max_kept_mismatch = 0.0;
  double recovery_rcond = 0.0;     // diagonal-ratio estimate of the psi solve
};

struct DecodeReport {
  Eigen::VectorXd sum;             // length model_dim, padding stripped
  std::vector<GroupReport> groups;
  std::vector<int> located;        // sorted union of group sets (global)
};

/// Full decoder: per group locate adversaries, recover the group sum from the
/// complement, and add the group sums in fixed order. Groups decode
/// concurrently when opts.threads > 1 with bit-identical results.
inline DecodeReport decode(const MechanismConfig& cfg, const WeightSet& weights,
                           const EncodedMatrix& received,
                           const std::vector<ProbeVector>& probes,
                           const DecodeOptions& opts = {}) {
  const int r = cfg.redundancy;
  const int q = cfg.group_count;
  if (received.values.rows() != cfg.compressed_dim ||
      received.values.cols() != cfg.workers)
    throw DimensionMismatch("decode: received matrix must be d_c x P");
  if (static_cast<int>(probes.size()) != q)
    throw DimensionMismatch("decode: one probe per group required");

  std::vector<Eigen::VectorXd> group_sums(q);
  DecodeReport report;
  report.groups.resize(q);

  parallel_for(q, opts.threads, [&](int j) {
    const Eigen::MatrixXd block =
        received.values.middleCols(static_cast<Eigen::Index>(j) * r, r);
    LocateDiagnostics diag;
    const std::vector<int> located_local =
        locate_adversaries(cfg, weights, j, block, probes[j], opts, &diag);
    std::vector<int> honest;
    honest.reserve(r - located_local.size());
    for (int k = 0; k < r; ++k)
      if (!std::binary_search(located_local.begin(), located_local.end(), k))
        honest.push_back(k);

    GroupReport& gr = report.groups[j];
    gr.group = j;
    gr.locator_residual = diag.locator_residual;
    gr.peel_rounds = diag.rounds;
    gr.max_kept_mismatch = diag.max_kept_mismatch;
    for (int k : located_local) gr.located.push_back(j * r + k);
    group_sums[j] = block_decode(cfg, weights, j, block, honest,
                                 &gr.recovery_rcond);
  });

  Eigen::VectorXd total = Eigen::VectorXd::Zero(cfg.padded_dim);
  for (int j = 0; j < q; ++j) total += group_sums[j];  // fixed reduction order
  if (!total.allFinite())
    throw NumericalFailure("decode: recovered sum is not finite");

  report.sum = total.head(cfg.model_dim);
  for (const auto& gr : report.groups)
    report.located.insert(report.located.end(), gr.located.begin(),
                          gr.located.end());
  std::sort(report.located.begin(), report.located.end());
  return report;
}

}  // namespace solon
