#pragma once

// Truncated Fock-space matrices of a, a^+, Delta = a^+ a, Delta' and p^-N, and
// numerical audits of the Q-mutation relations on the interior block.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qpdeform/errors.hpp"
#include "qpdeform/qnumbers.hpp"

namespace qpdeform {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct FockOperators {
  std::size_t dim = 0;
  /// Deformation parameter in aa^+ - Q a^+a = Delta'; q for the (q,p) family.
  complex Q;
  Matrix a;
  Matrix a_dag;
  Matrix delta;
  Matrix delta_prime;
  Matrix number;
  /// p^-N; only meaningful for the (q,p) family.
  std::optional<Matrix> p_pow_neg_N;
  /// [0]..[dim] (one past the truncation, needed by the last Delta' entry).
  std::vector<complex> basket;
};

struct RelationReport {
  double residual_qmutation = 0.0;   // aa^+ - Q a^+a - Delta'
  double residual_delta_comm = 0.0;  // a Delta - Q Delta a - Delta' a
  double residual_adag_comm = 0.0;   // a^+ Delta - Q Delta a^+ + a^+ Delta'
  double residual_qp = 0.0;          // aa^+ - q a^+a - p^-N
  /// Delta a^+ - Q a^+ Delta - a^+ Delta', the ordering of the third relation
  /// that does hold identically for every basket with Delta' = [N+1] - Q[N].
  double residual_adag_comm_swapped = 0.0;
  std::size_t block_dim = 0;
};

namespace detail {

inline FockOperators assemble(std::size_t dim, std::vector<complex> basket,
                              complex Q) {
  FockOperators ops;
  ops.dim = dim;
  ops.Q = Q;
  const auto d = static_cast<Eigen::Index>(dim);
  ops.a = Matrix::Zero(d, d);
  ops.a_dag = Matrix::Zero(d, d);
  ops.delta = Matrix::Zero(d, d);
  ops.delta_prime = Matrix::Zero(d, d);
  ops.number = Matrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    const auto un = static_cast<std::size_t>(n);
    ops.delta(n, n) = basket[un];
    ops.number(n, n) = static_cast<double>(n);
    const complex next =
        un + 1 < basket.size() ? basket[un + 1] : complex{0.0, 0.0};
    ops.delta_prime(n, n) = next - Q * basket[un];
    if (n + 1 < d) {
      const complex root = std::sqrt(basket[un + 1]);
      ops.a(n, n + 1) = root;
      ops.a_dag(n + 1, n) = root;
    }
  }
  ops.basket = std::move(basket);
  return ops;
}

inline double block_max(const Matrix& m, Eigen::Index block) {
  if (block == 0) return 0.0;
  return m.topLeftCorner(block, block).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Ladder matrices for the (q,p) basket: a|n> = sqrt([n]) |n-1> with the
/// principal square root.
inline FockOperators build_operators(std::size_t dim,
                                     const DeformationParams& params) {
  if (dim < 2) throw InvalidParameter("Fock dimension must be >= 2");
  const QNumberSequence seq = qp_sequence(dim, params);
  FockOperators ops = detail::assemble(dim, seq.numbers, params.q());
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix pn = Matrix::Zero(d, d);
  complex pow{1.0, 0.0};
  for (Eigen::Index n = 0; n < d; ++n) {
    pn(n, n) = pow;
    pow *= params.p_inv();
  }
  ops.p_pow_neg_N = std::move(pn);
  return ops;
}

/// Same construction for a caller-supplied basket [0], [1], ... (the general
/// algebra hook). `Q` enters Delta' = [N+1] - Q [N].
inline FockOperators custom_basket_operators(std::size_t dim,
                                             std::span<const complex> basket,
                                             complex Q) {
  if (dim < 2) throw InvalidParameter("Fock dimension must be >= 2");
  if (basket.size() < dim)
    throw InvalidParameter("basket shorter than the Fock dimension");
  if (basket[0] != complex{0.0, 0.0})
    throw InvalidParameter("malformed basket: [0] must be 0");
  return detail::assemble(dim, {basket.begin(), basket.end()}, Q);
}

/// Max-norm residuals of the relations restricted to rows/cols 0..dim-2.
/// residual_qp needs p^-N and is left at 0 for custom baskets.
inline RelationReport relation_residuals(const FockOperators& ops) {
  const auto d = static_cast<Eigen::Index>(ops.dim);
  if (ops.a.rows() != d || ops.a_dag.rows() != d || ops.delta.rows() != d ||
      ops.delta_prime.rows() != d)
    throw DimensionMismatch("operator matrices disagree with dim");
  const Eigen::Index block = d - 1;
  const complex Q = ops.Q;
  const Matrix& a = ops.a;
  const Matrix& ad = ops.a_dag;
  const Matrix& D = ops.delta;
  const Matrix& Dp = ops.delta_prime;

  RelationReport r;
  r.block_dim = static_cast<std::size_t>(block);
  const Matrix aad = a * ad;
  const Matrix ada = ad * a;
  r.residual_qmutation = detail::block_max(aad - Q * ada - Dp, block);
  r.residual_delta_comm = detail::block_max(a * D - Q * D * a - Dp * a, block);
  r.residual_adag_comm =
      detail::block_max(ad * D - Q * D * ad + ad * Dp, block);
  r.residual_adag_comm_swapped =
      detail::block_max(D * ad - Q * ad * D - ad * Dp, block);
  if (ops.p_pow_neg_N) {
    r.residual_qp = detail::block_max(aad - Q * ada - *ops.p_pow_neg_N, block);
  }
  return r;
}

/// Checks that `ops` was built from `params` before auditing it.
inline RelationReport relation_residuals(const FockOperators& ops,
                                         const DeformationParams& params) {
  if (ops.Q != params.q() || !ops.p_pow_neg_N)
    throw DimensionMismatch("operators were not built from these parameters");
  const auto d = static_cast<Eigen::Index>(ops.dim);
  if (ops.p_pow_neg_N->rows() != d ||
      (d > 1 && (*ops.p_pow_neg_N)(1, 1) != params.p_inv()))
    throw DimensionMismatch("operators were not built from these parameters");
  return relation_residuals(ops);
}

}  // namespace qpdeform
