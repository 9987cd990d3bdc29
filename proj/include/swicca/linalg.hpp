#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "swicca/errors.hpp"

namespace swicca {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatX<double>;
using Vec = VecX<double>;
using Index = Eigen::Index;

/// Thin SVD factors: M ~ U * S.asDiagonal() * V^T with orthonormal U, V and
/// S sorted non-increasing. Column signs are canonical: the largest-magnitude
/// entry of each U column (lowest index on ties) is non-negative, V follows U.
template <typename Scalar>
struct ThinSvdT {
  MatX<Scalar> U;
  VecX<Scalar> S;
  MatX<Scalar> V;
};
using ThinSvd = ThinSvdT<double>;

template <typename Scalar>
struct NormalizedColumnsT {
  MatX<Scalar> Q;
  VecX<Scalar> norms;
  std::vector<bool> zero_mask;  // true where the column norm was exactly zero
};
using NormalizedColumns = NormalizedColumnsT<double>;

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw input_error(std::string(what) + ": non-finite entries in input");
  }
}

namespace detail {

constexpr int kJacobiMaxSweeps = 60;
constexpr double kJacobiTol = 1e-12;     // relative off-diagonal tolerance
constexpr double kGramAspectRatio = 8.0; // short-side Gram reduction kicks in here

// Sign canon shared by every factorization: per column of `lead`, the entry of
// largest magnitude (lowest index on ties) is made non-negative; the matching
// column of `follow` flips with it.
template <typename Scalar>
void canonicalize_signs(MatX<Scalar>& lead, MatX<Scalar>* follow) {
  for (Index j = 0; j < lead.cols(); ++j) {
    Index imax = 0;
    Scalar amax = Scalar(-1);
    for (Index i = 0; i < lead.rows(); ++i) {
      const Scalar a = std::abs(lead(i, j));
      if (a > amax) {
        amax = a;
        imax = i;
      }
    }
    if (lead(imax, j) < Scalar(0)) {
      lead.col(j) = -lead.col(j);
      if (follow != nullptr) follow->col(j) = -follow->col(j);
    }
  }
}

// Deterministic orthonormal completion: returns a unit vector orthogonal to the
// first `ncols` columns of Q, derived from the canonical basis vector with the
// largest residual (lowest index on ties).
template <typename Scalar>
VecX<Scalar> complete_orthonormal(const MatX<Scalar>& Q, Index ncols) {
  const Index m = Q.rows();
  Index best = 0;
  Scalar best_row_sq = std::numeric_limits<Scalar>::max();
  for (Index i = 0; i < m; ++i) {
    const Scalar row_sq = Q.row(i).head(ncols).squaredNorm();
    if (row_sq < best_row_sq) {
      best_row_sq = row_sq;
      best = i;
    }
  }
  VecX<Scalar> w = VecX<Scalar>::Zero(m);
  w(best) = Scalar(1);
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < ncols; ++j) {
      w -= Q.col(j).dot(w) * Q.col(j);
    }
  }
  const Scalar nw = w.norm();
  if (nw <= Scalar(0)) {
    throw numeric_error("orthonormal completion failed");
  }
  return w / nw;
}

// One-sided Jacobi on a tall matrix: orthogonalizes the columns of B in place
// while accumulating the right rotations in V (so B_in = B_out * V^T stays an
// invariant). On return the columns of B are U * diag(S) in arbitrary order.
template <typename Scalar>
void one_sided_jacobi(MatX<Scalar>& B, MatX<Scalar>& V, const std::string& shape) {
  const Index n = B.cols();
  bool rotated = true;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && rotated; ++sweep) {
    rotated = false;
    for (Index p = 0; p + 1 < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar alpha = B.col(p).squaredNorm();
        const Scalar beta = B.col(q).squaredNorm();
        if (alpha == Scalar(0) || beta == Scalar(0)) continue;
        const Scalar gamma = B.col(p).dot(B.col(q));
        if (std::abs(gamma) <= Scalar(kJacobiTol) * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Scalar zeta = (beta - alpha) / (Scalar(2) * gamma);
        const Scalar t =
            (zeta >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
            (std::abs(zeta) + std::sqrt(Scalar(1) + zeta * zeta));
        const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
        const Scalar s = c * t;
        const VecX<Scalar> bp = B.col(p);
        B.col(p) = c * bp - s * B.col(q);
        B.col(q) = s * bp + c * B.col(q);
        const VecX<Scalar> vp = V.col(p);
        V.col(p) = c * vp - s * V.col(q);
        V.col(q) = s * vp + c * V.col(q);
      }
    }
  }
  if (rotated) {
    throw numeric_error("thin_svd: Jacobi sweeps did not converge for a " + shape +
                        " matrix");
  }
}

// Full factorization of a tall matrix via one-sided Jacobi. Returns U (m x n),
// S (n, non-increasing) and V (n x n) without sign canon.
template <typename Scalar>
void svd_tall(const MatX<Scalar>& A, MatX<Scalar>& U, VecX<Scalar>& S, MatX<Scalar>& V,
              const std::string& shape) {
  const Index m = A.rows();
  const Index n = A.cols();
  MatX<Scalar> B = A;
  V = MatX<Scalar>::Identity(n, n);
  one_sided_jacobi(B, V, shape);

  VecX<Scalar> norms(n);
  for (Index j = 0; j < n; ++j) norms(j) = B.col(j).norm();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return norms(a) > norms(b); });

  U.resize(m, n);
  S.resize(n);
  MatX<Scalar> Vs(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<size_t>(j)];
    S(j) = norms(src);
    Vs.col(j) = V.col(src);
    if (S(j) > Scalar(0)) {
      U.col(j) = B.col(src) / S(j);
    } else {
      U.col(j) = complete_orthonormal(U, j);
    }
  }
  V = std::move(Vs);
}

// Short-side Gram reduction for extremely rectangular matrices: factor the
// s x s Gram matrix of the short side (s = min(m, n)) and reconstruct only the
// requested long-side vectors. Avoids allocating anything of the long
// dimension beyond k columns.
template <typename Scalar>
void svd_gram_short_side(const MatX<Scalar>& M, Index k, MatX<Scalar>& U, VecX<Scalar>& S,
                         MatX<Scalar>& V, const std::string& shape) {
  const Index m = M.rows();
  const Index n = M.cols();
  const bool wide = m <= n;
  const Index s = wide ? m : n;

  MatX<Scalar> G(s, s);
  if (wide) {
    G.noalias() = M * M.transpose();
  } else {
    G.noalias() = M.transpose() * M;
  }
  G = Scalar(0.5) * (G + G.transpose());  // symmetrize against roundoff

  MatX<Scalar> GU;
  VecX<Scalar> lambda;
  MatX<Scalar> GV;
  svd_tall(G, GU, lambda, GV, shape);  // PSD Gram: singular values = eigenvalues

  VecX<Scalar> sigma(k);
  for (Index j = 0; j < k; ++j) sigma(j) = std::sqrt(std::max(lambda(j), Scalar(0)));

  MatX<Scalar> P = GV.leftCols(k);  // exact rotations; orthonormal short-side factor
  MatX<Scalar> L(wide ? n : m, k);  // long-side factor, built column by column
  const Scalar drop = sigma.size() > 0 ? sigma(0) * Scalar(1e-10) : Scalar(0);
  for (Index j = 0; j < k; ++j) {
    if (sigma(j) > drop && sigma(j) > Scalar(0)) {
      if (wide) {
        L.col(j).noalias() = M.transpose() * P.col(j);
      } else {
        L.col(j).noalias() = M * P.col(j);
      }
      L.col(j) /= sigma(j);
      // one re-orthogonalization pass against previous columns
      for (Index i = 0; i < j; ++i) L.col(j) -= L.col(i).dot(L.col(j)) * L.col(i);
      const Scalar nj = L.col(j).norm();
      if (nj > Scalar(0)) {
        L.col(j) /= nj;
      } else {
        L.col(j) = complete_orthonormal(L, j);
      }
    } else {
      sigma(j) = std::max(sigma(j), Scalar(0));
      L.col(j) = complete_orthonormal(L, j);
    }
  }

  S = sigma;
  if (wide) {
    U = P;
    V = std::move(L);
  } else {
    U = std::move(L);
    V = P;
  }
}

}  // namespace detail

/// First k singular triplets of M, deterministic for identical input bits.
/// One-sided Jacobi on the thinner orientation; extremely rectangular inputs
/// (aspect >= 8) go through the short-side Gram matrix instead so the cost and
/// transient memory stay proportional to the short dimension.
template <typename Scalar>
ThinSvdT<Scalar> thin_svd(const MatX<Scalar>& M, Index k) {
  const Index m = M.rows();
  const Index n = M.cols();
  const std::string shape = std::to_string(m) + "x" + std::to_string(n);
  if (m < 1 || n < 1) {
    throw input_error("thin_svd: empty matrix (" + shape + ")");
  }
  if (k < 1 || k > std::min(m, n)) {
    throw input_error("thin_svd: k=" + std::to_string(k) + " out of range for " + shape);
  }
  require_finite(M, "thin_svd");

  ThinSvdT<Scalar> out;
  const Index small = std::min(m, n);
  const Index large = std::max(m, n);
  if (static_cast<double>(large) >=
      detail::kGramAspectRatio * static_cast<double>(small)) {
    detail::svd_gram_short_side(M, k, out.U, out.S, out.V, shape);
  } else if (m >= n) {
    MatX<Scalar> U, V;
    VecX<Scalar> S;
    detail::svd_tall(M, U, S, V, shape);
    out.U = U.leftCols(k);
    out.S = S.head(k);
    out.V = V.leftCols(k);
  } else {
    // transpose to the thinner orientation, then swap factors back
    MatX<Scalar> U, V;
    VecX<Scalar> S;
    const MatX<Scalar> Mt = M.transpose();
    detail::svd_tall(Mt, U, S, V, shape);
    out.U = V.leftCols(k);
    out.S = S.head(k);
    out.V = U.leftCols(k);
  }
  detail::canonicalize_signs(out.U, &out.V);
  return out;
}

/// Divides each column by its l2 norm. Zero columns stay zero and are flagged
/// in the mask instead of raising; callers treat them as rank loss.
template <typename Scalar>
NormalizedColumnsT<Scalar> normalize_columns(const MatX<Scalar>& M) {
  require_finite(M, "normalize_columns");
  NormalizedColumnsT<Scalar> out;
  out.Q = M;
  out.norms.resize(M.cols());
  out.zero_mask.assign(static_cast<size_t>(M.cols()), false);
  for (Index j = 0; j < M.cols(); ++j) {
    const Scalar nj = M.col(j).norm();
    out.norms(j) = nj;
    if (nj > Scalar(0)) {
      out.Q.col(j) /= nj;
    } else {
      out.zero_mask[static_cast<size_t>(j)] = true;
    }
  }
  return out;
}

/// Modified Gram-Schmidt with a fixed column order and one re-orthogonalization
/// pass. Preserves the column span; throws rank_error on numerical rank loss.
template <typename Scalar>
MatX<Scalar> orthonormalize(const MatX<Scalar>& M) {
  require_finite(M, "orthonormalize");
  if (M.cols() > M.rows()) {
    throw input_error("orthonormalize: more columns than rows");
  }
  const Scalar scale = M.norm();
  MatX<Scalar> Q = M;
  for (Index j = 0; j < Q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) {
        Q.col(j) -= Q.col(i).dot(Q.col(j)) * Q.col(i);
      }
    }
    const Scalar nj = Q.col(j).norm();
    if (nj < Scalar(1e-12) * scale) {
      throw rank_error("orthonormalize: column " + std::to_string(j) +
                       " is numerically dependent on earlier columns");
    }
    Q.col(j) /= nj;
  }
  return Q;
}

/// Normalized squared inner product between two directions; 1 for parallel,
/// 0 for orthogonal, invariant to sign and scale.
template <typename DA, typename DB>
double direction_affinity(const Eigen::MatrixBase<DA>& u, const Eigen::MatrixBase<DB>& v) {
  require_finite(u, "direction_affinity");
  require_finite(v, "direction_affinity");
  const double nu = u.squaredNorm();
  const double nv = v.squaredNorm();
  if (nu <= 0.0 || nv <= 0.0) {
    throw input_error("direction_affinity: zero vector");
  }
  const double d = u.derived().template cast<double>().dot(v.derived().template cast<double>());
  return (d * d) / (nu * nv);
}

/// ||U^T V||_F^2 / r for orthonormal U, V with r columns each; rotation
/// invariant within each span.
template <typename Scalar>
double subspace_affinity(const MatX<Scalar>& U, const MatX<Scalar>& V) {
  require_finite(U, "subspace_affinity");
  require_finite(V, "subspace_affinity");
  if (U.rows() != V.rows() || U.cols() != V.cols()) {
    throw input_error("subspace_affinity: shape mismatch");
  }
  const Index r = U.cols();
  if (r < 1) throw input_error("subspace_affinity: empty basis");
  const double gram_u =
      (U.transpose() * U - MatX<Scalar>::Identity(r, r)).norm();
  const double gram_v =
      (V.transpose() * V - MatX<Scalar>::Identity(r, r)).norm();
  if (gram_u > 1e-6 || gram_v > 1e-6) {
    throw input_error("subspace_affinity: input columns are not orthonormal");
  }
  return (U.transpose() * V).squaredNorm() / static_cast<double>(r);
}

/// Flip column signs of `lead` to the canonical convention, with the matching
/// columns of `follow` flipping in lockstep (keeps factor pairs consistent).
template <typename Scalar>
void canonicalize_sign_pairs(MatX<Scalar>& lead, MatX<Scalar>& follow) {
  if (lead.cols() != follow.cols()) {
    throw input_error("canonicalize_sign_pairs: column count mismatch");
  }
  detail::canonicalize_signs(lead, &follow);
}

template <typename Scalar>
void canonicalize_sign(MatX<Scalar>& lead) {
  detail::canonicalize_signs<Scalar>(lead, nullptr);
}

}  // namespace swicca
