#pragma once

#include <cstdint>
#include <optional>

#include "swicca/linalg.hpp"

namespace swicca {

enum class PcaBackend { Grouse, Isvd };

/// Step-size rule for the GROUSE backend. Constant uses a fixed rotation rate
/// theta = eta * |res| * |proj|; Greedy uses theta = scale * atan(|res|/|proj|).
struct StepRule {
  enum class Kind { Constant, Greedy };
  Kind kind = Kind::Greedy;
  double value = 1.0;

  static StepRule constant(double eta) { return {Kind::Constant, eta}; }
  static StepRule greedy(double scale = 1.0) { return {Kind::Greedy, scale}; }
};

/// Default constant step for a p-dimensional stream.
inline double default_constant_eta(int p) { return 0.2 / std::sqrt(static_cast<double>(p)); }

struct PcaUpdateReport {
  double residual_norm = 0.0;
  double projection_norm = 0.0;
  bool rotated = false;
};

/// State of one streaming subspace estimator: an orthonormal p x r basis,
/// singular-value estimates for the incremental-SVD backend, and an optional
/// running mean. Single writer; copy to share across threads.
struct SubspaceState {
  Mat basis;                 // p x r, orthonormal
  Vec svals;                 // r, maintained by Isvd only (empty for Grouse)
  std::optional<Vec> mean;   // running mean estimate, if tracking is enabled
  long count = 0;            // samples seen
  PcaBackend backend = PcaBackend::Grouse;
  StepRule step;

  Index dim() const { return basis.rows(); }
  Index rank() const { return basis.cols(); }

  /// Replaces the basis (validated orthonormal). Used by diagnostics and tests
  /// to pin the estimator to a known subspace.
  void set_basis(const Mat& b);

  /// Bytes retained between updates (basis + svals + mean).
  std::size_t retained_bytes() const;
};

/// Fresh estimator with an orthonormalized Gaussian random basis drawn from
/// the seeded generator. Isvd starts with zero singular-value estimates so the
/// placeholder basis carries no energy and is displaced by the first samples.
SubspaceState pca_init(int p, int r, PcaBackend backend, StepRule step, std::uint64_t seed);

/// Full-observation GROUSE rotation. No-op (rotated=false) when the sample is
/// numerically in-span or orthogonal to the span.
PcaUpdateReport grouse_update(SubspaceState& state, const Vec& x);

/// Rank-truncated incremental SVD: bordered (r+1)x(r+1) matrix built from the
/// current singular values and the new sample's loadings/residual, factored,
/// and truncated back to rank r.
PcaUpdateReport isvd_update(SubspaceState& state, const Vec& x);

/// Dispatch on state.backend.
PcaUpdateReport pca_update(SubspaceState& state, const Vec& x);

/// EWMA mean tracking: mean <- (1-lambda) mean + lambda x (mean <- x on the
/// first sample). Returns the centered sample.
Vec mean_update(SubspaceState& state, const Vec& x, double ewma_lambda);

/// Window mean tracking: mean = arithmetic mean of the caller-supplied window
/// rows. Returns the centered sample.
Vec mean_update(SubspaceState& state, const Vec& x, const Mat& window);

}  // namespace swicca
