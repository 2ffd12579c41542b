#pragma once

#include <Eigen/Dense>

namespace decs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace decs

namespace decs::linalg {

/// Relative cutoff below which singular values are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

struct ThinSvd {
  Matrix u;       // n x r, orthonormal columns
  Vector values;  // r, descending, all > kRankTolerance * values[0]
  Matrix v;       // p x r, orthonormal columns

  Eigen::Index rank() const { return values.size(); }
};

/// Truncated SVD keeping only the numerically nonzero part of the spectrum.
/// Throws InvalidInput on non-finite or empty input. An all-zero matrix yields
/// rank 0.
ThinSvd thin_svd(const Matrix& x);

/// The spectral map F = U diag(scale_factors) U^T that caps every singular
/// value of the data matrix at the median singular value.
///
/// The map is stored together with the right singular basis so it can also be
/// applied to rows that were not part of the decomposition (see apply_to_rows).
struct SpectralTransform {
  Matrix basis;          // U, n x r
  Matrix right_basis;    // V, p x r
  Vector singular_values;  // d, descending
  double cap = 0.0;        // median of d
  Vector scale_factors;    // min(d_i, cap) / d_i, each in (0, 1]

  /// F * x for an n-row matrix x living in the same sample space as `basis`.
  Matrix apply(const Matrix& x) const;

  /// Applies the trim to observations outside the decomposed sample. Because
  /// F X = X V diag(s) V^T, the feature-space map rows * (I + V (diag(s) - I) V^T)
  /// reproduces F X exactly on the training rows and leaves directions
  /// orthogonal to the training row space untouched.
  Matrix apply_to_rows(const Matrix& rows) const;
};

struct TrimResult {
  Matrix x_tilde;
  SpectralTransform transform;
};

/// Median used for the cap: for even r the smaller of the two middle values.
double lower_median_descending(const Vector& descending);

/// Caps the singular values of x at their median. Throws DegenerateInput when x
/// has no nonzero singular value.
TrimResult trim_transform(const Matrix& x);

/// Largest singular value.
double spectral_norm(const Matrix& x);

/// exp(a) for an entrywise nonnegative square matrix by scaling-and-squaring
/// with a degree-18 Taylor polynomial. Throws OverflowError when the result is
/// not finite.
Matrix expm_nonnegative(const Matrix& a);

/// h(W) = tr(exp(W o W)) - p. Zero exactly when the support of W is acyclic.
double acyclicity_value(const Matrix& w);

/// grad h(W) = exp(W o W)^T o 2W.
Matrix acyclicity_gradient(const Matrix& w);

struct AcyclicityEval {
  double value = 0.0;
  Matrix gradient;
};

/// Value and gradient sharing a single matrix exponential.
AcyclicityEval acyclicity(const Matrix& w);

}  // namespace decs::linalg
