#include "decs/linalg.hpp"

#include <array>
#include <cmath>
#include <string>

#include "decs/error.hpp"

namespace decs::linalg {
namespace {

constexpr int kTaylorOrder = 18;
constexpr double kScaledNormBound = 0.5;

void require_finite(const Matrix& x, const char* what) {
  if (!x.allFinite()) {
    throw InvalidInput(std::string(what) + ": input contains non-finite entries");
  }
}

void require_square(const Matrix& w, const char* what) {
  if (w.rows() != w.cols()) {
    throw InvalidInput(std::string(what) + ": expected a square matrix, got " +
                       std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
  }
}

}  // namespace

ThinSvd thin_svd(const Matrix& x) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw InvalidInput("thin_svd: empty matrix");
  }
  require_finite(x, "thin_svd");

  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& d = svd.singularValues();

  Eigen::Index r = 0;
  if (d.size() > 0 && d[0] > 0.0) {
    const double floor = kRankTolerance * d[0];
    while (r < d.size() && d[r] > floor) ++r;
  }
  ThinSvd out;
  out.u = svd.matrixU().leftCols(r);
  out.values = d.head(r);
  out.v = svd.matrixV().leftCols(r);
  return out;
}

double lower_median_descending(const Vector& descending) {
  const Eigen::Index r = descending.size();
  if (r == 0) throw DegenerateInput("median of an empty spectrum");
  // 0-based index r/2 is the middle element for odd r and the smaller of the
  // two middle elements for even r.
  return descending[r / 2];
}

Matrix SpectralTransform::apply(const Matrix& x) const {
  if (x.rows() != basis.rows()) {
    throw InvalidInput("SpectralTransform::apply: row count mismatch");
  }
  // F x = x + U (diag(s) - I) U^T x, which avoids forming the n x n map.
  const Vector shrink = scale_factors.array() - 1.0;
  return x + basis * (shrink.asDiagonal() * (basis.transpose() * x));
}

Matrix SpectralTransform::apply_to_rows(const Matrix& rows) const {
  if (rows.cols() != right_basis.rows()) {
    throw InvalidInput("SpectralTransform::apply_to_rows: column count mismatch");
  }
  const Vector shrink = scale_factors.array() - 1.0;
  return rows + ((rows * right_basis) * shrink.asDiagonal()) * right_basis.transpose();
}

TrimResult trim_transform(const Matrix& x) {
  ThinSvd svd = thin_svd(x);
  if (svd.rank() == 0) {
    throw DegenerateInput("trim_transform: matrix has no nonzero singular value");
  }

  SpectralTransform t;
  t.cap = lower_median_descending(svd.values);
  t.scale_factors = svd.values.unaryExpr([cap = t.cap](double d) { return std::min(d, cap) / d; });
  t.singular_values = std::move(svd.values);
  t.basis = std::move(svd.u);
  t.right_basis = std::move(svd.v);

  TrimResult out;
  out.x_tilde = t.apply(x);
  out.transform = std::move(t);
  return out;
}

double spectral_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues()(0);
}

Matrix expm_nonnegative(const Matrix& a) {
  require_square(a, "expm");
  const Eigen::Index p = a.rows();
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm)) {
    throw OverflowError("expm: matrix norm is not finite", norm);
  }

  int squarings = 0;
  if (norm > kScaledNormBound) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kScaledNormBound)));
  }
  const Matrix scaled = a * std::ldexp(1.0, -squarings);

  // Taylor polynomial of degree kTaylorOrder in Paterson-Stockmeyer form:
  // sum_j B_j (A^4)^j with B_j = sum_{i<4} A^{4j+i} / (4j+i)!, which needs 7
  // products instead of 17 for plain Horner.
  constexpr int kBlock = 4;
  std::array<Matrix, kBlock> powers;
  powers[0] = Matrix::Identity(p, p);
  powers[1] = scaled;
  powers[2] = scaled * scaled;
  powers[3] = powers[2] * scaled;
  const Matrix outer = powers[2] * powers[2];

  std::array<double, kTaylorOrder + 1> coeff{};
  coeff[0] = 1.0;
  for (int k = 1; k <= kTaylorOrder; ++k) coeff[k] = coeff[k - 1] / static_cast<double>(k);

  auto block = [&](int j) {
    Matrix b = Matrix::Zero(p, p);
    for (int i = 0; i < kBlock && kBlock * j + i <= kTaylorOrder; ++i) {
      b += coeff[kBlock * j + i] * powers[i];
    }
    return b;
  };
  int j = kTaylorOrder / kBlock;
  Matrix result = block(j);
  while (j-- > 0) {
    result = result * outer + block(j);
  }
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  if (!result.allFinite()) {
    throw OverflowError("expm: exponential overflowed (1-norm " + std::to_string(norm) + ")", norm);
  }
  return result;
}

AcyclicityEval acyclicity(const Matrix& w) {
  require_square(w, "acyclicity");
  require_finite(w, "acyclicity");
  const Matrix e = expm_nonnegative(w.cwiseProduct(w));
  AcyclicityEval out;
  out.value = e.trace() - static_cast<double>(w.rows());
  // tr(exp(A)) >= p for nonnegative A; anything below is rounding.
  if (out.value < 0.0 && out.value >= -1e-9) out.value = 0.0;
  out.gradient = e.transpose().cwiseProduct(2.0 * w);
  return out;
}

double acyclicity_value(const Matrix& w) {
  require_square(w, "acyclicity_value");
  require_finite(w, "acyclicity_value");
  const double value =
      expm_nonnegative(w.cwiseProduct(w)).trace() - static_cast<double>(w.rows());
  return (value < 0.0 && value >= -1e-9) ? 0.0 : value;
}

Matrix acyclicity_gradient(const Matrix& w) { return acyclicity(w).gradient; }

}  // namespace decs::linalg
