// Copyright 2026 The Eigenpath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eigenpath/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "eigenpath/csv.hpp"

namespace eigenpath {
namespace {

using Complex = std::complex<double>;

double matrix_condition(const Matrix& m) {
  const Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                  : std::numeric_limits<double>::infinity();
}

// Rotates a unit eigenvector so that its largest entry is real and positive.
void fix_phase(Eigen::Ref<ComplexVector> v) {
  Index best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) best = i;
  }
  const double mag = std::abs(v(best));
  if (mag > 0.0) v *= std::conj(v(best)) / mag;
}

std::string list_indices(const std::vector<Index>& idx) {
  std::ostringstream os;
  const std::size_t shown = std::min<std::size_t>(idx.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) os << (i ? "," : "") << idx[i];
  if (shown < idx.size()) os << ",...";
  return os.str();
}

}  // namespace

EigenDecomposition eigendecompose(const InducedTransition& p_pi, double tol) {
  const Matrix& p = p_pi.matrix();
  const Index n = p.rows();
  const Eigen::EigenSolver<Matrix> solver(p, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge; condition estimate of P^pi "
       << matrix_condition(p);
    throw NumericalError(os.str());
  }
  const ComplexVector raw_values = solver.eigenvalues();
  const ComplexMatrix raw_vectors = solver.eigenvectors();

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  auto is_unit = [&](Index i) { return std::abs(raw_values(i) - Complex(1.0, 0.0)) <= tol; };
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const bool ua = is_unit(a), ub = is_unit(b);
    if (ua != ub) return ua;
    const double ma = std::abs(raw_values(a)), mb = std::abs(raw_values(b));
    if (ma != mb) return ma > mb;
    if (raw_values(a).real() != raw_values(b).real()) {
      return raw_values(a).real() > raw_values(b).real();
    }
    return raw_values(a).imag() > raw_values(b).imag();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = raw_values(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = raw_vectors.col(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k).normalize();
    fix_phase(out.eigenvectors.col(k));
  }

  // Unit eigenspace: put e first and re-orthonormalise the rest against it.
  Index unit_count = 0;
  while (unit_count < n && is_unit(order[static_cast<std::size_t>(unit_count)])) {
    ++unit_count;
  }
  if (unit_count > 0) {
    Matrix basis(n, unit_count + 1);
    basis.col(0).setOnes();
    basis.rightCols(unit_count) = out.eigenvectors.leftCols(unit_count).real();
    const Eigen::HouseholderQR<Matrix> qr(basis);
    Matrix q = qr.householderQ() * Matrix::Identity(n, unit_count);
    if (q(0, 0) < 0.0) q.col(0) *= -1.0;
    for (Index k = 0; k < unit_count; ++k) {
      out.eigenvectors.col(k) = q.col(k).cast<Complex>();
      if (k > 0) fix_phase(out.eigenvectors.col(k));
    }
  }

  out.magnitude_gaps.resize(std::max<Index>(n - 1, 0));
  for (Index k = 0; k + 1 < n; ++k) {
    out.magnitude_gaps(k) = std::abs(out.eigenvalues(k)) - std::abs(out.eigenvalues(k + 1));
  }

  const Eigen::BDCSVD<ComplexMatrix> svd(out.eigenvectors);
  const auto& sv = svd.singularValues();
  out.min_singular_value = sv(sv.size() - 1);
  out.condition_estimate = out.min_singular_value > 0.0
                               ? sv(0) / out.min_singular_value
                               : std::numeric_limits<double>::infinity();
  out.diagonalizable = out.min_singular_value >= tol;
  return out;
}

std::string AssumptionReport::summary() const {
  if (holds) return "assumption holds";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) os << (i ? "; " : "") << violations[i];
  return os.str();
}

AssumptionReport check_assumption_one(const EigenDecomposition& decomp, double tol) {
  AssumptionReport report;
  std::vector<Index> complex_idx;
  for (Index i = 0; i < decomp.eigenvalues.size(); ++i) {
    if (std::abs(decomp.eigenvalues(i).imag()) > tol) complex_idx.push_back(i);
  }
  if (!complex_idx.empty()) {
    report.violations.push_back(std::to_string(complex_idx.size()) +
                                " eigenvalue(s) with imaginary part above tolerance at index " +
                                list_indices(complex_idx));
  }
  if (decomp.min_singular_value < tol) {
    std::ostringstream os;
    os.precision(3);
    os << "eigenvector matrix is rank-deficient (smallest singular value "
       << decomp.min_singular_value << ")";
    report.violations.push_back(os.str());
  }
  std::vector<Index> tie_idx;
  for (Index i = 0; i < decomp.magnitude_gaps.size(); ++i) {
    if (decomp.magnitude_gaps(i) < tol) tie_idx.push_back(i);
  }
  if (!tie_idx.empty()) {
    report.violations.push_back(std::to_string(tie_idx.size()) +
                                " magnitude gap(s) below tolerance after index " +
                                list_indices(tie_idx));
  }
  report.holds = report.violations.empty();
  return report;
}

AssumptionViolation::AssumptionViolation(AssumptionReport report)
    : NumericalError("eigenvectors do not form a basis: " + report.summary()),
      report_(std::move(report)) {}

Vector project_to_one_eigensubspace(const Eigen::Ref<const Vector>& b) {
  if (b.size() == 0) throw DimensionError("cannot project an empty vector");
  return Vector::Constant(b.size(), b.mean());
}

double distance_to_one_eigensubspace(const Eigen::Ref<const Vector>& b) {
  if (b.size() == 0) return 0.0;
  return (b.array() - b.mean()).matrix().norm();
}

ErrorDecomposition decompose_error(const EigenDecomposition& decomp,
                                   const Eigen::Ref<const Vector>& error0) {
  if (error0.size() != decomp.eigenvectors.rows()) {
    throw DimensionError("error vector has " + std::to_string(error0.size()) +
                         " entries, eigenbasis has " +
                         std::to_string(decomp.eigenvectors.rows()));
  }
  if (!decomp.diagonalizable) throw AssumptionViolation(check_assumption_one(decomp));
  const ComplexVector target = error0.cast<Complex>();
  const Eigen::PartialPivLU<ComplexMatrix> lu(decomp.eigenvectors);
  ErrorDecomposition out;
  out.coefficients = lu.solve(target);
  out.residual = (decomp.eigenvectors * out.coefficients - target).norm();
  if (!(out.residual <= 1e-8 * std::max(1.0, error0.norm()))) {
    std::ostringstream os;
    os << "eigenbasis reconstruction residual " << out.residual
       << " (eigenvector condition " << decomp.condition_estimate << ")";
    throw NumericalError(os.str());
  }
  return out;
}

Matrix predict_error_trajectory(const EigenDecomposition& decomp,
                                const ErrorDecomposition& error, double gamma,
                                std::span<const double> times) {
  const Index n = decomp.eigenvectors.rows();
  if (error.coefficients.size() != n) {
    throw DimensionError("coefficient vector does not match the eigenbasis");
  }
  const double scale =
      std::max(1.0, (decomp.eigenvectors * error.coefficients).norm());
  Matrix out(static_cast<Index>(times.size()), n);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    ComplexVector weights(n);
    for (Index i = 0; i < n; ++i) {
      weights(i) = error.coefficients(i) * std::exp(t * (gamma * decomp.eigenvalues(i) - 1.0));
    }
    const ComplexVector value = decomp.eigenvectors * weights;
    const double imag_residue = value.imag().norm();
    if (imag_residue > 1e-8 * scale) {
      std::ostringstream os;
      os << "predicted error has imaginary residue " << imag_residue << " at t=" << t;
      throw NumericalError(os.str());
    }
    out.row(static_cast<Index>(k)) = value.real().transpose();
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const EigenDecomposition& decomp) {
  CsvWriter csv(out, {"index", "re_lambda", "im_lambda", "magnitude", "gap_to_next"});
  const Index n = decomp.eigenvalues.size();
  for (Index i = 0; i < n; ++i) {
    const auto lambda = decomp.eigenvalues(i);
    const double gap = i + 1 < n ? decomp.magnitude_gaps(i)
                                 : std::numeric_limits<double>::quiet_NaN();
    csv.row(i, lambda.real(), lambda.imag(), std::abs(lambda), gap);
  }
}

}  // namespace eigenpath
