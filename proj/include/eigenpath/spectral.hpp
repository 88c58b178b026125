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

// Spectral analysis of the induced transition matrix P^pi.
//
// A row-stochastic matrix has spectral radius 1 with the all-ones vector e as
// an eigenvector. span{e} is called the 1-eigensubspace throughout. The
// projection and distance helpers below only need the mean of a vector; the
// full eigendecomposition is used for the eigenbasis view of TD error decay.

#ifndef EIGENPATH_SPECTRAL_HPP_
#define EIGENPATH_SPECTRAL_HPP_

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eigenpath/errors.hpp"
#include "eigenpath/mdp.hpp"

namespace eigenpath {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

struct EigenDecomposition {
  // Sorted by non-increasing magnitude; conjugate pairs are adjacent with the
  // positive imaginary part first.
  ComplexVector eigenvalues;
  // Column i pairs with eigenvalues(i); unit Euclidean norm. Column 0 is
  // e / sqrt(N) for stochastic input; when eigenvalue 1 is repeated the rest
  // of its eigenspace is re-orthonormalised against e.
  ComplexMatrix eigenvectors;
  // |lambda_i| - |lambda_{i+1}|, length N - 1.
  Vector magnitude_gaps;
  // Smallest singular value of the eigenvector matrix and its 2-norm
  // condition number.
  double min_singular_value = 0.0;
  double condition_estimate = 0.0;
  bool diagonalizable = false;
};

EigenDecomposition eigendecompose(const InducedTransition& p_pi, double tol = 1e-8);

struct AssumptionReport {
  bool holds = false;
  std::vector<std::string> violations;
  std::string summary() const;
};

// Real-diagonalizable with strictly decreasing eigenvalue magnitudes.
AssumptionReport check_assumption_one(const EigenDecomposition& decomp,
                                      double tol = 1e-8);

// Thrown when the eigenbasis view is requested for an instance whose
// eigenvectors do not form a basis.
class AssumptionViolation : public NumericalError {
 public:
  explicit AssumptionViolation(AssumptionReport report);
  const AssumptionReport& report() const { return report_; }

 private:
  AssumptionReport report_;
};

// Closest point to b in span{e}: every coordinate equals mean(b).
Vector project_to_one_eigensubspace(const Eigen::Ref<const Vector>& b);

// ||b - project(b)||_2, i.e. sqrt(N) times the population standard deviation.
double distance_to_one_eigensubspace(const Eigen::Ref<const Vector>& b);

struct ErrorDecomposition {
  // error0 = sum_i coefficients(i) * H_i
  ComplexVector coefficients;
  double residual = 0.0;
};

ErrorDecomposition decompose_error(const EigenDecomposition& decomp,
                                   const Eigen::Ref<const Vector>& error0);

// Row k is sum_i alpha_i exp(t_k (gamma lambda_i - 1)) H_i. Conjugate pairs
// are summed together; an imaginary residue above 1e-8 (relative) throws.
Matrix predict_error_trajectory(const EigenDecomposition& decomp,
                                const ErrorDecomposition& error, double gamma,
                                std::span<const double> times);

// CSV with columns index,re_lambda,im_lambda,magnitude,gap_to_next.
void write_spectrum_csv(std::ostream& out, const EigenDecomposition& decomp);

}  // namespace eigenpath

#endif  // EIGENPATH_SPECTRAL_HPP_
