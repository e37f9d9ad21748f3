// Copyright 2026 The randproj Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "randproj/linalg.h"

#include <algorithm>
#include <limits>

#include "Eigen/Eigenvalues"
#include "Eigen/SVD"

namespace randproj {

double rank_cutoff(Eigen::Index rows, Eigen::Index cols, double largest) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon() * largest;
}

Matrix pseudo_inverse(const Matrix& m) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = rank_cutoff(m.rows(), m.cols(), sigma(0));
  Vector inv = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector symmetric_eigenvalues(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  return solver.eigenvalues();
}

double lambda_max(const Matrix& sym) {
  if (sym.size() == 0) return 0.0;
  return symmetric_eigenvalues(sym).maxCoeff();
}

double lambda_min_nonzero(const Matrix& sym) {
  if (sym.size() == 0) return 0.0;
  const Vector ev = symmetric_eigenvalues(sym);
  const double top = ev.cwiseAbs().maxCoeff();
  const double cutoff = rank_cutoff(sym.rows(), sym.cols(), top);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff && ev(i) > 0.0) return ev(i);
  }
  return 0.0;
}

Eigen::Index numerical_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sigma = svd.singularValues();
  const double cutoff = rank_cutoff(m.rows(), m.cols(), sigma(0));
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff && sigma(i) > 0.0) ++rank;
  }
  return rank;
}

}  // namespace randproj
