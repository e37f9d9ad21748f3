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

// Dense helpers shared by the projection oracles and the conditioning code.
// Both sides use the same rank cutoff so that "nonzero eigenvalue" and
// "nonzero singular value" mean the same thing everywhere.

#ifndef RANDPROJ_LINALG_H_
#define RANDPROJ_LINALG_H_

#include "randproj/types.h"

namespace randproj {

// Singular values below max(rows, cols) * eps * sigma_max are treated as zero.
double rank_cutoff(Eigen::Index rows, Eigen::Index cols, double largest);

// Moore-Penrose pseudoinverse via SVD with the cutoff above.
Matrix pseudo_inverse(const Matrix& m);

// Eigenvalues of a symmetric matrix in ascending order.
Vector symmetric_eigenvalues(const Matrix& sym);

double lambda_max(const Matrix& sym);

// Smallest eigenvalue above the rank cutoff; 0 if the matrix is numerically
// zero.
double lambda_min_nonzero(const Matrix& sym);

// Number of eigenvalues above the rank cutoff.
Eigen::Index numerical_rank(const Matrix& m);

}  // namespace randproj

#endif  // RANDPROJ_LINALG_H_
