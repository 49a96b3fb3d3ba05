// Copyright 2026 The rbtomo Authors
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

#ifndef RBTOMO_LINALG_H
#define RBTOMO_LINALG_H

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rbtomo {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Random stream used throughout. Callers own seeding and stream splitting.
using Rng = std::mt19937_64;

/// Largest qubit count for which dense maps (4^n x 4^n) are built.
inline constexpr int kMaxDenseQubits = 3;

inline constexpr std::uint64_t hilbert_dim(int n) {
    return std::uint64_t{1} << n;
}
inline constexpr std::uint64_t liouville_dim(int n) {
    return std::uint64_t{1} << (2 * n);
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// Numerical rank from the singular values, relative to the largest one.
int matrix_rank(const RealMatrix &m, double relative_tol = 1e-9);

/// Stacks each matrix as one row (row-major flattening) and returns the rank of the stack.
int stacked_rank(std::span<const RealMatrix> mats, double relative_tol = 1e-9);

bool is_unitary(const ComplexMatrix &u, double tol = 1e-10);

/// Haar-distributed unitary via QR of a complex Ginibre matrix with phase correction.
ComplexMatrix haar_unitary(int dim, Rng &rng);

/// Derives an independent 64-bit seed for stream `stream` of a master seed.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace rbtomo

#endif
