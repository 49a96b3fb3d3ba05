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

#include "rbtomo/linalg.h"

#include <array>
#include <cmath>

namespace rbtomo {

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

int matrix_rank(const RealMatrix &m, double relative_tol) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::BDCSVD<RealMatrix> svd(m);
    const auto &s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) {
        return 0;
    }
    int rank = 0;
    for (Eigen::Index i = 0; i < s.size(); i++) {
        if (s(i) > relative_tol * s(0)) {
            rank++;
        }
    }
    return rank;
}

int stacked_rank(std::span<const RealMatrix> mats, double relative_tol) {
    if (mats.empty()) {
        return 0;
    }
    const Eigen::Index cols = mats.front().size();
    RealMatrix stack(static_cast<Eigen::Index>(mats.size()), cols);
    for (size_t r = 0; r < mats.size(); r++) {
        // Column-major storage of the transpose is the row-major flattening of the original.
        RealMatrix t = mats[r].transpose();
        stack.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const RealVector>(t.data(), cols).transpose();
    }
    return matrix_rank(stack, relative_tol);
}

bool is_unitary(const ComplexMatrix &u, double tol) {
    if (u.rows() != u.cols() || u.rows() == 0) {
        return false;
    }
    ComplexMatrix g = u.adjoint() * u;
    return (g - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix haar_unitary(int dim, Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(dim, dim);
    for (int j = 0; j < dim; j++) {
        for (int i = 0; i < dim; i++) {
            double re = normal(rng);
            double im = normal(rng);
            g(i, j) = Complex(re, im) / std::sqrt(2.0);
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; j++) {
        Complex diag = r(j, j);
        double mag = std::abs(diag);
        if (mag > 0) {
            q.col(j) *= diag / mag;
        }
    }
    return q;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(master),
        static_cast<std::uint32_t>(master >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(stream >> 32)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace rbtomo
