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

#include "rbtomo/pauli.h"

#include <gtest/gtest.h>

#include "rbtomo/errors.h"

using namespace rbtomo;

namespace {

const Complex kPhases[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};

}  // namespace

TEST(pauli, from_index_examples) {
    ASSERT_EQ(pauli_from_index(0, 1).label(), "I");
    ASSERT_EQ(pauli_from_index(3, 1).label(), "Z");
    ASSERT_EQ(pauli_from_index(6, 2).label(), "XY");
    ASSERT_EQ(pauli_from_index(6, 2).phase, 0);
    ASSERT_THROW(pauli_from_index(4, 1), ValidationError);
    ASSERT_THROW(pauli_from_index(16, 2), ValidationError);
}

TEST(pauli, index_round_trip) {
    for (int n = 1; n <= 3; n++) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << (2 * n)); i++) {
            ASSERT_EQ(pauli_from_index(i, n).index(), i);
        }
    }
    auto p = PauliOperator::from_label("-iZXY");
    ASSERT_EQ(p.phase, 3);
    ASSERT_EQ(pauli_from_index(p.index(), 3), p.unsigned_label());
}

TEST(pauli, multiply_examples) {
    auto x = PauliOperator::from_label("X");
    auto y = PauliOperator::from_label("Y");
    auto xy = pauli_multiply(x, y);
    ASSERT_EQ(xy.label(), "Z");
    ASSERT_EQ(xy.phase, 1);
    for (std::uint64_t i = 0; i < 16; i++) {
        auto p = pauli_from_index(i, 2);
        ASSERT_EQ(p * p, PauliOperator::identity(2));
    }
    ASSERT_THROW(x * PauliOperator::identity(2), ValidationError);
}

TEST(pauli, multiply_matches_dense_product_exhaustive) {
    for (int n = 1; n <= 2; n++) {
        const std::uint64_t dim = std::uint64_t{1} << (2 * n);
        for (std::uint64_t i = 0; i < dim; i++) {
            for (std::uint64_t j = 0; j < dim; j++) {
                for (int ph = 0; ph < 4; ph++) {
                    auto a = pauli_from_index(i, n);
                    a.phase = ph;
                    auto b = pauli_from_index(j, n);
                    ComplexMatrix expected = pauli_matrix(a) * pauli_matrix(b);
                    ComplexMatrix got = pauli_matrix(a * b);
                    ASSERT_LT((expected - got).cwiseAbs().maxCoeff(), 1e-14) << a.str() << " * " << b.str();
                }
            }
        }
    }
}

TEST(pauli, dense_matrices) {
    ASSERT_TRUE(pauli_matrix(PauliOperator::from_label("I")).isApprox(ComplexMatrix::Identity(2, 2)));
    ComplexMatrix z(2, 2);
    z << 1, 0, 0, -1;
    ASSERT_TRUE(pauli_matrix(PauliOperator::from_label("Z")).isApprox(z));
    ComplexMatrix x(2, 2), y(2, 2);
    x << 0, 1, 1, 0;
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    ASSERT_TRUE(pauli_matrix(PauliOperator::from_label("XY")).isApprox(kron(x, y)));
    ASSERT_THROW(pauli_matrix(PauliOperator::identity(4)), ValidationError);
    ASSERT_TRUE(pauli_matrix(PauliOperator::from_label("-iX")).isApprox(kPhases[3] * x));
}

TEST(pauli, orthogonality_exhaustive) {
    for (int n = 1; n <= 2; n++) {
        const std::uint64_t dim = std::uint64_t{1} << (2 * n);
        const double d = 1 << n;
        for (std::uint64_t i = 0; i < dim; i++) {
            for (std::uint64_t j = 0; j < dim; j++) {
                Complex tr = (pauli_matrix(pauli_from_index(i, n)) * pauli_matrix(pauli_from_index(j, n))).trace();
                ASSERT_NEAR(tr.real(), i == j ? d : 0.0, 1e-14);
                ASSERT_NEAR(tr.imag(), 0.0, 1e-14);
            }
        }
    }
}

TEST(pauli, commutation) {
    auto x = PauliOperator::from_label("XI");
    auto z = PauliOperator::from_label("ZI");
    auto zz = PauliOperator::from_label("ZZ");
    auto xx = PauliOperator::from_label("XX");
    ASSERT_FALSE(x.commutes_with(z));
    ASSERT_TRUE(xx.commutes_with(zz));
    ASSERT_TRUE(x.commutes_with(x));
}

TEST(pauli, large_qubit_counts) {
    auto a = PauliOperator::single(64, 63, 'X');
    auto b = PauliOperator::single(64, 63, 'Z');
    auto ab = a * b;
    ASSERT_EQ(ab.factor(63), 'Y');
    ASSERT_EQ(ab.phase, 3);
    ASSERT_THROW(PauliOperator::identity(65), ValidationError);
}
