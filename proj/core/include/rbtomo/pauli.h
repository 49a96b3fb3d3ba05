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

#ifndef RBTOMO_PAULI_H
#define RBTOMO_PAULI_H

#include <cstdint>
#include <string>
#include <string_view>

#include "rbtomo/linalg.h"

namespace rbtomo {

inline constexpr int kMaxPauliQubits = 64;

/// An n-qubit Pauli group element i^phase * (P_0 (x) P_1 (x) ... (x) P_{n-1}).
///
/// Bit q of `x` and `z` describes qubit q: (0,0)=I, (1,0)=X, (1,1)=Y, (0,1)=Z. The
/// tensor factors are the Hermitian single-qubit Paulis, so a phase of 0 always means
/// a Hermitian operator. Qubit 0 is the leftmost tensor factor and the most
/// significant base-4 digit of `index()`.
struct PauliOperator {
    int n = 0;
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    int phase = 0;

    static PauliOperator identity(int n);
    /// Inverse of `index()`; the digit order per qubit is (I, X, Y, Z).
    static PauliOperator from_index(std::uint64_t index, int n);
    /// Parses labels like "XY", "-ZI", "iX", "-iYY".
    static PauliOperator from_label(std::string_view label);
    /// Single-qubit factor `kind` (one of 'I', 'X', 'Y', 'Z') on `qubit`, identity elsewhere.
    static PauliOperator single(int n, int qubit, char kind);

    std::uint64_t index() const;
    /// Tensor label without the phase, e.g. "XY".
    std::string label() const;
    /// Label with a phase prefix ("", "i", "-", "-i").
    std::string str() const;
    char factor(int qubit) const;

    bool is_identity_label() const {
        return x == 0 && z == 0;
    }
    bool commutes_with(const PauliOperator &other) const;
    /// Same tensor label with phase reset to 0.
    PauliOperator unsigned_label() const {
        return PauliOperator{n, x, z, 0};
    }

    PauliOperator operator*(const PauliOperator &other) const;
    bool operator==(const PauliOperator &other) const = default;
};

PauliOperator pauli_from_index(std::uint64_t index, int n);
PauliOperator pauli_multiply(const PauliOperator &a, const PauliOperator &b);

/// Dense 2^n x 2^n matrix including the tracked phase. Requires n <= kMaxDenseQubits.
ComplexMatrix pauli_matrix(const PauliOperator &p);

/// Power of i picked up when multiplying the Hermitian labels (x1,z1)(x2,z2), mod 4.
int pauli_product_phase(std::uint64_t x1, std::uint64_t z1, std::uint64_t x2, std::uint64_t z2);

}  // namespace rbtomo

#endif
