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

#ifndef RBTOMO_CLIFFORD_H
#define RBTOMO_CLIFFORD_H

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "rbtomo/channel.h"
#include "rbtomo/pauli.h"

namespace rbtomo {

/// Image of one basis Pauli under conjugation: C P_i C^dagger = sign * P_target.
struct SignedImage {
    std::uint32_t target = 0;
    std::int8_t sign = 1;
};

/// A Clifford unitary up to global phase, stored as the images of the generators.
///
/// images()[q] is C X_q C^dagger and images()[n + q] is C Z_q C^dagger, each a Hermitian
/// Pauli with sign +1 or -1 (phase 0 or 2). Read as rows of (x | z) bits, the images
/// form the 2n x 2n symplectic tableau; their signs are the phase bits.
class CliffordElement {
   public:
    CliffordElement() = default;

    static CliffordElement identity(int n);
    /// Validates sizes, signs and the symplectic commutation relations.
    static CliffordElement from_images(int n, std::vector<PauliOperator> images);
    /// Recovers the element from a monomial PL matrix (n <= 3).
    static CliffordElement from_pl(const PauliLiouvilleMap &pl);
    static CliffordElement from_unitary(const ComplexMatrix &u);

    static CliffordElement hadamard(int n, int qubit);
    /// Phase gate S = diag(1, i).
    static CliffordElement phase(int n, int qubit);
    static CliffordElement cnot(int n, int control, int target);
    /// Conjugation by a Pauli operator.
    static CliffordElement pauli(const PauliOperator &p);

    int num_qubits() const {
        return n_;
    }
    const std::vector<PauliOperator> &images() const {
        return images_;
    }

    /// C P C^dagger including the phase.
    PauliOperator conjugate(const PauliOperator &p) const;

    bool is_identity() const;
    bool is_symplectic() const;

    /// Tableau rows as "x bits|z bits" strings, e.g. "01|10", and the sign bits (1 = negative).
    std::vector<std::string> tableau_rows() const;
    std::vector<bool> phase_bits() const;
    static CliffordElement from_tableau(const std::vector<std::string> &rows, const std::vector<bool> &phase_bits);

    /// Signed permutation of the 4^n basis Paulis (n <= 3).
    std::vector<SignedImage> signed_permutation() const;
    /// Dense PL form, built on first use and shared between copies.
    const PauliLiouvilleMap &pl() const;

    bool operator==(const CliffordElement &other) const {
        return n_ == other.n_ && images_ == other.images_;
    }

   private:
    struct PlCache {
        std::once_flag once;
        PauliLiouvilleMap map;
    };

    CliffordElement(int n, std::vector<PauliOperator> images);

    int n_ = 0;
    std::vector<PauliOperator> images_;
    std::shared_ptr<PlCache> cache_;
};

/// a after b: the element whose conjugation is a(b(P)).
CliffordElement clifford_compose(const CliffordElement &a, const CliffordElement &b);
CliffordElement clifford_invert(const CliffordElement &a);

/// The 24 single-qubit Cliffords, ordered lexicographically by row-major PL matrix.
/// Position in this list is the canonical ID used for serialization.
const std::vector<CliffordElement> &single_qubit_cliffords();
const CliffordElement &single_qubit_clifford(int id);
/// Canonical ID of a single-qubit element.
int single_qubit_clifford_id(const CliffordElement &c);

/// The ten unitaries C_0 ... C_9: identity, pi rotations about X, Y, Z, and 2pi/3, 4pi/3
/// rotations about the (X+Y+Z), (X-Y+Z) and (X+Y-Z) diagonals.
const std::vector<CliffordElement> &spanning_set_single_qubit();
/// The matching 2x2 unitaries.
std::vector<ComplexMatrix> spanning_set_unitaries();

/// Uniformly random n-qubit Clifford via a random symplectic basis and random signs.
CliffordElement sample_uniform_clifford(int n, Rng &rng);

/// C with C p_i C^dagger = p_j exactly, built from local rotations and CNOT ladders.
CliffordElement transporting_clifford(const PauliOperator &p_i, const PauliOperator &p_j);

/// Rank of the span of the PL matrices of the given elements (n <= 3).
int pl_span_rank(const std::vector<CliffordElement> &elements, double relative_tol = 1e-9);

/// Result of growing a PL span with random Cliffords.
struct SpanSaturation {
    int rank = 0;
    int draws = 0;
    std::vector<CliffordElement> basis;
};
/// Draws uniform Cliffords, keeping those that enlarge the PL span, until the span reaches
/// (d^2 - 1)^2 + 1 or `patience` consecutive draws add nothing.
SpanSaturation saturate_clifford_span(int n, Rng &rng, int patience = 200);

/// (d^2 - 1)^2 + 1, the dimension of the span of unital TP maps.
int unital_span_dimension(int n);

}  // namespace rbtomo

#endif
