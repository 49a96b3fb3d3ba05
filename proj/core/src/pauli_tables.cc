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

#include "pauli_tables.h"

#include <array>
#include <string>

#include "rbtomo/errors.h"
#include "rbtomo/pauli.h"

namespace rbtomo {

namespace {

void check_table_qubits(int n) {
    if (n < 1 || n > kMaxDenseQubits) {
        throw ValidationError("Pauli tables support 1 <= n <= 3 qubits, got n = " + std::to_string(n));
    }
}

PauliProductTable build_table(int n) {
    PauliProductTable t;
    t.dim = 1u << (2 * n);
    t.phases.resize(static_cast<size_t>(t.dim) * t.dim);
    for (std::uint32_t a = 0; a < t.dim; a++) {
        PauliOperator pa = PauliOperator::from_index(a, n);
        for (std::uint32_t b = 0; b < t.dim; b++) {
            PauliOperator pb = PauliOperator::from_index(b, n);
            t.phases[static_cast<size_t>(a) * t.dim + b] =
                static_cast<std::uint8_t>(pauli_product_phase(pa.x, pa.z, pb.x, pb.z));
        }
    }
    return t;
}

std::vector<ComplexMatrix> build_dense(int n) {
    const std::uint32_t dim = 1u << (2 * n);
    std::vector<ComplexMatrix> out;
    out.reserve(dim);
    for (std::uint32_t a = 0; a < dim; a++) {
        out.push_back(pauli_matrix(PauliOperator::from_index(a, n)));
    }
    return out;
}

}  // namespace

const PauliProductTable &pauli_table(int n) {
    check_table_qubits(n);
    static const std::array<PauliProductTable, 3> tables{build_table(1), build_table(2), build_table(3)};
    return tables[static_cast<size_t>(n - 1)];
}

const std::vector<ComplexMatrix> &dense_paulis(int n) {
    check_table_qubits(n);
    static const std::array<std::vector<ComplexMatrix>, 3> mats{build_dense(1), build_dense(2), build_dense(3)};
    return mats[static_cast<size_t>(n - 1)];
}

}  // namespace rbtomo
