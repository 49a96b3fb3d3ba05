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

#ifndef RBTOMO_PAULI_TABLES_H
#define RBTOMO_PAULI_TABLES_H

#include <cstdint>
#include <vector>

#include "rbtomo/linalg.h"

namespace rbtomo {

/// Products of Hermitian basis labels for n <= 3.
///
/// With digits I=0, X=1, Y=2, Z=3 the label of P_a P_b is simply a ^ b, so only the
/// power of i needs a table.
struct PauliProductTable {
    std::uint32_t dim = 0;
    std::vector<std::uint8_t> phases;

    int phase(std::uint32_t a, std::uint32_t b) const {
        return phases[static_cast<size_t>(a) * dim + b];
    }
};

const PauliProductTable &pauli_table(int n);

/// Dense basis Paulis in index order.
const std::vector<ComplexMatrix> &dense_paulis(int n);

}  // namespace rbtomo

#endif
