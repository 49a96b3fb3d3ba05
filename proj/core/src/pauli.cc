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

#include <bit>

#include "rbtomo/errors.h"

namespace rbtomo {

namespace {

void check_qubits(int n) {
    if (n < 1 || n > kMaxPauliQubits) {
        throw ValidationError("qubit count must be in [1, 64], got " + std::to_string(n));
    }
}

std::uint64_t qubit_mask(int n) {
    return n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

}  // namespace

int pauli_product_phase(std::uint64_t x1, std::uint64_t z1, std::uint64_t x2, std::uint64_t z2) {
    // Per qubit, sigma_a sigma_b = i^{g} sigma_c with g in {-1, 0, 1}. Count +1 and -1 cases
    // in parallel over all qubits. The +1 cases are XY, YZ, ZX; the -1 cases are YX, ZY, XZ.
    std::uint64_t a_x = x1 & ~z1, a_y = x1 & z1, a_z = ~x1 & z1;
    std::uint64_t b_x = x2 & ~z2, b_y = x2 & z2, b_z = ~x2 & z2;
    std::uint64_t plus = (a_x & b_y) | (a_y & b_z) | (a_z & b_x);
    std::uint64_t minus = (a_y & b_x) | (a_z & b_y) | (a_x & b_z);
    int g = std::popcount(plus) - std::popcount(minus);
    return ((g % 4) + 4) % 4;
}

PauliOperator PauliOperator::identity(int n) {
    check_qubits(n);
    return PauliOperator{n, 0, 0, 0};
}

PauliOperator PauliOperator::from_index(std::uint64_t index, int n) {
    check_qubits(n);
    if (n < 32 && index >= (std::uint64_t{1} << (2 * n))) {
        throw ValidationError(
            "Pauli index " + std::to_string(index) + " out of range for " + std::to_string(n) + " qubits");
    }
    PauliOperator p{n, 0, 0, 0};
    for (int q = n - 1; q >= 0; q--) {
        unsigned digit = index & 3u;
        index >>= 2;
        std::uint64_t bit = std::uint64_t{1} << q;
        if (digit == 1 || digit == 2) {
            p.x |= bit;
        }
        if (digit == 2 || digit == 3) {
            p.z |= bit;
        }
    }
    return p;
}

PauliOperator PauliOperator::single(int n, int qubit, char kind) {
    check_qubits(n);
    if (qubit < 0 || qubit >= n) {
        throw ValidationError("qubit " + std::to_string(qubit) + " out of range");
    }
    PauliOperator p{n, 0, 0, 0};
    std::uint64_t bit = std::uint64_t{1} << qubit;
    switch (kind) {
        case 'I':
            break;
        case 'X':
            p.x = bit;
            break;
        case 'Y':
            p.x = bit;
            p.z = bit;
            break;
        case 'Z':
            p.z = bit;
            break;
        default:
            throw ValidationError(std::string("unknown Pauli factor '") + kind + "'");
    }
    return p;
}

PauliOperator PauliOperator::from_label(std::string_view label) {
    int phase = 0;
    if (!label.empty() && (label.front() == '+' || label.front() == '-')) {
        if (label.front() == '-') {
            phase = 2;
        }
        label.remove_prefix(1);
    }
    if (!label.empty() && label.front() == 'i') {
        phase = (phase + 1) % 4;
        label.remove_prefix(1);
    }
    int n = static_cast<int>(label.size());
    check_qubits(n);
    PauliOperator p{n, 0, 0, phase};
    for (int q = 0; q < n; q++) {
        PauliOperator f = single(n, q, label[q]);
        p.x |= f.x;
        p.z |= f.z;
    }
    return p;
}

std::uint64_t PauliOperator::index() const {
    std::uint64_t out = 0;
    for (int q = 0; q < n; q++) {
        bool bx = (x >> q) & 1;
        bool bz = (z >> q) & 1;
        unsigned digit = bx ? (bz ? 2u : 1u) : (bz ? 3u : 0u);
        out = (out << 2) | digit;
    }
    return out;
}

char PauliOperator::factor(int qubit) const {
    bool bx = (x >> qubit) & 1;
    bool bz = (z >> qubit) & 1;
    return bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
}

std::string PauliOperator::label() const {
    std::string out;
    out.reserve(n);
    for (int q = 0; q < n; q++) {
        out.push_back(factor(q));
    }
    return out;
}

std::string PauliOperator::str() const {
    static constexpr const char *kPrefix[4] = {"", "i", "-", "-i"};
    return kPrefix[phase & 3] + label();
}

bool PauliOperator::commutes_with(const PauliOperator &other) const {
    return (std::popcount((x & other.z) ^ (z & other.x)) & 1) == 0;
}

PauliOperator PauliOperator::operator*(const PauliOperator &other) const {
    if (n != other.n) {
        throw ValidationError("Pauli qubit counts differ: " + std::to_string(n) + " vs " + std::to_string(other.n));
    }
    int ph = phase + other.phase + pauli_product_phase(x, z, other.x, other.z);
    return PauliOperator{n, (x ^ other.x) & qubit_mask(n), (z ^ other.z) & qubit_mask(n), ph & 3};
}

PauliOperator pauli_from_index(std::uint64_t index, int n) {
    return PauliOperator::from_index(index, n);
}

PauliOperator pauli_multiply(const PauliOperator &a, const PauliOperator &b) {
    return a * b;
}

ComplexMatrix pauli_matrix(const PauliOperator &p) {
    if (p.n < 1 || p.n > kMaxDenseQubits) {
        throw ValidationError("dense Pauli matrices need 1 <= n <= 3, got n = " + std::to_string(p.n));
    }
    static const Complex kI(0, 1);
    ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    ComplexMatrix px(2, 2), py(2, 2), pz(2, 2);
    px << 0, 1, 1, 0;
    py << 0, -kI, kI, 0;
    pz << 1, 0, 0, -1;
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < p.n; q++) {
        switch (p.factor(q)) {
            case 'X':
                out = kron(out, px);
                break;
            case 'Y':
                out = kron(out, py);
                break;
            case 'Z':
                out = kron(out, pz);
                break;
            default:
                out = kron(out, id);
        }
    }
    static const Complex kPhase[4] = {Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
    return kPhase[p.phase & 3] * out;
}

}  // namespace rbtomo
