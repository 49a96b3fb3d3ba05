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

#include "rbtomo/channel.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "rbtomo/errors.h"
#include "rbtomo/pauli.h"
#include "pauli_tables.h"

namespace rbtomo {

namespace {

constexpr double kRangeSlack = 1e-12;

void check_dense_qubits(int n) {
    if (n < 1 || n > kMaxDenseQubits) {
        throw ValidationError("dense maps support 1 <= n <= 3 qubits, got n = " + std::to_string(n));
    }
}

int qubits_for_hilbert_dim(Eigen::Index dim) {
    for (int n = 1; n <= kMaxDenseQubits; n++) {
        if (dim == (Eigen::Index{1} << n)) {
            return n;
        }
    }
    throw ValidationError("operator dimension " + std::to_string(dim) + " is not 2, 4 or 8");
}

void check_range(double value, double lo, double hi, const char *name) {
    if (!(value >= lo - kRangeSlack && value <= hi + kRangeSlack)) {
        throw ValidationError(
            std::string(name) + " = " + std::to_string(value) + " outside [" + std::to_string(lo) + ", " +
            std::to_string(hi) + "]");
    }
}

// i^k for k mod 4.
Complex ipow(int k) {
    static const std::array<Complex, 4> kPow{Complex(1, 0), Complex(0, 1), Complex(-1, 0), Complex(0, -1)};
    return kPow[static_cast<size_t>(k & 3)];
}

}  // namespace

// ---------------------------------------------------------------------------

PauliLiouvilleMap::PauliLiouvilleMap(int n, RealMatrix mat) : n_(n), mat_(std::move(mat)) {
    check_dense_qubits(n);
    const Eigen::Index dim = Eigen::Index{1} << (2 * n);
    if (mat_.rows() != dim || mat_.cols() != dim) {
        throw ValidationError(
            "Pauli-Liouville matrix for n = " + std::to_string(n) + " must be " + std::to_string(dim) + "x" +
            std::to_string(dim));
    }
    if (!mat_.allFinite()) {
        throw ValidationError("Pauli-Liouville matrix has non-finite entries");
    }
}

PauliLiouvilleMap PauliLiouvilleMap::identity(int n) {
    check_dense_qubits(n);
    const Eigen::Index dim = Eigen::Index{1} << (2 * n);
    return PauliLiouvilleMap(n, RealMatrix::Identity(dim, dim));
}

bool PauliLiouvilleMap::is_trace_preserving(double tol) const {
    if (std::abs(mat_(0, 0) - 1.0) > tol) {
        return false;
    }
    return mat_.row(0).tail(mat_.cols() - 1).cwiseAbs().maxCoeff() <= tol;
}

bool PauliLiouvilleMap::is_unital(double tol) const {
    if (std::abs(mat_(0, 0) - 1.0) > tol) {
        return false;
    }
    return mat_.col(0).tail(mat_.rows() - 1).cwiseAbs().maxCoeff() <= tol;
}

bool PauliLiouvilleMap::is_unitary_map(double tol) const {
    RealMatrix g = mat_.transpose() * mat_;
    return (g - RealMatrix::Identity(mat_.rows(), mat_.cols())).cwiseAbs().maxCoeff() <= tol;
}

RealVector PauliLiouvilleMap::tau() const {
    return mat_.col(0).tail(mat_.rows() - 1);
}

RealMatrix PauliLiouvilleMap::unital_block() const {
    return mat_.bottomRightCorner(mat_.rows() - 1, mat_.cols() - 1);
}

PauliLiouvilleMap PauliLiouvilleMap::transpose() const {
    return PauliLiouvilleMap(n_, mat_.transpose());
}

ChiMatrix::ChiMatrix(int n, ComplexMatrix mat) : n_(n), mat_(std::move(mat)) {
    check_dense_qubits(n);
    const Eigen::Index dim = Eigen::Index{1} << (2 * n);
    if (mat_.rows() != dim || mat_.cols() != dim) {
        throw ValidationError("chi matrix for n = " + std::to_string(n) + " must be " + std::to_string(dim) + " square");
    }
}

double ChiMatrix::min_eigenvalue() const {
    ComplexMatrix herm = (mat_ + mat_.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------

PauliLiouvilleMap pl_from_kraus(std::span<const ComplexMatrix> ops) {
    if (ops.empty()) {
        throw ValidationError("Kraus list is empty");
    }
    const Eigen::Index d = ops.front().rows();
    const int n = qubits_for_hilbert_dim(d);
    for (const auto &k : ops) {
        if (k.rows() != d || k.cols() != d) {
            throw ValidationError("Kraus operators must all be square with the same dimension");
        }
    }
    const auto &paulis = dense_paulis(n);
    const Eigen::Index dim = static_cast<Eigen::Index>(paulis.size());
    RealMatrix out(dim, dim);
    for (Eigen::Index l = 0; l < dim; l++) {
        ComplexMatrix image = ComplexMatrix::Zero(d, d);
        for (const auto &k : ops) {
            image.noalias() += k * paulis[l] * k.adjoint();
        }
        for (Eigen::Index j = 0; j < dim; j++) {
            // tr[P_j M] = sum_ab (P_j)_ba M_ab
            out(j, l) = (paulis[j].transpose().cwiseProduct(image)).sum().real() / static_cast<double>(d);
        }
    }
    return PauliLiouvilleMap(n, std::move(out));
}

PauliLiouvilleMap pl_from_unitary(const ComplexMatrix &u) {
    if (!is_unitary(u, 1e-10)) {
        throw ValidationError("matrix is not unitary within 1e-10");
    }
    std::array<ComplexMatrix, 1> ops{u};
    return pl_from_kraus(ops);
}

ChiMatrix chi_from_pl(const PauliLiouvilleMap &e) {
    // chi_ij = d^-3 sum_kl E_kl tr[P_i P_k P_j P_l]; the trace is nonzero only when
    // l = i ^ k ^ j (index XOR multiplies labels), where it equals d i^{phase(i,k) + phase(j,l)}.
    const int n = e.num_qubits();
    const auto &table = pauli_table(n);
    const std::uint32_t dim = table.dim;
    const double d = static_cast<double>(1u << n);
    const RealMatrix &m = e.matrix();
    ComplexMatrix chi(dim, dim);
    for (std::uint32_t i = 0; i < dim; i++) {
        for (std::uint32_t j = 0; j < dim; j++) {
            Complex acc(0, 0);
            for (std::uint32_t k = 0; k < dim; k++) {
                std::uint32_t l = i ^ k ^ j;
                double v = m(k, l);
                if (v != 0.0) {
                    acc += v * ipow(table.phase(i, k) + table.phase(j, l));
                }
            }
            chi(i, j) = acc / (d * d);
        }
    }
    return ChiMatrix(n, std::move(chi));
}

PauliLiouvilleMap pl_from_chi(const ChiMatrix &c) {
    // E_kl = d^-1 sum_ij chi_ij tr[P_k P_i P_l P_j], nonzero only for j = k ^ i ^ l.
    const int n = c.num_qubits();
    const auto &table = pauli_table(n);
    const std::uint32_t dim = table.dim;
    const ComplexMatrix &chi = c.matrix();
    RealMatrix out(dim, dim);
    for (std::uint32_t k = 0; k < dim; k++) {
        for (std::uint32_t l = 0; l < dim; l++) {
            Complex acc(0, 0);
            for (std::uint32_t i = 0; i < dim; i++) {
                std::uint32_t j = k ^ i ^ l;
                acc += chi(i, j) * ipow(table.phase(k, i) + table.phase(l, j));
            }
            out(k, l) = acc.real();
        }
    }
    return PauliLiouvilleMap(n, std::move(out));
}

PauliLiouvilleMap compose(const PauliLiouvilleMap &a, const PauliLiouvilleMap &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw ValidationError("cannot compose maps on different qubit counts");
    }
    return PauliLiouvilleMap(a.num_qubits(), a.matrix() * b.matrix());
}

double average_fidelity(const PauliLiouvilleMap &e, const PauliLiouvilleMap &u) {
    if (e.num_qubits() != u.num_qubits()) {
        throw ValidationError("fidelity between maps on different qubit counts");
    }
    if (!u.is_unitary_map(1e-8)) {
        throw ValidationError("reference map of an average fidelity must be unitary (orthogonal PL matrix)");
    }
    const double d = e.hilbert_dim();
    double overlap = e.matrix().cwiseProduct(u.matrix()).sum();
    return (overlap + d) / (d * (d + 1));
}

double fidelity_from_chi00(double chi00, int d) {
    check_range(chi00, 0.0, 1.0, "chi00");
    return (chi00 * d + 1.0) / (d + 1.0);
}

double chi00_from_fidelity(double fidelity, int d) {
    check_range(fidelity, 0.0, 1.0, "average fidelity");
    return (fidelity * (d + 1.0) - 1.0) / d;
}

double decay_parameter(double fidelity, int d) {
    check_range(fidelity, 0.0, 1.0, "average fidelity");
    return (d * fidelity - 1.0) / (d - 1.0);
}

double fidelity_from_decay_parameter(double p, int d) {
    const double dd = d;
    check_range(p, -1.0 / (dd * dd - 1.0), 1.0, "decay parameter");
    return ((dd - 1.0) * p + 1.0) / dd;
}

PauliLiouvilleMap unital_part(const PauliLiouvilleMap &e) {
    if (!e.is_trace_preserving(1e-8)) {
        throw ValidationError("unital part is defined for trace-preserving maps only");
    }
    RealMatrix m = e.matrix();
    m.col(0).tail(m.rows() - 1).setZero();
    return PauliLiouvilleMap(e.num_qubits(), std::move(m));
}

CptpVerdict is_cptp(const PauliLiouvilleMap &e, double tol) {
    CptpVerdict v;
    v.tp = e.is_trace_preserving(tol);
    v.min_choi_eigenvalue = chi_from_pl(e).min_eigenvalue();
    v.cp = v.min_choi_eigenvalue >= -tol;
    return v;
}

std::vector<ComplexMatrix> random_cptp_kraus(int n, std::uint64_t seed, int env_dim) {
    check_dense_qubits(n);
    const int d = 1 << n;
    const int env = env_dim == 0 ? d * d : env_dim;
    if (env < 1) {
        throw ValidationError("environment dimension must be positive");
    }
    Rng rng(seed);
    ComplexMatrix u = haar_unitary(d * env, rng);
    std::vector<ComplexMatrix> ops;
    ops.reserve(static_cast<size_t>(env));
    for (int m = 0; m < env; m++) {
        ops.emplace_back(u.block(static_cast<Eigen::Index>(m) * d, 0, d, d));
    }
    return ops;
}

namespace {

struct ChannelBuilder {
    PauliLiouvilleMap operator()(const channel_spec::Depolarizing &s) const {
        check_dense_qubits(s.n);
        const double d = 1 << s.n;
        check_range(s.delta, -1.0 / (d * d - 1.0), 1.0, "depolarizing delta");
        const Eigen::Index dim = Eigen::Index{1} << (2 * s.n);
        RealVector diag = RealVector::Constant(dim, s.delta);
        diag(0) = 1.0;
        return PauliLiouvilleMap(s.n, diag.asDiagonal());
    }
    PauliLiouvilleMap operator()(const channel_spec::Dephasing &s) const {
        check_range(s.gamma, 0.0, 1.0, "dephasing gamma");
        RealVector diag(4);
        diag << 1.0, s.gamma, s.gamma, 1.0;
        return PauliLiouvilleMap(1, diag.asDiagonal());
    }
    PauliLiouvilleMap operator()(const channel_spec::AmplitudeDamping &s) const {
        check_range(s.gamma, 0.0, 1.0, "amplitude damping gamma");
        const double g = std::clamp(s.gamma, 0.0, 1.0);
        std::array<ComplexMatrix, 2> ops{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2)};
        ops[0](0, 0) = 1.0;
        ops[0](1, 1) = std::sqrt(1.0 - g);
        ops[1](0, 1) = std::sqrt(g);
        return pl_from_kraus(ops);
    }
    PauliLiouvilleMap operator()(const channel_spec::Unitary &s) const {
        return pl_from_unitary(s.matrix);
    }
    PauliLiouvilleMap operator()(const channel_spec::Kraus &s) const {
        if (s.operators.empty()) {
            throw ValidationError("Kraus channel needs at least one operator");
        }
        const Eigen::Index d = s.operators.front().rows();
        ComplexMatrix sum = ComplexMatrix::Zero(d, d);
        for (const auto &k : s.operators) {
            if (k.rows() != d || k.cols() != d) {
                throw ValidationError("Kraus operators must all be square with the same dimension");
            }
            sum += k.adjoint() * k;
        }
        if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-8) {
            throw ValidationError("Kraus operators do not satisfy sum K^dagger K = I within 1e-8");
        }
        return pl_from_kraus(s.operators);
    }
    PauliLiouvilleMap operator()(const channel_spec::PauliLiouville &s) const {
        return PauliLiouvilleMap(s.n, s.matrix);
    }
    PauliLiouvilleMap operator()(const channel_spec::RandomCptp &s) const {
        auto ops = random_cptp_kraus(s.n, s.seed, s.env_dim);
        return pl_from_kraus(ops);
    }
};

struct QubitCounter {
    int operator()(const channel_spec::Depolarizing &s) const {
        return s.n;
    }
    int operator()(const channel_spec::Dephasing &) const {
        return 1;
    }
    int operator()(const channel_spec::AmplitudeDamping &) const {
        return 1;
    }
    int operator()(const channel_spec::Unitary &s) const {
        return qubits_for_hilbert_dim(s.matrix.rows());
    }
    int operator()(const channel_spec::Kraus &s) const {
        if (s.operators.empty()) {
            throw ValidationError("Kraus channel needs at least one operator");
        }
        return qubits_for_hilbert_dim(s.operators.front().rows());
    }
    int operator()(const channel_spec::PauliLiouville &s) const {
        return s.n;
    }
    int operator()(const channel_spec::RandomCptp &s) const {
        return s.n;
    }
};

}  // namespace

PauliLiouvilleMap make_channel(const ChannelSpec &spec) {
    return std::visit(ChannelBuilder{}, spec);
}

int channel_qubits(const ChannelSpec &spec) {
    return std::visit(QubitCounter{}, spec);
}

}  // namespace rbtomo
