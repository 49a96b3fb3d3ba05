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

#include "rbtomo/clifford.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <tuple>

#include "rbtomo/errors.h"

namespace rbtomo {

namespace {

void check_qubit(int n, int q) {
    if (q < 0 || q >= n) {
        throw ValidationError("qubit " + std::to_string(q) + " out of range for n = " + std::to_string(n));
    }
}

std::vector<PauliOperator> generator_images(int n) {
    std::vector<PauliOperator> out;
    out.reserve(2 * static_cast<size_t>(n));
    for (int q = 0; q < n; q++) {
        out.push_back(PauliOperator::single(n, q, 'X'));
    }
    for (int q = 0; q < n; q++) {
        out.push_back(PauliOperator::single(n, q, 'Z'));
    }
    return out;
}

// Symplectic vector (x | z) over GF(2).
struct SymVec {
    std::uint64_t x = 0;
    std::uint64_t z = 0;

    bool is_zero() const {
        return x == 0 && z == 0;
    }
    SymVec operator^(const SymVec &o) const {
        return {x ^ o.x, z ^ o.z};
    }
};

int symplectic_product(const SymVec &a, const SymVec &b) {
    return std::popcount((a.x & b.z) ^ (a.z & b.x)) & 1;
}

class BitSource {
   public:
    explicit BitSource(Rng &rng) : rng_(rng) {
    }
    bool next() {
        if (left_ == 0) {
            word_ = rng_();
            left_ = 64;
        }
        bool b = word_ & 1;
        word_ >>= 1;
        left_--;
        return b;
    }

   private:
    Rng &rng_;
    std::uint64_t word_ = 0;
    int left_ = 0;
};

SymVec random_combination(const std::vector<SymVec> &basis, BitSource &bits) {
    SymVec v;
    for (const auto &b : basis) {
        if (bits.next()) {
            v = v ^ b;
        }
    }
    return v;
}

// Keeps a linearly independent subset spanning the same space.
std::vector<SymVec> independent_subset(const std::vector<SymVec> &vecs) {
    std::vector<SymVec> reduced;
    std::vector<std::pair<bool, int>> pivots;
    for (SymVec v : vecs) {
        for (size_t i = 0; i < reduced.size(); i++) {
            auto [in_z, bit] = pivots[i];
            std::uint64_t word = in_z ? v.z : v.x;
            if ((word >> bit) & 1) {
                v = v ^ reduced[i];
            }
        }
        if (v.is_zero()) {
            continue;
        }
        if (v.x != 0) {
            pivots.emplace_back(false, std::countr_zero(v.x));
        } else {
            pivots.emplace_back(true, std::countr_zero(v.z));
        }
        reduced.push_back(v);
    }
    return reduced;
}

ComplexMatrix axis_rotation(double theta, double nx, double ny, double nz) {
    const Complex i(0, 1);
    ComplexMatrix out(2, 2);
    double c = std::cos(theta);
    double s = std::sin(theta);
    out(0, 0) = c - i * s * nz;
    out(0, 1) = -i * s * (nx - i * ny);
    out(1, 0) = -i * s * (nx + i * ny);
    out(1, 1) = c + i * s * nz;
    return out;
}

// Returns C with C P C^dagger = +-X_0 for a non-identity label P.
CliffordElement reduce_to_x0(const PauliOperator &p) {
    const int n = p.n;
    CliffordElement c = CliffordElement::identity(n);
    PauliOperator cur = p.unsigned_label();
    auto apply = [&](const CliffordElement &g) {
        c = clifford_compose(g, c);
        cur = g.conjugate(cur);
    };
    for (int q = 0; q < n; q++) {
        char f = cur.factor(q);
        if (f == 'Z') {
            apply(CliffordElement::hadamard(n, q));
        } else if (f == 'Y') {
            apply(CliffordElement::phase(n, q));
        }
    }
    const int r = std::countr_zero(cur.x);
    for (int q = r + 1; q < n; q++) {
        if ((cur.x >> q) & 1) {
            apply(CliffordElement::cnot(n, r, q));
        }
    }
    if (r != 0) {
        apply(CliffordElement::cnot(n, r, 0));
        apply(CliffordElement::cnot(n, 0, r));
    }
    return c;
}

}  // namespace

CliffordElement::CliffordElement(int n, std::vector<PauliOperator> images)
    : n_(n), images_(std::move(images)), cache_(std::make_shared<PlCache>()) {
}

CliffordElement CliffordElement::identity(int n) {
    if (n < 1 || n > kMaxPauliQubits) {
        throw ValidationError("qubit count must be in [1, 64], got " + std::to_string(n));
    }
    return CliffordElement(n, generator_images(n));
}

CliffordElement CliffordElement::from_images(int n, std::vector<PauliOperator> images) {
    if (n < 1 || n > kMaxPauliQubits) {
        throw ValidationError("qubit count must be in [1, 64], got " + std::to_string(n));
    }
    if (images.size() != 2 * static_cast<size_t>(n)) {
        throw ValidationError("a Clifford on n qubits needs 2n generator images");
    }
    for (const auto &img : images) {
        if (img.n != n) {
            throw ValidationError("generator image has the wrong qubit count");
        }
        if (img.phase != 0 && img.phase != 2) {
            throw ValidationError("generator images must carry sign +1 or -1");
        }
    }
    CliffordElement c(n, std::move(images));
    if (!c.is_symplectic()) {
        throw ValidationError("generator images violate the Pauli commutation relations");
    }
    return c;
}

CliffordElement CliffordElement::from_pl(const PauliLiouvilleMap &pl) {
    const int n = pl.num_qubits();
    const RealMatrix &m = pl.matrix();
    std::vector<PauliOperator> images;
    for (const auto &g : generator_images(n)) {
        Eigen::Index col = static_cast<Eigen::Index>(g.index());
        Eigen::Index row = 0;
        m.col(col).cwiseAbs().maxCoeff(&row);
        double v = m(row, col);
        if (std::abs(std::abs(v) - 1.0) > 1e-8) {
            throw ValidationError("PL matrix is not a signed permutation");
        }
        PauliOperator img = PauliOperator::from_index(static_cast<std::uint64_t>(row), n);
        img.phase = v < 0 ? 2 : 0;
        images.push_back(img);
    }
    CliffordElement c = from_images(n, std::move(images));
    if ((c.pl().matrix() - m).cwiseAbs().maxCoeff() > 1e-8) {
        throw ValidationError("PL matrix is not the map of a Clifford unitary");
    }
    return c;
}

CliffordElement CliffordElement::from_unitary(const ComplexMatrix &u) {
    return from_pl(pl_from_unitary(u));
}

CliffordElement CliffordElement::hadamard(int n, int qubit) {
    auto c = identity(n);
    check_qubit(n, qubit);
    std::swap(c.images_[qubit], c.images_[n + qubit]);
    return c;
}

CliffordElement CliffordElement::phase(int n, int qubit) {
    auto c = identity(n);
    check_qubit(n, qubit);
    c.images_[qubit] = PauliOperator::single(n, qubit, 'Y');
    return c;
}

CliffordElement CliffordElement::cnot(int n, int control, int target) {
    auto c = identity(n);
    check_qubit(n, control);
    check_qubit(n, target);
    if (control == target) {
        throw ValidationError("CNOT control and target must differ");
    }
    c.images_[control] = c.images_[control] * PauliOperator::single(n, target, 'X');
    c.images_[n + target] = PauliOperator::single(n, control, 'Z') * c.images_[n + target];
    return c;
}

CliffordElement CliffordElement::pauli(const PauliOperator &p) {
    auto c = identity(p.n);
    for (auto &img : c.images_) {
        if (!img.commutes_with(p)) {
            img.phase = 2;
        }
    }
    return c;
}

PauliOperator CliffordElement::conjugate(const PauliOperator &p) const {
    if (p.n != n_) {
        throw ValidationError("Pauli and Clifford qubit counts differ");
    }
    // A Hermitian label equals i^{|x & z|} X^x Z^z.
    PauliOperator out{n_, 0, 0, (p.phase + std::popcount(p.x & p.z)) & 3};
    for (int q = 0; q < n_; q++) {
        if ((p.x >> q) & 1) {
            out = out * images_[q];
        }
        if ((p.z >> q) & 1) {
            out = out * images_[n_ + q];
        }
    }
    return out;
}

bool CliffordElement::is_identity() const {
    return images_ == generator_images(n_);
}

bool CliffordElement::is_symplectic() const {
    const size_t m = images_.size();
    for (size_t i = 0; i < m; i++) {
        for (size_t j = i + 1; j < m; j++) {
            bool should_anticommute = j == i + static_cast<size_t>(n_);
            if (images_[i].commutes_with(images_[j]) == should_anticommute) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::string> CliffordElement::tableau_rows() const {
    std::vector<std::string> rows;
    for (const auto &img : images_) {
        std::string s;
        for (int q = 0; q < n_; q++) {
            s.push_back(((img.x >> q) & 1) ? '1' : '0');
        }
        s.push_back('|');
        for (int q = 0; q < n_; q++) {
            s.push_back(((img.z >> q) & 1) ? '1' : '0');
        }
        rows.push_back(std::move(s));
    }
    return rows;
}

std::vector<bool> CliffordElement::phase_bits() const {
    std::vector<bool> bits;
    for (const auto &img : images_) {
        bits.push_back(img.phase == 2);
    }
    return bits;
}

CliffordElement CliffordElement::from_tableau(const std::vector<std::string> &rows, const std::vector<bool> &phase_bits) {
    if (rows.empty() || rows.size() % 2 != 0 || phase_bits.size() != rows.size()) {
        throw ValidationError("tableau needs 2n rows and 2n phase bits");
    }
    const int n = static_cast<int>(rows.size() / 2);
    std::vector<PauliOperator> images;
    for (size_t r = 0; r < rows.size(); r++) {
        const std::string &s = rows[r];
        if (s.size() != 2 * static_cast<size_t>(n) + 1 || s[static_cast<size_t>(n)] != '|') {
            throw ValidationError("tableau row '" + s + "' must look like <x bits>|<z bits>");
        }
        PauliOperator img{n, 0, 0, phase_bits[r] ? 2 : 0};
        for (int q = 0; q < n; q++) {
            char cx = s[static_cast<size_t>(q)];
            char cz = s[static_cast<size_t>(n + 1 + q)];
            if ((cx != '0' && cx != '1') || (cz != '0' && cz != '1')) {
                throw ValidationError("tableau row '" + s + "' has a non-binary digit");
            }
            if (cx == '1') {
                img.x |= std::uint64_t{1} << q;
            }
            if (cz == '1') {
                img.z |= std::uint64_t{1} << q;
            }
        }
        images.push_back(img);
    }
    return from_images(n, std::move(images));
}

std::vector<SignedImage> CliffordElement::signed_permutation() const {
    if (n_ > kMaxDenseQubits) {
        throw ValidationError("signed permutations are built for n <= 3 only");
    }
    const std::uint32_t dim = 1u << (2 * n_);
    std::vector<SignedImage> out(dim);
    for (std::uint32_t i = 0; i < dim; i++) {
        PauliOperator img = conjugate(PauliOperator::from_index(i, n_));
        out[i].target = static_cast<std::uint32_t>(img.index());
        out[i].sign = img.phase == 0 ? 1 : -1;
    }
    return out;
}

const PauliLiouvilleMap &CliffordElement::pl() const {
    if (n_ < 1 || n_ > kMaxDenseQubits) {
        throw ValidationError("dense PL form needs 1 <= n <= 3");
    }
    std::call_once(cache_->once, [this] {
        const Eigen::Index dim = Eigen::Index{1} << (2 * n_);
        RealMatrix m = RealMatrix::Zero(dim, dim);
        auto perm = signed_permutation();
        for (Eigen::Index i = 0; i < dim; i++) {
            m(perm[i].target, i) = perm[i].sign;
        }
        cache_->map = PauliLiouvilleMap(n_, std::move(m));
    });
    return cache_->map;
}

CliffordElement clifford_compose(const CliffordElement &a, const CliffordElement &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw ValidationError("cannot compose Cliffords on different qubit counts");
    }
    std::vector<PauliOperator> images;
    images.reserve(b.images().size());
    for (const auto &img : b.images()) {
        images.push_back(a.conjugate(img));
    }
    return CliffordElement::from_images(a.num_qubits(), std::move(images));
}

CliffordElement clifford_invert(const CliffordElement &a) {
    // With the tableau M stored row-wise, M^-1 = Omega M^T Omega for Omega swapping the x and z halves.
    const int n = a.num_qubits();
    const auto &img = a.images();
    std::vector<PauliOperator> inv;
    inv.reserve(img.size());
    for (int kind = 0; kind < 2; kind++) {
        for (int q = 0; q < n; q++) {
            PauliOperator cand{n, 0, 0, 0};
            for (int p = 0; p < n; p++) {
                std::uint64_t bit = std::uint64_t{1} << p;
                // Inverse image of X_q reads the z_q column; inverse image of Z_q the x_q column.
                std::uint64_t from_z = kind == 0 ? img[n + p].z : img[n + p].x;
                std::uint64_t from_x = kind == 0 ? img[p].z : img[p].x;
                if ((from_z >> q) & 1) {
                    cand.x |= bit;
                }
                if ((from_x >> q) & 1) {
                    cand.z |= bit;
                }
            }
            PauliOperator back = a.conjugate(cand);
            if (back.phase == 2) {
                cand.phase = 2;
            }
            inv.push_back(cand);
        }
    }
    return CliffordElement::from_images(n, std::move(inv));
}

const std::vector<CliffordElement> &single_qubit_cliffords() {
    static const std::vector<CliffordElement> group = [] {
        const auto h = CliffordElement::hadamard(1, 0);
        const auto s = CliffordElement::phase(1, 0);
        auto key = [](const CliffordElement &c) {
            const auto &im = c.images();
            return std::make_tuple(im[0].x, im[0].z, im[0].phase, im[1].x, im[1].z, im[1].phase);
        };
        std::vector<CliffordElement> found{CliffordElement::identity(1)};
        std::map<decltype(key(found[0])), bool> seen{{key(found[0]), true}};
        std::queue<CliffordElement> frontier;
        frontier.push(found[0]);
        while (!frontier.empty()) {
            CliffordElement cur = frontier.front();
            frontier.pop();
            for (const auto *g : {&h, &s}) {
                CliffordElement next = clifford_compose(*g, cur);
                if (seen.emplace(key(next), true).second) {
                    found.push_back(next);
                    frontier.push(next);
                }
            }
        }
        auto flat = [](const CliffordElement &c) {
            const RealMatrix &m = c.pl().matrix();
            std::vector<double> v;
            for (Eigen::Index r = 0; r < m.rows(); r++) {
                for (Eigen::Index col = 0; col < m.cols(); col++) {
                    v.push_back(m(r, col));
                }
            }
            return v;
        };
        std::sort(found.begin(), found.end(), [&](const CliffordElement &a, const CliffordElement &b) {
            return flat(a) < flat(b);
        });
        return found;
    }();
    return group;
}

const CliffordElement &single_qubit_clifford(int id) {
    const auto &group = single_qubit_cliffords();
    if (id < 0 || id >= static_cast<int>(group.size())) {
        throw ValidationError("single-qubit Clifford id must be in [0, 23], got " + std::to_string(id));
    }
    return group[static_cast<size_t>(id)];
}

int single_qubit_clifford_id(const CliffordElement &c) {
    if (c.num_qubits() != 1) {
        throw ValidationError("canonical ids exist for single-qubit elements only");
    }
    const auto &group = single_qubit_cliffords();
    for (size_t i = 0; i < group.size(); i++) {
        if (group[i] == c) {
            return static_cast<int>(i);
        }
    }
    throw ValidationError("element not found among single-qubit Cliffords");
}

std::vector<ComplexMatrix> spanning_set_unitaries() {
    constexpr double pi = std::numbers::pi;
    const double r3 = 1.0 / std::sqrt(3.0);
    return {
        ComplexMatrix::Identity(2, 2),
        axis_rotation(pi / 2, 1, 0, 0),
        axis_rotation(pi / 2, 0, 1, 0),
        axis_rotation(pi / 2, 0, 0, 1),
        axis_rotation(pi / 3, r3, r3, r3),
        axis_rotation(2 * pi / 3, r3, r3, r3),
        axis_rotation(pi / 3, r3, -r3, r3),
        axis_rotation(2 * pi / 3, r3, -r3, r3),
        axis_rotation(pi / 3, r3, r3, -r3),
        axis_rotation(2 * pi / 3, r3, r3, -r3),
    };
}

const std::vector<CliffordElement> &spanning_set_single_qubit() {
    static const std::vector<CliffordElement> set = [] {
        std::vector<CliffordElement> out;
        for (const auto &u : spanning_set_unitaries()) {
            out.push_back(CliffordElement::from_unitary(u));
        }
        return out;
    }();
    return set;
}

CliffordElement sample_uniform_clifford(int n, Rng &rng) {
    if (n < 1 || n > kMaxPauliQubits) {
        throw ValidationError("qubit count must be in [1, 64], got " + std::to_string(n));
    }
    BitSource bits(rng);
    std::vector<SymVec> space;
    for (int q = 0; q < n; q++) {
        space.push_back({std::uint64_t{1} << q, 0});
        space.push_back({0, std::uint64_t{1} << q});
    }
    std::vector<PauliOperator> images(2 * static_cast<size_t>(n));
    for (int q = 0; q < n; q++) {
        SymVec v;
        do {
            v = random_combination(space, bits);
        } while (v.is_zero());
        SymVec w;
        do {
            w = random_combination(space, bits);
        } while (symplectic_product(v, w) == 0);

        images[static_cast<size_t>(q)] = PauliOperator{n, v.x, v.z, bits.next() ? 2 : 0};
        images[static_cast<size_t>(n + q)] = PauliOperator{n, w.x, w.z, bits.next() ? 2 : 0};

        std::vector<SymVec> projected;
        projected.reserve(space.size());
        for (const auto &u : space) {
            SymVec p = u;
            if (symplectic_product(u, w)) {
                p = p ^ v;
            }
            if (symplectic_product(u, v)) {
                p = p ^ w;
            }
            projected.push_back(p);
        }
        space = independent_subset(projected);
    }
    return CliffordElement::from_images(n, std::move(images));
}

CliffordElement transporting_clifford(const PauliOperator &p_i, const PauliOperator &p_j) {
    if (p_i.n != p_j.n) {
        throw ValidationError("Pauli qubit counts differ");
    }
    if (p_i.is_identity_label() || p_j.is_identity_label()) {
        throw ValidationError("transporting Clifford needs non-identity Paulis");
    }
    if ((p_i.phase & 1) != (p_j.phase & 1)) {
        throw ValidationError("conjugation cannot map a Hermitian Pauli to an anti-Hermitian one");
    }
    CliffordElement c = clifford_compose(clifford_invert(reduce_to_x0(p_j)), reduce_to_x0(p_i));
    if (c.conjugate(p_i) != p_j) {
        int q = std::countr_zero(p_j.x | p_j.z);
        char kind = p_j.factor(q) == 'X' ? 'Z' : 'X';
        c = clifford_compose(CliffordElement::pauli(PauliOperator::single(p_j.n, q, kind)), c);
    }
    return c;
}

int pl_span_rank(const std::vector<CliffordElement> &elements, double relative_tol) {
    std::vector<RealMatrix> mats;
    mats.reserve(elements.size());
    for (const auto &c : elements) {
        mats.push_back(c.pl().matrix());
    }
    return stacked_rank(mats, relative_tol);
}

int unital_span_dimension(int n) {
    const int d = 1 << n;
    return (d * d - 1) * (d * d - 1) + 1;
}

SpanSaturation saturate_clifford_span(int n, Rng &rng, int patience) {
    if (n < 1 || n > kMaxDenseQubits) {
        throw ValidationError("span saturation needs 1 <= n <= 3");
    }
    const int target = unital_span_dimension(n);
    SpanSaturation out;
    std::vector<RealVector> ortho;
    int idle = 0;
    while (out.rank < target && idle < patience) {
        CliffordElement c = sample_uniform_clifford(n, rng);
        out.draws++;
        const RealMatrix &m = c.pl().matrix();
        RealVector v = Eigen::Map<const RealVector>(m.data(), m.size());
        const double norm0 = v.norm();
        for (int pass = 0; pass < 2; pass++) {
            for (const auto &b : ortho) {
                v -= b.dot(v) * b;
            }
        }
        if (v.norm() > 1e-8 * norm0) {
            ortho.push_back(v / v.norm());
            out.basis.push_back(std::move(c));
            out.rank++;
            idle = 0;
        } else {
            idle++;
        }
    }
    return out;
}

}  // namespace rbtomo
