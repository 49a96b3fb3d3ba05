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

#ifndef RBTOMO_CHANNEL_H
#define RBTOMO_CHANNEL_H

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "rbtomo/linalg.h"

namespace rbtomo {

/// Real 4^n x 4^n Pauli-Liouville (Pauli transfer) matrix of a map E.
///
/// Entry (j, i) is tr[E(P_i) P_j] / d, so columns are images of basis Paulis and
/// composition is the ordinary matrix product. A trace-preserving map has first row
/// (1, 0, ..., 0); a unital map has first column (1, 0, ..., 0)^T.
class PauliLiouvilleMap {
   public:
    PauliLiouvilleMap() = default;
    PauliLiouvilleMap(int n, RealMatrix mat);

    static PauliLiouvilleMap identity(int n);

    int num_qubits() const {
        return n_;
    }
    int hilbert_dim() const {
        return 1 << n_;
    }
    int dim() const {
        return 1 << (2 * n_);
    }
    const RealMatrix &matrix() const {
        return mat_;
    }
    double operator()(Eigen::Index row, Eigen::Index col) const {
        return mat_(row, col);
    }

    bool is_trace_preserving(double tol = 1e-9) const;
    bool is_unital(double tol = 1e-9) const;
    /// Orthogonal PL matrix, the signature of a unitary map.
    bool is_unitary_map(double tol = 1e-9) const;

    /// Non-unital vector: first column below the (0, 0) entry.
    RealVector tau() const;
    /// (d^2 - 1) x (d^2 - 1) block acting on traceless operators.
    RealMatrix unital_block() const;

    PauliLiouvilleMap transpose() const;

   private:
    int n_ = 0;
    RealMatrix mat_;
};

/// Complex Hermitian 4^n x 4^n process matrix with E(rho) = sum_ij chi_ij P_i rho P_j.
class ChiMatrix {
   public:
    ChiMatrix() = default;
    ChiMatrix(int n, ComplexMatrix mat);

    int num_qubits() const {
        return n_;
    }
    const ComplexMatrix &matrix() const {
        return mat_;
    }
    Complex operator()(Eigen::Index row, Eigen::Index col) const {
        return mat_(row, col);
    }
    Complex trace() const {
        return mat_.trace();
    }
    double chi00() const {
        return mat_(0, 0).real();
    }
    double min_eigenvalue() const;

   private:
    int n_ = 0;
    ComplexMatrix mat_;
};

// ---------------------------------------------------------------------------
// Channel descriptions.

namespace channel_spec {
struct Depolarizing {
    int n = 1;
    double delta = 1.0;
};
struct Dephasing {
    double gamma = 1.0;
};
struct AmplitudeDamping {
    double gamma = 0.0;
};
struct Unitary {
    ComplexMatrix matrix;
};
struct Kraus {
    std::vector<ComplexMatrix> operators;
};
struct PauliLiouville {
    int n = 1;
    RealMatrix matrix;
};
struct RandomCptp {
    int n = 1;
    std::uint64_t seed = 0;
    /// Environment dimension of the dilation; 0 selects the default d * d.
    int env_dim = 0;
};
}  // namespace channel_spec

using ChannelSpec = std::variant<
    channel_spec::Depolarizing,
    channel_spec::Dephasing,
    channel_spec::AmplitudeDamping,
    channel_spec::Unitary,
    channel_spec::Kraus,
    channel_spec::PauliLiouville,
    channel_spec::RandomCptp>;

// ---------------------------------------------------------------------------
// Conversions.

PauliLiouvilleMap pl_from_unitary(const ComplexMatrix &u);
PauliLiouvilleMap pl_from_kraus(std::span<const ComplexMatrix> ops);
ChiMatrix chi_from_pl(const PauliLiouvilleMap &e);
PauliLiouvilleMap pl_from_chi(const ChiMatrix &c);

/// A after B (B acts first).
PauliLiouvilleMap compose(const PauliLiouvilleMap &a, const PauliLiouvilleMap &b);

/// Average fidelity of E to the unitary map U, (tr[E U^T] + d) / (d (d + 1)).
double average_fidelity(const PauliLiouvilleMap &e, const PauliLiouvilleMap &u);

/// F = (chi00 d + 1) / (d + 1) and its inverse.
double fidelity_from_chi00(double chi00, int d);
double chi00_from_fidelity(double fidelity, int d);

/// RB decay parameter p = (d F - 1) / (d - 1) and its inverse.
double decay_parameter(double fidelity, int d);
double fidelity_from_decay_parameter(double p, int d);

/// Zeroes the non-unital vector of a TP map.
PauliLiouvilleMap unital_part(const PauliLiouvilleMap &e);

struct CptpVerdict {
    bool cp = false;
    bool tp = false;
    /// Smallest eigenvalue of the trace-normalised process (chi) matrix.
    double min_choi_eigenvalue = 0.0;
};

inline constexpr double kDefaultPsdTolerance = 1e-9;

CptpVerdict is_cptp(const PauliLiouvilleMap &e, double tol = kDefaultPsdTolerance);

PauliLiouvilleMap make_channel(const ChannelSpec &spec);

/// Kraus operators of a Haar-random isometric dilation C^d -> C^d (x) C^env.
std::vector<ComplexMatrix> random_cptp_kraus(int n, std::uint64_t seed, int env_dim = 0);

/// Qubit count described by a spec (validates matrix shapes).
int channel_qubits(const ChannelSpec &spec);

}  // namespace rbtomo

#endif
