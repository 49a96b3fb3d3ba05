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

#ifndef RBTOMO_UNITAL_H
#define RBTOMO_UNITAL_H

#include <array>
#include <cstdint>
#include <vector>

#include "rbtomo/channel.h"
#include "rbtomo/clifford.h"
#include "rbtomo/rb.h"

namespace rbtomo {

/// Average fidelity of a map to one Clifford, with its confidence metadata.
struct FidelityEntry {
    CliffordElement clifford;
    double f_hat = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
};

struct FidelitySet {
    int n = 1;
    std::vector<FidelityEntry> entries;
};

/// Noise-free fidelities of `e` to each element.
FidelitySet exact_fidelity_set(const PauliLiouvilleMap &e, const std::vector<CliffordElement> &cliffords);

struct UnitalReconstruction {
    PauliLiouvilleMap map;
    /// Measured minus refitted fidelity, one per entry.
    std::vector<double> residuals;
    double residual_norm = 0.0;
    /// Every residual lies within max(tolerance, entry epsilon).
    bool consistent = true;
    int rank = 0;
    /// Spectral-norm bound on the block error implied by the entry epsilons.
    double perturbation_bound = 0.0;
};

/// Least-squares solve for the unital block from tr[E C^T] = F d (d + 1) - d.
/// Throws ValidationError when the Cliffords do not span the unital subspace.
UnitalReconstruction reconstruct_unital(const FidelitySet &fids, double consistency_tolerance = 1e-9);

struct DeconvolutionOptions {
    double singular_threshold = 1e-6;
    /// Replace the inverse by a pseudo-inverse on near-singular blocks. Biases the result.
    bool allow_pseudo_inverse = false;
};

/// (E N)' (N')^-1 on the unital blocks. Throws SingularMapError when N' is near singular.
PauliLiouvilleMap deconvolve_noise(
    const PauliLiouvilleMap &en_prime, const PauliLiouvilleMap &n_prime, const DeconvolutionOptions &options = {});

struct Conditioning {
    double kappa = 0.0;
    double smallest_singular_value = 0.0;
    /// kappa / (1 - kappa |G| / |N'|) * |G| / |N'|; infinite when invalid.
    double relative_error_bound = 0.0;
    /// |G| |(N')^-1| < 1.
    bool valid = false;
};

/// Spectral condition number of the unital part and the first-order inverse error bound
/// for a perturbation of spectral norm `perturbation_norm`.
Conditioning inversion_conditioning(const PauliLiouvilleMap &n_prime, double perturbation_norm);

/// Single-qubit map written as u_rot * diag(1, lambdas) with shift taus * v_rot.
struct CanonicalForm {
    std::array<double, 3> lambdas{};
    std::array<double, 3> taus{};
    PauliLiouvilleMap u_rot;
    PauliLiouvilleMap v_rot;

    /// The diagonal-form map itself.
    PauliLiouvilleMap diagonal_map() const;
    /// u_rot * diagonal_map * v_rot.
    PauliLiouvilleMap reconstruct() const;
};

CanonicalForm canonical_form(const PauliLiouvilleMap &e);

struct CpWitness {
    bool cp = false;
    bool via_conditions = false;
    bool via_choi = false;
    std::array<double, 3> lambdas{};
    double min_choi_eigenvalue = 0.0;
    /// Smallest slack over the inequality conditions; negative when one fails.
    double condition_margin = 0.0;
};

/// CP test for a unital single-qubit map from its canonical lambdas, cross-checked with
/// the process-matrix spectrum. Throws NumericalError when the two disagree beyond tol.
CpWitness cp_witness_single_qubit(const PauliLiouvilleMap &e_prime, double tol = kDefaultPsdTolerance);
/// Same test for a diagonal-form map diag(1, lambdas).
CpWitness cp_witness_lambdas(const std::array<double, 3> &lambdas, double tol = kDefaultPsdTolerance);

/// Per-axis upper bounds |t_i| <= 1 - |lambda_i| that CP imposes on the non-unital shift.
std::array<double, 3> nonunital_bounds(const std::array<double, 3> &lambdas);

struct NonCpScanRow {
    int trial = 0;
    double min_choi_eigenvalue = 0.0;
    bool noncp = false;
    /// Smallest process-matrix eigenvalue of the full, non-projected map.
    double source_min_eigenvalue = 0.0;
};

struct NonCpScan {
    double fraction = 0.0;
    std::vector<NonCpScanRow> rows;
};

/// Draws random CPTP maps, projects them to their unital parts and tests CP.
NonCpScan multiqubit_noncp_scan(int n, int trials, std::uint64_t seed, double tol = kDefaultPsdTolerance, int threads = 0);

// ---------------------------------------------------------------------------
// RB-driven reconstruction.

enum class FidelityMode {
    /// Exact twirled decay constants.
    analytic,
    /// Two-stage estimator with (epsilon, delta) guarantees per fidelity.
    guaranteed,
    /// Length-1 data with SPAM constants calibrated once on the noise-only family.
    calibrated,
};

struct PipelineOptions {
    FidelityMode mode = FidelityMode::analytic;
    double epsilon = 0.05;
    double delta = 0.05;
    /// Single-shot sequences per RB experiment in calibrated mode.
    std::uint64_t shots_per_experiment = 100000;
    std::uint64_t seed = 0;
    int threads = 0;
    /// Empty selects the ten spanning elements for n = 1 and a saturated random set otherwise.
    std::vector<CliffordElement> cliffords;
    DeconvolutionOptions deconvolution;
    double consistency_tolerance = 1e-9;
};

struct PipelineReport {
    FidelitySet en_fidelities;
    FidelitySet n_fidelities;
    UnitalReconstruction en_prime;
    UnitalReconstruction n_prime;
    PauliLiouvilleMap e_prime;
    Conditioning conditioning;
    std::uint64_t samples_used = 0;
};

/// Clifford fidelities of E N and of N by RB, both unital reconstructions and the deconvolution.
PipelineReport reconstruct_from_rb(const RBSystem &system, const PipelineOptions &options = {});

/// Clifford set used by the pipeline when none is supplied.
std::vector<CliffordElement> default_reconstruction_cliffords(int n, std::uint64_t seed);

}  // namespace rbtomo

#endif
