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

#ifndef RBTOMO_BOUNDS_H
#define RBTOMO_BOUNDS_H

#include <cstdint>
#include <vector>

#include "rbtomo/clifford.h"
#include "rbtomo/rb.h"

namespace rbtomo {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool valid = true;

    bool contains(double x, double tol = 0.0) const {
        return valid && x >= lo - tol && x <= hi + tol;
    }
    double width() const {
        return hi - lo;
    }
};

/// Range of chi00 for A after B given chi00 of each: centre a b, half-width
/// 2 sqrt(a (1 - a) b (1 - b)) + (1 - a)(1 - b), clipped to [0, 1].
Interval bound_composed_chi00(double chi_a, double chi_b);

/// All chi_a whose composed interval with chi_b contains chi_ab. Invalid when empty.
Interval bound_deconvolved_chi00(double chi_ab, double chi_b);

/// Hull of every chi_a compatible with some chi_ab in [ab_lo, ab_hi] and chi_b in [b_lo, b_hi].
Interval bound_deconvolved_chi00_box(double ab_lo, double ab_hi, double b_lo, double b_hi);

/// Earlier fidelity-estimation bound: centre (d^2 - 1) chi_ab / (d^2 chi_b) with half-width
/// |chi_b - centre| + ((d^2 - 1) / d^2 - chi_b), clipped to [0, 1]. Valid only when
/// F(A) >= 2 F(B) - 1 holds over the whole deconvolved region and the half-width is non-negative.
Interval mgj_bound_chi00(double chi_ab, double chi_b, int d);

// ---------------------------------------------------------------------------
// Clifford+T decompositions.

struct CombinationTerm {
    double beta = 0.0;
    CliffordElement element;
};

/// U = sum_i beta_i C_i in PL form.
struct LinearCombination {
    int n = 1;
    std::vector<CombinationTerm> terms;
    int t_count = 0;
    int clifford_count = 0;

    double one_norm() const;
    double beta_sum() const;
    /// Dense sum of beta_i C_i (n <= 3).
    RealMatrix pl() const;
};

/// T = diag(1, e^{i pi / 4}) as (1/2) I + ((1 - sqrt 2) / 2) Z + (1 / sqrt 2) S.
LinearCombination decompose_T();

struct CircuitGate {
    enum class Kind { clifford, t };
    Kind kind = Kind::clifford;
    CliffordElement clifford;
    int qubit = 0;

    static CircuitGate make_clifford(CliffordElement c) {
        return {Kind::clifford, std::move(c), 0};
    }
    static CircuitGate make_t(int qubit) {
        return {Kind::t, CliffordElement(), qubit};
    }
};

struct DecomposeOptions {
    int t_max = 12;
    /// Combine terms with equal Clifford elements.
    bool merge = false;
};

/// Gates apply in list order. Each T triples the term count; Cliffords fold into every term.
LinearCombination decompose_circuit(int n, const std::vector<CircuitGate> &gates, const DecomposeOptions &options = {});

/// Dense unitary of a circuit (n <= 3), T gates included.
ComplexMatrix circuit_unitary(int n, const std::vector<CircuitGate> &gates);

/// F(E, U) = sum_i beta_i F(E, C_i) + (1 - sum_i beta_i) / (d + 1). Epsilons add with
/// weights |beta_i| and failure probabilities add.
FidelityEstimate fidelity_from_combination(
    const std::vector<FidelityEstimate> &estimates, const LinearCombination &combo, int d);

enum class SamplerKind {
    /// Random Clifford sequences simulated gate by gate.
    simulated,
    /// Binomial draws from the exact twirled survival, identical in law and much faster.
    synthetic,
};

struct NonCliffordOptions {
    bool analytic = false;
    SamplerKind sampler = SamplerKind::simulated;
    std::uint64_t seed = 0;
    int threads = 0;
    EstimateOptions estimate;
};

struct NonCliffordBound {
    /// Bound on F(E, U).
    Interval fidelity;
    /// The same bound on chi00 of U^dagger E.
    Interval chi00;
    /// Estimate of F(E N, U) from the combination.
    FidelityEstimate composed;
    /// Estimate of F(N, I).
    FidelityEstimate noise;
    std::uint64_t samples_used = 0;
};

/// RB estimates of F(E N, C_i) at (epsilon / sum |beta|, delta / N_U), of F(N, I) at
/// (epsilon, delta), and the deconvolved bound extremized over both confidence ranges.
NonCliffordBound bound_nonclifford_fidelity(
    const RBSystem &system, const LinearCombination &combo, double epsilon, double delta,
    const NonCliffordOptions &options = {});

}  // namespace rbtomo

#endif
