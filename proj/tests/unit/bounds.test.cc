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

#include "rbtomo/bounds.h"

#include <gtest/gtest.h>

#include <cmath>

#include "rbtomo/errors.h"

using namespace rbtomo;

namespace {

double chi00(const PauliLiouvilleMap &e) {
    return e.matrix().trace() / e.dim();
}

ComplexMatrix t_matrix() {
    ComplexMatrix t = ComplexMatrix::Identity(2, 2);
    t(1, 1) = std::polar(1.0, M_PI / 4.0);
    return t;
}

CircuitGate hadamard_gate(int n, int q) {
    return CircuitGate::make_clifford(CliffordElement::hadamard(n, q));
}

// Forward-scan oracle: the set of chi_a on a fine grid whose forward interval holds chi_ab.
std::pair<double, double> scan_oracle(double chi_ab, double chi_b, int points) {
    double lo = 2.0, hi = -1.0;
    for (int i = 0; i <= points; i++) {
        double a = static_cast<double>(i) / points;
        Interval f = bound_composed_chi00(a, chi_b);
        if (f.contains(chi_ab)) {
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
    }
    return {lo, hi};
}

}  // namespace

TEST(bound_composed, trivial_and_identity_cases) {
    Interval i = bound_composed_chi00(0.7, 1.0);
    EXPECT_DOUBLE_EQ(i.lo, 0.7);
    EXPECT_DOUBLE_EQ(i.hi, 0.7);
    for (double a : {0.1, 0.3, 0.5, 0.77, 0.995, 0.999999}) {
        EXPECT_EQ(bound_composed_chi00(a, a).hi, 1.0) << a;
    }
    EXPECT_THROW(bound_composed_chi00(1.1, 0.5), ValidationError);
}

TEST(bound_composed, holds_for_random_single_and_two_qubit_pairs) {
    for (int n = 1; n <= 2; n++) {
        for (std::uint64_t s = 0; s < 300; s++) {
            auto a = make_channel(channel_spec::RandomCptp{n, 2 * s, 2});
            auto b = make_channel(channel_spec::RandomCptp{n, 2 * s + 1, 2});
            Interval i = bound_composed_chi00(chi00(a), chi00(b));
            EXPECT_TRUE(i.contains(chi00(compose(a, b)), 1e-12));
        }
    }
}

TEST(bound_composed, upper_bound_is_saturated_by_rotations) {
    // Rotations about a common axis compose their angles.
    for (double ta : {0.1, 0.4, 1.0}) {
        for (double tb : {0.05, 0.3, 0.7}) {
            auto rz = [](double t) {
                ComplexMatrix u = ComplexMatrix::Zero(2, 2);
                u(0, 0) = std::polar(1.0, -t);
                u(1, 1) = std::polar(1.0, t);
                return pl_from_unitary(u);
            };
            auto a = rz(ta), b = rz(-tb);
            Interval i = bound_composed_chi00(chi00(a), chi00(b));
            EXPECT_NEAR(chi00(compose(a, b)), i.hi, 1e-12);
        }
    }
}

TEST(bound_deconvolved, examples) {
    Interval i = bound_deconvolved_chi00(0.8, 1.0);
    EXPECT_EQ(i.lo, 0.8);
    EXPECT_EQ(i.hi, 0.8);
    Interval j = bound_deconvolved_chi00(0.995, 0.995);
    EXPECT_EQ(j.hi, 1.0);
}

TEST(bound_deconvolved, endpoints_match_the_forward_oracle) {
    for (double chi_ab : {0.0, 0.2, 0.5, 0.9, 0.98, 0.99, 0.995, 0.999}) {
        Interval i = bound_deconvolved_chi00(chi_ab, 0.995);
        ASSERT_TRUE(i.valid);
        auto [lo, hi] = scan_oracle(chi_ab, 0.995, 200000);
        EXPECT_NEAR(i.lo, lo, 2e-5) << chi_ab;
        EXPECT_NEAR(i.hi, hi, 2e-5) << chi_ab;
        // Endpoints are on the boundary to bisection precision.
        EXPECT_TRUE(bound_composed_chi00(i.lo, 0.995).contains(chi_ab, 1e-9));
        EXPECT_TRUE(bound_composed_chi00(i.hi, 0.995).contains(chi_ab, 1e-9));
        if (i.lo > 1e-9) {
            EXPECT_FALSE(bound_composed_chi00(i.lo - 1e-9, 0.995).contains(chi_ab));
        }
        if (i.hi < 1.0 - 1e-9) {
            EXPECT_FALSE(bound_composed_chi00(i.hi + 1e-9, 0.995).contains(chi_ab));
        }
    }
}

TEST(bound_deconvolved, forward_backward_consistency) {
    Rng rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; trial++) {
        double a = u(rng), b = u(rng);
        Interval f = bound_composed_chi00(a, b);
        double mid = 0.5 * (f.lo + f.hi);
        EXPECT_TRUE(bound_deconvolved_chi00(mid, b).contains(a, 1e-9)) << a << " " << b;
    }
}

TEST(bound_deconvolved, box_contains_every_point_bound) {
    Interval box = bound_deconvolved_chi00_box(0.97, 0.985, 0.99, 0.996);
    ASSERT_TRUE(box.valid);
    for (double ab : {0.97, 0.975, 0.98, 0.985}) {
        for (double b : {0.99, 0.993, 0.996}) {
            Interval p = bound_deconvolved_chi00(ab, b);
            EXPECT_LE(box.lo, p.lo + 1e-9);
            EXPECT_GE(box.hi, p.hi - 1e-9);
        }
    }
}

TEST(mgj_bound, printed_formula) {
    Interval i = mgj_bound_chi00(0.99, 0.995, 2);
    const double centre = 3.0 * 0.99 / (4.0 * 0.995);
    const double e = std::abs(0.995 - centre) + (0.75 - 0.995);
    EXPECT_NEAR(centre, 0.74623, 1e-5);
    EXPECT_NEAR(i.lo, std::clamp(centre - e, 0.0, 1.0), 1e-15);
    EXPECT_NEAR(i.hi, std::clamp(centre + e, 0.0, 1.0), 1e-15);
    EXPECT_THROW(mgj_bound_chi00(0.5, 0.0, 2), ValidationError);
}

TEST(mgj_bound, validity_follows_the_deconvolved_region) {
    for (int i = 0; i <= 50; i++) {
        double chi_ab = i / 50.0;
        Interval m = mgj_bound_chi00(chi_ab, 0.995, 2);
        Interval ours = bound_deconvolved_chi00(chi_ab, 0.995);
        bool region_ok = fidelity_from_chi00(ours.lo, 2) >= 2 * fidelity_from_chi00(0.995, 2) - 1;
        double centre = 3.0 * chi_ab / (4.0 * 0.995);
        bool e_ok = std::abs(0.995 - centre) + (0.75 - 0.995) >= 0.0;
        EXPECT_EQ(m.valid, region_ok && e_ok) << chi_ab;
    }
}

TEST(decompose_T, coefficients_and_norm) {
    auto combo = decompose_T();
    ASSERT_EQ(combo.terms.size(), 3u);
    EXPECT_NEAR(combo.one_norm(), std::sqrt(2.0), 1e-12);
    RealMatrix t = pl_from_unitary(t_matrix()).matrix();
    EXPECT_LT((combo.pl() - t).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(combo.pl()(1, 1), std::cos(M_PI / 4.0), 1e-12);
}

TEST(decompose_circuit, base_cases) {
    auto h = decompose_circuit(1, {hadamard_gate(1, 0)});
    ASSERT_EQ(h.terms.size(), 1u);
    EXPECT_EQ(h.terms[0].beta, 1.0);
    EXPECT_EQ(h.terms[0].element, CliffordElement::hadamard(1, 0));
    auto t = decompose_circuit(1, {CircuitGate::make_t(0)});
    auto ref = decompose_T();
    ASSERT_EQ(t.terms.size(), 3u);
    for (size_t i = 0; i < 3; i++) {
        EXPECT_EQ(t.terms[i].beta, ref.terms[i].beta);
        EXPECT_EQ(t.terms[i].element, ref.terms[i].element);
    }
    auto empty = decompose_circuit(2, {});
    ASSERT_EQ(empty.terms.size(), 1u);
    EXPECT_TRUE(empty.terms[0].element.is_identity());
}

TEST(decompose_circuit, t_h_t_matches_dense_product) {
    std::vector<CircuitGate> gates = {CircuitGate::make_t(0), hadamard_gate(1, 0), CircuitGate::make_t(0)};
    auto combo = decompose_circuit(1, gates);
    EXPECT_LE(combo.terms.size(), 9u);
    EXPECT_LE(combo.one_norm(), 2.0 + 1e-12);
    RealMatrix t = pl_from_unitary(t_matrix()).matrix();
    RealMatrix dense = t * CliffordElement::hadamard(1, 0).pl().matrix() * t;
    EXPECT_LT((combo.pl() - dense).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((combo.pl() - pl_from_unitary(circuit_unitary(1, gates)).matrix()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(decompose_circuit, growth_law_and_merge) {
    Rng rng(8);
    for (int trial = 0; trial < 6; trial++) {
        const int n = 1 + trial % 3;
        std::vector<CircuitGate> gates;
        int t = 0;
        for (int g = 0; g < 10; g++) {
            if (rng() % 2 == 0 && t < 6) {
                gates.push_back(CircuitGate::make_t(static_cast<int>(rng() % n)));
                t++;
            } else {
                gates.push_back(CircuitGate::make_clifford(sample_uniform_clifford(n, rng)));
            }
        }
        auto combo = decompose_circuit(n, gates);
        EXPECT_EQ(combo.t_count, t);
        EXPECT_LE(static_cast<double>(combo.terms.size()), std::pow(3.0, t));
        EXPECT_LE(combo.one_norm(), std::pow(std::sqrt(2.0), t) + 1e-9);
        RealMatrix dense = pl_from_unitary(circuit_unitary(n, gates)).matrix();
        EXPECT_LT((combo.pl() - dense).cwiseAbs().maxCoeff(), 1e-9);
        DecomposeOptions merge;
        merge.merge = true;
        auto merged = decompose_circuit(n, gates, merge);
        EXPECT_LE(merged.terms.size(), combo.terms.size());
        EXPECT_LT((merged.pl() - dense).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(decompose_circuit, t_max_enforced) {
    std::vector<CircuitGate> gates(3, CircuitGate::make_t(0));
    DecomposeOptions opt;
    opt.t_max = 2;
    EXPECT_THROW(decompose_circuit(1, gates, opt), ValidationError);
    EXPECT_THROW(decompose_circuit(1, {CircuitGate::make_t(1)}), ValidationError);
}

TEST(fidelity_from_combination, identity_against_t) {
    auto combo = decompose_T();
    auto id = PauliLiouvilleMap::identity(1);
    std::vector<FidelityEstimate> est;
    for (const auto &term : combo.terms) {
        FidelityEstimate f;
        f.f_hat = average_fidelity(id, term.element.pl());
        est.push_back(f);
    }
    double direct = average_fidelity(id, pl_from_unitary(t_matrix()));
    EXPECT_NEAR(direct, (2 * std::cos(M_PI / 4) + 2 + 2) / 6, 1e-12);
    EXPECT_NEAR(fidelity_from_combination(est, combo, 2).f_hat, direct, 1e-12);
}

TEST(fidelity_from_combination, t_against_itself_and_budgets) {
    auto combo = decompose_T();
    auto t = pl_from_unitary(t_matrix());
    std::vector<FidelityEstimate> est;
    for (const auto &term : combo.terms) {
        FidelityEstimate f;
        f.f_hat = average_fidelity(t, term.element.pl());
        f.epsilon = 0.01;
        f.delta = 0.002;
        est.push_back(f);
    }
    auto f = fidelity_from_combination(est, combo, 2);
    EXPECT_NEAR(f.f_hat, 1.0, 1e-12);
    EXPECT_NEAR(f.epsilon, 0.01 * std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(f.delta, 0.006, 1e-15);
    est.pop_back();
    EXPECT_THROW(fidelity_from_combination(est, combo, 2), ValidationError);
}

TEST(bound_nonclifford, analytic_t_map) {
    auto t = pl_from_unitary(t_matrix());
    NonCliffordOptions opt;
    opt.analytic = true;
    RBSystem clean(t, PauliLiouvilleMap::identity(1), CliffordElement::identity(1));
    auto b = bound_nonclifford_fidelity(clean, decompose_T(), 0.01, 0.05, opt);
    EXPECT_TRUE(b.fidelity.contains(1.0, 1e-12));
    EXPECT_LT(b.fidelity.width(), 1e-6);
    RBSystem noisy(t, make_channel(channel_spec::Depolarizing{1, 0.99}), CliffordElement::identity(1));
    auto c = bound_nonclifford_fidelity(noisy, decompose_T(), 0.01, 0.05, opt);
    EXPECT_TRUE(c.fidelity.contains(1.0, 1e-12));
    EXPECT_GT(c.fidelity.width(), 0.0);
}

TEST(bound_nonclifford, analytic_t_h_t_contains_truth) {
    std::vector<CircuitGate> gates = {CircuitGate::make_t(0), hadamard_gate(1, 0), CircuitGate::make_t(0)};
    auto u = pl_from_unitary(circuit_unitary(1, gates));
    auto e = compose(make_channel(channel_spec::Depolarizing{1, 0.97}), u);
    auto noise = make_channel(channel_spec::Depolarizing{1, 0.99});
    NonCliffordOptions opt;
    opt.analytic = true;
    auto b = bound_nonclifford_fidelity(
        RBSystem(e, noise, CliffordElement::identity(1)), decompose_circuit(1, gates), 0.01, 0.05, opt);
    EXPECT_TRUE(b.fidelity.contains(average_fidelity(e, u), 1e-9));
}

TEST(bound_nonclifford, sampled_interval_covers_truth) {
    auto t = pl_from_unitary(t_matrix());
    auto e = compose(make_channel(channel_spec::Depolarizing{1, 0.98}), t);
    RBSystem sys(e, make_channel(channel_spec::Depolarizing{1, 0.99}), CliffordElement::identity(1));
    const double truth = average_fidelity(e, t);
    NonCliffordOptions opt;
    opt.sampler = SamplerKind::synthetic;
    int covered = 0;
    for (std::uint64_t run = 0; run < 20; run++) {
        opt.seed = run;
        auto b = bound_nonclifford_fidelity(sys, decompose_T(), 0.02, 0.05, opt);
        covered += b.fidelity.contains(truth);
        EXPECT_GT(b.samples_used, 0u);
    }
    EXPECT_GE(covered, 18);
}
