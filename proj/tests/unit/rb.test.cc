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

#include "rbtomo/rb.h"

#include <gtest/gtest.h>

#include <cmath>

#include "rbtomo/errors.h"

using namespace rbtomo;

namespace {

ComplexMatrix hadamard_matrix() {
    ComplexMatrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

PauliLiouvilleMap hadamard_map() {
    return pl_from_unitary(hadamard_matrix());
}

RBSystem hadamard_system(int target_index, PrepSpec prep = {}, MeasSpec meas = {}) {
    return RBSystem(
        hadamard_map(), PauliLiouvilleMap::identity(1), spanning_set_single_qubit()[static_cast<size_t>(target_index)],
        prep, meas);
}

}  // namespace

TEST(rb_system, rejects_identity_like_observables) {
    auto id = PauliLiouvilleMap::identity(1);
    auto c = CliffordElement::identity(1);
    EXPECT_THROW(RBSystem(id, id, c, {}, MeasSpec{"X", 0.0}), ValidationError);
    EXPECT_THROW(RBSystem(id, id, c, {}, MeasSpec{"I", 0.0}), ValidationError);
    EXPECT_THROW(RBSystem(id, id, c, {}, MeasSpec{"Z", 0.5}), ValidationError);
    EXPECT_THROW(RBSystem(id, id, c, PrepSpec{1.0}, {}), ValidationError);
    EXPECT_NO_THROW(RBSystem(id, id, c, {}, MeasSpec{"Z", 0.1}));
}

TEST(rb_system, rejects_non_trace_preserving_maps) {
    RealMatrix m = RealMatrix::Identity(4, 4);
    m(0, 0) = 0.5;
    EXPECT_THROW(
        RBSystem(PauliLiouvilleMap(1, m), PauliLiouvilleMap::identity(1), CliffordElement::identity(1)),
        ValidationError);
}

TEST(design_sequence, single_step_inverts_the_clifford) {
    Rng rng(3);
    auto design = design_sequence(1, CliffordElement::identity(1), rng);
    ASSERT_EQ(design.cliffords.size(), 1u);
    EXPECT_EQ(design.inversion, clifford_invert(design.cliffords[0]));
}

TEST(design_sequence, ideal_composition_is_identity) {
    Rng rng(5);
    for (int trial = 0; trial < 100; trial++) {
        auto design = design_sequence(3, CliffordElement::identity(1), rng);
        CliffordElement total = CliffordElement::identity(1);
        for (const auto &c : design.cliffords) {
            total = clifford_compose(c, total);
        }
        EXPECT_TRUE(clifford_compose(design.inversion, total).is_identity());
    }
    for (int n = 2; n <= 3; n++) {
        auto target = sample_uniform_clifford(n, rng);
        auto design = design_sequence(4, target, rng);
        RealMatrix total = RealMatrix::Identity(1 << (2 * n), 1 << (2 * n));
        for (const auto &c : design.cliffords) {
            total = target.pl().matrix() * c.pl().matrix() * total;
        }
        total = design.inversion.pl().matrix() * total;
        EXPECT_LT((total - RealMatrix::Identity(total.rows(), total.cols())).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(survival_expectation, perfect_setup_survives) {
    Rng rng(7);
    for (int n = 1; n <= 3; n++) {
        auto target = sample_uniform_clifford(n, rng);
        RBSystem sys(target.pl(), PauliLiouvilleMap::identity(n), target);
        auto design = design_sequence(5, target, rng);
        EXPECT_NEAR(survival_expectation(sys, design), 1.0, 1e-12);
    }
}

TEST(survival_expectation, depolarizing_noise_closed_form) {
    Rng rng(11);
    const double delta = 0.9;
    RBSystem sys(
        PauliLiouvilleMap::identity(1), make_channel(channel_spec::Depolarizing{1, delta}),
        CliffordElement::identity(1));
    for (int k = 1; k <= 6; k++) {
        auto design = design_sequence(k, CliffordElement::identity(1), rng);
        EXPECT_NEAR(survival_expectation(sys, design), std::pow(delta, k + 1), 1e-12);
    }
}

TEST(survival_expectation, preparation_error_scales_linearly) {
    Rng rng(13);
    auto noise = make_channel(channel_spec::Depolarizing{1, 0.95});
    auto e = make_channel(channel_spec::AmplitudeDamping{0.1});
    RBSystem clean(e, noise, CliffordElement::identity(1));
    RBSystem noisy(e, noise, CliffordElement::identity(1), PrepSpec{0.1});
    for (int trial = 0; trial < 20; trial++) {
        auto design = design_sequence(4, CliffordElement::identity(1), rng);
        double a = survival_expectation(clean, design);
        double b = survival_expectation(noisy, design);
        // Only the non-identity Pauli coordinates of rho shrink.
        RBSystem flat(e, noise, CliffordElement::identity(1), PrepSpec{0.999999999999});
        double c = survival_expectation(flat, design);
        EXPECT_NEAR(b - c, 0.9 * (a - c), 1e-9);
    }
}

TEST(rb_engine, hadamard_against_identity_and_x_rotation) {
    EXPECT_NEAR(decay_model(hadamard_system(0)).p, -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(decay_model(hadamard_system(1)).p, 1.0 / 3.0, 1e-12);
    auto sys = hadamard_system(0);
    auto m = decay_model(sys);
    for (int k = 1; k <= 6; k++) {
        auto rec = simulate_F_k(sys, k, 1, 1, 0, SimulationMode::analytic);
        EXPECT_NEAR(rec.mean - m.b0, m.a0 * std::pow(-1.0 / 3.0, k), 1e-12);
        EXPECT_EQ(rec.sequences, 0u);
    }
}

TEST(rb_engine, exhaustive_twirl_matches_model) {
    Rng rng(17);
    for (int trial = 0; trial < 4; trial++) {
        auto e = make_channel(channel_spec::RandomCptp{1, rng(), 0});
        auto noise = make_channel(channel_spec::RandomCptp{1, rng(), 0});
        auto target = single_qubit_clifford(static_cast<int>(rng() % 24));
        RBSystem sys(e, noise, target, PrepSpec{0.03}, MeasSpec{"Z", 0.07});
        for (int k = 1; k <= 3; k++) {
            EXPECT_NEAR(exhaustive_sequence_average(sys, k), analytic_F_k(sys, k), 1e-10) << "k=" << k;
        }
    }
}

TEST(survival_expectation, stays_within_observable_range) {
    Rng rng(19);
    auto e = make_channel(channel_spec::RandomCptp{1, 4, 0});
    RBSystem sys(e, make_channel(channel_spec::Depolarizing{1, 0.9}), single_qubit_clifford(5));
    for (int trial = 0; trial < 20; trial++) {
        auto design = design_sequence(2, sys.target(), rng);
        double v = survival_expectation(sys, design);
        EXPECT_LE(std::abs(v), 1.0 + 1e-12);
    }
}

TEST(rb_engine, spam_leaves_p_invariant) {
    auto e = make_channel(channel_spec::RandomCptp{1, 21, 0});
    auto noise = make_channel(channel_spec::Depolarizing{1, 0.97});
    auto target = single_qubit_clifford(9);
    RBSystem base(e, noise, target);
    const double p0 = decay_model(base).p;
    for (double ep : {0.0, 0.05, 0.1}) {
        for (double em : {0.0, 0.05, 0.1}) {
            RBSystem sys(e, noise, target, PrepSpec{ep}, MeasSpec{"Z", em});
            // Fit p from three exhaustive twirl averages.
            double f1 = exhaustive_sequence_average(sys, 1);
            double f2 = exhaustive_sequence_average(sys, 2);
            double f3 = exhaustive_sequence_average(sys, 3);
            EXPECT_NEAR((f3 - f2) / (f2 - f1), p0, 1e-10);
        }
    }
}

TEST(rb_engine, sampled_mean_reaches_floor) {
    RBConfig cfg;
    cfg.n = 1;
    cfg.e_map = channel_spec::Depolarizing{1, 0.5};
    cfg.noise_map = channel_spec::Depolarizing{1, 1.0};
    cfg.shots = 10;
    cfg.seed = 5;
    cfg.threads = 2;
    auto rec = simulate_F_k(cfg, 25, 2000, SimulationMode::sampled);
    EXPECT_EQ(rec.sequences, 2000u);
    EXPECT_EQ(rec.shots_per_sequence, 10u);
    EXPECT_GT(rec.stderr_mean, 0.0);
    EXPECT_LT(std::abs(rec.mean - 0.0), 4.0 * rec.stderr_mean);
}

TEST(rb_engine, sampling_is_deterministic_and_thread_independent) {
    RBConfig cfg;
    cfg.n = 2;
    cfg.e_map = channel_spec::RandomCptp{2, 3, 0};
    cfg.noise_map = channel_spec::Depolarizing{2, 0.95};
    cfg.shots = 3;
    cfg.seed = 99;
    cfg.threads = 1;
    auto a = simulate_F_k(cfg, 3, 9000, SimulationMode::sampled);
    cfg.threads = 3;
    auto b = simulate_F_k(cfg, 3, 9000, SimulationMode::sampled);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.stderr_mean, b.stderr_mean);
}

TEST(rb_engine, sampled_two_qubit_mean_matches_model) {
    RBSystem sys(
        make_channel(channel_spec::RandomCptp{2, 8, 0}), make_channel(channel_spec::Depolarizing{2, 0.97}),
        CliffordElement::identity(2), PrepSpec{0.02}, MeasSpec{"ZI", 0.01});
    auto rec = simulate_F_k(sys, 2, 20000, 1, 4, SimulationMode::sampled, 1);
    EXPECT_LT(std::abs(rec.mean - analytic_F_k(sys, 2)), 5.0 * rec.stderr_mean);
}

TEST(hoeffding, failure_rate_below_delta) {
    const double eps = 0.05, delta = 0.05;
    const auto m = hoeffding_samples(eps, delta);
    EXPECT_EQ(m, static_cast<std::uint64_t>(std::ceil(4.0 * std::log(2.0 / delta) / (2.0 * eps * eps))));
    RBSystem sys(
        make_channel(channel_spec::Depolarizing{1, 0.8}), make_channel(channel_spec::Depolarizing{1, 0.98}),
        CliffordElement::identity(1), PrepSpec{0.05}, MeasSpec{"Z", 0.03});
    SimulatedSource source(sys, 123, 1);
    const double truth = source.exact(Family::main, 2);
    int failures = 0;
    for (int trial = 0; trial < 500; trial++) {
        double f = source.sample_mean(Family::main, 2, m, static_cast<std::uint64_t>(trial));
        failures += std::abs(f - truth) >= eps;
    }
    EXPECT_LT(failures, 500 * delta);
}

TEST(hoeffding, rejects_bad_arguments) {
    EXPECT_THROW(hoeffding_samples(0.0, 0.1), ValidationError);
    EXPECT_THROW(hoeffding_samples(0.1, 1.0), ValidationError);
}

TEST(estimate_p, analytic_algebraic_identity) {
    SyntheticSource source(1, DecayModel{0.5, 0.5, 0.9}, 0.95, -0.2, 1);
    EstimateOptions opt;
    opt.analytic = true;
    auto est = estimate_p(source, 0.05, 0.05, opt);
    EXPECT_NEAR(est.f1, 0.95, 1e-12);
    EXPECT_NEAR(est.f2, 0.905, 1e-12);
    EXPECT_NEAR(est.f_inf, 0.5, 1e-12);
    EXPECT_NEAR(est.p_hat, 0.9, 1e-12);
    EXPECT_FALSE(est.clamped_to_zero);
}

TEST(estimate_p, identity_everything_gives_one) {
    RBConfig cfg;
    cfg.e_map = channel_spec::Depolarizing{1, 1.0};
    cfg.noise_map = channel_spec::Depolarizing{1, 1.0};
    cfg.target = spanning_set_single_qubit()[0];
    EstimateOptions opt;
    opt.analytic = true;
    EXPECT_NEAR(estimate_p(cfg, 0.05, 0.05, opt).p_hat, 1.0, 1e-12);
    cfg.seed = 8;
    cfg.threads = 1;
    auto est = estimate_p(cfg, 0.1, 0.1);
    EXPECT_NEAR(est.p_hat, 1.0, 0.1);
    EXPECT_GT(est.samples_used, 0u);
}

TEST(estimate_p, negative_p_keeps_its_sign) {
    auto sys = RBSystem(
        hadamard_map(), make_channel(channel_spec::Depolarizing{1, 0.99}), spanning_set_single_qubit()[0]);
    SimulatedSource source(sys, 2, 1);
    auto est = estimate_p(source, 0.1, 0.1);
    EXPECT_NEAR(est.p_hat, decay_model(sys).p, 0.1);
    EXPECT_LT(est.p_hat, 0.0);
}

TEST(estimate_p, coverage_over_repeated_runs) {
    RBSystem sys(
        hadamard_map(), make_channel(channel_spec::Depolarizing{1, 0.98}), spanning_set_single_qubit()[1],
        PrepSpec{0.02}, MeasSpec{"Z", 0.02});
    const double truth = decay_model(sys).p;
    int hits = 0;
    for (std::uint64_t run = 0; run < 200; run++) {
        auto source = SyntheticSource::from_system(sys, 1000 + run);
        auto est = estimate_p(source, 0.05, 0.05);
        hits += std::abs(est.p_hat - truth) <= 0.05;
    }
    EXPECT_GE(hits, 190);
}

TEST(estimate_p, small_amplitude_never_diverges) {
    int clamped = 0, errors = 0, covered = 0;
    const double eps = 0.1;
    for (std::uint64_t run = 0; run < 60; run++) {
        const double p = -0.5 + (run % 11) * 0.1;
        SyntheticSource source(1, DecayModel{0.04, 0.45, p}, 0.96, -0.3, 77 + run);
        try {
            auto est = estimate_p(source, eps, 0.05);
            if (est.clamped_to_zero) {
                clamped++;
                EXPECT_LE(std::abs(p) * 0.04, (std::abs(est.f1 - est.f_inf) + 2 * est.epsilon_prime) + 1e-12);
            } else {
                EXPECT_LE(std::abs(est.p_hat - p), eps) << "run " << run;
                covered++;
            }
        } catch (const NumericalError &) {
            errors++;
        }
    }
    EXPECT_EQ(clamped + errors + covered, 60);
}

TEST(estimate_p, sample_cap_is_enforced) {
    SyntheticSource source(1, DecayModel{0.5, 0.5, 0.9}, 0.95, -0.2, 1);
    EstimateOptions opt;
    opt.max_samples_per_point = 1000;
    EXPECT_THROW(estimate_p(source, 0.05, 0.05, opt), NumericalError);
}

TEST(estimate_p, vanishing_lower_bound_is_a_numerical_error) {
    // Noise-only amplitude right at the resolution threshold drives the lower bound toward 0.
    for (std::uint64_t run = 0; run < 30; run++) {
        const double a0 = 0.02 + 0.0002 * static_cast<double>(run);
        SyntheticSource source(1, DecayModel{a0, 0.5, 0.5}, 0.999, -0.3, 500 + run);
        try {
            estimate_p(source, 0.05, 0.05);
        } catch (const NumericalError &) {
        } catch (const std::exception &e) {
            ADD_FAILURE() << "run " << run << ": " << e.what();
        }
    }
}

TEST(estimate_p, rejects_bad_arguments) {
    SyntheticSource source(1, DecayModel{0.5, 0.5, 0.9}, 0.95, -0.2, 1);
    EXPECT_THROW(estimate_p(source, 0.0, 0.05), ValidationError);
    EXPECT_THROW(estimate_p(source, 0.1, 1.0), ValidationError);
}

TEST(fidelity_to_clifford, examples) {
    RBConfig cfg;
    cfg.e_map = channel_spec::Unitary{hadamard_matrix()};
    cfg.noise_map = channel_spec::Depolarizing{1, 1.0};
    EstimateOptions opt;
    opt.analytic = true;
    cfg.target = spanning_set_single_qubit()[0];
    EXPECT_NEAR(estimate_fidelity_to_clifford(cfg, 0.05, 0.05, opt).f_hat, 1.0 / 3.0, 1e-12);
    cfg.target = spanning_set_single_qubit()[1];
    EXPECT_NEAR(estimate_fidelity_to_clifford(cfg, 0.05, 0.05, opt).f_hat, 2.0 / 3.0, 1e-12);
    cfg.e_map = channel_spec::Depolarizing{1, 1.0};
    cfg.noise_map = channel_spec::Depolarizing{1, 0.98};
    cfg.target = spanning_set_single_qubit()[0];
    auto f = estimate_fidelity_to_clifford(cfg, 0.05, 0.05, opt);
    EXPECT_NEAR(f.f_hat, 0.99, 1e-12);
    EXPECT_NEAR(f.epsilon, 0.025, 1e-15);
}

TEST(calibrated_estimate, recovers_p_from_length_one_data) {
    RBSystem sys(
        hadamard_map(), make_channel(channel_spec::Depolarizing{1, 0.98}), spanning_set_single_qubit()[1],
        PrepSpec{0.03}, MeasSpec{"Z", 0.02});
    auto source = SyntheticSource::from_system(sys, 5);
    auto spam = calibrate_spam(source, 400000);
    auto m = decay_model(sys);
    EXPECT_NEAR(spam.a0, m.a0, 0.05);
    EXPECT_NEAR(spam.b0, m.b0, 0.01);
    auto est = estimate_p_calibrated(source, spam, 400000, 0.05, 999);
    EXPECT_NEAR(est.p_hat, m.p, 0.05);
}

TEST(fit_decay, exact_recovery) {
    std::vector<DecayRecord> recs;
    for (int k = 1; k <= 12; k++) {
        recs.push_back({k, 0.4 * std::pow(0.7, k) + 0.5, 0, 0, 0.0});
    }
    auto fit = fit_decay(recs);
    EXPECT_NEAR(fit.a0, 0.4, 1e-6);
    EXPECT_NEAR(fit.b0, 0.5, 1e-6);
    EXPECT_NEAR(fit.p, 0.7, 1e-6);
}

TEST(fit_decay, oscillating_sign) {
    std::vector<DecayRecord> recs;
    for (int k = 1; k <= 8; k++) {
        recs.push_back({k, 0.5 * std::pow(-1.0 / 3.0, k) + 0.4, 0, 0, 0.0});
    }
    auto fit = fit_decay(recs);
    EXPECT_NEAR(fit.p, -1.0 / 3.0, 1e-6);
}

TEST(fit_decay, degenerate_design) {
    std::vector<DecayRecord> recs = {{2, 0.5, 0, 0, 0.0}, {2, 0.6, 0, 0, 0.0}, {3, 0.5, 0, 0, 0.0}};
    EXPECT_THROW(fit_decay(recs), ValidationError);
}

TEST(fit_decay, agrees_with_estimate_p_on_simulated_data) {
    RBSystem sys(
        make_channel(channel_spec::Depolarizing{1, 0.9}), make_channel(channel_spec::Depolarizing{1, 0.99}),
        CliffordElement::identity(1), PrepSpec{0.02}, MeasSpec{"Z", 0.01});
    std::vector<DecayRecord> recs;
    for (int k : {1, 2, 4, 8, 16, 32}) {
        recs.push_back(simulate_F_k(sys, k, 20000, 5, 31, SimulationMode::sampled, 1));
    }
    auto fit = fit_decay(recs);
    SimulatedSource source(sys, 3, 1);
    auto est = estimate_p(source, 0.1, 0.1);
    EXPECT_NEAR(fit.p, decay_model(sys).p, 0.02);
    EXPECT_NEAR(fit.p, est.p_hat, 0.1 + 0.02);
}
