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

#include "rbtomo/unital.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.h"
#include "rbtomo/errors.h"

namespace rbtomo {

namespace {

PauliLiouvilleMap block_diagonal(int n, const RealMatrix &block) {
    const Eigen::Index dim = block.rows() + 1;
    RealMatrix m = RealMatrix::Zero(dim, dim);
    m(0, 0) = 1.0;
    m.bottomRightCorner(dim - 1, dim - 1) = block;
    return PauliLiouvilleMap(n, std::move(m));
}

PauliLiouvilleMap rotation_map(const Eigen::Matrix3d &r) {
    return block_diagonal(1, RealMatrix(r));
}

}  // namespace

FidelitySet exact_fidelity_set(const PauliLiouvilleMap &e, const std::vector<CliffordElement> &cliffords) {
    FidelitySet set;
    set.n = e.num_qubits();
    for (const auto &c : cliffords) {
        set.entries.push_back({c, average_fidelity(e, c.pl()), 0.0, 0.0});
    }
    return set;
}

UnitalReconstruction reconstruct_unital(const FidelitySet &fids, double consistency_tolerance) {
    const int n = fids.n;
    if (n < 1 || n > kMaxDenseQubits) {
        throw ValidationError("unital reconstruction supports 1 <= n <= 3 qubits");
    }
    if (fids.entries.empty()) {
        throw ValidationError("fidelity set is empty");
    }
    const int d = 1 << n;
    const Eigen::Index m = d * d - 1;
    std::vector<CliffordElement> elements;
    for (const auto &entry : fids.entries) {
        if (entry.clifford.num_qubits() != n) {
            throw ValidationError("fidelity entry acts on the wrong number of qubits");
        }
        if (!std::isfinite(entry.f_hat) || !(entry.epsilon >= 0.0) || !(entry.delta >= 0.0 && entry.delta < 1.0)) {
            throw ValidationError("fidelity entries need a finite estimate, epsilon >= 0 and delta in [0, 1)");
        }
        elements.push_back(entry.clifford);
    }

    UnitalReconstruction out;
    out.rank = pl_span_rank(elements);
    if (out.rank < unital_span_dimension(n)) {
        throw ValidationError(
            "Clifford set spans a subspace of dimension " + std::to_string(out.rank) + ", below the required " +
            std::to_string(unital_span_dimension(n)));
    }

    const Eigen::Index rows = static_cast<Eigen::Index>(fids.entries.size());
    const double scale = static_cast<double>(d) * (d + 1);
    RealMatrix a(rows, m * m);
    RealVector b(rows);
    RealVector eps(rows);
    for (Eigen::Index i = 0; i < rows; i++) {
        const auto &entry = fids.entries[static_cast<size_t>(i)];
        const RealMatrix &c = entry.clifford.pl().matrix();
        for (Eigen::Index r = 0; r < m; r++) {
            for (Eigen::Index col = 0; col < m; col++) {
                a(i, r * m + col) = c(r + 1, col + 1);
            }
        }
        b(i) = entry.f_hat * scale - d - 1.0;
        eps(i) = entry.epsilon;
    }

    Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    RealVector x = svd.solve(b);
    RealMatrix block(m, m);
    for (Eigen::Index r = 0; r < m; r++) {
        for (Eigen::Index col = 0; col < m; col++) {
            block(r, col) = x(r * m + col);
        }
    }
    out.map = block_diagonal(n, block);

    RealVector fit = a * x;
    for (Eigen::Index i = 0; i < rows; i++) {
        double r = (b(i) - fit(i)) / scale;
        out.residuals.push_back(r);
        if (std::abs(r) > std::max(consistency_tolerance, eps(i))) {
            out.consistent = false;
        }
    }
    out.residual_norm = (b - fit).norm() / scale;
    const double smin = svd.singularValues().minCoeff();
    out.perturbation_bound = scale * eps.norm() / smin;
    return out;
}

PauliLiouvilleMap deconvolve_noise(
    const PauliLiouvilleMap &en_prime, const PauliLiouvilleMap &n_prime, const DeconvolutionOptions &options) {
    if (en_prime.num_qubits() != n_prime.num_qubits()) {
        throw ValidationError("deconvolution needs maps on the same number of qubits");
    }
    const RealMatrix tn = n_prime.unital_block();
    Eigen::JacobiSVD<RealMatrix> svd(tn, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto &s = svd.singularValues();
    const double smin = s.minCoeff();
    const double smax = s.maxCoeff();
    const double cond = smin > 0.0 ? std::max(1.0, smax) / smin : std::numeric_limits<double>::infinity();
    RealMatrix inv;
    if (smin < options.singular_threshold) {
        if (!options.allow_pseudo_inverse) {
            throw SingularMapError(
                "noise unital block is singular to working precision (smallest singular value " + std::to_string(smin) +
                    ")",
                smin, cond);
        }
        RealVector sinv = RealVector::Zero(s.size());
        for (Eigen::Index i = 0; i < s.size(); i++) {
            if (s(i) >= options.singular_threshold) {
                sinv(i) = 1.0 / s(i);
            }
        }
        inv = svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
    } else {
        inv = tn.inverse();
    }
    return block_diagonal(en_prime.num_qubits(), en_prime.unital_block() * inv);
}

Conditioning inversion_conditioning(const PauliLiouvilleMap &n_prime, double perturbation_norm) {
    if (!(perturbation_norm >= 0.0)) {
        throw ValidationError("perturbation norm must be non-negative");
    }
    const RealMatrix full = block_diagonal(n_prime.num_qubits(), n_prime.unital_block()).matrix();
    Eigen::JacobiSVD<RealMatrix> svd(full);
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    if (smin < 1e-14) {
        throw SingularMapError("noise unital part is singular", smin, std::numeric_limits<double>::infinity());
    }
    Conditioning c;
    c.kappa = smax / smin;
    c.smallest_singular_value = smin;
    c.valid = perturbation_norm / smin < 1.0;
    if (c.valid) {
        const double rel = perturbation_norm / smax;
        c.relative_error_bound = c.kappa / (1.0 - c.kappa * rel) * rel;
    } else {
        c.relative_error_bound = std::numeric_limits<double>::infinity();
    }
    return c;
}

PauliLiouvilleMap CanonicalForm::diagonal_map() const {
    RealMatrix m = RealMatrix::Zero(4, 4);
    m(0, 0) = 1.0;
    for (int i = 0; i < 3; i++) {
        m(i + 1, 0) = taus[static_cast<size_t>(i)];
        m(i + 1, i + 1) = lambdas[static_cast<size_t>(i)];
    }
    return PauliLiouvilleMap(1, std::move(m));
}

PauliLiouvilleMap CanonicalForm::reconstruct() const {
    return PauliLiouvilleMap(1, u_rot.matrix() * diagonal_map().matrix() * v_rot.matrix());
}

CanonicalForm canonical_form(const PauliLiouvilleMap &e) {
    if (e.num_qubits() != 1) {
        throw ValidationError("canonical form is defined for single-qubit maps");
    }
    if (!e.is_trace_preserving(1e-8)) {
        throw ValidationError("canonical form needs a trace-preserving map");
    }
    const Eigen::Matrix3d t = e.unital_block();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(t, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    Eigen::Matrix3d v = svd.matrixV();
    Eigen::Vector3d s = svd.singularValues();
    // Reflections move into the last lambda so that both rotations are proper.
    if (u.determinant() < 0.0) {
        u.col(2) *= -1.0;
        s(2) *= -1.0;
    }
    if (v.determinant() < 0.0) {
        v.col(2) *= -1.0;
        s(2) *= -1.0;
    }
    const Eigen::Vector3d shift = u.transpose() * Eigen::Vector3d(e.tau());
    CanonicalForm f;
    for (int i = 0; i < 3; i++) {
        f.lambdas[static_cast<size_t>(i)] = s(i);
        f.taus[static_cast<size_t>(i)] = shift(i);
    }
    f.u_rot = rotation_map(u);
    f.v_rot = rotation_map(v.transpose());
    return f;
}

CpWitness cp_witness_lambdas(const std::array<double, 3> &lambdas, double tol) {
    const double l1 = lambdas[0], l2 = lambdas[1], l3 = lambdas[2];
    CpWitness w;
    w.lambdas = lambdas;
    const double sq = l1 * l1 + l2 * l2 + l3 * l3;
    const double margins[] = {
        1.0 - std::max({std::abs(l1), std::abs(l2), std::abs(l3)}),
        (1.0 + l3) * (1.0 + l3) - (l1 + l2) * (l1 + l2),
        (1.0 - l3) * (1.0 - l3) - (l1 - l2) * (l1 - l2),
        (1.0 - sq) * (1.0 - sq) - 4.0 * (l1 * l1 * l2 * l2 + l2 * l2 * l3 * l3 + l3 * l3 * l1 * l1 - 2.0 * l1 * l2 * l3),
    };
    w.condition_margin = *std::min_element(std::begin(margins), std::end(margins));
    w.via_conditions = w.condition_margin >= -tol;

    RealMatrix m = RealMatrix::Zero(4, 4);
    m(0, 0) = 1.0;
    m(1, 1) = l1;
    m(2, 2) = l2;
    m(3, 3) = l3;
    w.min_choi_eigenvalue = chi_from_pl(PauliLiouvilleMap(1, std::move(m))).min_eigenvalue();
    w.via_choi = w.min_choi_eigenvalue >= -tol;
    if (w.via_choi != w.via_conditions && std::min(std::abs(w.condition_margin), std::abs(w.min_choi_eigenvalue)) > tol) {
        throw NumericalError(
            "CP conditions and process-matrix spectrum disagree (margin " + std::to_string(w.condition_margin) +
            ", eigenvalue " + std::to_string(w.min_choi_eigenvalue) + ")");
    }
    w.cp = w.via_choi;
    return w;
}

CpWitness cp_witness_single_qubit(const PauliLiouvilleMap &e_prime, double tol) {
    if (e_prime.num_qubits() != 1) {
        throw ValidationError("the CP witness is defined for single-qubit maps");
    }
    if (!e_prime.is_unital(1e-8)) {
        throw ValidationError("the CP witness expects a unital map");
    }
    return cp_witness_lambdas(canonical_form(e_prime).lambdas, tol);
}

std::array<double, 3> nonunital_bounds(const std::array<double, 3> &lambdas) {
    return {1.0 - std::abs(lambdas[0]), 1.0 - std::abs(lambdas[1]), 1.0 - std::abs(lambdas[2])};
}

NonCpScan multiqubit_noncp_scan(int n, int trials, std::uint64_t seed, double tol, int threads) {
    if (n < 1 || n > kMaxDenseQubits) {
        throw ValidationError("the CP scan supports 1 <= n <= 3 qubits");
    }
    if (trials < 1) {
        throw ValidationError("the CP scan needs at least one trial");
    }
    NonCpScan scan;
    scan.rows.resize(static_cast<size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        auto ops = random_cptp_kraus(n, split_seed(seed, t));
        PauliLiouvilleMap e = pl_from_kraus(ops);
        CptpVerdict unital = is_cptp(unital_part(e), tol);
        NonCpScanRow &row = scan.rows[t];
        row.trial = static_cast<int>(t);
        row.min_choi_eigenvalue = unital.min_choi_eigenvalue;
        row.noncp = !unital.cp;
        row.source_min_eigenvalue = chi_from_pl(e).min_eigenvalue();
    });
    int count = 0;
    for (const auto &row : scan.rows) {
        count += row.noncp;
    }
    scan.fraction = static_cast<double>(count) / trials;
    return scan;
}

// ---------------------------------------------------------------------------

std::vector<CliffordElement> default_reconstruction_cliffords(int n, std::uint64_t seed) {
    if (n == 1) {
        return spanning_set_single_qubit();
    }
    Rng rng(seed);
    SpanSaturation sat = saturate_clifford_span(n, rng);
    if (sat.rank < unital_span_dimension(n)) {
        throw NumericalError("random Cliffords failed to span the unital subspace");
    }
    return sat.basis;
}

namespace {

FidelityEntry measure_fidelity(
    const RBSystem &system, const CliffordElement &c, const PipelineOptions &options, const SpamCalibration *spam,
    std::uint64_t seed, std::uint64_t &samples) {
    const RBSystem sys = system.with_target(c);
    const int d = 1 << system.num_qubits();
    FidelityEntry entry;
    entry.clifford = c;
    switch (options.mode) {
        case FidelityMode::analytic: {
            double p = decay_model(sys).p;
            entry.f_hat = ((d - 1) * p + 1.0) / d;
            break;
        }
        case FidelityMode::guaranteed: {
            SimulatedSource source(sys, seed, options.threads);
            FidelityEstimate f = fidelity_from_p_estimate(estimate_p(source, options.epsilon, options.delta), d);
            entry.f_hat = f.f_hat;
            entry.epsilon = f.epsilon;
            entry.delta = f.delta;
            samples += f.p.samples_used;
            break;
        }
        case FidelityMode::calibrated: {
            SimulatedSource source(sys, seed, options.threads);
            PEstimate p = estimate_p_calibrated(source, *spam, options.shots_per_experiment, options.delta, 1);
            FidelityEstimate f = fidelity_from_p_estimate(p, d);
            entry.f_hat = f.f_hat;
            entry.epsilon = f.epsilon;
            entry.delta = f.delta;
            samples += p.samples_used;
            break;
        }
    }
    return entry;
}

}  // namespace

PipelineReport reconstruct_from_rb(const RBSystem &system, const PipelineOptions &options) {
    const int n = system.num_qubits();
    std::vector<CliffordElement> cliffords =
        options.cliffords.empty() ? default_reconstruction_cliffords(n, split_seed(options.seed, 0)) : options.cliffords;

    PipelineReport report;
    SpamCalibration spam;
    if (options.mode == FidelityMode::calibrated) {
        SimulatedSource source(system, split_seed(options.seed, 1), options.threads);
        spam = calibrate_spam(source, options.shots_per_experiment);
        report.samples_used += spam.samples_used;
    }
    const RBSystem noise_system = system.with_e_map(PauliLiouvilleMap::identity(n));
    report.en_fidelities.n = n;
    report.n_fidelities.n = n;
    for (size_t i = 0; i < cliffords.size(); i++) {
        report.en_fidelities.entries.push_back(measure_fidelity(
            system, cliffords[i], options, &spam, split_seed(options.seed, 2 + 2 * i), report.samples_used));
        report.n_fidelities.entries.push_back(measure_fidelity(
            noise_system, cliffords[i], options, &spam, split_seed(options.seed, 3 + 2 * i), report.samples_used));
    }
    report.en_prime = reconstruct_unital(report.en_fidelities, options.consistency_tolerance);
    report.n_prime = reconstruct_unital(report.n_fidelities, options.consistency_tolerance);
    report.e_prime = deconvolve_noise(report.en_prime.map, report.n_prime.map, options.deconvolution);
    try {
        report.conditioning = inversion_conditioning(report.n_prime.map, report.n_prime.perturbation_bound);
    } catch (const SingularMapError &err) {
        // Only reachable with the pseudo-inverse fallback.
        report.conditioning.kappa = err.condition_number;
        report.conditioning.smallest_singular_value = err.smallest_singular_value;
        report.conditioning.relative_error_bound = std::numeric_limits<double>::infinity();
    }
    return report;
}

}  // namespace rbtomo
