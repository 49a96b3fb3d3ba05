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

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "pauli_tables.h"
#include "rbtomo/errors.h"

namespace rbtomo {

namespace {

constexpr int kScanPoints = 2000;
constexpr int kInnerScanPoints = 64;
constexpr int kBisectionSteps = 80;

void check_unit(double x, const char *name) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ValidationError(std::string(name) + " must lie in [0, 1], got " + std::to_string(x));
    }
}

double composed_lo(double a, double b) {
    return a * b - 2.0 * std::sqrt((1.0 - a) * a * (1.0 - b) * b) - (1.0 - a) * (1.0 - b);
}

double composed_hi(double a, double b) {
    // (sqrt(ab) + sqrt((1 - a)(1 - b)))^2 is exactly 1 at a = b; rounding would lose that.
    if (a == b) {
        return 1.0;
    }
    return a * b + 2.0 * std::sqrt((1.0 - a) * a * (1.0 - b) * b) + (1.0 - a) * (1.0 - b);
}

// Positive when chi_a = a is incompatible with every chi_ab in [ab_lo, ab_hi] at this b.
double gap(double a, double b, double ab_lo, double ab_hi) {
    double lo = std::max(0.0, composed_lo(a, b));
    double hi = std::min(1.0, composed_hi(a, b));
    return std::max(lo - ab_hi, ab_lo - hi);
}

struct Feasibility {
    double ab_lo, ab_hi, b_lo, b_hi;

    double operator()(double a) const {
        if (b_lo == b_hi) {
            return gap(a, b_lo, ab_lo, ab_hi);
        }
        auto f = [&](double b) {
            return gap(a, b, ab_lo, ab_hi);
        };
        double best_b = b_lo;
        double best = f(b_lo);
        for (int i = 1; i <= kInnerScanPoints; i++) {
            double b = b_lo + (b_hi - b_lo) * i / kInnerScanPoints;
            double v = f(b);
            if (v < best) {
                best = v;
                best_b = b;
            }
        }
        const double step = (b_hi - b_lo) / kInnerScanPoints;
        auto [b, v] = boost::math::tools::brent_find_minima(
            f, std::max(b_lo, best_b - step), std::min(b_hi, best_b + step), std::numeric_limits<double>::digits);
        (void)b;
        return std::min(best, v);
    }
};

// Boundary between an infeasible point `out` and a feasible point `in`.
double bisect_boundary(const Feasibility &g, double out, double in) {
    for (int i = 0; i < kBisectionSteps && out != in; i++) {
        double mid = 0.5 * (out + in);
        if (mid == out || mid == in) {
            break;
        }
        if (g(mid) <= 0.0) {
            in = mid;
        } else {
            out = mid;
        }
    }
    return in;
}

Interval feasible_hull(const Feasibility &g) {
    std::vector<double> grid(kScanPoints + 1);
    std::vector<double> vals(kScanPoints + 1);
    int best = 0;
    for (int i = 0; i <= kScanPoints; i++) {
        grid[static_cast<size_t>(i)] = static_cast<double>(i) / kScanPoints;
        vals[static_cast<size_t>(i)] = g(grid[static_cast<size_t>(i)]);
        if (vals[static_cast<size_t>(i)] < vals[static_cast<size_t>(best)]) {
            best = i;
        }
    }
    // Narrow feasible sets can fall between grid points; polish the minimizer.
    double a_star = grid[static_cast<size_t>(best)];
    if (vals[static_cast<size_t>(best)] > 0.0) {
        const double step = 1.0 / kScanPoints;
        auto [a, v] = boost::math::tools::brent_find_minima(
            [&](double x) {
                return g(x);
            },
            std::max(0.0, a_star - step), std::min(1.0, a_star + step), std::numeric_limits<double>::digits);
        if (v > 1e-15) {
            return Interval{0.0, 0.0, false};
        }
        a_star = a;
    }
    int first = -1, last = -1;
    for (int i = 0; i <= kScanPoints; i++) {
        if (vals[static_cast<size_t>(i)] <= 0.0) {
            if (first < 0) {
                first = i;
            }
            last = i;
        }
    }
    Interval out;
    if (first < 0) {
        // Feasible set lives strictly between two grid points around a_star.
        int below = static_cast<int>(std::floor(a_star * kScanPoints));
        below = std::clamp(below, 0, kScanPoints);
        int above = std::min(kScanPoints, below + 1);
        out.lo = bisect_boundary(g, grid[static_cast<size_t>(below)], a_star);
        out.hi = bisect_boundary(g, grid[static_cast<size_t>(above)], a_star);
    } else {
        double lo_in = grid[static_cast<size_t>(first)];
        double hi_in = grid[static_cast<size_t>(last)];
        if (g(a_star) <= 0.0) {
            lo_in = std::min(lo_in, a_star);
            hi_in = std::max(hi_in, a_star);
        }
        out.lo = first == 0 && lo_in == 0.0 ? 0.0 : bisect_boundary(g, grid[static_cast<size_t>(std::max(0, first - 1))], lo_in);
        out.hi = last == kScanPoints && hi_in == 1.0
                     ? 1.0
                     : bisect_boundary(g, grid[static_cast<size_t>(std::min(kScanPoints, last + 1))], hi_in);
    }
    return out;
}

}  // namespace

Interval bound_composed_chi00(double chi_a, double chi_b) {
    check_unit(chi_a, "chi_a");
    check_unit(chi_b, "chi_b");
    return Interval{std::max(0.0, composed_lo(chi_a, chi_b)), std::min(1.0, composed_hi(chi_a, chi_b)), true};
}

Interval bound_deconvolved_chi00(double chi_ab, double chi_b) {
    check_unit(chi_ab, "chi_ab");
    check_unit(chi_b, "chi_b");
    if (chi_b == 1.0) {
        return Interval{chi_ab, chi_ab, true};
    }
    if (chi_ab == 1.0) {
        return Interval{chi_b, chi_b, true};
    }
    return feasible_hull(Feasibility{chi_ab, chi_ab, chi_b, chi_b});
}

Interval bound_deconvolved_chi00_box(double ab_lo, double ab_hi, double b_lo, double b_hi) {
    for (double x : {ab_lo, ab_hi, b_lo, b_hi}) {
        check_unit(x, "chi00 range endpoint");
    }
    if (ab_lo > ab_hi || b_lo > b_hi) {
        throw ValidationError("chi00 ranges must satisfy lo <= hi");
    }
    if (ab_lo == ab_hi && b_lo == b_hi) {
        return bound_deconvolved_chi00(ab_lo, b_lo);
    }
    return feasible_hull(Feasibility{ab_lo, ab_hi, b_lo, b_hi});
}

Interval mgj_bound_chi00(double chi_ab, double chi_b, int d) {
    check_unit(chi_ab, "chi_ab");
    check_unit(chi_b, "chi_b");
    if (chi_b == 0.0) {
        throw ValidationError("the earlier bound divides by chi_b, which is zero");
    }
    if (d < 2) {
        throw ValidationError("dimension must be at least 2");
    }
    const double d2 = static_cast<double>(d) * d;
    const double centre = (d2 - 1.0) * chi_ab / (d2 * chi_b);
    const double e = std::abs(chi_b - centre) + ((d2 - 1.0) / d2 - chi_b);
    Interval out{std::clamp(centre - e, 0.0, 1.0), std::clamp(centre + e, 0.0, 1.0), e >= 0.0};
    Interval ours = bound_deconvolved_chi00(chi_ab, chi_b);
    if (!ours.valid) {
        out.valid = false;
    } else {
        const double f_a_min = fidelity_from_chi00(ours.lo, d);
        const double f_b = fidelity_from_chi00(chi_b, d);
        out.valid = out.valid && f_a_min >= 2.0 * f_b - 1.0;
    }
    return out;
}

// ---------------------------------------------------------------------------

double LinearCombination::one_norm() const {
    double s = 0.0;
    for (const auto &t : terms) {
        s += std::abs(t.beta);
    }
    return s;
}

double LinearCombination::beta_sum() const {
    double s = 0.0;
    for (const auto &t : terms) {
        s += t.beta;
    }
    return s;
}

RealMatrix LinearCombination::pl() const {
    const Eigen::Index dim = Eigen::Index{1} << (2 * n);
    RealMatrix m = RealMatrix::Zero(dim, dim);
    for (const auto &t : terms) {
        m += t.beta * t.element.pl().matrix();
    }
    return m;
}

namespace {

std::vector<CombinationTerm> t_terms(int n, int qubit) {
    return {
        {0.5, CliffordElement::identity(n)},
        {(1.0 - std::sqrt(2.0)) / 2.0, CliffordElement::pauli(PauliOperator::single(n, qubit, 'Z'))},
        {1.0 / std::sqrt(2.0), CliffordElement::phase(n, qubit)},
    };
}

std::string term_key(const CliffordElement &c) {
    std::string key;
    for (const auto &row : c.tableau_rows()) {
        key += row;
        key += ';';
    }
    for (bool b : c.phase_bits()) {
        key += b ? '1' : '0';
    }
    return key;
}

}  // namespace

LinearCombination decompose_T() {
    LinearCombination combo;
    combo.n = 1;
    combo.terms = t_terms(1, 0);
    combo.t_count = 1;
    return combo;
}

LinearCombination decompose_circuit(int n, const std::vector<CircuitGate> &gates, const DecomposeOptions &options) {
    if (n < 1) {
        throw ValidationError("circuit needs at least one qubit");
    }
    LinearCombination combo;
    combo.n = n;
    combo.terms.push_back({1.0, CliffordElement::identity(n)});
    for (const auto &gate : gates) {
        if (gate.kind == CircuitGate::Kind::clifford) {
            if (gate.clifford.num_qubits() != n) {
                throw ValidationError("Clifford gate acts on the wrong number of qubits");
            }
            for (auto &t : combo.terms) {
                t.element = clifford_compose(gate.clifford, t.element);
            }
            combo.clifford_count++;
            continue;
        }
        if (gate.qubit < 0 || gate.qubit >= n) {
            throw ValidationError("T gate qubit " + std::to_string(gate.qubit) + " is out of range");
        }
        if (++combo.t_count > options.t_max) {
            throw ValidationError(
                "circuit has more than t_max = " + std::to_string(options.t_max) + " T gates");
        }
        std::vector<CombinationTerm> next;
        next.reserve(combo.terms.size() * 3);
        const auto factors = t_terms(n, gate.qubit);
        for (const auto &t : combo.terms) {
            for (const auto &f : factors) {
                next.push_back({t.beta * f.beta, clifford_compose(f.element, t.element)});
            }
        }
        combo.terms = std::move(next);
    }
    if (options.merge) {
        std::map<std::string, size_t> index;
        std::vector<CombinationTerm> merged;
        for (auto &t : combo.terms) {
            auto [it, inserted] = index.emplace(term_key(t.element), merged.size());
            if (inserted) {
                merged.push_back(std::move(t));
            } else {
                merged[it->second].beta += t.beta;
            }
        }
        std::erase_if(merged, [](const CombinationTerm &t) {
            return std::abs(t.beta) < 1e-15;
        });
        combo.terms = std::move(merged);
    }
    return combo;
}

namespace {

// A unitary (up to global phase) with the conjugation action of `c`, read off the rank-one
// Choi matrix sum_rc |r><c| (x) C(|r><c|) = |v><v| with v = sum_r |r> (x) U|r>.
ComplexMatrix clifford_unitary(const CliffordElement &c) {
    const int n = c.num_qubits();
    const Eigen::Index d = Eigen::Index{1} << n;
    const auto &paulis = dense_paulis(n);
    const RealMatrix &pl = c.pl().matrix();
    ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
    for (Eigen::Index r = 0; r < d; r++) {
        for (Eigen::Index col = 0; col < d; col++) {
            ComplexMatrix image = ComplexMatrix::Zero(d, d);
            for (Eigen::Index i = 0; i < pl.cols(); i++) {
                // tr(P_i |r><col|) / d
                Complex coeff = paulis[static_cast<size_t>(i)](col, r) / static_cast<double>(d);
                if (coeff == Complex(0.0)) {
                    continue;
                }
                for (Eigen::Index j = 0; j < pl.rows(); j++) {
                    if (pl(j, i) != 0.0) {
                        image += coeff * pl(j, i) * paulis[static_cast<size_t>(j)];
                    }
                }
            }
            choi.block(r * d, col * d, d, d) = image;
        }
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(choi);
    ComplexVector v = es.eigenvectors().col(d * d - 1) * std::sqrt(es.eigenvalues()(d * d - 1));
    ComplexMatrix u(d, d);
    for (Eigen::Index r = 0; r < d; r++) {
        u.col(r) = v.segment(r * d, d);
    }
    return u;
}

}  // namespace

ComplexMatrix circuit_unitary(int n, const std::vector<CircuitGate> &gates) {
    if (n < 1 || n > kMaxDenseQubits) {
        throw ValidationError("dense circuit unitaries support 1 <= n <= 3 qubits");
    }
    const Eigen::Index d = Eigen::Index{1} << n;
    ComplexMatrix u = ComplexMatrix::Identity(d, d);
    for (const auto &gate : gates) {
        if (gate.kind == CircuitGate::Kind::clifford) {
            if (gate.clifford.num_qubits() != n) {
                throw ValidationError("Clifford gate acts on the wrong number of qubits");
            }
            u = clifford_unitary(gate.clifford) * u;
            continue;
        }
        if (gate.qubit < 0 || gate.qubit >= n) {
            throw ValidationError("T gate qubit is out of range");
        }
        const Eigen::Index bit = Eigen::Index{1} << (n - 1 - gate.qubit);
        ComplexMatrix t = ComplexMatrix::Identity(d, d);
        for (Eigen::Index k = 0; k < d; k++) {
            if (k & bit) {
                t(k, k) = std::polar(1.0, M_PI / 4.0);
            }
        }
        u = t * u;
    }
    return u;
}

FidelityEstimate fidelity_from_combination(
    const std::vector<FidelityEstimate> &estimates, const LinearCombination &combo, int d) {
    if (estimates.size() != combo.terms.size()) {
        throw ValidationError(
            "got " + std::to_string(estimates.size()) + " fidelity estimates for " +
            std::to_string(combo.terms.size()) + " terms");
    }
    FidelityEstimate out;
    double beta_sum = 0.0;
    for (size_t i = 0; i < estimates.size(); i++) {
        const double beta = combo.terms[i].beta;
        out.f_hat += beta * estimates[i].f_hat;
        out.epsilon += std::abs(beta) * estimates[i].epsilon;
        out.delta += estimates[i].delta;
        beta_sum += beta;
    }
    out.f_hat += (1.0 - beta_sum) / (d + 1.0);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

FidelityEstimate rb_fidelity(
    const RBSystem &sys, double eps_f, double delta, const NonCliffordOptions &options, std::uint64_t seed,
    std::uint64_t &samples) {
    const int d = 1 << sys.num_qubits();
    if (options.analytic) {
        PEstimate p;
        p.p_hat = decay_model(sys).p;
        p.delta = delta;
        return fidelity_from_p_estimate(p, d);
    }
    const double eps_p = eps_f * d / (d - 1.0);
    if (!(eps_p < 1.0)) {
        throw ValidationError("fidelity accuracy " + std::to_string(eps_f) + " is too loose for the decay estimator");
    }
    PEstimate p;
    if (options.sampler == SamplerKind::synthetic) {
        auto source = SyntheticSource::from_system(sys, seed);
        p = estimate_p(source, eps_p, delta, options.estimate);
    } else {
        SimulatedSource source(sys, seed, options.threads);
        p = estimate_p(source, eps_p, delta, options.estimate);
    }
    samples += p.samples_used;
    return fidelity_from_p_estimate(p, d);
}

}  // namespace

NonCliffordBound bound_nonclifford_fidelity(
    const RBSystem &system, const LinearCombination &combo, double epsilon, double delta,
    const NonCliffordOptions &options) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0)) {
        throw ValidationError("epsilon and delta must lie in (0, 1)");
    }
    if (combo.terms.empty() || combo.n != system.num_qubits()) {
        throw ValidationError("combination must be non-empty and match the system's qubit count");
    }
    const int n = system.num_qubits();
    const int d = 1 << n;
    const double eps_term = epsilon / combo.one_norm();
    const double delta_term = delta / static_cast<double>(combo.terms.size());

    NonCliffordBound out;
    std::vector<FidelityEstimate> per_term;
    for (size_t i = 0; i < combo.terms.size(); i++) {
        per_term.push_back(rb_fidelity(
            system.with_target(combo.terms[i].element), eps_term, delta_term, options, split_seed(options.seed, 1 + i),
            out.samples_used));
        if (!options.analytic) {
            per_term.back().epsilon = eps_term;
        }
    }
    out.composed = fidelity_from_combination(per_term, combo, d);
    const RBSystem noise_system =
        system.with_e_map(PauliLiouvilleMap::identity(n)).with_target(CliffordElement::identity(n));
    out.noise = rb_fidelity(noise_system, epsilon, delta, options, split_seed(options.seed, 0), out.samples_used);
    if (!options.analytic) {
        out.noise.epsilon = epsilon;
    }

    auto to_chi = [d](double f) {
        return chi00_from_fidelity(std::clamp(f, 1.0 / (d + 1.0), 1.0), d);
    };
    const double ab_lo = to_chi(out.composed.f_hat - out.composed.epsilon);
    const double ab_hi = to_chi(out.composed.f_hat + out.composed.epsilon);
    const double b_lo = to_chi(out.noise.f_hat - out.noise.epsilon);
    const double b_hi = to_chi(out.noise.f_hat + out.noise.epsilon);
    out.chi00 = bound_deconvolved_chi00_box(ab_lo, ab_hi, b_lo, b_hi);
    if (out.chi00.valid) {
        out.fidelity = Interval{fidelity_from_chi00(out.chi00.lo, d), fidelity_from_chi00(out.chi00.hi, d), true};
    } else {
        out.fidelity = Interval{0.0, 0.0, false};
    }
    return out;
}

}  // namespace rbtomo
