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

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <set>

#include "parallel.h"
#include "rbtomo/errors.h"

namespace rbtomo {

namespace {

constexpr std::uint64_t kChunkSize = 8192;

void apply_signed_permutation(const std::vector<SignedImage> &perm, const RealVector &in, RealVector &out) {
    for (size_t i = 0; i < perm.size(); i++) {
        out(perm[i].target) = perm[i].sign * in(static_cast<Eigen::Index>(i));
    }
}

double outcome_probability(double expectation) {
    if (expectation > 1.0 + 1e-9 || expectation < -1.0 - 1e-9) {
        throw NumericalError(
            "survival expectation " + std::to_string(expectation) + " lies outside [-1, 1]; the maps are not physical");
    }
    return std::clamp((1.0 + expectation) / 2.0, 0.0, 1.0);
}

// Draws random sequences and returns their exact survival expectations.
class SequenceSampler {
   public:
    explicit SequenceSampler(const RBSystem &system)
        : system_(system), dim_(system.e_map().dim()), observable_(system.observable_index()) {
        en_ = system.e_map().matrix() * system.noise_map().matrix();
        if (system.num_qubits() == 1) {
            build_single_qubit_tables();
        }
    }

    double draw(int k, Rng &rng) const {
        return system_.num_qubits() == 1 ? draw_single_qubit(k, rng) : draw_general(k, rng);
    }

    // Exact expectation for an explicit single-qubit sequence of canonical IDs.
    double evaluate_ids(const std::vector<int> &ids) const {
        Eigen::Vector4d v = system_.rho();
        int comp = identity_id_;
        for (int c : ids) {
            v = en_c_[static_cast<size_t>(c)] * v;
            comp = mult_[static_cast<size_t>(target_id_)][static_cast<size_t>(mult_[static_cast<size_t>(c)][static_cast<size_t>(comp)])];
        }
        v = n_c_[static_cast<size_t>(inv_[static_cast<size_t>(comp)])] * v;
        return system_.meas_scale() * v(observable_);
    }

   private:
    void build_single_qubit_tables() {
        const auto &group = single_qubit_cliffords();
        target_id_ = single_qubit_clifford_id(system_.target());
        identity_id_ = single_qubit_clifford_id(CliffordElement::identity(1));
        for (size_t a = 0; a < 24; a++) {
            for (size_t b = 0; b < 24; b++) {
                mult_[a][b] = single_qubit_clifford_id(clifford_compose(group[a], group[b]));
            }
            inv_[a] = single_qubit_clifford_id(clifford_invert(group[a]));
            en_c_[a] = en_ * group[a].pl().matrix();
            n_c_[a] = system_.noise_map().matrix() * group[a].pl().matrix();
        }
    }

    double draw_single_qubit(int k, Rng &rng) const {
        std::uniform_int_distribution<int> pick(0, 23);
        Eigen::Vector4d v = system_.rho();
        int comp = identity_id_;
        for (int i = 0; i < k; i++) {
            int c = pick(rng);
            v = en_c_[static_cast<size_t>(c)] * v;
            comp = mult_[static_cast<size_t>(target_id_)][static_cast<size_t>(mult_[static_cast<size_t>(c)][static_cast<size_t>(comp)])];
        }
        v = n_c_[static_cast<size_t>(inv_[static_cast<size_t>(comp)])] * v;
        return system_.meas_scale() * v(observable_);
    }

    double draw_general(int k, Rng &rng) const {
        const int n = system_.num_qubits();
        RealVector v = system_.rho();
        RealVector tmp(dim_);
        CliffordElement comp = CliffordElement::identity(n);
        for (int i = 0; i < k; i++) {
            CliffordElement c = sample_uniform_clifford(n, rng);
            apply_signed_permutation(c.signed_permutation(), v, tmp);
            v.noalias() = en_ * tmp;
            comp = clifford_compose(system_.target(), clifford_compose(c, comp));
        }
        apply_signed_permutation(clifford_invert(comp).signed_permutation(), v, tmp);
        return system_.meas_scale() * system_.noise_map().matrix().row(observable_).dot(tmp);
    }

    const RBSystem &system_;
    int dim_;
    std::uint32_t observable_;
    RealMatrix en_;

    int target_id_ = 0;
    int identity_id_ = 0;
    std::array<std::array<int, 24>, 24> mult_{};
    std::array<int, 24> inv_{};
    std::array<Eigen::Matrix4d, 24> en_c_{};
    std::array<Eigen::Matrix4d, 24> n_c_{};
};

// Sum of +-1 single-shot outcomes over m independent sequences, chunked for determinism.
std::int64_t sample_outcome_sum(const SequenceSampler &sampler, int k, std::uint64_t m, std::uint64_t seed, int threads) {
    const std::uint64_t chunks = (m + kChunkSize - 1) / kChunkSize;
    std::vector<std::int64_t> sums(chunks, 0);
    parallel_for(chunks, threads, [&](std::size_t chunk) {
        Rng rng(split_seed(seed, chunk));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const std::uint64_t begin = chunk * kChunkSize;
        const std::uint64_t end = std::min(m, begin + kChunkSize);
        std::int64_t s = 0;
        for (std::uint64_t i = begin; i < end; i++) {
            double prob = outcome_probability(sampler.draw(k, rng));
            s += unif(rng) < prob ? 1 : -1;
        }
        sums[chunk] = s;
    });
    std::int64_t total = 0;
    for (auto s : sums) {
        total += s;
    }
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------

RBSystem::RBSystem(const RBConfig &config)
    : n_(config.n), prep_(config.prep), meas_(config.meas) {
    if (n_ < 1 || n_ > kMaxDenseQubits) {
        throw ValidationError("RB simulation supports 1 <= n <= 3 qubits, got n = " + std::to_string(n_));
    }
    if (channel_qubits(config.e_map) != n_ || channel_qubits(config.noise_map) != n_) {
        throw ValidationError("e_map and noise_map must act on " + std::to_string(n_) + " qubits");
    }
    e_ = make_channel(config.e_map);
    noise_ = make_channel(config.noise_map);
    target_ = config.target.value_or(CliffordElement::identity(n_));
    if (config.shots < 1) {
        throw ValidationError("shots must be at least 1");
    }
    validate();
}

RBSystem::RBSystem(PauliLiouvilleMap e_map, PauliLiouvilleMap noise_map, CliffordElement target, PrepSpec prep, MeasSpec meas)
    : n_(e_map.num_qubits()),
      e_(std::move(e_map)),
      noise_(std::move(noise_map)),
      target_(std::move(target)),
      prep_(prep),
      meas_(std::move(meas)) {
    validate();
}

void RBSystem::validate() {
    if (noise_.num_qubits() != n_ || target_.num_qubits() != n_) {
        throw ValidationError("E, N and the target must act on the same number of qubits");
    }
    if (!e_.is_trace_preserving(1e-8) || !noise_.is_trace_preserving(1e-8)) {
        throw ValidationError("the RB decay model needs trace-preserving E and N");
    }
    if (!(prep_.eta >= 0.0 && prep_.eta < 1.0)) {
        throw ValidationError("preparation error must lie in [0, 1)");
    }
    if (!(meas_.eta >= 0.0 && meas_.eta <= 1.0) || meas_.eta == 0.5) {
        throw ValidationError("assignment error must lie in [0, 1] and differ from 1/2");
    }
    if (meas_.observable.empty()) {
        meas_.observable = std::string(static_cast<size_t>(n_), 'Z');
    }
    PauliOperator obs = PauliOperator::from_label(meas_.observable);
    if (obs.n != n_ || obs.phase != 0) {
        throw ValidationError("observable '" + meas_.observable + "' must be an unsigned " + std::to_string(n_) + "-qubit label");
    }
    if (obs.x != 0 || obs.is_identity_label()) {
        // Any other choice gives tr[rho0 M] = tr[M] / d and no decay signal.
        throw ValidationError("observable must be a non-identity product of I and Z");
    }
    observable_index_ = static_cast<std::uint32_t>(obs.index());
    const int dim = e_.dim();
    rho_ = RealVector::Zero(dim);
    for (int k = 0; k < dim; k++) {
        if (pauli_from_index(static_cast<std::uint64_t>(k), n_).x == 0) {
            rho_(k) = k == 0 ? 1.0 : 1.0 - prep_.eta;
        }
    }
}

RBSystem RBSystem::with_target(const CliffordElement &target) const {
    return RBSystem(e_, noise_, target, prep_, meas_);
}

RBSystem RBSystem::with_e_map(const PauliLiouvilleMap &e) const {
    return RBSystem(e, noise_, target_, prep_, meas_);
}

RBSystem RBSystem::noise_only() const {
    return RBSystem(PauliLiouvilleMap::identity(n_), noise_, CliffordElement::identity(n_), prep_, meas_);
}

RBSystem RBSystem::pauli_shifted() const {
    auto x0 = CliffordElement::pauli(PauliOperator::single(n_, 0, 'X'));
    return with_target(clifford_compose(x0, target_));
}

double RBSystem::expectation(const RealMatrix &pl) const {
    return meas_scale() * pl.row(observable_index_).dot(rho_);
}

DecayModel decay_model(const RBSystem &system) {
    const RealMatrix lambda =
        system.e_map().matrix() * system.noise_map().matrix() * system.target().pl().matrix().transpose();
    const double d2 = system.e_map().dim();
    DecayModel m;
    m.p = (lambda.trace() - lambda(0, 0)) / (d2 - 1.0);
    const auto row = system.noise_map().matrix().row(system.observable_index());
    const RealVector &rho = system.rho();
    m.b0 = system.meas_scale() * row(0) * rho(0);
    m.a0 = system.meas_scale() * row.tail(row.size() - 1).dot(rho.tail(rho.size() - 1));
    return m;
}

double analytic_F_k(const RBSystem &system, int k) {
    if (k < 0) {
        throw ValidationError("sequence length must be non-negative");
    }
    DecayModel m = decay_model(system);
    return m.a0 * std::pow(m.p, k) + m.b0;
}

SequenceDesign design_sequence(int k, const CliffordElement &target, Rng &rng) {
    if (k < 1) {
        throw ValidationError("sequence length must be at least 1");
    }
    const int n = target.num_qubits();
    SequenceDesign design;
    CliffordElement comp = CliffordElement::identity(n);
    for (int i = 0; i < k; i++) {
        CliffordElement c = sample_uniform_clifford(n, rng);
        comp = clifford_compose(target, clifford_compose(c, comp));
        design.cliffords.push_back(std::move(c));
    }
    design.inversion = clifford_invert(comp);
    return design;
}

double survival_expectation(const RBSystem &system, const SequenceDesign &design) {
    if (design.inversion.num_qubits() != system.num_qubits()) {
        throw ValidationError("sequence and system qubit counts differ");
    }
    const RealMatrix &e = system.e_map().matrix();
    const RealMatrix &noise = system.noise_map().matrix();
    RealVector v = system.rho();
    RealVector tmp(v.size());
    for (const auto &c : design.cliffords) {
        apply_signed_permutation(c.signed_permutation(), v, tmp);
        v = e * (noise * tmp);
    }
    apply_signed_permutation(design.inversion.signed_permutation(), v, tmp);
    v = noise * tmp;
    return system.meas_scale() * v(system.observable_index());
}

double exhaustive_sequence_average(const RBSystem &system, int k) {
    if (system.num_qubits() != 1) {
        throw ValidationError("exhaustive sequence averages are limited to one qubit");
    }
    if (k < 1 || k > 5) {
        throw ValidationError("exhaustive sequence averages need 1 <= k <= 5");
    }
    SequenceSampler sampler(system);
    std::vector<int> ids(static_cast<size_t>(k), 0);
    double total = 0.0;
    std::uint64_t count = 0;
    while (true) {
        total += sampler.evaluate_ids(ids);
        count++;
        size_t pos = 0;
        while (pos < ids.size() && ++ids[pos] == 24) {
            ids[pos] = 0;
            pos++;
        }
        if (pos == ids.size()) {
            break;
        }
    }
    return total / static_cast<double>(count);
}

DecayRecord simulate_F_k(const RBConfig &config, int k, std::uint64_t n_sequences, SimulationMode mode) {
    RBSystem system(config);
    return simulate_F_k(system, k, n_sequences, config.shots, config.seed, mode, config.threads);
}

DecayRecord simulate_F_k(
    const RBSystem &system, int k, std::uint64_t n_sequences, int shots, std::uint64_t seed, SimulationMode mode,
    int threads) {
    if (k < 1) {
        throw ValidationError("sequence length must be at least 1");
    }
    DecayRecord rec;
    rec.k = k;
    if (mode == SimulationMode::analytic) {
        rec.mean = analytic_F_k(system, k);
        return rec;
    }
    if (n_sequences < 1 || shots < 1) {
        throw ValidationError("sampled mode needs at least one sequence and one shot");
    }
    SequenceSampler sampler(system);
    const std::uint64_t chunks = (n_sequences + kChunkSize - 1) / kChunkSize;
    std::vector<double> sums(chunks, 0.0), sq_sums(chunks, 0.0);
    const std::uint64_t base = split_seed(seed, static_cast<std::uint64_t>(k));
    parallel_for(chunks, threads, [&](std::size_t chunk) {
        Rng rng(split_seed(base, chunk));
        std::binomial_distribution<int> binom;
        const std::uint64_t begin = chunk * kChunkSize;
        const std::uint64_t end = std::min(n_sequences, begin + kChunkSize);
        double s = 0.0, sq = 0.0;
        for (std::uint64_t i = begin; i < end; i++) {
            double prob = outcome_probability(sampler.draw(k, rng));
            int ups = binom(rng, std::binomial_distribution<int>::param_type(shots, prob));
            double mean = (2.0 * ups - shots) / shots;
            s += mean;
            sq += mean * mean;
        }
        sums[chunk] = s;
        sq_sums[chunk] = sq;
    });
    double s = 0.0, sq = 0.0;
    for (std::uint64_t c = 0; c < chunks; c++) {
        s += sums[c];
        sq += sq_sums[c];
    }
    const double nseq = static_cast<double>(n_sequences);
    rec.mean = s / nseq;
    rec.sequences = n_sequences;
    rec.shots_per_sequence = static_cast<std::uint64_t>(shots);
    if (n_sequences > 1) {
        double var = std::max(0.0, (sq - nseq * rec.mean * rec.mean) / (nseq - 1.0));
        rec.stderr_mean = std::sqrt(var / nseq);
    }
    return rec;
}

std::uint64_t hoeffding_samples(double eps, double delta, double range) {
    if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0) || !(range > 0.0)) {
        throw ValidationError("Hoeffding sizing needs eps > 0, delta in (0, 1) and a positive range");
    }
    double m = std::ceil(range * range * std::log(2.0 / delta) / (2.0 * eps * eps));
    if (m > 1e18) {
        throw ValidationError("Hoeffding sample count overflows");
    }
    return static_cast<std::uint64_t>(m);
}

// ---------------------------------------------------------------------------
// Sources.

struct SimulatedSource::Impl {
    Impl(const RBSystem &system, std::uint64_t seed, int threads)
        : main(system),
          noise_only(system.noise_only()),
          shifted(system.pauli_shifted()),
          main_sampler(main),
          noise_sampler(noise_only),
          shifted_sampler(shifted),
          seed(seed),
          threads(threads) {
    }
    const RBSystem &system(Family f) const {
        switch (f) {
            case Family::noise_only:
                return noise_only;
            case Family::shifted:
                return shifted;
            default:
                return main;
        }
    }
    const SequenceSampler &sampler(Family f) const {
        switch (f) {
            case Family::noise_only:
                return noise_sampler;
            case Family::shifted:
                return shifted_sampler;
            default:
                return main_sampler;
        }
    }

    RBSystem main;
    RBSystem noise_only;
    RBSystem shifted;
    SequenceSampler main_sampler;
    SequenceSampler noise_sampler;
    SequenceSampler shifted_sampler;
    std::uint64_t seed;
    int threads;
};

SimulatedSource::SimulatedSource(const RBSystem &system, std::uint64_t seed, int threads)
    : impl_(std::make_unique<Impl>(system, seed, threads)) {
}

SimulatedSource::~SimulatedSource() = default;

int SimulatedSource::num_qubits() const {
    return impl_->main.num_qubits();
}

double SimulatedSource::sample_mean(Family family, int k, std::uint64_t m, std::uint64_t stream) {
    if (m == 0) {
        throw ValidationError("sample count must be positive");
    }
    std::int64_t sum = sample_outcome_sum(impl_->sampler(family), k, m, split_seed(impl_->seed, stream), impl_->threads);
    return static_cast<double>(sum) / static_cast<double>(m);
}

double SimulatedSource::exact(Family family, int k) const {
    return analytic_F_k(impl_->system(family), k);
}

SyntheticSource::SyntheticSource(int n, DecayModel main, double p_noise_only, double p_shifted, std::uint64_t seed)
    : n_(n), main_(main), p_noise_only_(p_noise_only), p_shifted_(p_shifted), seed_(seed) {
}

SyntheticSource SyntheticSource::from_system(const RBSystem &system, std::uint64_t seed) {
    DecayModel m = decay_model(system);
    return SyntheticSource(
        system.num_qubits(), m, decay_model(system.noise_only()).p, decay_model(system.pauli_shifted()).p, seed);
}

double SyntheticSource::exact(Family family, int k) const {
    double p = family == Family::main ? main_.p : (family == Family::noise_only ? p_noise_only_ : p_shifted_);
    return main_.a0 * std::pow(p, k) + main_.b0;
}

double SyntheticSource::sample_mean(Family family, int k, std::uint64_t m, std::uint64_t stream) {
    if (m == 0) {
        throw ValidationError("sample count must be positive");
    }
    Rng rng(split_seed(seed_, stream));
    std::binomial_distribution<std::uint64_t> binom(m, outcome_probability(exact(family, k)));
    std::uint64_t ups = binom(rng);
    return (2.0 * static_cast<double>(ups) - static_cast<double>(m)) / static_cast<double>(m);
}

const char *family_name(Family f) {
    switch (f) {
        case Family::noise_only:
            return "noise_only";
        case Family::shifted:
            return "shifted";
        default:
            return "main";
    }
}

// ---------------------------------------------------------------------------
// Estimation.

namespace {

class Measurer {
   public:
    Measurer(DecaySource &source, const EstimateOptions &options) : source_(source), options_(options) {
    }

    double operator()(Family f, int k, std::uint64_t m) {
        if (options_.analytic) {
            return source_.exact(f, k);
        }
        if (m > options_.max_samples_per_point) {
            throw NumericalError(
                "estimate needs " + std::to_string(m) + " samples for one point, above the configured cap of " +
                std::to_string(options_.max_samples_per_point) + "; the decay signal is too weak");
        }
        samples_ += m;
        return source_.sample_mean(f, k, m, next_stream_++);
    }

    std::uint64_t samples() const {
        return samples_;
    }

   private:
    DecaySource &source_;
    const EstimateOptions &options_;
    std::uint64_t samples_ = 0;
    std::uint64_t next_stream_ = 1;
};

struct Floor {
    Family family = Family::shifted;
    int k = 0;
};

// Pilot run at k = 1, 2, 3 on each candidate family; the fastest resolvable decay sets F_inf.
Floor choose_floor(Measurer &measure, const std::vector<Family> &candidates, std::uint64_t m_pilot, const EstimateOptions &options) {
    const double threshold = options.analytic ? 1e-12 : 5.0 * std::sqrt(2.0 / static_cast<double>(m_pilot));
    const double tolerance = options.analytic ? 1e-18 : options.k_inf_tolerance;
    Floor best;
    double best_rate = 2.0;
    for (Family f : candidates) {
        double f1 = measure(f, 1, m_pilot);
        double f2 = measure(f, 2, m_pilot);
        double f3 = measure(f, 3, m_pilot);
        if (std::abs(f2 - f1) <= threshold) {
            continue;
        }
        double rate = std::min(1.0, std::abs((f3 - f2) / (f2 - f1)));
        if (rate >= 1.0 - 1e-12) {
            continue;
        }
        if (rate < best_rate) {
            best_rate = rate;
            best.family = f;
        }
    }
    if (best_rate > 1.0) {
        best.family = Family::shifted;
        best.k = options.k_inf_fallback;
        return best;
    }
    int k = 3;
    if (best_rate > 0.0) {
        k = static_cast<int>(std::ceil(std::log(tolerance) / std::log(best_rate)));
    }
    best.k = std::clamp(k, 3, options.k_inf_cap);
    return best;
}

}  // namespace

PEstimate estimate_p(DecaySource &source, double epsilon, double delta, const EstimateOptions &options) {
    if (!(epsilon > 0.0 && epsilon < 1.0) || !(delta > 0.0 && delta < 1.0)) {
        throw ValidationError("estimate_p needs epsilon and delta in (0, 1)");
    }
    PEstimate out;
    out.epsilon = epsilon;
    out.delta = delta;
    out.delta_prime = delta / 6.0;
    Measurer measure(source, options);

    const double eps1 = options.analytic ? 0.0 : 4.0 * epsilon * epsilon;
    const std::uint64_t m1 = options.analytic ? 0 : hoeffding_samples(eps1, out.delta_prime);
    const std::uint64_t m_pilot =
        options.analytic ? 0 : std::max<std::uint64_t>(100, static_cast<std::uint64_t>(std::ceil(options.pilot_fraction * 3.0 * m1 / 9.0)));
    Floor floor = choose_floor(measure, {Family::main, Family::noise_only, Family::shifted}, m_pilot, options);
    out.k_inf = floor.k;
    out.floor_family = floor.family;

    // Lower bound a on |A0| from the noise-only family.
    double g1 = measure(Family::noise_only, 1, m1);
    double g2 = measure(Family::noise_only, 2, m1);
    double g_inf = measure(floor.family, floor.k, m1);
    double d1 = std::abs(g1 - g_inf);
    double d2 = std::abs(g2 - g_inf);
    if (d2 <= 2.0 * eps1 || d1 <= 2.0 * eps1 || d2 == 0.0) {
        throw NumericalError(
            "the noise-only family shows no resolvable decay (|F'_2 - F_inf| = " + std::to_string(d2) +
            "), so no lower bound on A0 is available");
    }
    out.a_lower = (d1 - 2.0 * eps1) * (d1 - 2.0 * eps1) / (d2 + 2.0 * eps1);

    const double eps_p = options.analytic ? 0.0 : 4.0 * epsilon * epsilon * out.a_lower;
    out.epsilon_prime = eps_p;
    // A lower bound barely above zero asks for an absurd sample count; report it before sizing.
    if (!options.analytic &&
        4.0 * std::log(2.0 / out.delta_prime) / (2.0 * eps_p * eps_p) > static_cast<double>(options.max_samples_per_point)) {
        throw NumericalError(
            "the lower bound on A0 is " + std::to_string(out.a_lower) +
            ", which needs more samples per point than the configured cap; the decay signal is too weak");
    }
    const std::uint64_t m2 = options.analytic ? 0 : hoeffding_samples(eps_p, out.delta_prime);
    out.f1 = measure(Family::main, 1, m2);
    out.f2 = measure(Family::main, 2, m2);
    out.f_inf = measure(floor.family, floor.k, m2);
    out.samples_used = measure.samples();

    const double diff1 = out.f1 - out.f_inf;
    const double diff2 = out.f2 - out.f_inf;
    if ((std::abs(diff1) + 2.0 * eps_p) / out.a_lower <= epsilon) {
        out.p_hat = 0.0;
        out.clamped_to_zero = true;
        return out;
    }
    if (std::abs(diff1) <= 2.0 * eps_p) {
        throw NumericalError("confidence interval of F_1 - F_inf contains 0 but the small-signal guard did not fire");
    }
    out.p_hat = std::clamp(diff2 / diff1, -1.0, 1.0);
    return out;
}

PEstimate estimate_p(const RBConfig &config, double epsilon, double delta, const EstimateOptions &options) {
    RBSystem system(config);
    SimulatedSource source(system, config.seed, config.threads);
    return estimate_p(source, epsilon, delta, options);
}

FidelityEstimate fidelity_from_p_estimate(const PEstimate &p, int d) {
    FidelityEstimate f;
    const double dd = d;
    f.f_hat = ((dd - 1.0) * p.p_hat + 1.0) / dd;
    f.epsilon = p.epsilon * (dd - 1.0) / dd;
    f.delta = p.delta;
    f.p = p;
    return f;
}

FidelityEstimate estimate_fidelity_to_clifford(
    const RBConfig &config, double epsilon, double delta, const EstimateOptions &options) {
    return fidelity_from_p_estimate(estimate_p(config, epsilon, delta, options), 1 << config.n);
}

SpamCalibration calibrate_spam(DecaySource &source, std::uint64_t samples_per_point, const EstimateOptions &options) {
    if (!options.analytic && samples_per_point == 0) {
        throw ValidationError("calibration needs a positive sample count");
    }
    Measurer measure(source, options);
    const std::uint64_t m_pilot = std::max<std::uint64_t>(
        100, static_cast<std::uint64_t>(std::ceil(options.pilot_fraction * samples_per_point)));
    Floor floor = choose_floor(measure, {Family::noise_only, Family::shifted}, m_pilot, options);
    double g1 = measure(Family::noise_only, 1, samples_per_point);
    double g2 = measure(Family::noise_only, 2, samples_per_point);
    double g_inf = measure(floor.family, floor.k, samples_per_point);
    SpamCalibration cal;
    cal.b0 = g_inf;
    cal.k_floor = floor.k;
    if (std::abs(g2 - g_inf) < 1e-12) {
        throw NumericalError("the noise-only family shows no decay signal; A0 cannot be calibrated");
    }
    cal.a0 = (g1 - g_inf) * (g1 - g_inf) / (g2 - g_inf);
    cal.samples_used = measure.samples();
    return cal;
}

PEstimate estimate_p_calibrated(
    DecaySource &source, const SpamCalibration &spam, std::uint64_t samples, double delta, std::uint64_t stream) {
    if (samples == 0 || !(delta > 0.0 && delta < 1.0)) {
        throw ValidationError("calibrated estimate needs samples > 0 and delta in (0, 1)");
    }
    if (spam.a0 == 0.0) {
        throw NumericalError("calibrated A0 is zero");
    }
    PEstimate out;
    out.f1 = source.sample_mean(Family::main, 1, samples, stream);
    out.f_inf = spam.b0;
    out.p_hat = std::clamp((out.f1 - spam.b0) / spam.a0, -1.0, 1.0);
    out.delta = delta;
    out.epsilon = std::sqrt(2.0 * std::log(2.0 / delta) / static_cast<double>(samples)) / std::abs(spam.a0);
    out.a_lower = std::abs(spam.a0);
    out.samples_used = samples;
    out.k_inf = spam.k_floor;
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct LinearFit {
    double a0 = 0.0;
    double b0 = 0.0;
    double sse = 0.0;
};

LinearFit fit_for_rate(const std::vector<DecayRecord> &records, const std::vector<double> &weights, double p) {
    // Weighted least squares on [p^k, 1].
    double s_xx = 0, s_x = 0, s_1 = 0, s_xy = 0, s_y = 0;
    for (size_t i = 0; i < records.size(); i++) {
        double x = std::pow(p, records[i].k);
        double y = records[i].mean;
        double w = weights[i];
        s_xx += w * x * x;
        s_x += w * x;
        s_1 += w;
        s_xy += w * x * y;
        s_y += w * y;
    }
    LinearFit f;
    double det = s_xx * s_1 - s_x * s_x;
    if (std::abs(det) < 1e-300) {
        f.b0 = s_y / s_1;
    } else {
        f.a0 = (s_xy * s_1 - s_x * s_y) / det;
        f.b0 = (s_xx * s_y - s_x * s_xy) / det;
    }
    for (size_t i = 0; i < records.size(); i++) {
        double r = records[i].mean - (f.a0 * std::pow(p, records[i].k) + f.b0);
        f.sse += weights[i] * r * r;
    }
    return f;
}

}  // namespace

DecayFit fit_decay(const std::vector<DecayRecord> &records) {
    std::set<int> ks;
    for (const auto &r : records) {
        ks.insert(r.k);
    }
    if (ks.size() < 3) {
        throw ValidationError("fit_decay needs at least 3 distinct sequence lengths");
    }
    bool weighted = std::all_of(records.begin(), records.end(), [](const DecayRecord &r) {
        return r.stderr_mean > 0.0;
    });
    std::vector<double> weights;
    for (const auto &r : records) {
        weights.push_back(weighted ? 1.0 / (r.stderr_mean * r.stderr_mean) : 1.0);
    }
    auto sse = [&](double p) {
        return fit_for_rate(records, weights, p).sse;
    };
    const int grid = 800;
    const double lim = 1.0 - 1e-9;
    int best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; i++) {
        double p = -lim + 2.0 * lim * i / grid;
        double v = sse(p);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double lo = -lim + 2.0 * lim * std::max(0, best - 1) / grid;
    double hi = -lim + 2.0 * lim * std::min(grid, best + 1) / grid;
    auto [p, val] = boost::math::tools::brent_find_minima(sse, lo, hi, std::numeric_limits<double>::digits);
    LinearFit f = fit_for_rate(records, weights, p);
    return DecayFit{f.a0, f.b0, p, std::sqrt(val)};
}

}  // namespace rbtomo
