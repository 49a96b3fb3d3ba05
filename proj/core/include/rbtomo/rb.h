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

#ifndef RBTOMO_RB_H
#define RBTOMO_RB_H

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rbtomo/channel.h"
#include "rbtomo/clifford.h"

namespace rbtomo {

/// |0...0> mixed with the maximally mixed state: rho = (1 - eta) |0><0| + eta I / d.
struct PrepSpec {
    double eta = 0.0;
};

/// A Z-type Pauli observable read out with symmetric assignment error eta per shot.
struct MeasSpec {
    /// Empty means Z on every qubit.
    std::string observable;
    double eta = 0.0;
};

struct RBConfig {
    int n = 1;
    ChannelSpec e_map = channel_spec::Depolarizing{1, 1.0};
    ChannelSpec noise_map = channel_spec::Depolarizing{1, 1.0};
    /// Ideal target U; identity when unset.
    std::optional<CliffordElement> target;
    PrepSpec prep;
    MeasSpec meas;
    int shots = 1;
    std::uint64_t seed = 0;
    /// Worker threads for sampling; 0 picks the hardware concurrency.
    int threads = 0;
};

/// Parameters of F_k = A0 p^k + B0 for one sequence family.
struct DecayModel {
    double a0 = 0.0;
    double b0 = 0.0;
    double p = 0.0;
};

/// A validated RB setup with all maps in PL form.
class RBSystem {
   public:
    explicit RBSystem(const RBConfig &config);
    RBSystem(
        PauliLiouvilleMap e_map,
        PauliLiouvilleMap noise_map,
        CliffordElement target,
        PrepSpec prep = {},
        MeasSpec meas = {});

    int num_qubits() const {
        return n_;
    }
    const PauliLiouvilleMap &e_map() const {
        return e_;
    }
    const PauliLiouvilleMap &noise_map() const {
        return noise_;
    }
    const CliffordElement &target() const {
        return target_;
    }
    const PrepSpec &prep() const {
        return prep_;
    }
    const MeasSpec &meas() const {
        return meas_;
    }
    /// Pauli coordinates tr[rho P_k] of the prepared state.
    const RealVector &rho() const {
        return rho_;
    }
    std::uint32_t observable_index() const {
        return observable_index_;
    }
    /// (1 - 2 eta_meas).
    double meas_scale() const {
        return 1.0 - 2.0 * meas_.eta;
    }

    RBSystem with_target(const CliffordElement &target) const;
    RBSystem with_e_map(const PauliLiouvilleMap &e) const;
    /// E replaced by the identity and U by the identity.
    RBSystem noise_only() const;
    /// Target replaced by X_0 U, which drives p toward -1/(d^2 - 1) when E is close to U.
    RBSystem pauli_shifted() const;

    /// Expectation of the observable after `pl` acts on the prepared state.
    double expectation(const RealMatrix &pl) const;

   private:
    void validate();

    int n_ = 0;
    PauliLiouvilleMap e_;
    PauliLiouvilleMap noise_;
    CliffordElement target_;
    PrepSpec prep_;
    MeasSpec meas_;
    RealVector rho_;
    std::uint32_t observable_index_ = 0;
};

/// Exact twirled decay: Lambda = E N U^-1, p = (tr Lambda - 1) / (d^2 - 1).
DecayModel decay_model(const RBSystem &system);
double analytic_F_k(const RBSystem &system, int k);

struct SequenceDesign {
    std::vector<CliffordElement> cliffords;
    CliffordElement inversion;
};

/// Uniform C_1..C_k plus the element undoing U C_k ... U C_1.
SequenceDesign design_sequence(int k, const CliffordElement &target, Rng &rng);

/// Exact <M> after (N C_inv) E (N C_k) ... E (N C_1) acting on the prepared state.
double survival_expectation(const RBSystem &system, const SequenceDesign &design);

/// Mean of the exact survival over all 24^k single-qubit sequences.
double exhaustive_sequence_average(const RBSystem &system, int k);

struct DecayRecord {
    int k = 0;
    double mean = 0.0;
    std::uint64_t sequences = 0;
    std::uint64_t shots_per_sequence = 0;
    double stderr_mean = 0.0;
};

enum class SimulationMode { sampled, analytic };

/// Sampled: random sequences with `config.shots` binary outcomes each. Analytic: the exact
/// twirled value, reported with zero sequences and shots.
DecayRecord simulate_F_k(const RBConfig &config, int k, std::uint64_t n_sequences, SimulationMode mode);
DecayRecord simulate_F_k(
    const RBSystem &system, int k, std::uint64_t n_sequences, int shots, std::uint64_t seed, SimulationMode mode,
    int threads = 0);

/// Hoeffding sample count ceil(range^2 ln(2 / delta) / (2 eps^2)) for outcomes in an interval of width `range`.
std::uint64_t hoeffding_samples(double eps, double delta, double range = 2.0);

// ---------------------------------------------------------------------------
// Decay estimation.

/// The sequence families the estimator draws from.
enum class Family { main, noise_only, shifted };

/// Where single-shot RB samples come from.
class DecaySource {
   public:
    virtual ~DecaySource() = default;
    virtual int num_qubits() const = 0;
    /// Mean of m single-shot +-1 outcomes, each from a freshly drawn length-k sequence.
    virtual double sample_mean(Family family, int k, std::uint64_t m, std::uint64_t stream) = 0;
    /// Noise-free expectation of the same quantity.
    virtual double exact(Family family, int k) const = 0;
};

/// Literal simulation of random Clifford sequences.
class SimulatedSource : public DecaySource {
   public:
    SimulatedSource(const RBSystem &system, std::uint64_t seed, int threads = 0);
    ~SimulatedSource() override;
    int num_qubits() const override;
    double sample_mean(Family family, int k, std::uint64_t m, std::uint64_t stream) override;
    double exact(Family family, int k) const override;

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Draws the number of +1 outcomes directly from Binomial(m, (1 + F_k) / 2), which is the
/// exact law of m single-shot outcomes on independent random sequences.
class SyntheticSource : public DecaySource {
   public:
    SyntheticSource(int n, DecayModel main, double p_noise_only, double p_shifted, std::uint64_t seed);
    static SyntheticSource from_system(const RBSystem &system, std::uint64_t seed);
    int num_qubits() const override {
        return n_;
    }
    double sample_mean(Family family, int k, std::uint64_t m, std::uint64_t stream) override;
    double exact(Family family, int k) const override;

   private:
    int n_;
    DecayModel main_;
    double p_noise_only_;
    double p_shifted_;
    std::uint64_t seed_;
};

struct EstimateOptions {
    /// Exact expectations instead of samples; epsilon' is then zero.
    bool analytic = false;
    double pilot_fraction = 0.1;
    double k_inf_tolerance = 1e-4;
    int k_inf_cap = 2000;
    /// Sequence length used for F_inf when no pilot family shows a resolvable decay.
    int k_inf_fallback = 32;
    /// Refuse to run when one point would need more samples than this.
    std::uint64_t max_samples_per_point = 1'000'000'000;
};

struct PEstimate {
    double p_hat = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double a_lower = 0.0;
    bool clamped_to_zero = false;
    std::uint64_t samples_used = 0;

    double epsilon_prime = 0.0;
    double delta_prime = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
    double f_inf = 0.0;
    int k_inf = 0;
    Family floor_family = Family::main;
};

PEstimate estimate_p(DecaySource &source, double epsilon, double delta, const EstimateOptions &options = {});
PEstimate estimate_p(const RBConfig &config, double epsilon, double delta, const EstimateOptions &options = {});

struct FidelityEstimate {
    double f_hat = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    PEstimate p;
};

/// F = ((d - 1) p + 1) / d of E N against the target; epsilon scales by (d - 1) / d.
FidelityEstimate fidelity_from_p_estimate(const PEstimate &p, int d);
FidelityEstimate estimate_fidelity_to_clifford(
    const RBConfig &config, double epsilon, double delta, const EstimateOptions &options = {});

/// SPAM constants A0, B0 shared by every family of one system, measured on the noise-only family.
struct SpamCalibration {
    double a0 = 0.0;
    double b0 = 0.0;
    int k_floor = 0;
    std::uint64_t samples_used = 0;
};

SpamCalibration calibrate_spam(DecaySource &source, std::uint64_t samples_per_point, const EstimateOptions &options = {});

/// p from length-1 data alone given calibrated SPAM constants: (F_1 - B0) / A0. The reported
/// epsilon is the Hoeffding half-width at `delta` divided by |A0| and ignores calibration error.
PEstimate estimate_p_calibrated(
    DecaySource &source, const SpamCalibration &spam, std::uint64_t samples, double delta, std::uint64_t stream);

struct DecayFit {
    double a0 = 0.0;
    double b0 = 0.0;
    double p = 0.0;
    double residual = 0.0;
};

/// Least-squares fit of A0 p^k + B0 (diagnostic cross-check).
DecayFit fit_decay(const std::vector<DecayRecord> &records);

const char *family_name(Family f);

}  // namespace rbtomo

#endif
