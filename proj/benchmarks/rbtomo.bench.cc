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

#include <benchmark/benchmark.h>

#include "rbtomo/bounds.h"
#include "rbtomo/channel.h"
#include "rbtomo/clifford.h"
#include "rbtomo/rb.h"
#include "rbtomo/unital.h"

using namespace rbtomo;

namespace {

RBSystem hadamard_system() {
    return RBSystem(
        CliffordElement::hadamard(1, 0).pl(), make_channel(channel_spec::Depolarizing{1, 0.98}),
        CliffordElement::identity(1));
}

void clifford_sample(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_uniform_clifford(n, rng));
    }
}
BENCHMARK(clifford_sample)->Arg(1)->Arg(2)->Arg(5)->Arg(20);

void clifford_compose_pair(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(2);
    CliffordElement a = sample_uniform_clifford(n, rng);
    CliffordElement b = sample_uniform_clifford(n, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(clifford_compose(a, b));
    }
}
BENCHMARK(clifford_compose_pair)->Arg(1)->Arg(2)->Arg(20);

void survival_sampled(benchmark::State &state) {
    RBSystem sys = hadamard_system();
    const int k = static_cast<int>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_F_k(sys, k, 1000, 1, ++seed, SimulationMode::sampled, 1));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(survival_sampled)->Arg(1)->Arg(10)->Arg(100);

void survival_two_qubit(benchmark::State &state) {
    RBSystem sys(
        make_channel(channel_spec::RandomCptp{2, 3, 0}), make_channel(channel_spec::Depolarizing{2, 0.99}),
        CliffordElement::identity(2));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_F_k(sys, 10, 100, 1, ++seed, SimulationMode::sampled, 1));
    }
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(survival_two_qubit);

void estimate_p_synthetic(benchmark::State &state) {
    RBSystem sys = hadamard_system();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        SyntheticSource source = SyntheticSource::from_system(sys, ++seed);
        benchmark::DoNotOptimize(estimate_p(source, 0.05, 0.05));
    }
}
BENCHMARK(estimate_p_synthetic);

void reconstruct_analytic(benchmark::State &state) {
    RBSystem sys = hadamard_system();
    for (auto _ : state) {
        benchmark::DoNotOptimize(reconstruct_from_rb(sys));
    }
}
BENCHMARK(reconstruct_analytic);

void reconstruct_calibrated(benchmark::State &state) {
    RBSystem sys = hadamard_system();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        PipelineOptions opts;
        opts.mode = FidelityMode::calibrated;
        opts.shots_per_experiment = 10000;
        opts.seed = ++seed;
        benchmark::DoNotOptimize(reconstruct_from_rb(sys, opts));
    }
}
BENCHMARK(reconstruct_calibrated)->Unit(benchmark::kMillisecond);

void deconvolved_bound(benchmark::State &state) {
    double x = 0.98;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bound_deconvolved_chi00(x, 0.995));
        x = x + 1e-4 <= 1.0 ? x + 1e-4 : 0.98;
    }
}
BENCHMARK(deconvolved_bound);

void deconvolved_bound_box(benchmark::State &state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(bound_deconvolved_chi00_box(0.97, 0.99, 0.99, 0.996));
    }
}
BENCHMARK(deconvolved_bound_box)->Unit(benchmark::kMillisecond);

void decompose_clifford_t(benchmark::State &state) {
    const int t = static_cast<int>(state.range(0));
    Rng rng(4);
    std::vector<CircuitGate> gates;
    for (int i = 0; i < t; i++) {
        gates.push_back(CircuitGate::make_clifford(sample_uniform_clifford(2, rng)));
        gates.push_back(CircuitGate::make_t(i % 2));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(decompose_circuit(2, gates));
    }
}
BENCHMARK(decompose_clifford_t)->DenseRange(2, 8, 2)->Unit(benchmark::kMicrosecond);

void noncp_scan_two_qubit(benchmark::State &state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(multiqubit_noncp_scan(2, 20, ++seed, kDefaultPsdTolerance, 1));
    }
}
BENCHMARK(noncp_scan_two_qubit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
