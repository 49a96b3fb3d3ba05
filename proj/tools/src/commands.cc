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

#include "commands.h"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>

#include "rbtomo/bounds.h"
#include "rbtomo/errors.h"
#include "rbtomo/rb.h"
#include "rbtomo/unital.h"

namespace rbtomo::cli {

namespace {

using io::Json;

[[noreturn]] void fail(const std::string &path, const std::string &msg) {
    throw ValidationError(path + ": " + msg);
}

/// Read-only view of one config object that rejects unknown keys up front.
class Fields {
   public:
    Fields(const Json &j, std::string path, std::initializer_list<const char *> allowed)
        : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            fail(path_, "expected an object");
        }
        for (const auto &[k, v] : j_.items()) {
            bool known = false;
            for (const char *a : allowed) {
                known = known || k == a;
            }
            if (!known) {
                fail(path_, "unknown key '" + k + "'");
            }
        }
    }

    bool has(const char *key) const {
        return j_.contains(key);
    }
    const Json &raw(const char *key) const {
        if (!has(key)) {
            fail(path_, std::string("missing key '") + key + "'");
        }
        return j_.at(key);
    }
    std::string path(const char *key) const {
        return path_ + "." + key;
    }

    double number(const char *key) const {
        const Json &v = raw(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            fail(path(key), "expected a finite number");
        }
        return v.get<double>();
    }
    double number(const char *key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }
    std::int64_t integer(const char *key, std::int64_t lo, std::int64_t hi) const {
        const Json &v = raw(key);
        if (!v.is_number_integer()) {
            fail(path(key), "expected an integer");
        }
        std::int64_t x = v.get<std::int64_t>();
        if (x < lo || x > hi) {
            fail(path(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return x;
    }
    std::int64_t integer(const char *key, std::int64_t lo, std::int64_t hi, std::int64_t fallback) const {
        return has(key) ? integer(key, lo, hi) : fallback;
    }
    std::uint64_t u64(const char *key) const {
        const Json &v = raw(key);
        if (v.is_number_unsigned()) {
            return v.get<std::uint64_t>();
        }
        return static_cast<std::uint64_t>(integer(key, 0, std::numeric_limits<std::int64_t>::max()));
    }
    bool boolean(const char *key, bool fallback) const {
        if (!has(key)) {
            return fallback;
        }
        if (!raw(key).is_boolean()) {
            fail(path(key), "expected true or false");
        }
        return raw(key).get<bool>();
    }
    std::string string(const char *key, const std::string &fallback) const {
        if (!has(key)) {
            return fallback;
        }
        if (!raw(key).is_string()) {
            fail(path(key), "expected a string");
        }
        return raw(key).get<std::string>();
    }

   private:
    const Json &j_;
    std::string path_;
};

std::string dump(const Json &j) {
    return j.dump(2) + "\n";
}

Json num(double x) {
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

double probability(const Fields &f, const char *key, double fallback) {
    double v = f.number(key, fallback);
    if (!(v > 0.0 && v < 1.0)) {
        fail(f.path(key), "must lie in (0, 1)");
    }
    return v;
}

/// Flag first, then the top-level "seed", then rb.seed.
std::uint64_t resolve_seed(const Fields &f, const CommonFlags &flags, bool required) {
    if (flags.seed) {
        return *flags.seed;
    }
    if (f.has("seed")) {
        return f.u64("seed");
    }
    if (f.has("rb") && f.raw("rb").is_object() && f.raw("rb").contains("seed")) {
        Fields rb(f.raw("rb"), f.path("rb"), {"n", "e_map", "noise_map", "target", "prep", "meas", "shots", "seed", "threads"});
        return rb.u64("seed");
    }
    if (required) {
        throw ValidationError("sampled runs need a seed: set \"seed\" in the config or pass --seed");
    }
    return 0;
}

int resolve_threads(const Fields &f, const CommonFlags &flags) {
    if (flags.threads) {
        return *flags.threads;
    }
    return static_cast<int>(f.integer("threads", 0, 4096, 0));
}

bool resolve_analytic(const Fields &f, const CommonFlags &flags, const char *sampled_name) {
    if (flags.analytic) {
        return true;
    }
    std::string mode = f.string("mode", sampled_name);
    if (mode == "analytic") {
        return true;
    }
    if (mode != sampled_name) {
        fail(f.path("mode"), "expected \"analytic\" or \"" + std::string(sampled_name) + "\"");
    }
    return false;
}

RBConfig rb_config(const Fields &f, std::uint64_t seed, int threads) {
    RBConfig c = io::parse_rb_config(f.raw("rb"), f.path("rb"));
    c.seed = seed;
    c.threads = threads;
    return c;
}

EstimateOptions estimate_options(const Fields &f, bool analytic) {
    EstimateOptions o;
    o.analytic = analytic;
    if (f.has("estimate")) {
        Fields e(
            f.raw("estimate"), f.path("estimate"),
            {"pilot_fraction", "k_inf_tolerance", "k_inf_cap", "k_inf_fallback", "max_samples_per_point"});
        o.pilot_fraction = e.number("pilot_fraction", o.pilot_fraction);
        o.k_inf_tolerance = e.number("k_inf_tolerance", o.k_inf_tolerance);
        o.k_inf_cap = static_cast<int>(e.integer("k_inf_cap", 3, 1'000'000, o.k_inf_cap));
        o.k_inf_fallback = static_cast<int>(e.integer("k_inf_fallback", 3, 1'000'000, o.k_inf_fallback));
        if (e.has("max_samples_per_point")) {
            o.max_samples_per_point = e.u64("max_samples_per_point");
        }
        if (!(o.pilot_fraction > 0.0 && o.pilot_fraction <= 1.0)) {
            fail(e.path("pilot_fraction"), "must lie in (0, 1]");
        }
        if (!(o.k_inf_tolerance > 0.0 && o.k_inf_tolerance < 1.0)) {
            fail(e.path("k_inf_tolerance"), "must lie in (0, 1)");
        }
    }
    return o;
}

SamplerKind sampler_kind(const Fields &f) {
    std::string s = f.string("sampler", "simulated");
    if (s == "simulated") {
        return SamplerKind::simulated;
    }
    if (s == "synthetic") {
        return SamplerKind::synthetic;
    }
    fail(f.path("sampler"), "expected \"simulated\" or \"synthetic\"");
}

Json fidelity_estimate_json(const FidelityEstimate &e) {
    return Json{{"f_hat", num(e.f_hat)}, {"epsilon", num(e.epsilon)}, {"delta", num(e.delta)}};
}

/// Qubit count implied by the gates of a bare circuit list.
int infer_circuit_qubits(const Json &circuit) {
    int n = 1;
    if (!circuit.is_array()) {
        return n;
    }
    for (const auto &g : circuit) {
        if (!g.is_object()) {
            continue;
        }
        for (const char *key : {"qubit", "control", "target"}) {
            if (g.contains(key) && g[key].is_number_integer()) {
                n = std::max<int>(n, g[key].get<int>() + 1);
            }
        }
        if (g.contains("tableau") && g["tableau"].is_array()) {
            n = std::max<int>(n, static_cast<int>(g["tableau"].size() / 2));
        }
    }
    return n;
}

// Grid points are snapped to 12 decimals so values such as 0.995 land exactly on the
// double a user would type.
std::vector<double> parse_grid(const Fields &f) {
    std::vector<double> grid;
    if (f.has("grid") && f.raw("grid").is_array()) {
        const Json &g = f.raw("grid");
        for (size_t i = 0; i < g.size(); i++) {
            if (!g[i].is_number()) {
                fail(f.path("grid") + "[" + std::to_string(i) + "]", "expected a number");
            }
            grid.push_back(g[i].get<double>());
        }
        if (grid.empty()) {
            fail(f.path("grid"), "needs at least one point");
        }
        return grid;
    }
    Json spec = f.has("grid") ? f.raw("grid") : Json::object();
    Fields g(spec, f.path("grid"), {"lo", "hi", "points"});
    double lo = g.number("lo", 0.98);
    double hi = g.number("hi", 1.0);
    auto points = g.integer("points", 1, 1'000'000, 201);
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
        fail(f.path("grid"), "needs 0 <= lo <= hi <= 1");
    }
    for (std::int64_t i = 0; i < points; i++) {
        double x = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        grid.push_back(std::round(x * 1e12) / 1e12);
    }
    return grid;
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands.

std::string cmd_simulate_decay(const Json &config, const CommonFlags &flags) {
    Fields f(config, "config", {"rb", "k", "k_max", "n_sequences", "mode", "seed", "threads"});
    bool analytic = resolve_analytic(f, flags, "sampled");
    RBConfig rb = rb_config(f, resolve_seed(f, flags, !analytic), resolve_threads(f, flags));

    std::vector<int> ks;
    if (f.has("k")) {
        const Json &k = f.raw("k");
        if (!k.is_array() || k.empty()) {
            fail(f.path("k"), "expected a non-empty array of sequence lengths");
        }
        for (size_t i = 0; i < k.size(); i++) {
            if (!k[i].is_number_integer() || k[i].get<std::int64_t>() < 0 || k[i].get<std::int64_t>() > 100000) {
                fail(f.path("k") + "[" + std::to_string(i) + "]", "expected an integer in [0, 100000]");
            }
            ks.push_back(k[i].get<int>());
        }
    } else {
        int k_max = static_cast<int>(f.integer("k_max", 1, 100000, 20));
        for (int k = 1; k <= k_max; k++) {
            ks.push_back(k);
        }
    }
    std::uint64_t n_sequences = 0;
    if (!analytic) {
        n_sequences = f.has("n_sequences") ? f.u64("n_sequences") : 1000;
        if (n_sequences == 0) {
            fail(f.path("n_sequences"), "must be positive");
        }
    }

    std::vector<DecayRecord> records;
    for (int k : ks) {
        records.push_back(simulate_F_k(rb, k, n_sequences, analytic ? SimulationMode::analytic : SimulationMode::sampled));
        spdlog::debug("k={} mean={}", k, records.back().mean);
    }
    return io::decay_csv(records);
}

std::string cmd_estimate_p(const Json &config, const CommonFlags &flags) {
    Fields f(config, "config", {"rb", "epsilon", "delta", "mode", "sampler", "estimate", "seed", "threads"});
    bool analytic = resolve_analytic(f, flags, "sampled");
    std::uint64_t seed = resolve_seed(f, flags, !analytic);
    RBConfig rb = rb_config(f, seed, resolve_threads(f, flags));
    double epsilon = probability(f, "epsilon", 0.05);
    double delta = probability(f, "delta", 0.05);
    EstimateOptions opts = estimate_options(f, analytic);

    RBSystem system(rb);
    PEstimate est;
    if (sampler_kind(f) == SamplerKind::synthetic) {
        SyntheticSource source = SyntheticSource::from_system(system, seed);
        est = estimate_p(source, epsilon, delta, opts);
    } else {
        SimulatedSource source(system, seed, rb.threads);
        est = estimate_p(source, epsilon, delta, opts);
    }
    spdlog::info("p_hat={} samples={}", est.p_hat, est.samples_used);
    return dump(io::to_json(est));
}

std::string cmd_reconstruct(const Json &config, const CommonFlags &flags) {
    Fields f(
        config, "config",
        {"rb", "mode", "epsilon", "delta", "shots_per_experiment", "cliffords", "deconvolution", "consistency_tolerance",
         "seed", "threads"});
    PipelineOptions opts;
    std::string mode = flags.analytic ? "analytic" : f.string("mode", "analytic");
    if (mode == "analytic") {
        opts.mode = FidelityMode::analytic;
    } else if (mode == "guaranteed") {
        opts.mode = FidelityMode::guaranteed;
    } else if (mode == "calibrated") {
        opts.mode = FidelityMode::calibrated;
    } else {
        fail(f.path("mode"), "expected \"analytic\", \"guaranteed\" or \"calibrated\"");
    }
    bool analytic = opts.mode == FidelityMode::analytic;
    opts.seed = resolve_seed(f, flags, !analytic);
    opts.threads = resolve_threads(f, flags);
    RBConfig rb = rb_config(f, opts.seed, opts.threads);
    opts.epsilon = probability(f, "epsilon", opts.epsilon);
    opts.delta = probability(f, "delta", opts.delta);
    if (f.has("shots_per_experiment")) {
        opts.shots_per_experiment = f.u64("shots_per_experiment");
        if (opts.shots_per_experiment == 0) {
            fail(f.path("shots_per_experiment"), "must be positive");
        }
    }
    opts.consistency_tolerance = f.number("consistency_tolerance", opts.consistency_tolerance);
    if (f.has("cliffords")) {
        const Json &cs = f.raw("cliffords");
        if (!cs.is_array()) {
            fail(f.path("cliffords"), "expected an array");
        }
        for (size_t i = 0; i < cs.size(); i++) {
            opts.cliffords.push_back(io::parse_clifford(cs[i], f.path("cliffords") + "[" + std::to_string(i) + "]"));
        }
    }
    if (f.has("deconvolution")) {
        Fields d(f.raw("deconvolution"), f.path("deconvolution"), {"singular_threshold", "allow_pseudo_inverse"});
        opts.deconvolution.singular_threshold = d.number("singular_threshold", opts.deconvolution.singular_threshold);
        opts.deconvolution.allow_pseudo_inverse = d.boolean("allow_pseudo_inverse", false);
    }
    if (opts.deconvolution.allow_pseudo_inverse) {
        spdlog::warn("pseudo-inverse deconvolution enabled; a near-singular N' will bias E'");
    }

    RBSystem system(rb);
    PipelineReport r = reconstruct_from_rb(system, opts);

    Json cp;
    if (rb.n == 1) {
        cp = io::to_json(cp_witness_single_qubit(r.e_prime));
    } else {
        CptpVerdict v = is_cptp(r.e_prime);
        cp = Json{{"cp", v.cp}, {"min_choi_eigenvalue", num(v.min_choi_eigenvalue)}};
    }
    Json out{
        {"mode", mode},
        {"en_prime", io::to_json(r.en_prime.map)},
        {"n_prime", io::to_json(r.n_prime.map)},
        {"e_prime", io::to_json(r.e_prime)},
        {"residuals",
         {
             {"en", r.en_prime.residuals},
             {"n", r.n_prime.residuals},
             {"en_norm", num(r.en_prime.residual_norm)},
             {"n_norm", num(r.n_prime.residual_norm)},
         }},
        {"consistent", r.en_prime.consistent && r.n_prime.consistent},
        {"perturbation_bound", {{"en", num(r.en_prime.perturbation_bound)}, {"n", num(r.n_prime.perturbation_bound)}}},
        {"kappa", num(r.conditioning.kappa)},
        {"conditioning", io::to_json(r.conditioning)},
        {"fidelities", {{"en", io::to_json(r.en_fidelities)}, {"n", io::to_json(r.n_fidelities)}}},
        {"cp", cp},
        {"samples_used", r.samples_used},
    };
    if (!out["consistent"].get<bool>()) {
        spdlog::warn("fidelity residuals exceed the stated confidence widths");
    }
    return dump(out);
}

std::string cmd_bound_curves(const Json &config, const CommonFlags &) {
    Fields f(config, "config", {"chi_b", "d", "grid"});
    double chi_b = f.number("chi_b", 0.995);
    int d = static_cast<int>(f.integer("d", 2, 1 << 20, 2));
    return io::bound_curves_csv(io::bound_curve_rows(chi_b, parse_grid(f), d));
}

std::string cmd_decompose(const Json &config, const CommonFlags &) {
    Json circuit;
    int n = 1;
    DecomposeOptions opts;
    if (config.is_array()) {
        circuit = config;
        n = infer_circuit_qubits(config);
    } else {
        Fields f(config, "config", {"n", "circuit", "t_max", "merge"});
        circuit = f.raw("circuit");
        n = f.has("n") ? static_cast<int>(f.integer("n", 1, kMaxPauliQubits)) : infer_circuit_qubits(circuit);
        opts.t_max = static_cast<int>(f.integer("t_max", 0, 20, opts.t_max));
        opts.merge = f.boolean("merge", opts.merge);
    }
    std::vector<CircuitGate> gates = io::parse_circuit(circuit, n);
    return dump(io::to_json(decompose_circuit(n, gates, opts)));
}

std::string cmd_bound_fidelity(const Json &config, const CommonFlags &flags) {
    Fields f(
        config, "config",
        {"rb", "circuit", "epsilon", "delta", "mode", "sampler", "estimate", "t_max", "merge", "seed", "threads"});
    bool analytic = resolve_analytic(f, flags, "sampled");
    NonCliffordOptions opts;
    opts.analytic = analytic;
    opts.seed = resolve_seed(f, flags, !analytic);
    opts.threads = resolve_threads(f, flags);
    opts.sampler = sampler_kind(f);
    opts.estimate = estimate_options(f, analytic);
    RBConfig rb = rb_config(f, opts.seed, opts.threads);
    double epsilon = probability(f, "epsilon", 0.05);
    double delta = probability(f, "delta", 0.05);
    DecomposeOptions dopts;
    dopts.t_max = static_cast<int>(f.integer("t_max", 0, 20, dopts.t_max));
    dopts.merge = f.boolean("merge", dopts.merge);

    std::vector<CircuitGate> gates = io::parse_circuit(f.raw("circuit"), rb.n, f.path("circuit"));
    LinearCombination combo = decompose_circuit(rb.n, gates, dopts);
    RBSystem system(rb);
    NonCliffordBound b = bound_nonclifford_fidelity(system, combo, epsilon, delta, opts);

    // Simulation-only reference: the true F(E, U) from the configured E.
    PauliLiouvilleMap u = pl_from_unitary(circuit_unitary(rb.n, gates));
    double reference = average_fidelity(system.e_map(), u);

    Json out{
        {"fidelity", io::to_json(b.fidelity)},
        {"chi00", io::to_json(b.chi00)},
        {"composed", fidelity_estimate_json(b.composed)},
        {"noise", fidelity_estimate_json(b.noise)},
        {"samples_used", b.samples_used},
        {"combination",
         {{"terms", combo.terms.size()}, {"one_norm", combo.one_norm()}, {"t_count", combo.t_count}}},
        {"reference_fidelity", reference},
        {"mode", analytic ? "analytic" : "sampled"},
    };
    return dump(out);
}

std::string cmd_cp_scan(const Json &config, const CommonFlags &flags) {
    Fields f(config, "config", {"n", "trials", "tolerance", "seed", "threads"});
    int n = static_cast<int>(f.integer("n", 1, 3, 2));
    int trials = static_cast<int>(f.integer("trials", 1, 10'000'000, 500));
    double tol = f.number("tolerance", kDefaultPsdTolerance);
    if (!(tol >= 0.0)) {
        fail(f.path("tolerance"), "must be non-negative");
    }
    NonCpScan scan = multiqubit_noncp_scan(n, trials, resolve_seed(f, flags, true), tol, resolve_threads(f, flags));
    spdlog::info("non-CP fraction {} over {} trials", scan.fraction, trials);
    return io::noncp_scan_csv(scan);
}

std::string cmd_span_check(const Json &config, const CommonFlags &flags) {
    Fields f(config, "config", {"n", "patience", "haar_extra", "seed"});
    int n = static_cast<int>(f.integer("n", 1, 2, 1));
    int patience = static_cast<int>(f.integer("patience", 1, 1'000'000, 200));
    int haar_extra = static_cast<int>(f.integer("haar_extra", 0, 100'000, 50));
    std::uint64_t seed = resolve_seed(f, flags, true);

    std::vector<CliffordElement> basis;
    int draws = 0;
    if (n == 1) {
        basis = single_qubit_cliffords();
        draws = static_cast<int>(basis.size());
    } else {
        Rng rng(split_seed(seed, 0));
        SpanSaturation s = saturate_clifford_span(n, rng, patience);
        basis = std::move(s.basis);
        draws = s.draws;
    }
    int rank = pl_span_rank(basis);

    std::vector<RealMatrix> mats;
    for (const auto &c : basis) {
        mats.push_back(c.pl().matrix());
    }
    Rng haar_rng(split_seed(seed, 1));
    for (int i = 0; i < haar_extra; i++) {
        mats.push_back(pl_from_unitary(haar_unitary(1 << n, haar_rng)).matrix());
    }
    int rank_with_haar = stacked_rank(mats);

    int expected = unital_span_dimension(n);
    Json out{
        {"n", n},
        {"expected", expected},
        {"rank", rank},
        {"draws", draws},
        {"haar_extra", haar_extra},
        {"rank_with_haar", rank_with_haar},
        {"saturated", rank == expected},
        {"stable", rank_with_haar == rank},
    };
    return dump(out);
}

// ---------------------------------------------------------------------------
// Driver.

namespace {

spdlog::level::level_enum log_level_from_env() {
    const char *env = std::getenv("RBTOMO_LOG");
    if (env == nullptr || *env == '\0') {
        return spdlog::level::warn;
    }
    auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honor that for an explicit "off".
    if (level == spdlog::level::off && std::string(env) != "off") {
        return spdlog::level::warn;
    }
    return level;
}

Json read_config(const std::string &path, bool optional) {
    if (path.empty()) {
        if (optional) {
            return Json::object();
        }
        throw ValidationError("--config is required for this command");
    }
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void emit(const std::string &text, const std::string &out_path, std::ostream &out) {
    if (out_path.empty() || out_path == "-") {
        out << text;
        out.flush();
        return;
    }
    std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw ValidationError("cannot open output file '" + out_path + "'");
    }
    file << text;
    if (!file.flush()) {
        throw ValidationError("failed writing '" + out_path + "'");
    }
}

struct Command {
    const char *name;
    const char *help;
    std::function<std::string(const Json &, const CommonFlags &)> fn;
    bool json_output;
    bool config_optional;
};

Json error_json(const char *type, const std::string &message) {
    return Json{{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto logger = std::make_shared<spdlog::logger>("rbtomo", sink);
    logger->set_pattern("[%l] %v");
    logger->set_level(log_level_from_env());
    auto previous = spdlog::default_logger();
    spdlog::set_default_logger(logger);
    struct Restore {
        std::shared_ptr<spdlog::logger> logger;
        ~Restore() {
            spdlog::set_default_logger(logger);
        }
    } restore{previous};

    const std::vector<Command> commands{
        {"simulate-decay", "RB decay table F_k per sequence length (CSV)", cmd_simulate_decay, false, false},
        {"estimate-p", "Two-stage guaranteed estimate of the decay parameter (JSON)", cmd_estimate_p, true, false},
        {"reconstruct", "Unital-part reconstruction with noise deconvolution (JSON)", cmd_reconstruct, true, false},
        {"bound-curves", "Deconvolved and earlier chi00 bounds over a grid (CSV)", cmd_bound_curves, false, true},
        {"decompose", "Clifford decomposition of a Clifford+T circuit (JSON)", cmd_decompose, true, false},
        {"bound-fidelity", "RB bound on the fidelity to a Clifford+T circuit (JSON)", cmd_bound_fidelity, true, false},
        {"cp-scan", "Complete positivity of unital parts of random channels (CSV)", cmd_cp_scan, false, true},
        {"span-check", "Rank of the span of Clifford PL matrices (JSON)", cmd_span_check, true, true},
    };

    CLI::App app{"Randomized-benchmarking tomography toolkit", "rbtomo"};
    app.require_subcommand(1);
    std::vector<CommonFlags> flags(commands.size());
    std::vector<CLI::App *> subs;
    for (size_t i = 0; i < commands.size(); i++) {
        CLI::App *sub = app.add_subcommand(commands[i].name, commands[i].help);
        CommonFlags &fl = flags[i];
        sub->add_option("--config", fl.config_path, "JSON config file");
        sub->add_option("--out", fl.out_path, "Output file (default stdout)");
        sub->add_option("--seed", fl.seed, "Master seed; overrides the config");
        sub->add_flag("--analytic", fl.analytic, "Exact expectations instead of samples");
        sub->add_option("--threads", fl.threads, "Worker thread cap (0 = all cores)")->check(CLI::NonNegativeNumber);
        subs.push_back(sub);
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    for (size_t i = 0; i < commands.size(); i++) {
        if (!subs[i]->parsed()) {
            continue;
        }
        const Command &cmd = commands[i];
        const CommonFlags &fl = flags[i];
        auto report = [&](const std::string &message, const Json &doc) {
            spdlog::error("{}", message);
            if (cmd.json_output) {
                try {
                    emit(dump(doc), fl.out_path, out);
                } catch (const std::exception &) {
                    // The original failure is what gets reported.
                }
            }
        };
        try {
            Json config = read_config(fl.config_path, cmd.config_optional);
            emit(cmd.fn(config, fl), fl.out_path, out);
            return kExitOk;
        } catch (const SingularMapError &e) {
            Json doc = error_json("singular_map", e.what());
            doc["error"]["smallest_singular_value"] = num(e.smallest_singular_value);
            doc["error"]["kappa"] = num(e.condition_number);
            report(e.what(), doc);
            return kExitNumerical;
        } catch (const NumericalError &e) {
            report(e.what(), error_json("numerical", e.what()));
            return kExitNumerical;
        } catch (const ValidationError &e) {
            report(e.what(), error_json("validation", e.what()));
            return kExitValidation;
        } catch (const std::exception &e) {
            report(e.what(), error_json("internal", e.what()));
            return kExitInternal;
        }
    }
    return kExitInternal;
}

}  // namespace rbtomo::cli
