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

#include "rbtomo/io.h"

#include <charconv>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <sstream>

#include "rbtomo/errors.h"

namespace rbtomo::io {

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &msg) {
    throw ValidationError(path + ": " + msg);
}

std::string at(const std::string &path, const std::string &key) {
    return path + "." + key;
}

std::string at(const std::string &path, size_t index) {
    return path + "[" + std::to_string(index) + "]";
}

void require_object(const Json &j, const std::string &path) {
    if (!j.is_object()) {
        fail(path, "expected an object");
    }
}

void require_array(const Json &j, const std::string &path) {
    if (!j.is_array()) {
        fail(path, "expected an array");
    }
}

void allow_keys(const Json &j, std::initializer_list<const char *> keys, const std::string &path) {
    for (const auto &[k, v] : j.items()) {
        bool known = false;
        for (const char *allowed : keys) {
            if (k == allowed) {
                known = true;
                break;
            }
        }
        if (!known) {
            fail(path, "unknown key '" + k + "'");
        }
    }
}

const Json &member(const Json &j, const char *key, const std::string &path) {
    auto it = j.find(key);
    if (it == j.end()) {
        fail(path, std::string("missing key '") + key + "'");
    }
    return *it;
}

// Non-finite values serialize as null.
double as_double(const Json &j, const std::string &path) {
    if (j.is_null()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (!j.is_number()) {
        fail(path, "expected a number");
    }
    return j.get<double>();
}

double finite_double(const Json &j, const std::string &path) {
    double v = as_double(j, path);
    if (!std::isfinite(v)) {
        fail(path, "expected a finite number");
    }
    return v;
}

std::int64_t as_int(const Json &j, const std::string &path) {
    if (j.is_number_integer()) {
        return j.get<std::int64_t>();
    }
    if (j.is_number_float()) {
        double v = j.get<double>();
        if (std::floor(v) == v && std::abs(v) < 9e15) {
            return static_cast<std::int64_t>(v);
        }
    }
    fail(path, "expected an integer");
}

std::uint64_t as_u64(const Json &j, const std::string &path) {
    if (j.is_number_unsigned()) {
        return j.get<std::uint64_t>();
    }
    std::int64_t v = as_int(j, path);
    if (v < 0) {
        fail(path, "expected a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

int as_int_in(const Json &j, const std::string &path, std::int64_t lo, std::int64_t hi) {
    std::int64_t v = as_int(j, path);
    if (v < lo || v > hi) {
        fail(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return static_cast<int>(v);
}

bool as_bool(const Json &j, const std::string &path) {
    if (!j.is_boolean()) {
        fail(path, "expected true or false");
    }
    return j.get<bool>();
}

std::string as_string(const Json &j, const std::string &path) {
    if (!j.is_string()) {
        fail(path, "expected a string");
    }
    return j.get<std::string>();
}

double double_or(const Json &j, const char *key, double fallback, const std::string &path) {
    auto it = j.find(key);
    return it == j.end() ? fallback : finite_double(*it, at(path, key));
}

Json number(double x) {
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

// Rethrows errors from constructors with the document path attached.
template <typename F>
auto with_path(const std::string &path, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const ValidationError &e) {
        fail(path, e.what());
    }
}

ComplexMatrix named_gate_matrix(const std::string &name, const std::string &path) {
    const double r = 1.0 / std::numbers::sqrt2;
    const Complex i1(0.0, 1.0);
    ComplexMatrix m(2, 2);
    if (name == "I") {
        m << 1, 0, 0, 1;
    } else if (name == "X") {
        m << 0, 1, 1, 0;
    } else if (name == "Y") {
        m << 0, -i1, i1, 0;
    } else if (name == "Z") {
        m << 1, 0, 0, -1;
    } else if (name == "H") {
        m << r, r, r, -r;
    } else if (name == "S") {
        m << 1, 0, 0, i1;
    } else if (name == "T") {
        m << 1, 0, 0, std::polar(1.0, std::numbers::pi / 4);
    } else {
        fail(path, "unknown gate '" + name + "' (expected I, X, Y, Z, H, S or T)");
    }
    return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrices.

ComplexMatrix parse_complex_matrix(const Json &j, const std::string &path) {
    require_array(j, path);
    if (j.empty()) {
        fail(path, "matrix has no rows");
    }
    const size_t rows = j.size();
    size_t cols = 0;
    ComplexMatrix m;
    for (size_t r = 0; r < rows; r++) {
        const Json &row = j[r];
        std::string rp = at(path, r);
        require_array(row, rp);
        if (r == 0) {
            cols = row.size();
            if (cols == 0) {
                fail(rp, "empty row");
            }
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            fail(rp, "ragged matrix");
        }
        for (size_t c = 0; c < cols; c++) {
            const Json &e = row[c];
            std::string ep = at(rp, c);
            Complex v;
            if (e.is_number()) {
                v = Complex(finite_double(e, ep), 0.0);
            } else if (e.is_array() && e.size() == 2) {
                v = Complex(finite_double(e[0], at(ep, 0)), finite_double(e[1], at(ep, 1)));
            } else {
                fail(ep, "expected [re, im] or a real number");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    return m;
}

Json complex_matrix_to_json(const ComplexMatrix &m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

RealMatrix parse_real_matrix(const Json &j, const std::string &path) {
    require_array(j, path);
    if (j.empty()) {
        fail(path, "matrix has no rows");
    }
    const size_t rows = j.size();
    size_t cols = 0;
    RealMatrix m;
    for (size_t r = 0; r < rows; r++) {
        const Json &row = j[r];
        std::string rp = at(path, r);
        require_array(row, rp);
        if (r == 0) {
            cols = row.size();
            if (cols == 0) {
                fail(rp, "empty row");
            }
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            fail(rp, "ragged matrix");
        }
        for (size_t c = 0; c < cols; c++) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = finite_double(row[c], at(rp, c));
        }
    }
    return m;
}

Json real_matrix_to_json(const RealMatrix &m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); r++) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); c++) {
            row.push_back(m(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

PauliLiouvilleMap parse_pl_map(const Json &j, const std::string &path) {
    require_object(j, path);
    allow_keys(j, {"n", "matrix"}, path);
    int n = as_int_in(member(j, "n", path), at(path, "n"), 1, 3);
    RealMatrix m = parse_real_matrix(member(j, "matrix", path), at(path, "matrix"));
    return with_path(path, [&] { return PauliLiouvilleMap(n, std::move(m)); });
}

Json to_json(const PauliLiouvilleMap &m) {
    return Json{{"n", m.num_qubits()}, {"matrix", real_matrix_to_json(m.matrix())}};
}

// ---------------------------------------------------------------------------
// Channels.

ChannelSpec parse_channel_spec(const Json &j, const std::string &path) {
    require_object(j, path);
    allow_keys(j, {"kind", "params"}, path);
    std::string kind = as_string(member(j, "kind", path), at(path, "kind"));
    Json empty = Json::object();
    auto it = j.find("params");
    const Json &params = it == j.end() ? empty : *it;
    std::string pp = at(path, "params");
    require_object(params, pp);

    ChannelSpec spec;
    if (kind == "depolarizing") {
        allow_keys(params, {"n", "delta"}, pp);
        channel_spec::Depolarizing s;
        if (params.contains("n")) {
            s.n = as_int_in(params["n"], at(pp, "n"), 1, 3);
        }
        s.delta = finite_double(member(params, "delta", pp), at(pp, "delta"));
        spec = s;
    } else if (kind == "dephasing") {
        allow_keys(params, {"gamma"}, pp);
        spec = channel_spec::Dephasing{finite_double(member(params, "gamma", pp), at(pp, "gamma"))};
    } else if (kind == "amplitude_damping") {
        allow_keys(params, {"gamma"}, pp);
        spec = channel_spec::AmplitudeDamping{finite_double(member(params, "gamma", pp), at(pp, "gamma"))};
    } else if (kind == "unitary") {
        allow_keys(params, {"matrix", "gate", "clifford"}, pp);
        int given = static_cast<int>(params.contains("matrix")) + static_cast<int>(params.contains("gate")) +
                    static_cast<int>(params.contains("clifford"));
        if (given != 1) {
            fail(pp, "give exactly one of 'matrix', 'gate' or 'clifford'");
        }
        if (params.contains("matrix")) {
            spec = channel_spec::Unitary{parse_complex_matrix(params["matrix"], at(pp, "matrix"))};
        } else if (params.contains("gate")) {
            std::string g = at(pp, "gate");
            spec = channel_spec::Unitary{named_gate_matrix(as_string(params["gate"], g), g)};
        } else {
            CliffordElement c = parse_clifford(params["clifford"], at(pp, "clifford"));
            if (c.num_qubits() > 3) {
                fail(at(pp, "clifford"), "dense unitaries need n <= 3");
            }
            spec = channel_spec::Unitary{circuit_unitary(c.num_qubits(), {CircuitGate::make_clifford(c)})};
        }
    } else if (kind == "kraus") {
        allow_keys(params, {"operators"}, pp);
        const Json &ops = member(params, "operators", pp);
        std::string op = at(pp, "operators");
        require_array(ops, op);
        channel_spec::Kraus s;
        for (size_t i = 0; i < ops.size(); i++) {
            s.operators.push_back(parse_complex_matrix(ops[i], at(op, i)));
        }
        spec = std::move(s);
    } else if (kind == "pl") {
        allow_keys(params, {"n", "matrix"}, pp);
        channel_spec::PauliLiouville s;
        s.n = as_int_in(member(params, "n", pp), at(pp, "n"), 1, 3);
        s.matrix = parse_real_matrix(member(params, "matrix", pp), at(pp, "matrix"));
        spec = std::move(s);
    } else if (kind == "random_cptp") {
        allow_keys(params, {"n", "seed", "env_dim"}, pp);
        channel_spec::RandomCptp s;
        if (params.contains("n")) {
            s.n = as_int_in(params["n"], at(pp, "n"), 1, 3);
        }
        s.seed = as_u64(member(params, "seed", pp), at(pp, "seed"));
        if (params.contains("env_dim")) {
            s.env_dim = as_int_in(params["env_dim"], at(pp, "env_dim"), 0, 4096);
        }
        spec = s;
    } else {
        fail(at(path, "kind"), "unknown channel kind '" + kind + "'");
    }
    with_path(path, [&] { return make_channel(spec); });
    return spec;
}

Json to_json(const ChannelSpec &spec) {
    return std::visit(
        [](const auto &s) -> Json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, channel_spec::Depolarizing>) {
                return Json{{"kind", "depolarizing"}, {"params", {{"n", s.n}, {"delta", s.delta}}}};
            } else if constexpr (std::is_same_v<T, channel_spec::Dephasing>) {
                return Json{{"kind", "dephasing"}, {"params", {{"gamma", s.gamma}}}};
            } else if constexpr (std::is_same_v<T, channel_spec::AmplitudeDamping>) {
                return Json{{"kind", "amplitude_damping"}, {"params", {{"gamma", s.gamma}}}};
            } else if constexpr (std::is_same_v<T, channel_spec::Unitary>) {
                return Json{{"kind", "unitary"}, {"params", {{"matrix", complex_matrix_to_json(s.matrix)}}}};
            } else if constexpr (std::is_same_v<T, channel_spec::Kraus>) {
                Json ops = Json::array();
                for (const auto &k : s.operators) {
                    ops.push_back(complex_matrix_to_json(k));
                }
                return Json{{"kind", "kraus"}, {"params", {{"operators", ops}}}};
            } else if constexpr (std::is_same_v<T, channel_spec::PauliLiouville>) {
                return Json{{"kind", "pl"}, {"params", {{"n", s.n}, {"matrix", real_matrix_to_json(s.matrix)}}}};
            } else {
                return Json{{"kind", "random_cptp"}, {"params", {{"n", s.n}, {"seed", s.seed}, {"env_dim", s.env_dim}}}};
            }
        },
        spec);
}

// ---------------------------------------------------------------------------
// Cliffords.

CliffordElement parse_clifford(const Json &j, const std::string &path) {
    if (j.is_number()) {
        return single_qubit_clifford(as_int_in(j, path, 0, 23));
    }
    require_object(j, path);
    allow_keys(j, {"id", "spanning", "tableau", "phases", "gate", "n", "qubit", "control", "target"}, path);
    if (j.contains("tableau")) {
        const Json &rows = j["tableau"];
        std::string rp = at(path, "tableau");
        require_array(rows, rp);
        std::vector<std::string> r;
        for (size_t i = 0; i < rows.size(); i++) {
            r.push_back(as_string(rows[i], at(rp, i)));
        }
        std::vector<bool> phases(r.size(), false);
        if (j.contains("phases")) {
            const Json &ph = j["phases"];
            std::string pp = at(path, "phases");
            require_array(ph, pp);
            if (ph.size() != r.size()) {
                fail(pp, "needs one phase bit per tableau row");
            }
            for (size_t i = 0; i < ph.size(); i++) {
                phases[i] = ph[i].is_boolean() ? ph[i].get<bool>() : as_int_in(ph[i], at(pp, i), 0, 1) == 1;
            }
        }
        CliffordElement c = with_path(path, [&] { return CliffordElement::from_tableau(r, phases); });
        if (j.contains("id") && (c.num_qubits() != 1 || single_qubit_clifford_id(c) != as_int(j["id"], at(path, "id")))) {
            fail(at(path, "id"), "does not match the tableau");
        }
        return c;
    }
    if (j.contains("id")) {
        return single_qubit_clifford(as_int_in(j["id"], at(path, "id"), 0, 23));
    }
    if (j.contains("spanning")) {
        return spanning_set_single_qubit()[static_cast<size_t>(as_int_in(j["spanning"], at(path, "spanning"), 0, 9))];
    }
    if (j.contains("gate")) {
        std::string g = as_string(j["gate"], at(path, "gate"));
        int n = j.contains("n") ? as_int_in(j["n"], at(path, "n"), 1, kMaxPauliQubits) : 1;
        auto qubit = [&](const char *key) {
            if (!j.contains(key)) {
                if (std::string(key) == "qubit" && n == 1) {
                    return 0;
                }
                fail(path, std::string("gate needs '") + key + "'");
            }
            return as_int_in(j[key], at(path, key), 0, n - 1);
        };
        return with_path(path, [&] {
            if (g == "I") {
                return CliffordElement::identity(n);
            }
            if (g == "H") {
                return CliffordElement::hadamard(n, qubit("qubit"));
            }
            if (g == "S") {
                return CliffordElement::phase(n, qubit("qubit"));
            }
            if (g == "X" || g == "Y" || g == "Z") {
                return CliffordElement::pauli(PauliOperator::single(n, qubit("qubit"), g[0]));
            }
            if (g == "CNOT" || g == "CX") {
                return CliffordElement::cnot(n, qubit("control"), qubit("target"));
            }
            fail(at(path, "gate"), "unknown Clifford gate '" + g + "'");
        });
    }
    fail(path, "expected one of 'id', 'spanning', 'tableau' or 'gate'");
}

Json to_json(const CliffordElement &c) {
    Json phases = Json::array();
    for (bool b : c.phase_bits()) {
        phases.push_back(b ? 1 : 0);
    }
    Json out{{"tableau", c.tableau_rows()}, {"phases", phases}};
    if (c.num_qubits() == 1) {
        out["id"] = single_qubit_clifford_id(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// RB configuration and results.

RBConfig parse_rb_config(const Json &j, const std::string &path) {
    require_object(j, path);
    allow_keys(j, {"n", "e_map", "noise_map", "target", "prep", "meas", "shots", "seed", "threads"}, path);
    RBConfig c;
    c.n = as_int_in(member(j, "n", path), at(path, "n"), 1, 3);
    c.e_map = parse_channel_spec(member(j, "e_map", path), at(path, "e_map"));
    c.noise_map = parse_channel_spec(member(j, "noise_map", path), at(path, "noise_map"));
    if (j.contains("target") && !j["target"].is_null()) {
        c.target = parse_clifford(j["target"], at(path, "target"));
    }
    if (j.contains("prep")) {
        std::string pp = at(path, "prep");
        require_object(j["prep"], pp);
        allow_keys(j["prep"], {"eta"}, pp);
        c.prep.eta = double_or(j["prep"], "eta", 0.0, pp);
    }
    if (j.contains("meas")) {
        std::string mp = at(path, "meas");
        require_object(j["meas"], mp);
        allow_keys(j["meas"], {"observable", "eta"}, mp);
        if (j["meas"].contains("observable")) {
            c.meas.observable = as_string(j["meas"]["observable"], at(mp, "observable"));
        }
        c.meas.eta = double_or(j["meas"], "eta", 0.0, mp);
    }
    if (j.contains("shots")) {
        c.shots = as_int_in(j["shots"], at(path, "shots"), 1, std::numeric_limits<int>::max());
    }
    if (j.contains("seed")) {
        c.seed = as_u64(j["seed"], at(path, "seed"));
    }
    if (j.contains("threads")) {
        c.threads = as_int_in(j["threads"], at(path, "threads"), 0, 4096);
    }
    with_path(path, [&] { return RBSystem(c); });
    return c;
}

Json to_json(const RBConfig &c) {
    Json out{
        {"n", c.n},
        {"e_map", to_json(c.e_map)},
        {"noise_map", to_json(c.noise_map)},
        {"prep", {{"eta", c.prep.eta}}},
        {"meas", {{"observable", c.meas.observable}, {"eta", c.meas.eta}}},
        {"shots", c.shots},
        {"seed", c.seed},
        {"threads", c.threads},
    };
    out["target"] = c.target ? to_json(*c.target) : Json(nullptr);
    return out;
}

Json to_json(const PEstimate &p) {
    return Json{
        {"p_hat", number(p.p_hat)},
        {"epsilon", number(p.epsilon)},
        {"delta", number(p.delta)},
        {"a_lower", number(p.a_lower)},
        {"clamped_to_zero", p.clamped_to_zero},
        {"samples_used", p.samples_used},
        {"diagnostics",
         {
             {"epsilon_prime", number(p.epsilon_prime)},
             {"delta_prime", number(p.delta_prime)},
             {"f1", number(p.f1)},
             {"f2", number(p.f2)},
             {"f_inf", number(p.f_inf)},
             {"k_inf", p.k_inf},
             {"floor_family", family_name(p.floor_family)},
         }},
    };
}

PEstimate parse_p_estimate(const Json &j, const std::string &path) {
    require_object(j, path);
    allow_keys(j, {"p_hat", "epsilon", "delta", "a_lower", "clamped_to_zero", "samples_used", "diagnostics"}, path);
    PEstimate p;
    p.p_hat = finite_double(member(j, "p_hat", path), at(path, "p_hat"));
    p.epsilon = as_double(member(j, "epsilon", path), at(path, "epsilon"));
    p.delta = finite_double(member(j, "delta", path), at(path, "delta"));
    p.a_lower = as_double(member(j, "a_lower", path), at(path, "a_lower"));
    p.clamped_to_zero = as_bool(member(j, "clamped_to_zero", path), at(path, "clamped_to_zero"));
    p.samples_used = as_u64(member(j, "samples_used", path), at(path, "samples_used"));
    if (p.p_hat < -1.0 || p.p_hat > 1.0) {
        fail(at(path, "p_hat"), "must lie in [-1, 1]");
    }
    if (!(p.delta > 0.0 && p.delta < 1.0)) {
        fail(at(path, "delta"), "must lie in (0, 1)");
    }
    if (j.contains("diagnostics")) {
        const Json &d = j["diagnostics"];
        std::string dp = at(path, "diagnostics");
        require_object(d, dp);
        allow_keys(d, {"epsilon_prime", "delta_prime", "f1", "f2", "f_inf", "k_inf", "floor_family"}, dp);
        auto opt = [&](const char *key, double &dst) {
            if (d.contains(key)) {
                dst = as_double(d[key], at(dp, key));
            }
        };
        opt("epsilon_prime", p.epsilon_prime);
        opt("delta_prime", p.delta_prime);
        opt("f1", p.f1);
        opt("f2", p.f2);
        opt("f_inf", p.f_inf);
        if (d.contains("k_inf")) {
            p.k_inf = as_int_in(d["k_inf"], at(dp, "k_inf"), 0, std::numeric_limits<int>::max());
        }
        if (d.contains("floor_family")) {
            std::string f = as_string(d["floor_family"], at(dp, "floor_family"));
            if (f == "main") {
                p.floor_family = Family::main;
            } else if (f == "noise_only") {
                p.floor_family = Family::noise_only;
            } else if (f == "shifted") {
                p.floor_family = Family::shifted;
            } else {
                fail(at(dp, "floor_family"), "unknown family '" + f + "'");
            }
        }
    }
    return p;
}

Json to_json(const FidelitySet &f) {
    Json out = Json::array();
    for (const auto &e : f.entries) {
        Json row;
        if (e.clifford.num_qubits() == 1) {
            row["clifford_id"] = single_qubit_clifford_id(e.clifford);
        } else {
            Json c = to_json(e.clifford);
            row["tableau"] = c["tableau"];
            row["phases"] = c["phases"];
        }
        row["f_hat"] = e.f_hat;
        row["epsilon"] = e.epsilon;
        row["delta"] = e.delta;
        out.push_back(std::move(row));
    }
    return out;
}

FidelitySet parse_fidelity_set(const Json &j, const std::string &path) {
    require_array(j, path);
    if (j.empty()) {
        fail(path, "needs at least one entry");
    }
    FidelitySet out;
    for (size_t i = 0; i < j.size(); i++) {
        const Json &row = j[i];
        std::string rp = at(path, i);
        require_object(row, rp);
        allow_keys(row, {"clifford_id", "tableau", "phases", "clifford", "f_hat", "epsilon", "delta"}, rp);
        FidelityEntry e;
        if (row.contains("clifford_id")) {
            e.clifford = single_qubit_clifford(as_int_in(row["clifford_id"], at(rp, "clifford_id"), 0, 23));
        } else if (row.contains("tableau")) {
            Json c{{"tableau", row["tableau"]}};
            if (row.contains("phases")) {
                c["phases"] = row["phases"];
            }
            e.clifford = parse_clifford(c, rp);
        } else if (row.contains("clifford")) {
            e.clifford = parse_clifford(row["clifford"], at(rp, "clifford"));
        } else {
            fail(rp, "needs 'clifford_id', 'tableau' or 'clifford'");
        }
        e.f_hat = finite_double(member(row, "f_hat", rp), at(rp, "f_hat"));
        e.epsilon = double_or(row, "epsilon", 0.0, rp);
        e.delta = double_or(row, "delta", 0.0, rp);
        if (e.epsilon < 0.0) {
            fail(at(rp, "epsilon"), "must be non-negative");
        }
        if (e.delta < 0.0 || e.delta >= 1.0) {
            fail(at(rp, "delta"), "must lie in [0, 1)");
        }
        if (i == 0) {
            out.n = e.clifford.num_qubits();
        } else if (e.clifford.num_qubits() != out.n) {
            fail(rp, "qubit count differs from the first entry");
        }
        out.entries.push_back(std::move(e));
    }
    return out;
}

Json to_json(const Interval &i) {
    return Json{{"lo", number(i.lo)}, {"hi", number(i.hi)}, {"valid", i.valid}};
}

Interval parse_interval(const Json &j, const std::string &path) {
    require_object(j, path);
    allow_keys(j, {"lo", "hi", "valid"}, path);
    Interval out;
    out.valid = as_bool(member(j, "valid", path), at(path, "valid"));
    out.lo = as_double(member(j, "lo", path), at(path, "lo"));
    out.hi = as_double(member(j, "hi", path), at(path, "hi"));
    if (out.valid) {
        if (!std::isfinite(out.lo) || !std::isfinite(out.hi)) {
            fail(path, "valid interval needs finite endpoints");
        }
        if (out.lo > out.hi) {
            fail(path, "lo exceeds hi");
        }
    }
    return out;
}

Json to_json(const LinearCombination &c) {
    Json terms = Json::array();
    for (const auto &t : c.terms) {
        terms.push_back(Json{{"beta", t.beta}, {"clifford", to_json(t.element)}});
    }
    return Json{
        {"n", c.n},
        {"t_count", c.t_count},
        {"clifford_count", c.clifford_count},
        {"one_norm", c.one_norm()},
        {"beta_sum", c.beta_sum()},
        {"terms", terms},
    };
}

LinearCombination parse_linear_combination(const Json &j, const std::string &path) {
    LinearCombination out;
    const Json *terms = &j;
    std::string tp = path;
    int declared_n = 0;
    if (j.is_object()) {
        allow_keys(j, {"n", "t_count", "clifford_count", "one_norm", "beta_sum", "terms"}, path);
        terms = &member(j, "terms", path);
        tp = at(path, "terms");
        if (j.contains("n")) {
            declared_n = as_int_in(j["n"], at(path, "n"), 1, kMaxPauliQubits);
        }
        if (j.contains("t_count")) {
            out.t_count = as_int_in(j["t_count"], at(path, "t_count"), 0, std::numeric_limits<int>::max());
        }
        if (j.contains("clifford_count")) {
            out.clifford_count =
                as_int_in(j["clifford_count"], at(path, "clifford_count"), 0, std::numeric_limits<int>::max());
        }
    }
    require_array(*terms, tp);
    if (terms->empty()) {
        fail(tp, "needs at least one term");
    }
    for (size_t i = 0; i < terms->size(); i++) {
        const Json &t = (*terms)[i];
        std::string ip = at(tp, i);
        require_object(t, ip);
        allow_keys(t, {"beta", "clifford"}, ip);
        CombinationTerm term;
        term.beta = finite_double(member(t, "beta", ip), at(ip, "beta"));
        term.element = parse_clifford(member(t, "clifford", ip), at(ip, "clifford"));
        out.terms.push_back(std::move(term));
    }
    out.n = out.terms.front().element.num_qubits();
    for (size_t i = 1; i < out.terms.size(); i++) {
        if (out.terms[i].element.num_qubits() != out.n) {
            fail(at(tp, i), "qubit count differs from the first term");
        }
    }
    if (declared_n != 0 && declared_n != out.n) {
        fail(at(path, "n"), "does not match the terms");
    }
    return out;
}

std::vector<CircuitGate> parse_circuit(const Json &j, int n, const std::string &path) {
    require_array(j, path);
    std::vector<CircuitGate> gates;
    for (size_t i = 0; i < j.size(); i++) {
        const Json &g = j[i];
        std::string gp = at(path, i);
        require_object(g, gp);
        std::string kind = as_string(member(g, "gate", gp), at(gp, "gate"));
        if (kind == "T") {
            allow_keys(g, {"gate", "qubit"}, gp);
            int q = g.contains("qubit") ? as_int_in(g["qubit"], at(gp, "qubit"), 0, n - 1) : 0;
            if (!g.contains("qubit") && n != 1) {
                fail(gp, "T needs 'qubit'");
            }
            gates.push_back(CircuitGate::make_t(q));
            continue;
        }
        CliffordElement c;
        if (kind == "clifford") {
            allow_keys(g, {"gate", "id", "spanning", "tableau", "phases"}, gp);
            Json body = g;
            body.erase("gate");
            c = parse_clifford(body, gp);
        } else {
            allow_keys(g, {"gate", "qubit", "control", "target"}, gp);
            Json body = g;
            body["n"] = n;
            c = parse_clifford(body, gp);
        }
        if (c.num_qubits() != n) {
            fail(gp, "acts on " + std::to_string(c.num_qubits()) + " qubits, circuit has " + std::to_string(n));
        }
        gates.push_back(CircuitGate::make_clifford(std::move(c)));
    }
    return gates;
}

Json to_json(const CpWitness &w) {
    return Json{
        {"cp", w.cp},
        {"via_conditions", w.via_conditions},
        {"via_choi", w.via_choi},
        {"lambdas", {w.lambdas[0], w.lambdas[1], w.lambdas[2]}},
        {"min_choi_eigenvalue", number(w.min_choi_eigenvalue)},
        {"condition_margin", number(w.condition_margin)},
    };
}

Json to_json(const Conditioning &c) {
    return Json{
        {"kappa", number(c.kappa)},
        {"smallest_singular_value", number(c.smallest_singular_value)},
        {"relative_error_bound", number(c.relative_error_bound)},
        {"valid", c.valid},
    };
}

// ---------------------------------------------------------------------------
// CSV.

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string decay_csv(const std::vector<DecayRecord> &records) {
    std::ostringstream out;
    out << "k,mean,stderr,n_sequences,shots\n";
    for (const auto &r : records) {
        out << r.k << ',' << format_double(r.mean) << ',' << format_double(r.stderr_mean) << ',' << r.sequences << ','
            << r.shots_per_sequence << '\n';
    }
    return out.str();
}

std::vector<BoundCurveRow> bound_curve_rows(double chi_b, const std::vector<double> &grid, int d) {
    if (!(chi_b >= 0.0 && chi_b <= 1.0)) {
        throw ValidationError("chi_b must lie in [0, 1]");
    }
    std::vector<BoundCurveRow> rows;
    rows.reserve(grid.size());
    for (double x : grid) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw ValidationError("grid values must lie in [0, 1]");
        }
        rows.push_back({x, bound_deconvolved_chi00(x, chi_b), mgj_bound_chi00(x, chi_b, d)});
    }
    return rows;
}

std::string bound_curves_csv(const std::vector<BoundCurveRow> &rows) {
    std::ostringstream out;
    out << "chi_ab,ours_lo,ours_hi,mgj_lo,mgj_hi,mgj_valid\n";
    for (const auto &r : rows) {
        out << format_double(r.chi_ab) << ',' << format_double(r.ours.lo) << ',' << format_double(r.ours.hi) << ','
            << format_double(r.mgj.lo) << ',' << format_double(r.mgj.hi) << ',' << (r.mgj.valid ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string noncp_scan_csv(const NonCpScan &scan) {
    std::ostringstream out;
    out << "trial,min_choi_eigenvalue,noncp\n";
    for (const auto &r : scan.rows) {
        out << r.trial << ',' << format_double(r.min_choi_eigenvalue) << ',' << (r.noncp ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace rbtomo::io
