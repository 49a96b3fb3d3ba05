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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rbtomo/errors.h"

using namespace rbtomo;
using io::Json;

namespace {

double max_abs_diff(const RealMatrix &a, const RealMatrix &b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(io, channel_spec_round_trip_every_kind) {
    std::vector<ChannelSpec> specs{
        channel_spec::Depolarizing{2, 0.9},
        channel_spec::Dephasing{0.7},
        channel_spec::AmplitudeDamping{0.2},
        channel_spec::Unitary{pauli_matrix(PauliOperator::from_label("Y"))},
        channel_spec::Kraus{random_cptp_kraus(1, 5)},
        channel_spec::PauliLiouville{1, make_channel(channel_spec::Dephasing{0.3}).matrix()},
        channel_spec::RandomCptp{2, 11, 3},
    };
    for (const auto &spec : specs) {
        Json j = io::to_json(spec);
        ChannelSpec back = io::parse_channel_spec(j);
        EXPECT_EQ(back.index(), spec.index());
        EXPECT_LT(max_abs_diff(make_channel(back).matrix(), make_channel(spec).matrix()), 1e-15);
        EXPECT_EQ(io::to_json(back), j);
        // Text form survives a dump and parse as well.
        EXPECT_EQ(io::parse_channel_spec(Json::parse(j.dump())).index(), spec.index());
    }
}

TEST(io, channel_spec_named_gate_and_clifford) {
    ChannelSpec h = io::parse_channel_spec(Json::parse(R"({"kind": "unitary", "params": {"gate": "H"}})"));
    EXPECT_LT(max_abs_diff(make_channel(h).matrix(), CliffordElement::hadamard(1, 0).pl().matrix()), 1e-14);
    ChannelSpec c = io::parse_channel_spec(
        Json::parse(R"({"kind": "unitary", "params": {"clifford": {"gate": "CNOT", "n": 2, "control": 0, "target": 1}}})"));
    EXPECT_LT(max_abs_diff(make_channel(c).matrix(), CliffordElement::cnot(2, 0, 1).pl().matrix()), 1e-14);
}

TEST(io, channel_spec_rejects_bad_documents) {
    EXPECT_THROW(io::parse_channel_spec(Json::parse(R"({"kind": "bogus"})")), ValidationError);
    EXPECT_THROW(io::parse_channel_spec(Json::parse(R"({"kind": "dephasing", "params": {}})")), ValidationError);
    EXPECT_THROW(
        io::parse_channel_spec(Json::parse(R"({"kind": "dephasing", "params": {"gamma": 0.5, "x": 1}})")),
        ValidationError);
    EXPECT_THROW(
        io::parse_channel_spec(Json::parse(R"({"kind": "depolarizing", "params": {"delta": 7}})")), ValidationError);
    EXPECT_THROW(
        io::parse_channel_spec(Json::parse(R"({"kind": "unitary", "params": {"matrix": [[1, 0], [0]]}})")),
        ValidationError);
    EXPECT_THROW(
        io::parse_channel_spec(Json::parse(R"({"kind": "unitary", "params": {"matrix": [[1, 1], [0, 1]]}})")),
        ValidationError);
    EXPECT_THROW(io::parse_channel_spec(Json::parse(R"([1, 2])")), ValidationError);
}

TEST(io, validation_messages_name_the_path) {
    try {
        io::parse_channel_spec(Json::parse(R"({"kind": "dephasing", "params": {"gamma": "high"}})"));
        FAIL();
    } catch (const ValidationError &e) {
        EXPECT_NE(std::string(e.what()).find("channel.params.gamma"), std::string::npos) << e.what();
    }
}

TEST(io, clifford_round_trip_by_tableau_and_id) {
    for (int id = 0; id < 24; id++) {
        const CliffordElement &c = single_qubit_clifford(id);
        Json j = io::to_json(c);
        EXPECT_EQ(j["id"], id);
        EXPECT_EQ(io::parse_clifford(j), c);
        EXPECT_EQ(io::parse_clifford(Json{{"id", id}}), c);
        EXPECT_EQ(io::parse_clifford(Json{{"tableau", j["tableau"]}, {"phases", j["phases"]}}), c);
    }
    Rng rng(3);
    for (int t = 0; t < 20; t++) {
        CliffordElement c = sample_uniform_clifford(3, rng);
        Json j = io::to_json(c);
        EXPECT_FALSE(j.contains("id"));
        EXPECT_EQ(io::parse_clifford(Json::parse(j.dump())), c);
    }
}

TEST(io, clifford_rejects_bad_documents) {
    EXPECT_THROW(io::parse_clifford(Json{{"id", 24}}), ValidationError);
    EXPECT_THROW(io::parse_clifford(Json{{"spanning", 10}}), ValidationError);
    // X -> X, Z -> X breaks the commutation relations.
    EXPECT_THROW(io::parse_clifford(Json::parse(R"({"tableau": ["1|0", "1|0"], "phases": [0, 0]})")), ValidationError);
    EXPECT_THROW(io::parse_clifford(Json::parse(R"({"tableau": ["1|0", "0|1"], "phases": [0]})")), ValidationError);
    EXPECT_THROW(io::parse_clifford(Json::parse(R"({"gate": "H", "n": 2, "qubit": 2})")), ValidationError);
    EXPECT_THROW(io::parse_clifford(Json::parse(R"({"tableau": ["1|0", "0|1"], "id": 5})")), ValidationError);
}

TEST(io, rb_config_round_trip) {
    RBConfig c;
    c.n = 1;
    c.e_map = channel_spec::Unitary{pauli_matrix(PauliOperator::from_label("X"))};
    c.noise_map = channel_spec::Depolarizing{1, 0.98};
    c.target = spanning_set_single_qubit()[1];
    c.prep.eta = 0.05;
    c.meas = {"Z", 0.1};
    c.shots = 4;
    c.seed = 18446744073709551615ull;
    Json j = io::to_json(c);
    RBConfig back = io::parse_rb_config(Json::parse(j.dump()));
    EXPECT_EQ(io::to_json(back), j);
    EXPECT_EQ(back.seed, c.seed);
    ASSERT_TRUE(back.target.has_value());
    EXPECT_EQ(*back.target, *c.target);
}

TEST(io, rb_config_rejects_out_of_range) {
    Json base = io::to_json(RBConfig{});
    Json bad = base;
    bad["meas"]["eta"] = 0.5;
    EXPECT_THROW(io::parse_rb_config(bad), ValidationError);
    bad = base;
    bad["prep"]["eta"] = -0.1;
    EXPECT_THROW(io::parse_rb_config(bad), ValidationError);
    bad = base;
    bad["meas"]["observable"] = "X";
    EXPECT_THROW(io::parse_rb_config(bad), ValidationError);
    bad = base;
    bad["n"] = 2;
    EXPECT_THROW(io::parse_rb_config(bad), ValidationError);
    bad = base;
    bad["shots"] = 0;
    EXPECT_THROW(io::parse_rb_config(bad), ValidationError);
    bad = base;
    bad["colour"] = "red";
    EXPECT_THROW(io::parse_rb_config(bad), ValidationError);
}

TEST(io, p_estimate_round_trip) {
    PEstimate p;
    p.p_hat = -1.0 / 3.0;
    p.epsilon = 0.05;
    p.delta = 0.01;
    p.a_lower = 0.7;
    p.samples_used = 123456;
    p.k_inf = 17;
    p.floor_family = Family::shifted;
    Json j = io::to_json(p);
    for (const char *key : {"p_hat", "epsilon", "delta", "a_lower", "clamped_to_zero", "samples_used"}) {
        EXPECT_TRUE(j.contains(key)) << key;
    }
    PEstimate back = io::parse_p_estimate(Json::parse(j.dump()));
    EXPECT_EQ(io::to_json(back), j);
    Json bad = j;
    bad["p_hat"] = 1.5;
    EXPECT_THROW(io::parse_p_estimate(bad), ValidationError);
}

TEST(io, fidelity_set_round_trip_both_forms) {
    FidelitySet one = exact_fidelity_set(CliffordElement::hadamard(1, 0).pl(), spanning_set_single_qubit());
    Json j1 = io::to_json(one);
    ASSERT_TRUE(j1.is_array());
    EXPECT_TRUE(j1[0].contains("clifford_id"));
    FidelitySet b1 = io::parse_fidelity_set(Json::parse(j1.dump()));
    EXPECT_EQ(io::to_json(b1), j1);

    Rng rng(8);
    std::vector<CliffordElement> cs{sample_uniform_clifford(2, rng), sample_uniform_clifford(2, rng)};
    FidelitySet two = exact_fidelity_set(PauliLiouvilleMap::identity(2), cs);
    Json j2 = io::to_json(two);
    EXPECT_TRUE(j2[0].contains("tableau"));
    FidelitySet b2 = io::parse_fidelity_set(j2);
    EXPECT_EQ(b2.n, 2);
    EXPECT_EQ(b2.entries[1].clifford, cs[1]);

    Json mixed = Json::array({j1[0], j2[0]});
    EXPECT_THROW(io::parse_fidelity_set(mixed), ValidationError);
    EXPECT_THROW(io::parse_fidelity_set(Json::array()), ValidationError);
}

TEST(io, interval_round_trip_with_invalid_flag) {
    Interval i{0.25, 0.75, true};
    EXPECT_EQ(io::to_json(io::parse_interval(io::to_json(i))), io::to_json(i));
    Interval bad{0.0, 0.0, false};
    Interval back = io::parse_interval(io::to_json(bad));
    EXPECT_FALSE(back.valid);
    EXPECT_THROW(io::parse_interval(Json::parse(R"({"lo": 0.9, "hi": 0.1, "valid": true})")), ValidationError);
}

TEST(io, linear_combination_round_trip) {
    LinearCombination t = decompose_T();
    Json j = io::to_json(t);
    EXPECT_EQ(j["terms"].size(), 3u);
    EXPECT_NEAR(j["one_norm"].get<double>(), std::numbers::sqrt2, 1e-12);
    LinearCombination back = io::parse_linear_combination(Json::parse(j.dump()));
    EXPECT_EQ(io::to_json(back), j);
    EXPECT_LT(max_abs_diff(back.pl(), t.pl()), 1e-15);
    // The bare term list is accepted too.
    LinearCombination bare = io::parse_linear_combination(j["terms"]);
    EXPECT_EQ(bare.terms.size(), 3u);
}

TEST(io, circuit_parses_all_gate_forms) {
    Json j = Json::parse(R"([
        {"gate": "T", "qubit": 1},
        {"gate": "clifford", "id": 3},
        {"gate": "H", "qubit": 0},
        {"gate": "CNOT", "control": 0, "target": 1},
        {"gate": "clifford", "tableau": ["10|00", "01|00", "00|10", "00|01"], "phases": [0, 0, 0, 1]}
    ])");
    EXPECT_THROW(io::parse_circuit(j, 2), ValidationError);
    j.erase(1);
    std::vector<CircuitGate> g = io::parse_circuit(j, 2);
    ASSERT_EQ(g.size(), 4u);
    EXPECT_EQ(g[0].kind, CircuitGate::Kind::t);
    EXPECT_EQ(g[0].qubit, 1);
    EXPECT_EQ(g[1].clifford, CliffordElement::hadamard(2, 0));
    EXPECT_EQ(g[2].clifford, CliffordElement::cnot(2, 0, 1));
    EXPECT_EQ(g[3].clifford, CliffordElement::pauli(PauliOperator::single(2, 1, 'X')));
    EXPECT_THROW(io::parse_circuit(Json::parse(R"([{"gate": "T", "qubit": 2}])"), 2), ValidationError);
    EXPECT_THROW(io::parse_circuit(Json::parse(R"([{"gate": "Q"}])"), 1), ValidationError);
    EXPECT_TRUE(io::parse_circuit(Json::array(), 1).empty());
}

TEST(io, format_double_round_trips) {
    for (double x : {0.0, 1.0, -1.0 / 3.0, 0.995, 1e-300, 123456789.123456789}) {
        EXPECT_EQ(std::stod(io::format_double(x)), x);
    }
    EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(io, csv_headers_and_rows) {
    std::vector<DecayRecord> recs{{1, 0.5, 10, 1, 0.01}, {2, 0.25, 10, 1, 0.02}};
    EXPECT_EQ(io::decay_csv(recs), "k,mean,stderr,n_sequences,shots\n1,0.5,0.01,10,1\n2,0.25,0.02,10,1\n");

    auto rows = io::bound_curve_rows(1.0, {0.9, 0.95}, 2);
    std::string csv = io::bound_curves_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "chi_ab,ours_lo,ours_hi,mgj_lo,mgj_hi,mgj_valid");
    EXPECT_DOUBLE_EQ(rows[0].ours.lo, 0.9);
    EXPECT_DOUBLE_EQ(rows[0].ours.hi, 0.9);
    EXPECT_THROW(io::bound_curve_rows(1.2, {0.5}, 2), ValidationError);

    NonCpScan scan{0.5, {{0, -0.01, true, 0.0}, {1, 0.02, false, 0.0}}};
    EXPECT_EQ(io::noncp_scan_csv(scan), "trial,min_choi_eigenvalue,noncp\n0,-0.01,1\n1,0.02,0\n");
}
