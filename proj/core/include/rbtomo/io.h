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

#ifndef RBTOMO_IO_H
#define RBTOMO_IO_H

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "rbtomo/bounds.h"
#include "rbtomo/channel.h"
#include "rbtomo/clifford.h"
#include "rbtomo/rb.h"
#include "rbtomo/unital.h"

namespace rbtomo::io {

using Json = nlohmann::json;

// Parsers validate shape and ranges and throw ValidationError naming the offending path.
// Writers emit documents their parser accepts.

/// {"kind": "depolarizing", "n": 1, "delta": 0.98}, {"kind": "unitary", "gate": "H"}, ...
ChannelSpec parse_channel_spec(const Json &j, const std::string &path = "channel");
Json to_json(const ChannelSpec &spec);

/// {"id": k} (single qubit), {"spanning": k}, {"gate": "H", "n": 1, "qubit": 0} or
/// {"tableau": ["x|z", ...], "phases": [0, 1, ...]}.
CliffordElement parse_clifford(const Json &j, const std::string &path = "clifford");
Json to_json(const CliffordElement &c);

ComplexMatrix parse_complex_matrix(const Json &j, const std::string &path);
Json complex_matrix_to_json(const ComplexMatrix &m);
RealMatrix parse_real_matrix(const Json &j, const std::string &path);
Json real_matrix_to_json(const RealMatrix &m);

/// {"n": 1, "matrix": [[...]]}
PauliLiouvilleMap parse_pl_map(const Json &j, const std::string &path = "map");
Json to_json(const PauliLiouvilleMap &m);

RBConfig parse_rb_config(const Json &j, const std::string &path = "rb");
Json to_json(const RBConfig &c);

Json to_json(const PEstimate &p);
PEstimate parse_p_estimate(const Json &j, const std::string &path = "estimate");

Json to_json(const FidelitySet &f);
FidelitySet parse_fidelity_set(const Json &j, const std::string &path = "fidelities");

Json to_json(const Interval &i);
Interval parse_interval(const Json &j, const std::string &path = "interval");

Json to_json(const LinearCombination &c);
LinearCombination parse_linear_combination(const Json &j, const std::string &path = "combination");

/// [{"gate": "T", "qubit": 0}, {"gate": "clifford", "id": 3}, {"gate": "H", "qubit": 1}, ...]
std::vector<CircuitGate> parse_circuit(const Json &j, int n, const std::string &path = "circuit");

Json to_json(const CpWitness &w);
Json to_json(const Conditioning &c);

// ---------------------------------------------------------------------------
// CSV.

/// Shortest round-trip decimal form.
std::string format_double(double x);

/// Header k,mean,stderr,n_sequences,shots.
std::string decay_csv(const std::vector<DecayRecord> &records);

struct BoundCurveRow {
    double chi_ab = 0.0;
    Interval ours;
    Interval mgj;
};
std::vector<BoundCurveRow> bound_curve_rows(double chi_b, const std::vector<double> &grid, int d);
/// Header chi_ab,ours_lo,ours_hi,mgj_lo,mgj_hi,mgj_valid.
std::string bound_curves_csv(const std::vector<BoundCurveRow> &rows);

/// Header trial,min_choi_eigenvalue,noncp.
std::string noncp_scan_csv(const NonCpScan &scan);

}  // namespace rbtomo::io

#endif
