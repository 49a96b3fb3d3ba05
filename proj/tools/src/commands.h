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

#ifndef RBTOMO_TOOLS_COMMANDS_H
#define RBTOMO_TOOLS_COMMANDS_H

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rbtomo/io.h"

namespace rbtomo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Flags shared by every subcommand. Flag values override the matching config fields.
struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    bool analytic = false;
    std::optional<int> threads;
};

// Each command maps a parsed config document to the text it emits.
std::string cmd_simulate_decay(const io::Json &config, const CommonFlags &flags);
std::string cmd_estimate_p(const io::Json &config, const CommonFlags &flags);
std::string cmd_reconstruct(const io::Json &config, const CommonFlags &flags);
std::string cmd_bound_curves(const io::Json &config, const CommonFlags &flags);
std::string cmd_decompose(const io::Json &config, const CommonFlags &flags);
std::string cmd_bound_fidelity(const io::Json &config, const CommonFlags &flags);
std::string cmd_cp_scan(const io::Json &config, const CommonFlags &flags);
std::string cmd_span_check(const io::Json &config, const CommonFlags &flags);

/// Parses arguments, runs one subcommand and writes its output to --out or `out`.
/// Returns the process exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace rbtomo::cli

#endif
