// Copyright 2026 The concbound Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace concbound::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitSolver = 3;

// Runs one invocation; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// 17 significant digits, '.' decimal point regardless of locale.
std::string format_double(double v);

}  // namespace concbound::cli
