// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The propsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end and the experiment drivers behind it.

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "propsense/control.hpp"
#include "propsense/error.hpp"
#include "propsense/estimators.hpp"
#include "propsense/metrics.hpp"
#include "propsense/simulator.hpp"

namespace propsense::cli {

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kParse = 3,
  kIo = 4,
  kConfig = 5,
};

// Flag combination that parses but makes no sense (e.g. --method oracle for
// offline estimation).
class UsageError : public Error {
public:
  using Error::Error;
};

// ---- distance sweep -----------------------------------------------------------

struct SweepOptions {
  std::vector<double> distances; // array-center wall distances [m]
  double duration = 10.0;       // seconds of audio per distance
  double threshold = 0.030;     // usable-range error bound [m]
};

struct SweepRow {
  double distance = 0.0;
  metrics::ErrorStats beam;
  metrics::ErrorStats channel;
};

// 0.04, 0.06, ..., 0.70
std::vector<double> default_sweep_distances();

// Parses "a:b:step" or a comma-separated list.
std::vector<double> parse_distances(const std::string &text);

// Renders `duration` seconds at every distance (template translated along the
// wall normal) and scores both acoustic methods against the true distance.
std::vector<SweepRow> run_sweep(const sim::SimScene &scene_template, const est::EstimatorConfig &cfg,
                                const SweepOptions &options);

// Largest sweep distance whose mean |error| is below `threshold`.
std::optional<double> usable_range(const std::vector<SweepRow> &rows, est::Method method,
                                   double threshold);

// ---- entry point ----------------------------------------------------------------

// Runs the CLI; never throws. Output directories default to
// $PROPSENSE_OUT_ROOT (or ./runs) / <subcommand>-<UTC timestamp>.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace propsense::cli
