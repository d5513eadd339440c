// Copyright 2026 The surface7 Authors
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

// surface7: command-line front end.
//
// Exit codes: 0 success, 2 bad flags or config, 3 numerical failure.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "surface7/io.hpp"
#include "surface7/surface7.hpp"

namespace {

using namespace surface7;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct CommonFlags {
  std::string config_path;
  std::string noise = "on";
  std::string out = "-";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Device config JSON (default: built-in device)");
  cmd->add_option("--noise", f.noise, "on or off")->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--out", f.out, "Output path, '-' for standard output");
}

DeviceConfig resolve_config(const CommonFlags& f) {
  return f.config_path.empty() ? default_config() : io::load_config_file(f.config_path);
}

void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    io::write_text_file(path, text);
  }
}

PrepSpec parse_amplitudes(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--amplitudes: '" + item + "' is not a number");
    }
  }
  if (v.size() != 2 && v.size() != 3) throw ConfigError("--amplitudes expects a,b or a,b,phi");
  PrepSpec spec = PrepAmplitudes{v[0], v[1], v.size() == 3 ? v[2] : 0.0};
  amplitudes_of(spec);
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seven-qubit surface-code error-detection simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kToolVersion));

  CommonFlags prep_f, detect_f, parity_f, sample_f, sched_f;
  std::string prep_state, prep_amplitudes;
  std::string detect_state, detect_basis;
  int detect_cycles = 10;
  std::string sample_state = "0L";
  int sample_cycles = 1;
  std::uint64_t sample_shots = 1000;
  std::uint64_t sample_seed = 0;
  std::string validate_config;
  std::string validate_out = "-";
  std::string sched_state;

  auto* prep = app.add_subcommand("prep", "Post-selected logical state preparation (one cycle)");
  add_common(prep, prep_f);
  auto* state_opt = prep->add_option("--state", prep_state, "0L, 1L, +L or -L");
  auto* amp_opt = prep->add_option("--amplitudes", prep_amplitudes, "a,b[,phi] for |0>(a|0>+b|1>)|0>(a|0>+b e^{i phi}|1>)");
  state_opt->excludes(amp_opt);

  auto* detect = app.add_subcommand("detect", "Repeated error detection; CSV plus <stem>.fit.json");
  add_common(detect, detect_f);
  detect->add_option("--state", detect_state, "0L, 1L, +L or -L")->required();
  detect->add_option("--basis", detect_basis, "Z or X (default: Z for 0L/1L, X for +L/-L)");
  detect->add_option("--cycles", detect_cycles, "Number of cycles, 1..50")->check(CLI::Range(1, 50));

  auto* parity = app.add_subcommand("parity", "Single-stabilizer parity characterization");
  add_common(parity, parity_f);

  auto* sample = app.add_subcommand("sample", "Monte Carlo syndrome-history histogram");
  add_common(sample, sample_f);
  sample->add_option("--state", sample_state, "0L, 1L, +L or -L");
  sample->add_option("--cycles", sample_cycles, "Number of cycles, 1..50")->check(CLI::Range(1, 50));
  sample->add_option("--shots", sample_shots, "Number of shots (>= 1)")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_seed, "RNG seed");

  auto* validate_cmd = app.add_subcommand("validate-config", "Validate a config and print it fully resolved");
  validate_cmd->add_option("--config", validate_config, "Device config JSON")->required();
  validate_cmd->add_option("--out", validate_out, "Output path, '-' for standard output");

  auto* schedule_cmd = app.add_subcommand("schedule", "Print the compiled cycle (and optional preparation)");
  schedule_cmd->add_option("--config", sched_f.config_path, "Device config JSON");
  schedule_cmd->add_option("--state", sched_state, "Also print the preparation burst for this target");
  schedule_cmd->add_option("--out", sched_f.out, "Output path, '-' for standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto started = std::chrono::steady_clock::now();
  std::string command;
  try {
    if (*prep) {
      command = "prep";
      if (prep_state.empty() && prep_amplitudes.empty()) throw ConfigError("prep needs --state or --amplitudes");
      const PrepSpec target =
          prep_state.empty() ? parse_amplitudes(prep_amplitudes) : PrepSpec(parse_logical_target(prep_state));
      const DeviceConfig config = resolve_config(prep_f);
      const PrepResult r = run_prep(target, config, prep_f.noise == "on");
      emit(prep_f.out, io::dump(io::prep_document(io::make_manifest(command, config), target, r)));
    } else if (*detect) {
      command = "detect";
      if (detect_f.out == "-") throw ConfigError("detect needs --out <file.csv> for the CSV and its fit sidecar");
      const LogicalTarget named = parse_logical_target(detect_state);
      const Basis basis = detect_basis.empty()
                              ? (named == LogicalTarget::ZeroL || named == LogicalTarget::OneL ? Basis::Z : Basis::X)
                              : parse_basis(detect_basis);
      const DeviceConfig config = resolve_config(detect_f);
      const auto points = run_detection(named, detect_cycles, config, basis, detect_f.noise == "on");
      std::optional<FitResult> fit;
      if (points.size() >= 3) fit = fit_detection(io::rounded(points), config.timing.cycle_ns / 1000.0);
      const std::string sidecar = io::sidecar_path(detect_f.out);
      emit(detect_f.out, io::detection_csv(points));
      emit(sidecar, io::dump(io::fit_document(io::make_manifest(command, config), named, basis, fit)));
    } else if (*parity) {
      command = "parity";
      const DeviceConfig config = resolve_config(parity_f);
      const auto results = run_parity_characterization(config, parity_f.noise == "on");
      emit(parity_f.out, io::dump(io::parity_document(io::make_manifest(command, config), results)));
    } else if (*sample) {
      command = "sample";
      const LogicalTarget named = parse_logical_target(sample_state);
      const DeviceConfig config = resolve_config(sample_f);
      const auto histogram =
          sample_trajectories(named, sample_cycles, sample_shots, sample_seed, config, sample_f.noise == "on");
      emit(sample_f.out, io::dump(io::sample_document(io::make_manifest(command, config, sample_seed), named,
                                                      sample_cycles, sample_shots, histogram)));
    } else if (*validate_cmd) {
      command = "validate-config";
      const DeviceConfig config = io::load_config_file(validate_config);
      emit(validate_out, serialize(config) + "\n");
    } else if (*schedule_cmd) {
      command = "schedule";
      const DeviceConfig config = resolve_config(sched_f);
      std::string text;
      if (!sched_state.empty()) {
        Schedule prep_schedule{{build_prep(parse_logical_target(sched_state))}, 0.0};
        text += "# preparation\n" + prep_schedule.dump() + "# cycle\n";
      }
      text += build_cycle(config).dump();
      emit(sched_f.out, text);
    }
  } catch (const ConfigError& e) {
    std::cerr << "surface7: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ScheduleError& e) {
    std::cerr << "surface7: schedule error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "surface7: invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "surface7: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "surface7: error: " << e.what() << '\n';
    return kExitNumeric;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::fprintf(stderr, "surface7: %s finished in %.2f s\n", command.c_str(), seconds);
  return kExitOk;
}
