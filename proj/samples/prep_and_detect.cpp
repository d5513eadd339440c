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

// Prepares the four cardinal logical states on the default device, then
// tracks the Z-basis logical expectation value over a few detection cycles.
//
//   prep_and_detect [cycles]

#include <cstdio>
#include <cstdlib>

#include "surface7/experiment.hpp"

int main(int argc, char** argv) {
  using namespace surface7;
  const int cycles = argc > 1 ? std::atoi(argv[1]) : 5;
  const CycleSimulator sim(default_config(), true);

  std::printf("target  P(000)   P_L      F_L\n");
  for (LogicalTarget t : {LogicalTarget::ZeroL, LogicalTarget::OneL, LogicalTarget::PlusL, LogicalTarget::MinusL}) {
    const PrepResult r = run_prep(t, sim);
    std::printf("%-6s  %.4f   %.4f   %.4f\n", std::string(to_string(t)).c_str(), r.success_prob, r.p_l, r.f_l);
  }

  for (auto [target, basis] : {std::pair{LogicalTarget::ZeroL, Basis::Z}, std::pair{LogicalTarget::PlusL, Basis::X}}) {
    std::printf("\n%s, basis %s\n  n   t_us     <L>      p_s      k0     k1     k2     k3\n",
                std::string(to_string(target)).c_str(), std::string(to_string(basis)).c_str());
    const auto points = run_detection(target, cycles, sim, basis);
    for (const auto& p : points) {
      std::printf("%3d  %6.2f  %7.4f  %7.4f  %.3f  %.3f  %.3f  %.3f\n", p.n, p.t_us, p.observable, p.p_s, p.k_dist[0],
                  p.k_dist[1], p.k_dist[2], p.k_dist[3]);
    }
    if (points.size() >= 3) {
      const FitResult fit = fit_detection(points);
      std::printf("  tau = %.2f +- %.2f us, error/cycle = %.4f\n", fit.decay_time_us, fit.stderr_us,
                  fit.error_per_cycle);
    }
  }
  return 0;
}
