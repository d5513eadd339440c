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

#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "surface7/errors.hpp"

namespace surface7 {

/// Decay times at or above this are reported as "no decay resolvable".
inline constexpr double kNoDecaySentinelUs = 1e6;

struct FitResult {
  double amplitude = 0.0;
  double decay_time_us = 0.0;
  double stderr_us = 0.0;
  double error_per_cycle = 0.0;  // 1 - exp(-cycle / tau)
  bool decay_resolved = true;
  int iterations = 0;
};

inline double error_per_cycle(double decay_time_us, double cycle_us = 1.92) {
  return 1.0 - std::exp(-cycle_us / decay_time_us);
}

/// Least-squares fit of y = A exp(-t / tau) with uniform weights.
///
/// Starts from a log-linear regression (or from A = 1 and the endpoint ratio
/// when some y <= 0) and refines with Levenberg-Marquardt on (A, 1/tau).
/// The standard error comes from the inverse Gauss-Newton Hessian scaled by
/// the residual variance.
inline FitResult fit_exponential(const std::vector<std::pair<double, double>>& points, double cycle_us = 1.92) {
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("fit_exponential needs at least 3 points");
  {
    std::set<double> ts;
    for (const auto& [t, y] : points) {
      if (!std::isfinite(t) || !std::isfinite(y)) throw std::invalid_argument("fit_exponential: non-finite point");
      ts.insert(t);
    }
    if (ts.size() != n) throw std::invalid_argument("fit_exponential: sample times must be distinct");
  }

  double amp = 1.0;
  double rate = 0.0;  // 1/tau
  const bool all_positive = std::all_of(points.begin(), points.end(), [](const auto& p) { return p.second > 0.0; });
  if (all_positive) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (const auto& [t, y] : points) {
      const double l = std::log(y);
      st += t;
      sl += l;
      stt += t * t;
      stl += t * l;
    }
    const double nn = static_cast<double>(n);
    const double den = nn * stt - st * st;
    const double slope = (nn * stl - st * sl) / den;
    rate = -slope;
    amp = std::exp((sl - slope * st) / nn);
  } else {
    auto sorted = points;
    std::sort(sorted.begin(), sorted.end());
    const auto& first = sorted.front();
    const auto& last = sorted.back();
    const double span = last.first - first.first;
    rate = (first.second > 0.0 && last.second > 0.0) ? std::log(first.second / last.second) / span : 1.0 / span;
  }

  const auto ssr = [&](double a, double k) {
    double s = 0.0;
    for (const auto& [t, y] : points) {
      const double r = y - a * std::exp(-k * t);
      s += r * r;
    }
    return s;
  };

  double lambda = 1e-3;
  double current = ssr(amp, rate);
  int it = 0;
  double h00 = 0, h01 = 0, h11 = 0;
  for (; it < 100; ++it) {
    double g0 = 0, g1 = 0;
    h00 = h01 = h11 = 0;
    for (const auto& [t, y] : points) {
      const double e = std::exp(-rate * t);
      const double r = y - amp * e;
      const double j0 = e;
      const double j1 = -amp * t * e;
      h00 += j0 * j0;
      h01 += j0 * j1;
      h11 += j1 * j1;
      g0 += j0 * r;
      g1 += j1 * r;
    }
    bool stepped = false;
    double rel_change = 0.0;
    for (int tries = 0; tries < 30 && !stepped; ++tries) {
      const double a00 = h00 * (1.0 + lambda);
      const double a11 = h11 * (1.0 + lambda);
      const double det = a00 * a11 - h01 * h01;
      if (!(std::abs(det) > 1e-300)) throw NumericError("fit_exponential: singular normal equations");
      const double da = (a11 * g0 - h01 * g1) / det;
      const double dk = (a00 * g1 - h01 * g0) / det;
      const double trial = ssr(amp + da, rate + dk);
      if (trial <= current) {
        rel_change = std::hypot(da, dk) / std::max(std::hypot(amp, rate), 1e-300);
        amp += da;
        rate += dk;
        current = trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        stepped = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped || rel_change < 1e-10) break;
  }

  FitResult out;
  out.amplitude = amp;
  out.iterations = it;
  const double det = h00 * h11 - h01 * h01;
  if (!(std::abs(det) > 1e-300)) throw NumericError("fit_exponential: singular normal equations");
  const double var = n > 2 ? current / static_cast<double>(n - 2) : 0.0;
  const double rate_stderr = std::sqrt(std::max(0.0, var * h00 / det));
  if (rate <= 1.0 / kNoDecaySentinelUs) {
    out.decay_time_us = kNoDecaySentinelUs;
    out.stderr_us = kNoDecaySentinelUs;
    out.decay_resolved = false;
  } else {
    out.decay_time_us = 1.0 / rate;
    out.stderr_us = rate_stderr / (rate * rate);
  }
  out.error_per_cycle = error_per_cycle(out.decay_time_us, cycle_us);
  return out;
}

}  // namespace surface7
