// Copyright 2026 The ONRAP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "onrap/kinematics.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "onrap/errors.h"

namespace onrap {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Right-hand side of the constant-slip bicycle per unit arc length.
struct ArcDerivative {
  double dx, dy, dheading;
};

ArcDerivative ArcRhs(const PlanarState& s, double beta, double l_r) {
  return {std::cos(s.heading + beta), std::sin(s.heading + beta),
          std::sin(beta) / l_r};
}

PlanarState Rk4Arc(const PlanarState& s, double beta, double l_r, double h) {
  auto shifted = [&](const ArcDerivative& d, double f) {
    return PlanarState{s.x + f * d.dx, s.y + f * d.dy,
                       s.heading + f * d.dheading};
  };
  const ArcDerivative k1 = ArcRhs(s, beta, l_r);
  const ArcDerivative k2 = ArcRhs(shifted(k1, h / 2), beta, l_r);
  const ArcDerivative k3 = ArcRhs(shifted(k2, h / 2), beta, l_r);
  const ArcDerivative k4 = ArcRhs(shifted(k3, h), beta, l_r);
  return {s.x + h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx),
          s.y + h / 6 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy),
          s.heading + h / 6 *
                          (k1.dheading + 2 * k2.dheading + 2 * k3.dheading +
                           k4.dheading)};
}

}  // namespace

void VehicleGeometry::Validate() const {
  if (!(l_f > 0) || !(l_r > 0) || !(length > 0) || !(width > 0)) {
    throw std::invalid_argument(
        "vehicle geometry: l_f, l_r, length and width must be positive");
  }
}

PlanarState Step(const PlanarState& state, double u, double ds, double l_r,
                 double domain_buffer) {
  const double angle = state.heading + u;
  if (!(std::abs(angle) < kHalfPi - domain_buffer)) {
    std::ostringstream msg;
    msg << "heading + slip = " << angle
        << " rad is outside the spatial model domain (+/-"
        << kHalfPi - domain_buffer << ")";
    throw DomainError(msg.str());
  }
  const double c = std::cos(angle);
  return {state.x + ds, state.y + std::tan(angle) * ds,
          state.heading + ds / l_r * std::sin(u) / c};
}

std::vector<PlanarState> Rollout(const PlanarState& initial,
                                 std::span<const double> controls, double ds,
                                 const VehicleGeometry& geometry,
                                 double domain_buffer) {
  std::vector<PlanarState> states;
  states.reserve(controls.size() + 1);
  states.push_back(initial);
  for (std::size_t k = 0; k < controls.size(); ++k) {
    try {
      states.push_back(
          Step(states.back(), controls[k], ds, geometry.l_r, domain_buffer));
    } catch (const DomainError& e) {
      throw DomainError("step " + std::to_string(k) + ": " + e.what(), k);
    }
  }
  return states;
}

double SteeringFromSlip(double beta, const VehicleGeometry& geometry) {
  return std::atan(geometry.wheelbase() / geometry.l_r * std::tan(beta));
}

double SlipFromSteering(double delta, const VehicleGeometry& geometry) {
  return std::atan(geometry.l_r / geometry.wheelbase() * std::tan(delta));
}

PlanarState TimeDomainOracle(const PlanarState& initial, double steer,
                             double arc_length,
                             const VehicleGeometry& geometry,
                             int n_substeps) {
  geometry.Validate();
  if (n_substeps < 1 || !(arc_length >= 0)) {
    throw std::invalid_argument("oracle: need n_substeps >= 1, arc >= 0");
  }
  const double beta = SlipFromSteering(steer, geometry);
  const double h = arc_length / n_substeps;
  PlanarState s = initial;
  for (int i = 0; i < n_substeps; ++i) s = Rk4Arc(s, beta, geometry.l_r, h);
  return s;
}

PlanarState TimeDomainOracleToX(const PlanarState& initial, double steer,
                                double target_x,
                                const VehicleGeometry& geometry,
                                int n_substeps) {
  geometry.Validate();
  if (n_substeps < 1 || !(target_x >= initial.x)) {
    throw std::invalid_argument("oracle: need n_substeps >= 1, target ahead");
  }
  const double beta = SlipFromSteering(steer, geometry);
  const double h = (target_x - initial.x) / n_substeps;
  PlanarState s = initial;
  // Forward motion guarantees progress; the cap only guards against callers
  // that violate the precondition.
  for (long i = 0; i < 1000L * n_substeps; ++i) {
    if (!(std::abs(s.heading + beta) < kHalfPi)) {
      throw DomainError("oracle: vehicle stopped moving forward");
    }
    const PlanarState next = Rk4Arc(s, beta, geometry.l_r, h);
    if (next.x < target_x) {
      s = next;
      continue;
    }
    // Bisect the partial slice that lands exactly on target_x.
    double lo = 0.0, hi = h;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (Rk4Arc(s, beta, geometry.l_r, mid).x < target_x ? lo : hi) = mid;
    }
    return Rk4Arc(s, beta, geometry.l_r, 0.5 * (lo + hi));
  }
  throw DomainError("oracle: target x not reached");
}

}  // namespace onrap
