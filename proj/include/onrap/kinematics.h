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

// Spatial-domain kinematic bicycle model. The independent variable is the
// longitudinal coordinate x in the planning frame, advanced by a fixed step
// ds; the control is the slip angle at the vehicle center.

#ifndef ONRAP_KINEMATICS_H_
#define ONRAP_KINEMATICS_H_

#include <span>
#include <vector>

namespace onrap {

inline constexpr double kDefaultDomainBuffer = 0.05;  // rad

struct PlanarState {
  double x = 0.0;        // longitudinal position [m]
  double y = 0.0;        // lateral position [m]
  double heading = 0.0;  // [rad]
};

struct VehicleGeometry {
  double l_f = 1.0;     // CG to front axle [m]
  double l_r = 1.0;     // CG to rear axle [m]
  double length = 2.0;  // [m]
  double width = 1.0;   // [m]

  double wheelbase() const { return l_f + l_r; }
  /// Throws std::invalid_argument unless every field is strictly positive.
  void Validate() const;
};

/// Slip-angle controls u_0 .. u_{N-1} [rad].
using ControlSequence = std::vector<double>;

/// Advances one longitudinal step. x grows by exactly `ds`.
/// Throws DomainError when heading + u is not inside
/// (-pi/2 + domain_buffer, pi/2 - domain_buffer).
PlanarState Step(const PlanarState& state, double u, double ds, double l_r,
                 double domain_buffer = kDefaultDomainBuffer);

/// Applies Step for every control; returns N+1 states starting at `initial`.
/// Domain errors carry the offending step index.
std::vector<PlanarState> Rollout(const PlanarState& initial,
                                 std::span<const double> controls, double ds,
                                 const VehicleGeometry& geometry,
                                 double domain_buffer = kDefaultDomainBuffer);

/// Physical front steering angle that produces slip `beta`:
/// delta = atan(L / l_r * tan(beta)).
double SteeringFromSlip(double beta, const VehicleGeometry& geometry);
/// Inverse of SteeringFromSlip: beta = atan(l_r / L * tan(delta)).
double SlipFromSteering(double delta, const VehicleGeometry& geometry);

/// Time-domain kinematic bicycle at unit speed and constant front steering
/// `steer`, integrated with RK4 over `n_substeps` equal arc-length slices.
/// Used as an independent reference for the spatial model.
PlanarState TimeDomainOracle(const PlanarState& initial, double steer,
                             double arc_length,
                             const VehicleGeometry& geometry, int n_substeps);

/// Same oracle, but integrates until the longitudinal coordinate reaches
/// `target_x` (the spatial model's natural stopping point). Requires the
/// motion to stay forward, i.e. |heading + slip| < pi/2 throughout.
PlanarState TimeDomainOracleToX(const PlanarState& initial, double steer,
                                double target_x,
                                const VehicleGeometry& geometry,
                                int n_substeps);

}  // namespace onrap

#endif  // ONRAP_KINEMATICS_H_
