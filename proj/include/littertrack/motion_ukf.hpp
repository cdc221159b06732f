// Copyright 2026 The littertrack Authors. All Rights Reserved.
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

#pragma once

#include <functional>

#include <Eigen/Dense>

#include "littertrack/geometry.hpp"

namespace littertrack::ukf {

// Box state: (cx, cy, aspect, h, vcx, vcy, vaspect, vh).
inline constexpr int kStateDim = 8;
inline constexpr int kMeasurementDim = 4;

struct UkfParams {
  // Unscented transform scaling.
  double alpha = 0.5;
  double beta = 2.0;
  double kappa = 3.0 - kStateDim;

  // Standard deviations relative to box height h.
  double process_position = 1.0 / 20.0;
  double process_velocity = 1.0 / 160.0;
  double measurement_position = 1.0 / 20.0;

  // Absolute standard deviations for the aspect ratio components.
  double process_aspect = 1e-2;
  double process_aspect_velocity = 1e-5;
  double measurement_aspect = 1e-1;

  // Lower bounds applied to the posterior mean.
  double min_height = 1e-3;
  double min_aspect = 1e-6;

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }

  // Throws ConfigError on alpha outside (0, 1] or n + lambda == 0.
  void validate(int n = kStateDim) const;
};

struct MotionState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// Points are stored column-wise: column 0 is the mean, columns 1..n are
// mean + root columns, n+1..2n are mean - root columns.
struct SigmaPoints {
  Eigen::MatrixXd points;
  Eigen::VectorXd mean_weights;
  Eigen::VectorXd covariance_weights;
};

// Pluggable dynamics. The default is the linear constant-velocity model.
struct TransitionModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> transition;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> measure;

  static TransitionModel constant_velocity();
};

// Predicted measurement distribution for a state: innovation covariance S
// (measurement noise included) and state/measurement cross covariance.
struct MeasurementPrediction {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd cross_covariance;
};

Eigen::VectorXd measurement_vector(const Measurement& z);

// Lower-triangular L with L * L^T == cov. Zero matrices yield a zero root;
// otherwise Cholesky is retried with diagonal jitter 1e-9, doubled up to five
// times, before a NumericalError is raised.
Eigen::MatrixXd covariance_root(const Eigen::MatrixXd& cov);

SigmaPoints sigma_points(const Eigen::VectorXd& mean,
                         const Eigen::MatrixXd& covariance,
                         const UkfParams& params);
SigmaPoints sigma_points(const MotionState& state, const UkfParams& params);

// Height-proportional noise for the 8-dimensional box state.
Eigen::MatrixXd process_noise(const Eigen::VectorXd& mean,
                              const UkfParams& params, double dt);
Eigen::MatrixXd measurement_noise(const Eigen::VectorXd& mean,
                                  const UkfParams& params);

// Fresh track state centered on a first measurement.
MotionState initiate(const Measurement& z, const UkfParams& params);

MotionState predict(const MotionState& state, const TransitionModel& model,
                    const UkfParams& params, double dt,
                    const Eigen::MatrixXd& process_cov);
MotionState predict(const MotionState& state, const TransitionModel& model,
                    const UkfParams& params, double dt);
MotionState predict(const MotionState& state, const UkfParams& params,
                    double dt);

MeasurementPrediction project(const MotionState& state,
                              const TransitionModel& model,
                              const UkfParams& params,
                              const Eigen::MatrixXd& measurement_cov);
MeasurementPrediction project(const MotionState& state,
                              const UkfParams& params);

// Kalman correction from a precomputed projection. Does not clamp.
MotionState correct(const MotionState& state,
                    const MeasurementPrediction& predicted,
                    const Eigen::VectorXd& z);

MotionState update(const MotionState& state, const Eigen::VectorXd& z,
                   const TransitionModel& model, const UkfParams& params,
                   const Eigen::MatrixXd& measurement_cov);
// Box-state update; clamps aspect and height of the posterior mean.
MotionState update(const MotionState& state, const Measurement& z,
                   const UkfParams& params);

double mahalanobis_squared(const MeasurementPrediction& predicted,
                           const Eigen::VectorXd& z);
double mahalanobis(const MeasurementPrediction& predicted,
                   const Eigen::VectorXd& z);
double mahalanobis(const MotionState& state, const Measurement& z,
                   const UkfParams& params);

Measurement state_measurement(const MotionState& state);

}  // namespace littertrack::ukf
