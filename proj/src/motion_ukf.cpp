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

#include "littertrack/motion_ukf.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "littertrack/error.hpp"

namespace littertrack::ukf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void UkfParams::validate(int n) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError(fmt::format("ukf.alpha must lie in (0, 1], got {}", alpha));
  }
  if (n + lambda(n) == 0.0) {
    throw ConfigError("ukf parameters give n + lambda == 0");
  }
  if (process_position < 0 || process_velocity < 0 || measurement_position < 0 ||
      process_aspect < 0 || process_aspect_velocity < 0 ||
      measurement_aspect < 0) {
    throw ConfigError("ukf noise scales must be non-negative");
  }
}

TransitionModel TransitionModel::constant_velocity() {
  TransitionModel m;
  m.transition = [](const VectorXd& x, double dt) {
    VectorXd out = x;
    const Eigen::Index half = x.size() / 2;
    out.head(half) += dt * x.tail(half);
    return out;
  };
  m.measure = [](const VectorXd& x) -> VectorXd {
    return x.head(x.size() / 2);
  };
  return m;
}

VectorXd measurement_vector(const Measurement& z) {
  VectorXd v(kMeasurementDim);
  v << z.cx, z.cy, z.aspect, z.h;
  return v;
}

Measurement state_measurement(const MotionState& state) {
  return {state.mean(0), state.mean(1), state.mean(2), state.mean(3)};
}

MatrixXd covariance_root(const MatrixXd& cov) {
  const MatrixXd sym = 0.5 * (cov + cov.transpose());
  if (sym.cwiseAbs().maxCoeff() == 0.0) {
    return MatrixXd::Zero(cov.rows(), cov.cols());
  }
  Eigen::LLT<MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  double jitter = 1e-9;
  const MatrixXd eye = MatrixXd::Identity(cov.rows(), cov.cols());
  for (int attempt = 0; attempt <= 5; ++attempt, jitter *= 2.0) {
    llt.compute(sym + jitter * eye);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  throw NumericalError("covariance is not positive semi-definite (Cholesky failed)");
}

SigmaPoints sigma_points(const VectorXd& mean, const MatrixXd& covariance,
                         const UkfParams& params) {
  const int n = static_cast<int>(mean.size());
  params.validate(n);
  const double lambda = params.lambda(n);
  const double spread = n + lambda;
  if (spread < 0.0) {
    throw ConfigError("ukf parameters give negative n + lambda");
  }

  const MatrixXd root = std::sqrt(spread) * covariance_root(covariance);

  SigmaPoints sp;
  sp.points.resize(n, 2 * n + 1);
  sp.points.col(0) = mean;
  for (int i = 0; i < n; ++i) {
    sp.points.col(1 + i) = mean + root.col(i);
    sp.points.col(1 + n + i) = mean - root.col(i);
  }

  sp.mean_weights = VectorXd::Constant(2 * n + 1, 1.0 / (2.0 * spread));
  sp.covariance_weights = sp.mean_weights;
  sp.mean_weights(0) = lambda / spread;
  sp.covariance_weights(0) =
      lambda / spread + (1.0 - params.alpha * params.alpha + params.beta);
  return sp;
}

SigmaPoints sigma_points(const MotionState& state, const UkfParams& params) {
  return sigma_points(state.mean, state.covariance, params);
}

MatrixXd process_noise(const VectorXd& mean, const UkfParams& params,
                       double dt) {
  const double h = mean(3);
  VectorXd std(kStateDim);
  std << params.process_position * h, params.process_position * h,
      params.process_aspect, params.process_position * h,
      params.process_velocity * h, params.process_velocity * h,
      params.process_aspect_velocity, params.process_velocity * h;
  return (dt * std.array().square()).matrix().asDiagonal();
}

MatrixXd measurement_noise(const VectorXd& mean, const UkfParams& params) {
  const double h = mean(3);
  VectorXd std(kMeasurementDim);
  std << params.measurement_position * h, params.measurement_position * h,
      params.measurement_aspect, params.measurement_position * h;
  return std.array().square().matrix().asDiagonal();
}

MotionState initiate(const Measurement& z, const UkfParams& params) {
  MotionState s;
  s.mean = VectorXd::Zero(kStateDim);
  s.mean.head(kMeasurementDim) = measurement_vector(z);
  const double h = z.h;
  VectorXd std(kStateDim);
  std << 2 * params.process_position * h, 2 * params.process_position * h,
      1e-2, 2 * params.process_position * h, 10 * params.process_velocity * h,
      10 * params.process_velocity * h, 1e-5, 10 * params.process_velocity * h;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

namespace {

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

MotionState predict(const MotionState& state, const TransitionModel& model,
                    const UkfParams& params, double dt,
                    const MatrixXd& process_cov) {
  if (!(dt > 0.0)) {
    throw InputError(fmt::format("predict requires dt > 0, got {}", dt));
  }
  const SigmaPoints sp = sigma_points(state, params);
  const Eigen::Index count = sp.points.cols();

  MatrixXd propagated(sp.points.rows(), count);
  for (Eigen::Index i = 0; i < count; ++i) {
    propagated.col(i) = model.transition(sp.points.col(i), dt);
  }

  MotionState out;
  out.mean = propagated * sp.mean_weights;
  const MatrixXd dev = propagated.colwise() - out.mean;
  out.covariance =
      symmetrized(dev * sp.covariance_weights.asDiagonal() * dev.transpose() +
                  process_cov);
  return out;
}

MotionState predict(const MotionState& state, const TransitionModel& model,
                    const UkfParams& params, double dt) {
  return predict(state, model, params, dt,
                 process_noise(state.mean, params, dt));
}

MotionState predict(const MotionState& state, const UkfParams& params,
                    double dt) {
  static const TransitionModel kModel = TransitionModel::constant_velocity();
  return predict(state, kModel, params, dt);
}

MeasurementPrediction project(const MotionState& state,
                              const TransitionModel& model,
                              const UkfParams& params,
                              const MatrixXd& measurement_cov) {
  const SigmaPoints sp = sigma_points(state, params);
  const Eigen::Index count = sp.points.cols();

  MatrixXd measured(measurement_cov.rows(), count);
  for (Eigen::Index i = 0; i < count; ++i) {
    measured.col(i) = model.measure(sp.points.col(i));
  }

  MeasurementPrediction p;
  p.mean = measured * sp.mean_weights;
  const MatrixXd dz = measured.colwise() - p.mean;
  const MatrixXd dx = sp.points.colwise() - state.mean;
  p.covariance = symmetrized(
      dz * sp.covariance_weights.asDiagonal() * dz.transpose() + measurement_cov);
  p.cross_covariance = dx * sp.covariance_weights.asDiagonal() * dz.transpose();
  return p;
}

MeasurementPrediction project(const MotionState& state,
                              const UkfParams& params) {
  static const TransitionModel kModel = TransitionModel::constant_velocity();
  return project(state, kModel, params, measurement_noise(state.mean, params));
}

MotionState correct(const MotionState& state,
                    const MeasurementPrediction& predicted,
                    const VectorXd& z) {
  Eigen::LLT<MatrixXd> llt(predicted.covariance);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("innovation covariance is singular");
  }
  // K = Pxz S^-1, computed as (S^-1 Pzx)^T since S is symmetric.
  const MatrixXd gain =
      llt.solve(predicted.cross_covariance.transpose()).transpose();

  MotionState out;
  out.mean = state.mean + gain * (z - predicted.mean);
  out.covariance = symmetrized(state.covariance -
                               gain * predicted.covariance * gain.transpose());
  return out;
}

MotionState update(const MotionState& state, const VectorXd& z,
                   const TransitionModel& model, const UkfParams& params,
                   const MatrixXd& measurement_cov) {
  return correct(state, project(state, model, params, measurement_cov), z);
}

MotionState update(const MotionState& state, const Measurement& z,
                   const UkfParams& params) {
  MotionState out = correct(state, project(state, params), measurement_vector(z));
  out.mean(2) = std::max(out.mean(2), params.min_aspect);
  out.mean(3) = std::max(out.mean(3), params.min_height);
  return out;
}

double mahalanobis_squared(const MeasurementPrediction& predicted,
                           const VectorXd& z) {
  Eigen::LLT<MatrixXd> llt(predicted.covariance);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("innovation covariance is singular");
  }
  const VectorXd innovation = z - predicted.mean;
  const VectorXd whitened = llt.matrixL().solve(innovation);
  return whitened.squaredNorm();
}

double mahalanobis(const MeasurementPrediction& predicted, const VectorXd& z) {
  return std::sqrt(mahalanobis_squared(predicted, z));
}

double mahalanobis(const MotionState& state, const Measurement& z,
                   const UkfParams& params) {
  return mahalanobis(project(state, params), measurement_vector(z));
}

}  // namespace littertrack::ukf
