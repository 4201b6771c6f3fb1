#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "tmot/core.hpp"

namespace tmot {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;

/// Constant-velocity state over (cx, cy, aspect, height) and their
/// per-frame velocities.
struct KalmanState {
    StateVector mean = StateVector::Zero();
    StateCovariance covariance = StateCovariance::Zero();

    /// Box encoded by the position block of the mean.
    [[nodiscard]] BoundingBox box() const;
};

/// Noise model. Position and velocity standard deviations scale with the
/// box height; the aspect terms are fixed.
struct KalmanParams {
    double std_weight_position = 1.0 / 20.0;
    double std_weight_velocity = 1.0 / 160.0;
    double aspect_std_initiate = 1e-2;
    double aspect_velocity_std_initiate = 1e-5;
    double aspect_std_process = 1e-2;
    double aspect_velocity_std_process = 1e-5;
    double aspect_std_measurement = 1e-1;
};

/// Throws GeometryError for zero-area or non-finite boxes.
[[nodiscard]] KalmanState kf_initiate(const BoundingBox& b, const KalmanParams& p = {});

/// Advances one frame: mean <- F mean, P <- F P F^T + Q.
[[nodiscard]] KalmanState kf_predict(const KalmanState& s, const KalmanParams& p = {});

/// Corrects with a measured box. Throws GeometryError for zero-area or
/// non-finite boxes.
[[nodiscard]] KalmanState kf_update(const KalmanState& s, const BoundingBox& b, const KalmanParams& p = {});

/// S_motion: entry (i, j) = iou(predicted_i, det_j).
[[nodiscard]] SimilarityMatrix motion_similarity_matrix(std::span<const BoundingBox> predicted,
                                                        std::span<const Detection> dets);

}  // namespace tmot
