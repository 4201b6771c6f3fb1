#include "tmot/motion.hpp"

#include <Eigen/Cholesky>

#include "tmot/error.hpp"

namespace tmot {
namespace {

using Measurement = Eigen::Matrix<double, 4, 1>;
using ProjectionMatrix = Eigen::Matrix<double, 4, 8>;

void require_measurable(const BoundingBox& b, const char* op) {
    if (!b.is_finite() || !(b.width > 0.0) || !(b.height > 0.0)) {
        throw GeometryError(std::string(op) + ": invalid measurement (zero-area or non-finite box)");
    }
}

Measurement to_measurement(const BoundingBox& b) {
    const CenterBox c = b.to_center();
    return Measurement{c.cx, c.cy, c.aspect, c.height};
}

StateCovariance transition() {
    StateCovariance f = StateCovariance::Identity();
    for (int i = 0; i < 4; ++i) {
        f(i, i + 4) = 1.0;
    }
    return f;
}

ProjectionMatrix projection() {
    ProjectionMatrix h = ProjectionMatrix::Zero();
    for (int i = 0; i < 4; ++i) {
        h(i, i) = 1.0;
    }
    return h;
}

}  // namespace

BoundingBox KalmanState::box() const {
    return BoundingBox::from_center(CenterBox{mean(0), mean(1), mean(2), mean(3)});
}

KalmanState kf_initiate(const BoundingBox& b, const KalmanParams& p) {
    require_measurable(b, "kf_initiate");
    KalmanState s;
    s.mean.head<4>() = to_measurement(b);
    const double h = s.mean(3);
    StateVector std_dev;
    std_dev << 2.0 * p.std_weight_position * h, 2.0 * p.std_weight_position * h, p.aspect_std_initiate,
        2.0 * p.std_weight_position * h, 10.0 * p.std_weight_velocity * h, 10.0 * p.std_weight_velocity * h,
        p.aspect_velocity_std_initiate, 10.0 * p.std_weight_velocity * h;
    s.covariance = std_dev.array().square().matrix().asDiagonal();
    return s;
}

KalmanState kf_predict(const KalmanState& s, const KalmanParams& p) {
    static const StateCovariance f = transition();
    const double h = s.mean(3);
    StateVector std_dev;
    std_dev << p.std_weight_position * h, p.std_weight_position * h, p.aspect_std_process,
        p.std_weight_position * h, p.std_weight_velocity * h, p.std_weight_velocity * h,
        p.aspect_velocity_std_process, p.std_weight_velocity * h;
    const StateCovariance q = std_dev.array().square().matrix().asDiagonal();

    KalmanState out;
    out.mean = f * s.mean;
    out.covariance = f * s.covariance * f.transpose() + q;
    return out;
}

KalmanState kf_update(const KalmanState& s, const BoundingBox& b, const KalmanParams& p) {
    require_measurable(b, "kf_update");
    static const ProjectionMatrix h_mat = projection();
    const double h = s.mean(3);
    Measurement std_dev{p.std_weight_position * h, p.std_weight_position * h, p.aspect_std_measurement,
                        p.std_weight_position * h};
    const Eigen::Matrix4d r = std_dev.array().square().matrix().asDiagonal();

    const Measurement projected_mean = h_mat * s.mean;
    const Eigen::Matrix4d projected_cov = h_mat * s.covariance * h_mat.transpose() + r;

    // K = P H^T S^-1, solved through the Cholesky factor of S.
    const Eigen::LLT<Eigen::Matrix4d> chol(projected_cov);
    const Eigen::Matrix<double, 8, 4> gain =
        chol.solve(h_mat * s.covariance.transpose()).transpose();

    KalmanState out;
    out.mean = s.mean + gain * (to_measurement(b) - projected_mean);
    const StateCovariance cov = s.covariance - gain * projected_cov * gain.transpose();
    out.covariance = 0.5 * (cov + cov.transpose());
    return out;
}

SimilarityMatrix motion_similarity_matrix(std::span<const BoundingBox> predicted, std::span<const Detection> dets) {
    SimilarityMatrix sim(predicted.size(), dets.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        for (std::size_t j = 0; j < dets.size(); ++j) {
            sim(i, j) = iou(predicted[i], dets[j].bbox);
        }
    }
    return sim;
}

}  // namespace tmot
