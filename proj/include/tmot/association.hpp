#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tmot/assignment.hpp"
#include "tmot/core.hpp"

namespace tmot {

/// Integer-aligned pixel patch cut from a GrayImage.
struct RoiPatch {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> values;  // row-major, width * height

    friend bool operator==(const RoiPatch&, const RoiPatch&) = default;
};

/// Normalized intensity histogram. An all-zero weight vector is the
/// sentinel for an empty ROI.
struct Histogram {
    int bins = 0;
    std::uint32_t range_max = 0;
    std::vector<double> weights;

    [[nodiscard]] bool is_empty() const;
};

/// Binning used for ROI histograms. Zero means "derive from the image":
/// 32 bins for 8-bit and 64 bins for 16-bit, range 2^bit_depth.
struct HistogramConfig {
    int bins = 0;
    std::uint32_t range_max = 0;

    [[nodiscard]] int bins_for(int bit_depth) const;
    [[nodiscard]] std::uint32_t range_for(int bit_depth) const;
};

/// Pixels under `b`: left/top floored, right/bottom ceiled, clipped to the
/// image. nullopt when the clipped box covers less than one pixel.
[[nodiscard]] std::optional<RoiPatch> extract_roi(const GrayImage& img, const BoundingBox& b);

/// Value v goes to bin floor(v * bins / range_max), clamped to bins - 1.
/// Throws ConfigError when bins < 1 or range_max < 1.
[[nodiscard]] Histogram compute_histogram(std::span<const std::uint16_t> roi, int bins, std::uint32_t range_max);

/// Histogram of the ROI under `b`, or the sentinel when the ROI is empty.
[[nodiscard]] Histogram roi_histogram(const GrayImage& img, const BoundingBox& b, const HistogramConfig& cfg);

/// Bhattacharyya coefficient sum_k sqrt(h1_k * h2_k), in [0, 1].
/// Throws ConfigError on mismatched binning.
[[nodiscard]] double bhattacharyya(const Histogram& h1, const Histogram& h2);

/// Pairwise Bhattacharyya between precomputed track and detection
/// histograms.
[[nodiscard]] SimilarityMatrix histogram_similarity_matrix(std::span<const Histogram> track_hists,
                                                           std::span<const Histogram> det_hists);

/// S_thermal: both ROIs are cut from the same image `img`, the track ROI
/// at the given (predicted) box.
[[nodiscard]] SimilarityMatrix thermal_similarity_matrix(std::span<const BoundingBox> track_boxes,
                                                         std::span<const BoundingBox> det_boxes,
                                                         const GrayImage& img, const HistogramConfig& cfg);

/// S_comp = alpha * S_motion + (1 - alpha) * S_thermal.
[[nodiscard]] SimilarityMatrix fuse(const SimilarityMatrix& motion, const SimilarityMatrix& thermal, double alpha);

}  // namespace tmot
