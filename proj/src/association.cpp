#include "tmot/association.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tmot/error.hpp"

namespace tmot {

bool Histogram::is_empty() const {
    return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; });
}

int HistogramConfig::bins_for(int bit_depth) const {
    if (bins > 0) {
        return bins;
    }
    return bit_depth > 8 ? 64 : 32;
}

std::uint32_t HistogramConfig::range_for(int bit_depth) const {
    if (range_max > 0) {
        return range_max;
    }
    return 1u << bit_depth;
}

std::optional<RoiPatch> extract_roi(const GrayImage& img, const BoundingBox& b) {
    if (img.empty()) {
        return std::nullopt;
    }
    const auto clipped = clip_to_image(b, img.width(), img.height());
    if (!clipped || clipped->area() < 1.0) {
        return std::nullopt;
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(clipped->left)));
    const int y0 = std::max(0, static_cast<int>(std::floor(clipped->top)));
    const int x1 = std::min(img.width(), static_cast<int>(std::ceil(clipped->right())));
    const int y1 = std::min(img.height(), static_cast<int>(std::ceil(clipped->bottom())));
    if (x1 <= x0 || y1 <= y0) {
        return std::nullopt;
    }
    RoiPatch roi{x0, y0, x1 - x0, y1 - y0, {}};
    roi.values.reserve(static_cast<std::size_t>(roi.width) * static_cast<std::size_t>(roi.height));
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            roi.values.push_back(img.at(x, y));
        }
    }
    return roi;
}

Histogram compute_histogram(std::span<const std::uint16_t> roi, int bins, std::uint32_t range_max) {
    if (bins < 1) {
        throw ConfigError("histogram needs at least one bin, got " + std::to_string(bins));
    }
    if (range_max < 1) {
        throw ConfigError("histogram range_max must be positive");
    }
    Histogram h{bins, range_max, std::vector<double>(static_cast<std::size_t>(bins), 0.0)};
    if (roi.empty()) {
        return h;
    }
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(bins), 0);
    const auto last = static_cast<std::uint64_t>(bins - 1);
    for (std::uint16_t v : roi) {
        const std::uint64_t bin = static_cast<std::uint64_t>(v) * static_cast<std::uint64_t>(bins) / range_max;
        ++counts[std::min(bin, last)];
    }
    const auto total = static_cast<double>(roi.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        h.weights[k] = static_cast<double>(counts[k]) / total;
    }
    return h;
}

Histogram roi_histogram(const GrayImage& img, const BoundingBox& b, const HistogramConfig& cfg) {
    const int bins = cfg.bins_for(img.bit_depth());
    const std::uint32_t range = cfg.range_for(img.bit_depth());
    const auto roi = extract_roi(img, b);
    if (!roi) {
        return compute_histogram({}, bins, range);
    }
    return compute_histogram(roi->values, bins, range);
}

double bhattacharyya(const Histogram& h1, const Histogram& h2) {
    if (h1.bins != h2.bins || h1.range_max != h2.range_max || h1.weights.size() != h2.weights.size()) {
        throw ConfigError("bhattacharyya: histograms use different binning");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < h1.weights.size(); ++k) {
        sum += std::sqrt(h1.weights[k] * h2.weights[k]);
    }
    return std::clamp(sum, 0.0, 1.0);
}

SimilarityMatrix histogram_similarity_matrix(std::span<const Histogram> track_hists,
                                             std::span<const Histogram> det_hists) {
    SimilarityMatrix sim(track_hists.size(), det_hists.size());
    for (std::size_t i = 0; i < track_hists.size(); ++i) {
        for (std::size_t j = 0; j < det_hists.size(); ++j) {
            sim(i, j) = bhattacharyya(track_hists[i], det_hists[j]);
        }
    }
    return sim;
}

SimilarityMatrix thermal_similarity_matrix(std::span<const BoundingBox> track_boxes,
                                           std::span<const BoundingBox> det_boxes, const GrayImage& img,
                                           const HistogramConfig& cfg) {
    // Each ROI histogram is computed once and reused across its row/column.
    std::vector<Histogram> track_hists;
    track_hists.reserve(track_boxes.size());
    for (const auto& b : track_boxes) {
        track_hists.push_back(roi_histogram(img, b, cfg));
    }
    std::vector<Histogram> det_hists;
    det_hists.reserve(det_boxes.size());
    for (const auto& b : det_boxes) {
        det_hists.push_back(roi_histogram(img, b, cfg));
    }
    return histogram_similarity_matrix(track_hists, det_hists);
}

SimilarityMatrix fuse(const SimilarityMatrix& motion, const SimilarityMatrix& thermal, double alpha) {
    if (motion.rows() != thermal.rows() || motion.cols() != thermal.cols()) {
        throw ConfigError("fuse: similarity matrices differ in shape");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ConfigError("fuse: alpha must lie in [0, 1]");
    }
    SimilarityMatrix out(motion.rows(), motion.cols());
    for (std::size_t i = 0; i < motion.rows(); ++i) {
        for (std::size_t j = 0; j < motion.cols(); ++j) {
            out(i, j) = std::min(1.0, alpha * motion(i, j) + (1.0 - alpha) * thermal(i, j));
        }
    }
    return out;
}

}  // namespace tmot
