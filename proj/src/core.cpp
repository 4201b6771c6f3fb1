#include "tmot/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tmot/error.hpp"

namespace tmot {

bool BoundingBox::is_finite() const {
    return std::isfinite(left) && std::isfinite(top) && std::isfinite(width) && std::isfinite(height);
}

CenterBox BoundingBox::to_center() const {
    return CenterBox{left + width / 2.0, top + height / 2.0, height != 0.0 ? width / height : 0.0, height};
}

BoundingBox BoundingBox::from_center(const CenterBox& c) {
    const double w = c.aspect * c.height;
    return BoundingBox{c.cx - w / 2.0, c.cy - c.height / 2.0, w, c.height};
}

GrayImage::GrayImage(int width, int height, int bit_depth)
    : GrayImage(width, height, bit_depth,
                std::vector<std::uint16_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                           static_cast<std::size_t>(std::max(height, 0)))) {}

GrayImage::GrayImage(int width, int height, int bit_depth, std::vector<std::uint16_t> data)
    : width_(width), height_(height), bit_depth_(bit_depth), data_(std::move(data)) {
    if (width <= 0 || height <= 0) {
        throw ConfigError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    }
    if (bit_depth != 8 && bit_depth != 16) {
        throw ConfigError("image bit depth must be 8 or 16, got " + std::to_string(bit_depth));
    }
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ConfigError("image data length does not match width*height");
    }
    if (bit_depth == 8) {
        const auto bad = std::find_if(data_.begin(), data_.end(), [](std::uint16_t v) { return v > 255; });
        if (bad != data_.end()) {
            throw ConfigError("8-bit image holds value " + std::to_string(*bad));
        }
    }
}

void GrayImage::set(int x, int y, std::uint16_t v) {
    if (v > max_value()) {
        throw ConfigError("pixel value exceeds bit depth");
    }
    data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)] = v;
}

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw ConfigError("similarity matrix value count does not match shape");
    }
    for (double v : values_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError("similarity entry outside [0, 1]");
        }
    }
}

namespace {

// Overlap of [l1, l1+w1) and [l2, l2+w2). Containment uses the stored width
// so that a box overlaps itself by exactly its own extent.
double overlap(double l1, double w1, double l2, double w2) {
    const double r1 = l1 + w1;
    const double r2 = l2 + w2;
    const bool first_inside = l1 >= l2 && r1 <= r2;
    const bool second_inside = l2 >= l1 && r2 <= r1;
    if (first_inside && second_inside) return std::min(w1, w2);
    if (first_inside) return w1;
    if (second_inside) return w2;
    return std::min(r1, r2) - std::max(l1, l2);
}

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
    if (!a.is_finite() || !b.is_finite()) {
        throw GeometryError("iou: non-finite box coordinates");
    }
    const double iw = overlap(a.left, a.width, b.left, b.width);
    const double ih = overlap(a.top, a.height, b.top, b.height);
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = std::max(a.area(), 0.0) + std::max(b.area(), 0.0) - inter;
    if (uni <= 0.0) {
        return 0.0;
    }
    return std::clamp(inter / uni, 0.0, 1.0);
}

std::optional<BoundingBox> clip_to_image(const BoundingBox& b, double img_w, double img_h) {
    if (!b.is_finite()) {
        return std::nullopt;
    }
    const double l = std::clamp(b.left, 0.0, img_w);
    const double t = std::clamp(b.top, 0.0, img_h);
    const double r = std::clamp(b.right(), 0.0, img_w);
    const double btm = std::clamp(b.bottom(), 0.0, img_h);
    if (r <= l || btm <= t) {
        return std::nullopt;
    }
    if (l == b.left && t == b.top && r == b.right() && btm == b.bottom()) {
        return b;
    }
    return BoundingBox{l, t, r - l, btm - t};
}

}  // namespace tmot
