#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tmot {

/// Center-form box: center, aspect ratio (width / height) and height.
struct CenterBox {
    double cx = 0.0;
    double cy = 0.0;
    double aspect = 0.0;
    double height = 0.0;
};

/// Axis-aligned box in pixel coordinates, stored as top-left + size
/// (the MOT file layout). Zero-area boxes are representable.
struct BoundingBox {
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;

    [[nodiscard]] double right() const { return left + width; }
    [[nodiscard]] double bottom() const { return top + height; }
    [[nodiscard]] double area() const { return width * height; }
    [[nodiscard]] bool is_finite() const;

    [[nodiscard]] CenterBox to_center() const;
    [[nodiscard]] static BoundingBox from_center(const CenterBox& c);

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
    BoundingBox bbox;
    double score = 0.0;  // confidence in [0, 1]
    int class_id = 0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Track identity. Allocated strictly increasing from 1 within a run.
struct TrackId {
    std::uint32_t value = 0;

    friend auto operator<=>(const TrackId&, const TrackId&) = default;
};

/// Single-channel intensity image, row-major. 8-bit images use the same
/// 16-bit storage with values < 256.
class GrayImage {
public:
    GrayImage() = default;
    /// Zero-filled image. Throws ConfigError for bad dimensions or depth.
    GrayImage(int width, int height, int bit_depth);
    /// Throws ConfigError if data size or any value violates the depth.
    GrayImage(int width, int height, int bit_depth, std::vector<std::uint16_t> data);

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] int bit_depth() const { return bit_depth_; }
    [[nodiscard]] std::uint32_t max_value() const { return (1u << bit_depth_) - 1u; }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    [[nodiscard]] std::uint16_t at(int x, int y) const {
        return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                     static_cast<std::size_t>(x)];
    }
    void set(int x, int y, std::uint16_t v);

    [[nodiscard]] std::span<const std::uint16_t> data() const { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int bit_depth_ = 8;
    std::vector<std::uint16_t> data_;
};

/// Dense rows x cols score grid with entries in [0, 1]. Rows are tracks,
/// columns are detections.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Row-major values; throws ConfigError on size mismatch or entries
    /// outside [0, 1].
    SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    [[nodiscard]] double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    [[nodiscard]] std::span<const double> values() const { return values_; }

    friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Intersection over union. 0 when the union is empty. Throws
/// GeometryError on non-finite coordinates.
[[nodiscard]] double iou(const BoundingBox& a, const BoundingBox& b);

/// Intersection of `b` with [0, img_w) x [0, img_h); nullopt when the
/// intersection has zero area.
[[nodiscard]] std::optional<BoundingBox> clip_to_image(const BoundingBox& b, double img_w, double img_h);

}  // namespace tmot
