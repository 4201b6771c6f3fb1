#pragma once

// Shared helpers for the test binaries: scratch directories and seeded
// generators for property tests.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tmot/association.hpp"
#include "tmot/core.hpp"

namespace testing_support {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("tmot-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& body) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << body;
}

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Seeded value generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return uniform() < p; }

    tmot::BoundingBox box(double extent = 200.0, double min_size = 1.0, double max_size = 80.0) {
        return tmot::BoundingBox{uniform(-20.0, extent), uniform(-20.0, extent), uniform(min_size, max_size),
                                 uniform(min_size, max_size)};
    }

    /// Normalized histogram with a random support (never all zero).
    tmot::Histogram histogram(int bins) {
        tmot::Histogram h;
        h.bins = bins;
        h.range_max = 256;
        h.weights.assign(static_cast<std::size_t>(bins), 0.0);
        double sum = 0.0;
        while (sum == 0.0) {
            for (auto& w : h.weights) {
                w = coin(0.6) ? uniform() : 0.0;
                sum += w;
            }
        }
        for (auto& w : h.weights) w /= sum;
        return h;
    }

    tmot::SimilarityMatrix similarity(std::size_t rows, std::size_t cols) {
        std::vector<double> v(rows * cols);
        for (auto& x : v) x = uniform();
        return tmot::SimilarityMatrix(rows, cols, std::move(v));
    }

    std::vector<std::uint16_t> pixels(std::size_t n, std::uint32_t max_value) {
        std::vector<std::uint16_t> out(n);
        for (auto& p : out) p = static_cast<std::uint16_t>(integer(0, static_cast<int>(max_value)));
        return out;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace testing_support
