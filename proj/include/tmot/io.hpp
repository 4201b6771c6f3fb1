#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tmot/core.hpp"
#include "tmot/metrics.hpp"
#include "tmot/tracker.hpp"

namespace tmot {

namespace fs = std::filesystem;

enum class Modality { Thermal, RgbGray };

/// Parsed `seqinfo.ini`. Frame indices handed to the rest of the library
/// are 0-based; files use 1-based numbering.
struct SequenceManifest {
    fs::path root;
    std::string name;
    std::string image_dir = "img1";
    std::string image_ext = ".png";
    double frame_rate = 5.0;
    std::size_t frame_count = 0;
    int width = 640;
    int height = 512;
    int bit_depth = 8;
    Modality modality = Modality::Thermal;
    std::vector<std::string> warnings;  // defaults that were applied

    /// `<root>/<image_dir>/<frame+1 as 6 digits><image_ext>`.
    [[nodiscard]] fs::path image_path(std::size_t frame) const;
};

/// Reads `<dir>/seqinfo.ini` (key=value, `[Sequence]` header tolerated).
/// Required: seqLength >= 1. Optional keys and their defaults:
/// name (directory name), imDir (img1), imExt (.png), frameRate (5),
/// imWidth (640), imHeight (512), bitDepth (8), modality (thermal).
/// Throws IoError when the file is missing and DataError naming the key
/// when a value is malformed.
[[nodiscard]] SequenceManifest load_manifest(const fs::path& dir);
void write_manifest(const fs::path& dir, const SequenceManifest& m);

struct DetectionTable {
    std::map<std::size_t, std::vector<Detection>> frames;  // 0-based frame -> detections
    std::size_t clamped_scores = 0;

    /// Detections of `frame`, empty when none were recorded.
    [[nodiscard]] const std::vector<Detection>& at(std::size_t frame) const;
};

/// MOT detection CSV `frame,id,left,top,width,height,score[,...]`. The id
/// column is ignored; scores outside [0, 1] are clamped and counted.
/// Throws DataError with the line number on malformed input.
[[nodiscard]] DetectionTable read_detections(const fs::path& path);
void write_detections(const fs::path& path, const DetectionTable& table);

/// MOT ground-truth CSV `frame,id,left,top,width,height,conf,class,visibility`.
/// conf = 0 rows are kept and flagged ignore. Duplicate (frame, id) throws
/// DataError.
[[nodiscard]] GroundTruth read_ground_truth(const fs::path& path);
void write_ground_truth(const fs::path& path, const GroundTruth& gt);

/// PNG or PGM, 8- or 16-bit. Colour PNGs are reduced with the BT.601 luma
/// weights. `expected_bit_depth` of 0 accepts either depth.
[[nodiscard]] GrayImage load_image(const fs::path& path, int expected_bit_depth = 0);
/// Format chosen by extension (.png or .pgm). Lossless.
void save_image(const fs::path& path, const GrayImage& img);

/// MOT result lines `frame,id,left,top,width,height,score,-1,-1,-1`,
/// sorted by frame then id. Numbers use the shortest round-trip form.
void write_results(const fs::path& path, const ResultBuffer& buffer);
[[nodiscard]] ResultBuffer read_results(const fs::path& path);

}  // namespace tmot
