#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tmot/io.hpp"
#include "tmot/metrics.hpp"
#include "tmot/synth.hpp"
#include "tmot/tracker.hpp"

namespace tmot {

/// A sequence ready for tracking: either rendered in memory (synthetic) or
/// backed by a directory whose frames are decoded on demand.
struct SequenceData {
    std::string name;
    SequenceManifest manifest;
    DetectionTable detections;
    GroundTruth ground_truth;
    std::vector<GrayImage> images;  // empty for on-disk sequences

    [[nodiscard]] std::size_t frame_count() const;
    /// Throws IoError when an on-disk frame cannot be read.
    [[nodiscard]] GrayImage image(std::size_t frame) const;
};

/// Loads `<dir>/seqinfo.ini` and the detections (default `<dir>/det/det.txt`).
/// Ground truth (`<dir>/gt/gt.txt`) is read when `with_ground_truth` is set.
[[nodiscard]] SequenceData load_sequence(const fs::path& dir, const std::optional<fs::path>& detections = {},
                                         bool with_ground_truth = false);
[[nodiscard]] SequenceData from_synthetic(SyntheticSequence seq);

/// Runs the fused tracker over every frame.
[[nodiscard]] ResultBuffer track_sequence(const SequenceData& seq, const TrackerConfig& cfg);

/// Runs `fn(i)` for i in [0, count) on up to `jobs` threads. Every index
/// runs; afterwards the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

struct TrackRequest {
    std::vector<fs::path> sequences;
    std::vector<fs::path> detections;  // empty, or one per sequence
    TrackerConfig config;
    fs::path output_dir;
    int jobs = 1;
};

struct TrackSummary {
    std::string name;
    std::size_t frames = 0;
    std::size_t detections = 0;
    std::size_t records = 0;
    std::size_t identities = 0;
    fs::path output;
    std::vector<std::string> warnings;
};

/// Writes `<output_dir>/<name>.txt` per sequence. Either every file is
/// written or none: results go to temporaries that are renamed only after
/// all sequences succeed.
std::vector<TrackSummary> run_track(const TrackRequest& req);

struct EvalRequest {
    std::vector<fs::path> sequences;  // ground truth at `<seq>/gt/gt.txt`
    fs::path results_dir;             // `<name>.txt` per sequence
    EvalOptions options;
};

/// Throws DataError listing the names that appear on only one side.
std::vector<NamedReport> run_eval(const EvalRequest& req);

struct SweepRow {
    TrackerVariant variant = TrackerVariant::Byte;
    std::string row;  // "grid", "argmax_MOTA" or "argmax_IDF1"
    double alpha = 0.0;
    double mota = 0.0;
    double idf1 = 0.0;
};

/// Default grid 0, 0.1, ..., 1.0 (computed as k / 10).
[[nodiscard]] std::vector<double> default_alpha_grid();

/// For each variant, tracks every sequence at each alpha (ascending) and
/// scores the pooled counts; then appends the argmax rows (ties go to the
/// smaller alpha). Throws ConfigError on an empty grid or a value outside
/// [0, 1].
std::vector<SweepRow> run_sweep_alpha(const std::vector<SequenceData>& sequences, std::vector<double> grid,
                                      const std::vector<TrackerVariant>& variants, const TrackerConfig& base,
                                      int jobs = 1, const EvalOptions& eval = {});

/// Header `variant,row,alpha,MOTA,IDF1`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Exports each scenario to `<out>/<scenario name>`; returns the directories.
std::vector<fs::path> run_synth(const std::vector<Scenario>& scenarios, const fs::path& out,
                                const std::string& image_ext = ".png");

struct BenchResult {
    std::string name;
    std::size_t frames = 0;
    double seconds = 0.0;
    double fps = 0.0;
};

/// Tracking throughput per sequence (image decoding excluded).
std::vector<BenchResult> run_bench(const std::vector<SequenceData>& sequences, const TrackerConfig& cfg,
                                   int repeats = 1);

}  // namespace tmot
