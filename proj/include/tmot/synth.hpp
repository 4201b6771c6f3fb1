#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "tmot/core.hpp"
#include "tmot/io.hpp"
#include "tmot/metrics.hpp"

namespace tmot {

enum class TrajectoryKind {
    Linear,     // p(t) = p0 + v t
    Crossing,   // linear plus a fixed shift from `cross_frame` on
    StopAndGo,  // moves `go_frames`, rests `stop_frames`, repeats
};

[[nodiscard]] std::string_view to_string(TrajectoryKind k);

/// One rendered object. Positions are the box's top-left at frame 0;
/// boxes are snapped to the integer grid every frame.
struct ObjectSpec {
    TrajectoryKind kind = TrajectoryKind::Linear;
    double x = 0.0;
    double y = 0.0;
    double width = 20.0;
    double height = 40.0;
    double vx = 0.0;
    double vy = 0.0;
    std::uint16_t intensity = 200;
    std::size_t cross_frame = 0;
    double shift_x = 0.0;
    double shift_y = 0.0;
    int go_frames = 1;
    int stop_frames = 0;

    [[nodiscard]] BoundingBox box_at(std::size_t frame) const;
};

struct DetectorCorruption {
    double jitter = 0.0;          // Gaussian sigma in pixels on left/top/width/height
    double dropout = 0.0;         // probability of missing an object in a frame
    double min_visibility = 0.0;  // objects less visible than this are never detected
    double score_min = 0.9;
    double score_max = 0.9;
    double clutter_rate = 0.0;  // mean false detections per frame (Poisson)
    double clutter_score_min = 0.1;
    double clutter_score_max = 0.5;
};

struct Scenario {
    std::string name = "synthetic";
    std::uint64_t seed = 1;
    std::size_t frame_count = 10;
    int width = 640;
    int height = 512;
    int bit_depth = 8;
    double frame_rate = 5.0;
    bool distinct_intensities = true;
    /// Reverse the detection order on every crossing frame so an exact
    /// motion tie resolves to the wrong pairing.
    bool adversarial_order = false;
    DetectorCorruption corruption;
    std::vector<ObjectSpec> objects;

    /// Throws ConfigError for invalid sizes, depths, probabilities or
    /// (when required) repeated intensities.
    void validate() const;
};

struct SyntheticSequence {
    Scenario scenario;
    std::vector<GrayImage> images;
    GroundTruth ground_truth;  // id = object index + 1
    DetectionTable detections;

    [[nodiscard]] SequenceManifest manifest(std::string image_ext = ".png") const;
};

/// Seeded random source. mt19937_64 drives everything; uniforms take the
/// top 53 bits, normals use Box-Muller, Poisson counts use Knuth's product
/// method, so streams are reproducible across platforms.
class ScenarioRng {
public:
    explicit ScenarioRng(std::uint64_t seed) : engine_(seed) {}
    double uniform();  // [0, 1)
    double uniform(double lo, double hi);
    double normal(double sigma);
    bool bernoulli(double p);
    int poisson(double mean);

private:
    std::mt19937_64 engine_;
};

/// Renders frames (background 0, constant-intensity rectangles drawn in
/// object order), exact ground truth, and corrupted detections.
[[nodiscard]] SyntheticSequence generate(const Scenario& scn);

/// Writes `<dir>/seqinfo.ini`, `img1/NNNNNN<ext>`, `gt/gt.txt` and
/// `det/det.txt`.
void export_sequence(const SyntheticSequence& seq, const std::filesystem::path& dir,
                     const std::string& image_ext = ".png");

/// Scenario text: `key = value` lines plus one
/// `object = <linear|crossing|stop-and-go> key=value ...` line per object.
[[nodiscard]] Scenario parse_scenario(std::istream& in);
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);
void write_scenario(std::ostream& out, const Scenario& scn);

[[nodiscard]] std::vector<std::string> preset_names();
/// Throws ConfigError listing the known presets for an unknown name.
[[nodiscard]] Scenario preset_scenario(std::string_view name, std::uint64_t seed = 1);
/// The five-scenario battery used by the alpha sweep checks.
[[nodiscard]] std::vector<Scenario> scenario_battery(std::uint64_t seed = 1);

}  // namespace tmot
