#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tmot/association.hpp"
#include "tmot/core.hpp"
#include "tmot/motion.hpp"

namespace tmot {

enum class TrackStatus { Tentative, Confirmed, Lost, Removed };

enum class TrackerVariant {
    Byte,
    OcSort,  // BYTE plus observation-centric recovery of lost tracks
};

/// Where a track's thermal histogram comes from during association.
enum class TrackRoiSource {
    Predicted,        // ROI at the Kalman prediction, cut from the current frame
    LastObservation,  // histogram cached from the frame of the last matched detection
};

[[nodiscard]] std::string_view to_string(TrackerVariant v);
[[nodiscard]] std::string_view to_string(TrackRoiSource s);
[[nodiscard]] TrackerVariant parse_variant(std::string_view s);
[[nodiscard]] TrackRoiSource parse_roi_source(std::string_view s);

struct Observation {
    BoundingBox box;
    std::size_t frame = 0;
};

struct Tracklet {
    TrackId id;
    KalmanState kalman;
    TrackStatus status = TrackStatus::Tentative;
    Observation last_observation;
    int hits = 0;
    int frames_since_update = 0;
    double score = 0.0;
    Histogram appearance;  // filled only for TrackRoiSource::LastObservation

    [[nodiscard]] BoundingBox predicted_box() const { return kalman.box(); }
};

struct TrackerConfig {
    TrackerVariant variant = TrackerVariant::Byte;
    double alpha = 0.3;
    double high_thresh = 0.6;
    double low_thresh = 0.1;
    double match_thresh_first = 0.2;
    double match_thresh_second = 0.5;
    double match_thresh_tentative = 0.3;
    double recovery_thresh = 0.3;
    double new_track_thresh = 0.7;
    int max_lost_frames = 30;
    int min_hits = 2;
    bool use_thermal_in_second_stage = false;
    HistogramConfig histogram;
    TrackRoiSource roi_source = TrackRoiSource::Predicted;
    KalmanParams kalman;

    /// Throws ConfigError when a threshold or count is out of range.
    void validate() const;

    /// Operating points selected by the alpha sweep: 0.3 for BYTE,
    /// 0.8 for the OC-SORT-style variant.
    [[nodiscard]] static TrackerConfig paper_byte();
    [[nodiscard]] static TrackerConfig paper_ocsort();
    /// Looks up "paper-byte" / "paper-ocsort". Throws ConfigError otherwise.
    [[nodiscard]] static TrackerConfig preset(std::string_view name);
};

struct TrackOutput {
    TrackId id;
    BoundingBox box;
    double score = 0.0;

    friend bool operator==(const TrackOutput&, const TrackOutput&) = default;
};

/// One confirmed output. `frame` is the 0-based internal frame index.
struct TrackRecord {
    std::size_t frame = 0;
    TrackId id;
    BoundingBox box;
    double score = 0.0;

    friend bool operator==(const TrackRecord&, const TrackRecord&) = default;
};

using ResultBuffer = std::vector<TrackRecord>;

/// Tracking-by-detection state machine. With `WithThermal == false` the
/// histogram path is compiled out and association uses IoU only.
template <bool WithThermal>
class BasicTracker {
public:
    explicit BasicTracker(TrackerConfig cfg);

    /// Processes frame `frame` (0-based). Frames must strictly increase;
    /// otherwise SequenceError. Returns the confirmed tracks matched on
    /// this frame, ordered by id.
    std::vector<TrackOutput> step(std::size_t frame, const GrayImage& img, std::span<const Detection> dets);
    /// Processes the frame after the previous one (frame 0 first).
    std::vector<TrackOutput> step(const GrayImage& img, std::span<const Detection> dets);

    /// Every output emitted so far, ordered by (frame, id).
    [[nodiscard]] ResultBuffer finish() const;

    [[nodiscard]] const TrackerConfig& config() const { return cfg_; }
    [[nodiscard]] const std::vector<Tracklet>& tracks() const { return tracks_; }
    [[nodiscard]] std::size_t frames_processed() const { return frames_processed_; }
    [[nodiscard]] TrackId next_id() const { return TrackId{next_id_}; }

private:
    SimilarityMatrix similarity(std::span<const std::size_t> track_idx, std::span<const std::size_t> det_idx,
                                bool thermal) const;
    void update_track(Tracklet& t, const Detection& d, std::size_t frame);
    void recover_track(Tracklet& t, const Detection& d, std::size_t frame);
    Histogram appearance_of(const BoundingBox& b) const;

    TrackerConfig cfg_;
    std::vector<Tracklet> tracks_;
    std::uint32_t next_id_ = 1;
    std::size_t frames_processed_ = 0;
    std::optional<std::size_t> last_frame_;
    ResultBuffer history_;

    // Per-step scratch shared by the association stages.
    const GrayImage* image_ = nullptr;
    std::vector<Detection> dets_;
    std::vector<Histogram> det_hists_;
};

using Tracker = BasicTracker<true>;
using MotionOnlyTracker = BasicTracker<false>;

extern template class BasicTracker<true>;
extern template class BasicTracker<false>;

}  // namespace tmot
