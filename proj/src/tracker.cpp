#include "tmot/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tmot/error.hpp"

namespace tmot {

std::string_view to_string(TrackerVariant v) {
    return v == TrackerVariant::Byte ? "byte" : "ocsort-style";
}

std::string_view to_string(TrackRoiSource s) {
    return s == TrackRoiSource::Predicted ? "predicted" : "last-observation";
}

TrackerVariant parse_variant(std::string_view s) {
    if (s == "byte") {
        return TrackerVariant::Byte;
    }
    if (s == "ocsort" || s == "ocsort-style") {
        return TrackerVariant::OcSort;
    }
    throw ConfigError("unknown tracker variant '" + std::string(s) + "' (expected byte|ocsort)");
}

TrackRoiSource parse_roi_source(std::string_view s) {
    if (s == "predicted") {
        return TrackRoiSource::Predicted;
    }
    if (s == "last-observation") {
        return TrackRoiSource::LastObservation;
    }
    throw ConfigError("unknown ROI source '" + std::string(s) + "' (expected predicted|last-observation)");
}

void TrackerConfig::validate() const {
    const auto unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError(std::string(name) + " must lie in [0, 1]");
        }
    };
    unit(alpha, "alpha");
    unit(high_thresh, "high_thresh");
    unit(low_thresh, "low_thresh");
    unit(match_thresh_first, "match_thresh_first");
    unit(match_thresh_second, "match_thresh_second");
    unit(match_thresh_tentative, "match_thresh_tentative");
    unit(recovery_thresh, "recovery_thresh");
    unit(new_track_thresh, "new_track_thresh");
    if (low_thresh > high_thresh) {
        throw ConfigError("low_thresh must not exceed high_thresh");
    }
    if (max_lost_frames < 0) {
        throw ConfigError("max_lost_frames must be non-negative");
    }
    if (min_hits < 1) {
        throw ConfigError("min_hits must be at least 1");
    }
    if (histogram.bins < 0) {
        throw ConfigError("hist_bins must be non-negative (0 selects the depth default)");
    }
}

TrackerConfig TrackerConfig::paper_byte() {
    TrackerConfig cfg;
    cfg.variant = TrackerVariant::Byte;
    cfg.alpha = 0.3;
    return cfg;
}

TrackerConfig TrackerConfig::paper_ocsort() {
    TrackerConfig cfg;
    cfg.variant = TrackerVariant::OcSort;
    cfg.alpha = 0.8;
    return cfg;
}

TrackerConfig TrackerConfig::preset(std::string_view name) {
    if (name == "paper-byte") {
        return paper_byte();
    }
    if (name == "paper-ocsort") {
        return paper_ocsort();
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected paper-byte|paper-ocsort)");
}

namespace {

std::vector<std::size_t> pick(std::span<const std::size_t> pool, std::span<const std::size_t> positions) {
    std::vector<std::size_t> out;
    out.reserve(positions.size());
    for (std::size_t p : positions) {
        out.push_back(pool[p]);
    }
    return out;
}

BoundingBox lerp(const BoundingBox& a, const BoundingBox& b, double t) {
    return BoundingBox{a.left + (b.left - a.left) * t, a.top + (b.top - a.top) * t,
                       a.width + (b.width - a.width) * t, a.height + (b.height - a.height) * t};
}

}  // namespace

template <bool WithThermal>
BasicTracker<WithThermal>::BasicTracker(TrackerConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
}

template <bool WithThermal>
std::vector<TrackOutput> BasicTracker<WithThermal>::step(const GrayImage& img, std::span<const Detection> dets) {
    return step(last_frame_ ? *last_frame_ + 1 : 0, img, dets);
}

template <bool WithThermal>
Histogram BasicTracker<WithThermal>::appearance_of(const BoundingBox& b) const {
    return roi_histogram(*image_, b, cfg_.histogram);
}

template <bool WithThermal>
SimilarityMatrix BasicTracker<WithThermal>::similarity(std::span<const std::size_t> track_idx,
                                                      std::span<const std::size_t> det_idx,
                                                      bool thermal) const {
    SimilarityMatrix motion(track_idx.size(), det_idx.size());
    for (std::size_t i = 0; i < track_idx.size(); ++i) {
        const BoundingBox predicted = tracks_[track_idx[i]].predicted_box();
        for (std::size_t j = 0; j < det_idx.size(); ++j) {
            motion(i, j) = iou(predicted, dets_[det_idx[j]].bbox);
        }
    }
    if constexpr (WithThermal) {
        if (thermal) {
            SimilarityMatrix s_thermal(track_idx.size(), det_idx.size());
            for (std::size_t i = 0; i < track_idx.size(); ++i) {
                const Tracklet& t = tracks_[track_idx[i]];
                const Histogram track_hist = cfg_.roi_source == TrackRoiSource::Predicted
                                                 ? appearance_of(t.predicted_box())
                                                 : t.appearance;
                for (std::size_t j = 0; j < det_idx.size(); ++j) {
                    s_thermal(i, j) = bhattacharyya(track_hist, det_hists_[det_idx[j]]);
                }
            }
            return fuse(motion, s_thermal, cfg_.alpha);
        }
    }
    return motion;
}

template <bool WithThermal>
void BasicTracker<WithThermal>::update_track(Tracklet& t, const Detection& d, std::size_t frame) {
    t.kalman = kf_update(t.kalman, d.bbox, cfg_.kalman);
    t.last_observation = Observation{d.bbox, frame};
    t.frames_since_update = 0;
    t.score = d.score;
    ++t.hits;
    if (t.status == TrackStatus::Tentative) {
        if (t.hits >= cfg_.min_hits) {
            t.status = TrackStatus::Confirmed;
        }
    } else {
        t.status = TrackStatus::Confirmed;
    }
    if constexpr (WithThermal) {
        if (cfg_.roi_source == TrackRoiSource::LastObservation) {
            t.appearance = appearance_of(d.bbox);
        }
    }
}

template <bool WithThermal>
void BasicTracker<WithThermal>::recover_track(Tracklet& t, const Detection& d, std::size_t frame) {
    // Re-run the filter along a straight virtual trajectory from the last
    // observation to the recovering detection.
    const Observation from = t.last_observation;
    const std::size_t gap = frame - from.frame;
    KalmanState state = kf_initiate(from.box, cfg_.kalman);
    for (std::size_t k = 1; k <= gap; ++k) {
        state = kf_predict(state, cfg_.kalman);
        const BoundingBox virtual_box =
            k == gap ? d.bbox : lerp(from.box, d.bbox, static_cast<double>(k) / static_cast<double>(gap));
        state = kf_update(state, virtual_box, cfg_.kalman);
    }
    t.kalman = state;
    t.last_observation = Observation{d.bbox, frame};
    t.frames_since_update = 0;
    t.score = d.score;
    ++t.hits;
    t.status = TrackStatus::Confirmed;
    if constexpr (WithThermal) {
        if (cfg_.roi_source == TrackRoiSource::LastObservation) {
            t.appearance = appearance_of(d.bbox);
        }
    }
}

template <bool WithThermal>
std::vector<TrackOutput> BasicTracker<WithThermal>::step(std::size_t frame, const GrayImage& img,
                                                         std::span<const Detection> dets) {
    if (last_frame_ && frame <= *last_frame_) {
        throw SequenceError("frame " + std::to_string(frame) + " presented after frame " +
                            std::to_string(*last_frame_));
    }
    const std::size_t elapsed = last_frame_ ? frame - *last_frame_ : 1;
    image_ = &img;

    dets_.clear();
    for (const Detection& d : dets) {
        if (d.bbox.is_finite() && d.bbox.width > 0.0 && d.bbox.height > 0.0 && d.score >= cfg_.low_thresh) {
            dets_.push_back(d);
        }
    }
    det_hists_.clear();
    if constexpr (WithThermal) {
        det_hists_.reserve(dets_.size());
        for (const Detection& d : dets_) {
            det_hists_.push_back(appearance_of(d.bbox));
        }
    }

    // 1. predict every live track (once per elapsed frame)
    if (last_frame_) {
        for (Tracklet& t : tracks_) {
            for (std::size_t k = 0; k < elapsed; ++k) {
                t.kalman = kf_predict(t.kalman, cfg_.kalman);
            }
        }
    }

    // 2. confidence tiers
    std::vector<std::size_t> high;
    std::vector<std::size_t> low;
    for (std::size_t j = 0; j < dets_.size(); ++j) {
        (dets_[j].score >= cfg_.high_thresh ? high : low).push_back(j);
    }

    std::vector<std::size_t> pool;
    std::vector<std::size_t> tentative;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        (tracks_[i].status == TrackStatus::Tentative ? tentative : pool).push_back(i);
    }

    std::vector<char> matched(tracks_.size(), 0);
    const auto apply = [&](std::span<const std::size_t> track_idx, std::span<const std::size_t> det_idx,
                           const AssignmentResult& res) {
        for (const auto& [ti, dj] : res.matches) {
            update_track(tracks_[track_idx[ti]], dets_[det_idx[dj]], frame);
            matched[track_idx[ti]] = 1;
        }
    };

    // 3. first association: fused similarity against high-confidence boxes
    const AssignmentResult first = solve_assignment(similarity(pool, high, true), cfg_.match_thresh_first);
    apply(pool, high, first);
    std::vector<std::size_t> pool_left = pick(pool, first.unmatched_tracks);
    std::vector<std::size_t> high_left = pick(high, first.unmatched_dets);

    // 4. second association: leftover tracks against low-confidence boxes
    const AssignmentResult second =
        solve_assignment(similarity(pool_left, low, cfg_.use_thermal_in_second_stage), cfg_.match_thresh_second);
    apply(pool_left, low, second);
    pool_left = pick(pool_left, second.unmatched_tracks);

    // tentative tracks take what is left of the high tier
    const AssignmentResult third =
        solve_assignment(similarity(tentative, high_left, true), cfg_.match_thresh_tentative);
    apply(tentative, high_left, third);
    high_left = pick(high_left, third.unmatched_dets);

    // observation-centric recovery for tracks already lost
    if (cfg_.variant == TrackerVariant::OcSort) {
        std::vector<std::size_t> lost;
        for (std::size_t i : pool_left) {
            if (tracks_[i].status == TrackStatus::Lost) {
                lost.push_back(i);
            }
        }
        SimilarityMatrix by_observation(lost.size(), high_left.size());
        for (std::size_t i = 0; i < lost.size(); ++i) {
            for (std::size_t j = 0; j < high_left.size(); ++j) {
                by_observation(i, j) = iou(tracks_[lost[i]].last_observation.box, dets_[high_left[j]].bbox);
            }
        }
        const AssignmentResult recovery = solve_assignment(by_observation, cfg_.recovery_thresh);
        for (const auto& [ti, dj] : recovery.matches) {
            recover_track(tracks_[lost[ti]], dets_[high_left[dj]], frame);
            matched[lost[ti]] = 1;
        }
        high_left = pick(high_left, recovery.unmatched_dets);
    }

    // lifecycle of everything left unmatched
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        if (matched[i]) {
            continue;
        }
        Tracklet& t = tracks_[i];
        t.frames_since_update += static_cast<int>(elapsed);
        if (t.status == TrackStatus::Tentative) {
            t.status = TrackStatus::Removed;
        } else {
            t.status = TrackStatus::Lost;
            if (t.frames_since_update > cfg_.max_lost_frames) {
                t.status = TrackStatus::Removed;
            }
        }
    }
    std::erase_if(tracks_, [](const Tracklet& t) { return t.status == TrackStatus::Removed; });

    // births
    for (std::size_t j : high_left) {
        const Detection& d = dets_[j];
        if (d.score < cfg_.new_track_thresh) {
            continue;
        }
        Tracklet t;
        t.id = TrackId{next_id_++};
        t.kalman = kf_initiate(d.bbox, cfg_.kalman);
        t.last_observation = Observation{d.bbox, frame};
        t.hits = 1;
        t.score = d.score;
        t.status = cfg_.min_hits <= 1 ? TrackStatus::Confirmed : TrackStatus::Tentative;
        if constexpr (WithThermal) {
            if (cfg_.roi_source == TrackRoiSource::LastObservation) {
                t.appearance = appearance_of(d.bbox);
            }
        }
        tracks_.push_back(std::move(t));
    }

    std::vector<TrackOutput> out;
    for (const Tracklet& t : tracks_) {
        if (t.status == TrackStatus::Confirmed && t.frames_since_update == 0) {
            out.push_back(TrackOutput{t.id, t.kalman.box(), t.score});
        }
    }
    std::sort(out.begin(), out.end(), [](const TrackOutput& a, const TrackOutput& b) { return a.id < b.id; });
    for (const TrackOutput& o : out) {
        history_.push_back(TrackRecord{frame, o.id, o.box, o.score});
    }

    last_frame_ = frame;
    ++frames_processed_;
    image_ = nullptr;
    return out;
}

template <bool WithThermal>
ResultBuffer BasicTracker<WithThermal>::finish() const {
    return history_;
}

template class BasicTracker<true>;
template class BasicTracker<false>;

}  // namespace tmot
