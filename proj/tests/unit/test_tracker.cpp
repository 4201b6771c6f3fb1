#include <gtest/gtest.h>

#include <map>
#include <set>

#include "support/support.hpp"
#include "tmot/error.hpp"
#include "tmot/metrics.hpp"
#include "tmot/synth.hpp"
#include "tmot/tracker.hpp"

using namespace tmot;

namespace {

GrayImage blank() { return GrayImage(640, 512, 8); }

Detection det(double l, double t, double w = 20, double h = 50, double s = 0.9) {
    return Detection{BoundingBox{l, t, w, h}, s, 1};
}

template <bool Thermal>
ResultBuffer run(const SyntheticSequence& seq, const TrackerConfig& cfg) {
    BasicTracker<Thermal> tr(cfg);
    for (std::size_t f = 0; f < seq.images.size(); ++f) tr.step(f, seq.images[f], seq.detections.at(f));
    return tr.finish();
}

std::set<std::uint32_t> ids_of(const ResultBuffer& r) {
    std::set<std::uint32_t> out;
    for (const auto& x : r) out.insert(x.id.value);
    return out;
}

bool allowed(TrackStatus from, TrackStatus to) {
    if (from == to) return true;
    switch (from) {
        case TrackStatus::Tentative: return to == TrackStatus::Confirmed || to == TrackStatus::Removed;
        case TrackStatus::Confirmed: return to == TrackStatus::Lost;
        case TrackStatus::Lost: return to == TrackStatus::Confirmed || to == TrackStatus::Removed;
        case TrackStatus::Removed: return false;
    }
    return false;
}

}  // namespace

TEST(TrackerConfig, DefaultsAndPresets) {
    const TrackerConfig c;
    EXPECT_EQ(c.high_thresh, 0.6);
    EXPECT_EQ(c.low_thresh, 0.1);
    EXPECT_EQ(c.match_thresh_first, 0.2);
    EXPECT_EQ(c.match_thresh_second, 0.5);
    EXPECT_EQ(c.new_track_thresh, 0.7);
    EXPECT_EQ(c.max_lost_frames, 30);
    EXPECT_EQ(c.min_hits, 2);
    EXPECT_FALSE(c.use_thermal_in_second_stage);
    EXPECT_EQ(c.roi_source, TrackRoiSource::Predicted);
    EXPECT_EQ(TrackerConfig::preset("paper-byte").alpha, 0.3);
    EXPECT_EQ(TrackerConfig::preset("paper-byte").variant, TrackerVariant::Byte);
    EXPECT_EQ(TrackerConfig::preset("paper-ocsort").alpha, 0.8);
    EXPECT_EQ(TrackerConfig::preset("paper-ocsort").variant, TrackerVariant::OcSort);
    EXPECT_THROW((void)TrackerConfig::preset("fast"), ConfigError);
    EXPECT_EQ(to_string(TrackerVariant::OcSort), "ocsort-style");
    EXPECT_EQ(parse_variant("ocsort"), TrackerVariant::OcSort);
    EXPECT_EQ(parse_variant(to_string(TrackerVariant::OcSort)), TrackerVariant::OcSort);
    EXPECT_EQ(parse_roi_source("last-observation"), TrackRoiSource::LastObservation);
    EXPECT_THROW((void)parse_variant("sort"), ConfigError);
}

TEST(TrackerConfig, RejectsInvalidValues) {
    TrackerConfig c;
    c.low_thresh = 0.7;
    c.high_thresh = 0.6;
    EXPECT_THROW(Tracker{c}, ConfigError);
    c = TrackerConfig{};
    c.alpha = 1.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c = TrackerConfig{};
    c.min_hits = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = TrackerConfig{};
    c.max_lost_frames = -1;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Tracker, StartsEmpty) {
    const Tracker tr(TrackerConfig::paper_byte());
    EXPECT_TRUE(tr.tracks().empty());
    EXPECT_TRUE(tr.finish().empty());
}

TEST(Tracker, StationaryObjectKeepsOneId) {
    Tracker tr(TrackerConfig{});
    const GrayImage img = blank();
    const std::vector<Detection> d{det(100, 100)};
    std::set<std::uint32_t> ids;
    for (int f = 0; f < 3; ++f) {
        for (const auto& o : tr.step(img, d)) ids.insert(o.id.value);
    }
    EXPECT_EQ(ids, std::set<std::uint32_t>{1});
    ASSERT_EQ(tr.tracks().size(), 1u);
    EXPECT_EQ(tr.tracks()[0].status, TrackStatus::Confirmed);
}

TEST(Tracker, SingleFrameDropoutKeepsId) {
    Tracker tr(TrackerConfig{});
    const GrayImage img = blank();
    std::set<std::uint32_t> ids;
    for (int f = 0; f < 5; ++f) {
        std::vector<Detection> d;
        if (f != 2) d.push_back(det(100 + 4 * f, 100));
        for (const auto& o : tr.step(img, d)) ids.insert(o.id.value);
    }
    EXPECT_EQ(ids, std::set<std::uint32_t>{1});
    EXPECT_EQ(tr.next_id().value, 2u);
}

TEST(Tracker, FinishCountsLifecycle) {
    Tracker tr(TrackerConfig{});
    const GrayImage img = blank();
    std::size_t emitted = 0;
    for (int f = 0; f < 10; ++f) emitted += tr.step(img, std::vector<Detection>{det(50 + 3 * f, 60)}).size();
    const ResultBuffer r = tr.finish();
    EXPECT_EQ(r.size(), 10u - (2u - 1u));
    EXPECT_EQ(r.size(), emitted);
    EXPECT_EQ(ids_of(r), std::set<std::uint32_t>{1});
    EXPECT_EQ(r.front().frame, 1u);
}

TEST(Tracker, RejectsNonIncreasingFrames) {
    Tracker tr(TrackerConfig{});
    const GrayImage img = blank();
    tr.step(3, img, {});
    EXPECT_THROW(tr.step(3, img, {}), SequenceError);
    EXPECT_THROW(tr.step(1, img, {}), SequenceError);
    EXPECT_NO_THROW(tr.step(7, img, {}));
}

TEST(Tracker, LowScoreDetectionsDoNotStartTracks) {
    Tracker tr(TrackerConfig{});
    const GrayImage img = blank();
    for (int f = 0; f < 4; ++f) tr.step(img, std::vector<Detection>{det(10, 10, 20, 50, 0.5), det(300, 10, 20, 50, 0.05)});
    EXPECT_TRUE(tr.tracks().empty());
}

TEST(Tracker, SecondStageKeepsTrackOnLowScoreBox) {
    Tracker tr(TrackerConfig{});
    const GrayImage img = blank();
    for (int f = 0; f < 3; ++f) tr.step(img, std::vector<Detection>{det(100, 100)});
    const auto out = tr.step(img, std::vector<Detection>{det(100, 100, 20, 50, 0.3)});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].id.value, 1u);
}

TEST(Tracker, LostTrackIsRemovedAfterMaxLostFrames) {
    TrackerConfig c;
    c.max_lost_frames = 3;
    Tracker tr(c);
    const GrayImage img = blank();
    for (int f = 0; f < 3; ++f) tr.step(img, std::vector<Detection>{det(100, 100)});
    for (int f = 0; f < 3; ++f) {
        tr.step(img, {});
        ASSERT_EQ(tr.tracks().size(), 1u);
        EXPECT_EQ(tr.tracks()[0].status, TrackStatus::Lost);
    }
    tr.step(img, {});
    EXPECT_TRUE(tr.tracks().empty());
}

TEST(Tracker, ObservationCentricRecoveryAfterDrift) {
    // Moves right for 6 frames, vanishes for 6, reappears where it was last
    // seen. The prediction has drifted away, the last observation has not.
    const auto run_variant = [](TrackerVariant v) {
        TrackerConfig c;
        c.variant = v;
        c.alpha = 1.0;
        Tracker tr(c);
        const GrayImage img = blank();
        for (int f = 0; f < 6; ++f) tr.step(img, std::vector<Detection>{det(100 + 10 * f, 100)});
        for (int f = 0; f < 6; ++f) tr.step(img, {});
        for (int f = 0; f < 3; ++f) tr.step(img, std::vector<Detection>{det(150, 100)});
        return ids_of(tr.finish());
    };
    EXPECT_EQ(run_variant(TrackerVariant::OcSort), std::set<std::uint32_t>{1});
    EXPECT_EQ(run_variant(TrackerVariant::Byte), (std::set<std::uint32_t>{1, 2}));
}

TEST(Tracker, RecoveryRebuildsVelocityFromVirtualTrajectory) {
    TrackerConfig c;
    c.variant = TrackerVariant::OcSort;
    c.alpha = 1.0;
    Tracker tr(c);
    const GrayImage img = blank();
    for (int f = 0; f < 6; ++f) tr.step(img, std::vector<Detection>{det(100 + 10 * f, 100)});
    for (int f = 0; f < 4; ++f) tr.step(img, {});
    tr.step(img, std::vector<Detection>{det(160, 100)});
    ASSERT_EQ(tr.tracks().size(), 1u);
    // from x=150 to x=160 over 5 frames: about 2 px per frame, not 10
    EXPECT_LT(tr.tracks()[0].kalman.mean(4), 5.0);
    EXPECT_GT(tr.tracks()[0].kalman.mean(4), 0.0);
}

TEST(Tracker, CrossingScenarioThermalKeepsIdentities) {
    const SyntheticSequence seq = generate(preset_scenario("crossing"));
    TrackerConfig c;
    c.min_hits = 1;
    c.roi_source = TrackRoiSource::LastObservation;
    c.alpha = 0.3;
    const EvalReport fused = evaluate_sequence(seq.ground_truth, run<true>(seq, c));
    EXPECT_EQ(fused.id_switches, 0u);
    EXPECT_EQ(fused.idf1, 1.0);
    c.alpha = 1.0;
    const EvalReport motion = evaluate_sequence(seq.ground_truth, run<true>(seq, c));
    EXPECT_GT(motion.id_switches, 0u);
    EXPECT_LE(motion.idf1, 0.75);
}

TEST(Tracker, CrossingPredictionsTieOnMotion) {
    const SyntheticSequence seq = generate(preset_scenario("crossing"));
    TrackerConfig c;
    c.min_hits = 1;
    c.alpha = 1.0;
    Tracker tr(c);
    const std::size_t k = seq.scenario.objects[0].cross_frame;
    for (std::size_t f = 0; f < k; ++f) tr.step(f, seq.images[f], seq.detections.at(f));
    ASSERT_EQ(tr.tracks().size(), 2u);
    const auto& dets = seq.detections.at(k);
    ASSERT_EQ(dets.size(), 2u);
    for (const Tracklet& t : tr.tracks()) {
        const BoundingBox p = kf_predict(t.kalman).box();
        EXPECT_NEAR(iou(p, dets[0].bbox), iou(p, dets[1].bbox), 1e-6);
        EXPECT_GT(iou(p, dets[0].bbox), 0.2);
    }
}

TEST(TrackerProperty, ThermalPathInertAtAlphaOne) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (const Scenario& s : scenario_battery(seed)) {
            const SyntheticSequence seq = generate(s);
            TrackerConfig c;
            c.alpha = 1.0;
            EXPECT_EQ(run<true>(seq, c), run<false>(seq, c)) << s.name << " seed " << seed;
        }
    }
}

TEST(TrackerProperty, DeterministicAndWellFormed) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        for (const Scenario& s : scenario_battery(seed)) {
            const SyntheticSequence seq = generate(s);
            for (const TrackerConfig& c : {TrackerConfig::paper_byte(), TrackerConfig::paper_ocsort()}) {
                Tracker tr(c);
                std::map<std::uint32_t, TrackStatus> status;
                for (std::size_t f = 0; f < seq.images.size(); ++f) {
                    const std::size_t before = tr.tracks().size();
                    const auto& dets = seq.detections.at(f);
                    const auto out = tr.step(f, seq.images[f], dets);
                    if (dets.empty()) EXPECT_LE(tr.tracks().size(), before);
                    std::set<std::uint32_t> seen;
                    for (const auto& o : out) EXPECT_TRUE(seen.insert(o.id.value).second);
                    std::set<std::uint32_t> alive;
                    for (const Tracklet& t : tr.tracks()) {
                        alive.insert(t.id.value);
                        const auto it = status.find(t.id.value);
                        if (it != status.end()) EXPECT_TRUE(allowed(it->second, t.status));
                        if (t.last_observation.frame == f) EXPECT_EQ(t.frames_since_update, 0);
                        status[t.id.value] = t.status;
                    }
                    for (const auto& o : out) EXPECT_TRUE(alive.count(o.id.value));
                    for (auto& [id, st] : status) {
                        if (!alive.count(id)) st = TrackStatus::Removed;
                    }
                }
                Tracker again(c);
                for (std::size_t f = 0; f < seq.images.size(); ++f) again.step(f, seq.images[f], seq.detections.at(f));
                EXPECT_EQ(tr.finish(), again.finish());
            }
        }
    }
}
