#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tmot/core.hpp"
#include "tmot/tracker.hpp"

namespace tmot {

struct GroundTruthEntry {
    BoundingBox box;
    double visibility = 1.0;
    bool ignore = false;  // conf = 0 rows
    int class_id = 1;

    friend bool operator==(const GroundTruthEntry&, const GroundTruthEntry&) = default;
};

/// One annotated identity; at most one box per frame (0-based frames).
struct GroundTruthTrack {
    int id = 0;
    std::map<std::size_t, GroundTruthEntry> frames;

    friend bool operator==(const GroundTruthTrack&, const GroundTruthTrack&) = default;
};

using GroundTruth = std::vector<GroundTruthTrack>;

struct EvalOptions {
    double iou_thresh = 0.5;
    /// GT entries with visibility below this are treated like ignore rows.
    /// Negative keeps everything.
    double min_visibility = -1.0;
};

/// Ratios whose denominator was zero; the ratio itself is reported as 0.
enum UndefinedMetric : std::uint32_t {
    kUndefinedNone = 0,
    kUndefinedRecall = 1u << 0,
    kUndefinedPrecision = 1u << 1,
    kUndefinedMota = 1u << 2,
    kUndefinedMotp = 1u << 3,
    kUndefinedIdp = 1u << 4,
    kUndefinedIdr = 1u << 5,
    kUndefinedIdf1 = 1u << 6,
};

struct EvalReport {
    double idf1 = 0.0;
    double idp = 0.0;
    double idr = 0.0;
    double rcll = 0.0;
    double prcn = 0.0;
    double mota = 0.0;
    double motp = 0.0;  // mean (1 - IoU) over matches

    std::uint64_t gt_count = 0;
    std::uint64_t hyp_count = 0;
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t id_switches = 0;
    std::uint64_t matched_pairs = 0;
    double sum_match_distance = 0.0;
    std::uint64_t idtp = 0;
    std::uint64_t idfp = 0;
    std::uint64_t idfn = 0;

    std::uint32_t undefined = kUndefinedNone;

    /// Recomputes every ratio from the raw counts.
    void finalize();
};

/// CLEAR-MOT and identity metrics for one sequence. Throws DataError when
/// a hypothesis id occurs twice in one frame.
[[nodiscard]] EvalReport evaluate_sequence(const GroundTruth& gt, std::span<const TrackRecord> hyp,
                                           const EvalOptions& opts = {});

/// Pools raw counts, then recomputes ratios. Throws ConfigError on an
/// empty list.
[[nodiscard]] EvalReport aggregate(std::span<const EvalReport> reports);

struct NamedReport {
    std::string sequence;
    EvalReport report;
};

/// CSV with header `sequence,IDF1,IDP,IDR,Rcll,Prcn,MOTA,MOTP`, one row
/// per sequence followed by an OVERALL row when `with_overall` is set.
void write_metrics_csv(std::ostream& os, std::span<const NamedReport> rows, bool with_overall = true);

}  // namespace tmot
