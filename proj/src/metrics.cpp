#include "tmot/metrics.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>

#include "tmot/assignment.hpp"
#include "tmot/error.hpp"
#include "text.hpp"

namespace tmot {
namespace {

struct FrameGt {
    int id;
    BoundingBox box;
};

struct FrameHyp {
    std::uint32_t id;
    BoundingBox box;
};

double ratio(std::uint64_t num, std::uint64_t den, std::uint32_t flag, std::uint32_t& undefined) {
    if (den == 0) {
        undefined |= flag;
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

// Pairs maximizing the number of matches with IoU >= thresh, then
// minimizing total (1 - IoU). Returns (gt index, hyp index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> match_boxes(std::span<const BoundingBox> gts,
                                                             std::span<const BoundingBox> hyps,
                                                             double iou_thresh) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (gts.empty() || hyps.empty()) {
        return out;
    }
    const std::size_t n = std::max(gts.size(), hyps.size());
    // Any extra allowed match (cost <= 1) outweighs the penalty gap.
    const double forbidden = static_cast<double>(n) + 1.0;
    CostMatrix cost{n, std::vector<double>(n * n, forbidden)};
    std::vector<double> overlap(gts.size() * hyps.size(), 0.0);
    for (std::size_t g = 0; g < gts.size(); ++g) {
        for (std::size_t h = 0; h < hyps.size(); ++h) {
            const double v = iou(gts[g], hyps[h]);
            overlap[g * hyps.size() + h] = v;
            if (v >= iou_thresh) {
                cost.values[g * n + h] = 1.0 - v;
            }
        }
    }
    const std::vector<std::size_t> row_to_col = lexicographic_min_assignment(cost);
    for (std::size_t g = 0; g < gts.size(); ++g) {
        const std::size_t h = row_to_col[g];
        if (h < hyps.size() && overlap[g * hyps.size() + h] >= iou_thresh) {
            out.emplace_back(g, h);
        }
    }
    return out;
}

}  // namespace

void EvalReport::finalize() {
    undefined = kUndefinedNone;
    rcll = ratio(tp, tp + fn, kUndefinedRecall, undefined);
    prcn = ratio(tp, tp + fp, kUndefinedPrecision, undefined);
    if (gt_count == 0) {
        undefined |= kUndefinedMota;
        mota = 0.0;
    } else {
        mota = 1.0 - static_cast<double>(fn + fp + id_switches) / static_cast<double>(gt_count);
    }
    if (matched_pairs == 0) {
        undefined |= kUndefinedMotp;
        motp = 0.0;
    } else {
        motp = sum_match_distance / static_cast<double>(matched_pairs);
    }
    idp = ratio(idtp, idtp + idfp, kUndefinedIdp, undefined);
    idr = ratio(idtp, idtp + idfn, kUndefinedIdr, undefined);
    idf1 = ratio(2 * idtp, 2 * idtp + idfp + idfn, kUndefinedIdf1, undefined);
}

EvalReport evaluate_sequence(const GroundTruth& gt, std::span<const TrackRecord> hyp, const EvalOptions& opts) {
    std::map<std::size_t, std::vector<FrameGt>> gt_frames;
    std::map<std::size_t, std::vector<FrameGt>> ignored_frames;
    for (const GroundTruthTrack& track : gt) {
        for (const auto& [frame, entry] : track.frames) {
            const bool ignored = entry.ignore || entry.visibility < opts.min_visibility;
            (ignored ? ignored_frames : gt_frames)[frame].push_back(FrameGt{track.id, entry.box});
        }
    }
    std::map<std::size_t, std::vector<FrameHyp>> hyp_frames;
    for (const TrackRecord& r : hyp) {
        auto& list = hyp_frames[r.frame];
        if (std::any_of(list.begin(), list.end(), [&](const FrameHyp& h) { return h.id == r.id.value; })) {
            throw DataError("hypothesis id " + std::to_string(r.id.value) + " appears twice in frame " +
                            std::to_string(r.frame + 1));
        }
        list.push_back(FrameHyp{r.id.value, r.box});
    }
    std::set<std::size_t> frames;
    for (const auto& [f, _] : gt_frames) frames.insert(f);
    for (const auto& [f, _] : ignored_frames) frames.insert(f);
    for (const auto& [f, _] : hyp_frames) frames.insert(f);

    EvalReport rep;
    std::map<int, std::uint32_t> last_match;       // gt id -> hyp id of its latest match
    std::map<int, std::uint32_t> previous_frame;   // matches of the previous frame
    std::map<std::pair<int, std::uint32_t>, std::uint64_t> id_overlap;
    std::map<int, std::uint64_t> gt_lengths;
    std::map<std::uint32_t, std::uint64_t> hyp_lengths;
    std::optional<std::size_t> prev_frame_index;

    static const std::vector<FrameGt> kNoGt;
    static const std::vector<FrameHyp> kNoHyp;
    for (std::size_t frame : frames) {
        const auto git = gt_frames.find(frame);
        const std::vector<FrameGt>& gts = git == gt_frames.end() ? kNoGt : git->second;
        const auto hit = hyp_frames.find(frame);
        std::vector<FrameHyp> hyps = hit == hyp_frames.end() ? kNoHyp : hit->second;

        // hypotheses covering ignored annotations are dropped entirely
        if (const auto iit = ignored_frames.find(frame); iit != ignored_frames.end() && !hyps.empty()) {
            std::vector<BoundingBox> ig_boxes;
            for (const auto& g : iit->second) ig_boxes.push_back(g.box);
            std::vector<BoundingBox> h_boxes;
            for (const auto& h : hyps) h_boxes.push_back(h.box);
            std::vector<char> drop(hyps.size(), 0);
            for (const auto& [g, h] : match_boxes(ig_boxes, h_boxes, opts.iou_thresh)) {
                drop[h] = 1;
            }
            std::vector<FrameHyp> kept;
            for (std::size_t h = 0; h < hyps.size(); ++h) {
                if (!drop[h]) kept.push_back(hyps[h]);
            }
            hyps = std::move(kept);
        }

        rep.gt_count += gts.size();
        rep.hyp_count += hyps.size();
        for (const auto& g : gts) ++gt_lengths[g.id];
        for (const auto& h : hyps) ++hyp_lengths[h.id];

        // identity overlaps: every pair above threshold, regardless of CLEAR matching
        for (const auto& g : gts) {
            for (const auto& h : hyps) {
                if (iou(g.box, h.box) >= opts.iou_thresh) {
                    ++id_overlap[{g.id, h.id}];
                }
            }
        }

        // continuity: keep last frame's pairs that still overlap enough
        std::vector<char> gt_used(gts.size(), 0);
        std::vector<char> hyp_used(hyps.size(), 0);
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        const bool consecutive = prev_frame_index && *prev_frame_index + 1 == frame;
        if (consecutive) {
            for (std::size_t g = 0; g < gts.size(); ++g) {
                const auto prev = previous_frame.find(gts[g].id);
                if (prev == previous_frame.end()) {
                    continue;
                }
                for (std::size_t h = 0; h < hyps.size(); ++h) {
                    if (!hyp_used[h] && hyps[h].id == prev->second &&
                        iou(gts[g].box, hyps[h].box) >= opts.iou_thresh) {
                        pairs.emplace_back(g, h);
                        gt_used[g] = 1;
                        hyp_used[h] = 1;
                        break;
                    }
                }
            }
        }
        std::vector<std::size_t> free_g;
        std::vector<std::size_t> free_h;
        std::vector<BoundingBox> free_gb;
        std::vector<BoundingBox> free_hb;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            if (!gt_used[g]) {
                free_g.push_back(g);
                free_gb.push_back(gts[g].box);
            }
        }
        for (std::size_t h = 0; h < hyps.size(); ++h) {
            if (!hyp_used[h]) {
                free_h.push_back(h);
                free_hb.push_back(hyps[h].box);
            }
        }
        for (const auto& [g, h] : match_boxes(free_gb, free_hb, opts.iou_thresh)) {
            pairs.emplace_back(free_g[g], free_h[h]);
        }
        std::sort(pairs.begin(), pairs.end());

        previous_frame.clear();
        for (const auto& [g, h] : pairs) {
            const int gid = gts[g].id;
            const std::uint32_t hid = hyps[h].id;
            const auto last = last_match.find(gid);
            if (last != last_match.end() && last->second != hid) {
                ++rep.id_switches;
            }
            last_match[gid] = hid;
            previous_frame[gid] = hid;
            rep.sum_match_distance += 1.0 - iou(gts[g].box, hyps[h].box);
        }
        rep.tp += pairs.size();
        rep.matched_pairs += pairs.size();
        rep.fn += gts.size() - pairs.size();
        rep.fp += hyps.size() - pairs.size();
        prev_frame_index = frame;
    }

    // identity metrics: one-to-one trajectory matching maximizing overlap
    std::vector<int> gt_ids;
    for (const auto& [id, _] : gt_lengths) gt_ids.push_back(id);
    std::vector<std::uint32_t> hyp_ids;
    for (const auto& [id, _] : hyp_lengths) hyp_ids.push_back(id);
    std::uint64_t idtp = 0;
    if (!gt_ids.empty() && !hyp_ids.empty()) {
        const std::size_t n = std::max(gt_ids.size(), hyp_ids.size());
        std::uint64_t max_overlap = 0;
        for (const auto& [key, count] : id_overlap) max_overlap = std::max(max_overlap, count);
        const auto top = static_cast<double>(max_overlap);
        CostMatrix cost{n, std::vector<double>(n * n, top)};
        std::unordered_map<int, std::size_t> gt_index;
        for (std::size_t i = 0; i < gt_ids.size(); ++i) gt_index[gt_ids[i]] = i;
        std::unordered_map<std::uint32_t, std::size_t> hyp_index;
        for (std::size_t j = 0; j < hyp_ids.size(); ++j) hyp_index[hyp_ids[j]] = j;
        for (const auto& [key, count] : id_overlap) {
            cost.values[gt_index[key.first] * n + hyp_index[key.second]] = top - static_cast<double>(count);
        }
        const std::vector<std::size_t> row_to_col = lexicographic_min_assignment(cost);
        for (std::size_t i = 0; i < gt_ids.size(); ++i) {
            const std::size_t j = row_to_col[i];
            if (j < hyp_ids.size()) {
                const auto it = id_overlap.find({gt_ids[i], hyp_ids[j]});
                if (it != id_overlap.end()) idtp += it->second;
            }
        }
    }
    rep.idtp = idtp;
    rep.idfn = rep.gt_count - idtp;
    rep.idfp = rep.hyp_count - idtp;
    rep.finalize();
    return rep;
}

EvalReport aggregate(std::span<const EvalReport> reports) {
    if (reports.empty()) {
        throw ConfigError("aggregate: no reports to pool");
    }
    EvalReport pooled;
    for (const EvalReport& r : reports) {
        pooled.gt_count += r.gt_count;
        pooled.hyp_count += r.hyp_count;
        pooled.tp += r.tp;
        pooled.fp += r.fp;
        pooled.fn += r.fn;
        pooled.id_switches += r.id_switches;
        pooled.matched_pairs += r.matched_pairs;
        pooled.sum_match_distance += r.sum_match_distance;
        pooled.idtp += r.idtp;
        pooled.idfp += r.idfp;
        pooled.idfn += r.idfn;
    }
    pooled.finalize();
    return pooled;
}

void write_metrics_csv(std::ostream& os, std::span<const NamedReport> rows, bool with_overall) {
    const auto line = [&os](std::string_view name, const EvalReport& r) {
        os << name << ',' << text::fixed(r.idf1, 6) << ',' << text::fixed(r.idp, 6) << ',' << text::fixed(r.idr, 6)
           << ',' << text::fixed(r.rcll, 6) << ',' << text::fixed(r.prcn, 6) << ',' << text::fixed(r.mota, 6)
           << ',' << text::fixed(r.motp, 6) << '\n';
    };
    os << "sequence,IDF1,IDP,IDR,Rcll,Prcn,MOTA,MOTP\n";
    std::vector<EvalReport> reports;
    for (const NamedReport& row : rows) {
        line(row.sequence, row.report);
        reports.push_back(row.report);
    }
    if (with_overall && !reports.empty()) {
        line("OVERALL", aggregate(reports));
    }
}

}  // namespace tmot
