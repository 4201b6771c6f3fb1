#include "tmot/app.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "tmot/error.hpp"
#include "text.hpp"

namespace tmot {

std::size_t SequenceData::frame_count() const {
    return images.empty() ? manifest.frame_count : images.size();
}

GrayImage SequenceData::image(std::size_t frame) const {
    if (!images.empty()) return images.at(frame);
    const bool depth_declared = std::find(manifest.warnings.begin(), manifest.warnings.end(),
                                          "bitDepth missing; defaulting to 8") == manifest.warnings.end();
    return load_image(manifest.image_path(frame), depth_declared ? manifest.bit_depth : 0);
}

SequenceData load_sequence(const fs::path& dir, const std::optional<fs::path>& detections, bool with_ground_truth) {
    SequenceData seq;
    seq.manifest = load_manifest(dir);
    seq.name = seq.manifest.name;
    seq.detections = read_detections(detections.value_or(dir / "det" / "det.txt"));
    if (with_ground_truth) seq.ground_truth = read_ground_truth(dir / "gt" / "gt.txt");
    return seq;
}

SequenceData from_synthetic(SyntheticSequence syn) {
    SequenceData seq;
    seq.name = syn.scenario.name;
    seq.manifest = syn.manifest();
    seq.detections = std::move(syn.detections);
    seq.ground_truth = std::move(syn.ground_truth);
    seq.images = std::move(syn.images);
    return seq;
}

ResultBuffer track_sequence(const SequenceData& seq, const TrackerConfig& cfg) {
    Tracker tracker(cfg);
    const std::size_t n = seq.frame_count();
    for (std::size_t f = 0; f < n; ++f) {
        const auto& dets = seq.detections.at(f);
        if (!seq.images.empty()) {
            tracker.step(f, seq.images[f], dets);
        } else {
            const GrayImage img = seq.image(f);
            tracker.step(f, img, dets);
        }
    }
    return tracker.finish();
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(count);
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

namespace {

std::size_t detection_count(const DetectionTable& t) {
    std::size_t n = 0;
    for (const auto& [frame, dets] : t.frames) n += dets.size();
    return n;
}

void remove_quietly(const fs::path& p) {
    std::error_code ec;
    fs::remove(p, ec);
}

}  // namespace

std::vector<TrackSummary> run_track(const TrackRequest& req) {
    req.config.validate();
    if (req.sequences.empty()) throw ConfigError("no sequences given");
    if (!req.detections.empty() && req.detections.size() != req.sequences.size()) {
        throw ConfigError("got " + std::to_string(req.detections.size()) + " detection files for " +
                          std::to_string(req.sequences.size()) + " sequences");
    }
    for (const auto& dir : req.sequences) {
        if (!fs::is_directory(dir)) throw IoError("sequence directory not found: " + dir.string());
    }
    for (const auto& det : req.detections) {
        if (!fs::exists(det)) throw IoError("detection file not found: " + det.string());
    }

    const std::size_t n = req.sequences.size();
    std::vector<SequenceManifest> manifests;
    std::set<std::string> names;
    for (const auto& dir : req.sequences) {
        manifests.push_back(load_manifest(dir));
        if (!names.insert(manifests.back().name).second) {
            throw ConfigError("two sequences are named '" + manifests.back().name + "'");
        }
    }

    fs::create_directories(req.output_dir);
    std::vector<TrackSummary> summaries(n);
    std::vector<fs::path> temps(n);
    for (std::size_t i = 0; i < n; ++i) {
        summaries[i].name = manifests[i].name;
        summaries[i].output = req.output_dir / (manifests[i].name + ".txt");
        temps[i] = req.output_dir / ("." + manifests[i].name + ".txt.partial");
    }

    try {
        parallel_for(n, req.jobs, [&](std::size_t i) {
            std::optional<fs::path> det;
            if (!req.detections.empty()) det = req.detections[i];
            const SequenceData seq = load_sequence(req.sequences[i], det);
            const ResultBuffer results = track_sequence(seq, req.config);
            write_results(temps[i], results);

            TrackSummary& s = summaries[i];
            s.frames = seq.frame_count();
            s.detections = detection_count(seq.detections);
            s.records = results.size();
            std::set<std::uint32_t> ids;
            for (const auto& r : results) ids.insert(r.id.value);
            s.identities = ids.size();
            s.warnings = seq.manifest.warnings;
            if (seq.detections.clamped_scores > 0) {
                s.warnings.push_back(std::to_string(seq.detections.clamped_scores) + " detection scores clamped to [0, 1]");
            }
            if (!seq.detections.frames.empty() && seq.detections.frames.rbegin()->first >= s.frames) {
                s.warnings.push_back("detections beyond seqLength were ignored");
            }
        });
        for (std::size_t i = 0; i < n; ++i) fs::rename(temps[i], summaries[i].output);
    } catch (...) {
        for (std::size_t i = 0; i < n; ++i) {
            remove_quietly(temps[i]);
            remove_quietly(summaries[i].output);
        }
        throw;
    }
    return summaries;
}

std::vector<NamedReport> run_eval(const EvalRequest& req) {
    if (req.sequences.empty()) throw ConfigError("no sequences given");
    if (!fs::is_directory(req.results_dir)) throw IoError("results directory not found: " + req.results_dir.string());

    std::vector<std::pair<std::string, fs::path>> seqs;
    std::set<std::string> seq_names;
    for (const auto& dir : req.sequences) {
        if (!fs::is_directory(dir)) throw IoError("sequence directory not found: " + dir.string());
        const SequenceManifest m = load_manifest(dir);
        if (!seq_names.insert(m.name).second) throw ConfigError("two sequences are named '" + m.name + "'");
        seqs.emplace_back(m.name, dir);
    }
    std::set<std::string> result_names;
    for (const auto& entry : fs::directory_iterator(req.results_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            result_names.insert(entry.path().stem().string());
        }
    }
    std::vector<std::string> unmatched;
    for (const auto& name : seq_names) {
        if (!result_names.count(name)) unmatched.push_back(name + " (no result file)");
    }
    for (const auto& name : result_names) {
        if (!seq_names.count(name)) unmatched.push_back(name + " (no ground truth sequence)");
    }
    if (!unmatched.empty()) {
        std::string msg = "sequence names do not line up:";
        for (const auto& u : unmatched) msg += " " + u + ";";
        msg.pop_back();
        throw DataError(msg);
    }

    std::vector<NamedReport> rows;
    for (const auto& [name, dir] : seqs) {
        const GroundTruth gt = read_ground_truth(dir / "gt" / "gt.txt");
        const ResultBuffer hyp = read_results(req.results_dir / (name + ".txt"));
        rows.push_back(NamedReport{name, evaluate_sequence(gt, hyp, req.options)});
    }
    return rows;
}

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
    return grid;
}

std::vector<SweepRow> run_sweep_alpha(const std::vector<SequenceData>& sequences, std::vector<double> grid,
                                      const std::vector<TrackerVariant>& variants, const TrackerConfig& base,
                                      int jobs, const EvalOptions& eval) {
    if (grid.empty()) throw ConfigError("alpha grid is empty");
    for (double a : grid) {
        if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha grid value " + text::shortest(a) + " outside [0, 1]");
    }
    if (sequences.empty()) throw ConfigError("no sequences to sweep");
    if (variants.empty()) throw ConfigError("no tracker variants to sweep");
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const std::size_t n_seq = sequences.size();
    const std::size_t n_alpha = grid.size();
    std::vector<EvalReport> reports(variants.size() * n_alpha * n_seq);
    std::vector<TrackerConfig> configs;
    for (TrackerVariant v : variants) {
        for (double a : grid) {
            TrackerConfig cfg = base;
            cfg.variant = v;
            cfg.alpha = a;
            cfg.validate();
            configs.push_back(cfg);
        }
    }
    parallel_for(reports.size(), jobs, [&](std::size_t k) {
        const SequenceData& seq = sequences[k % n_seq];
        reports[k] = evaluate_sequence(seq.ground_truth, track_sequence(seq, configs[k / n_seq]), eval);
    });

    std::vector<SweepRow> rows;
    for (std::size_t v = 0; v < variants.size(); ++v) {
        const std::size_t first = rows.size();
        for (std::size_t a = 0; a < n_alpha; ++a) {
            const std::size_t off = (v * n_alpha + a) * n_seq;
            const EvalReport pooled = aggregate(std::span<const EvalReport>(reports).subspan(off, n_seq));
            rows.push_back(SweepRow{variants[v], "grid", grid[a], pooled.mota, pooled.idf1});
        }
        std::size_t best_mota = first;
        std::size_t best_idf1 = first;
        for (std::size_t r = first; r < rows.size(); ++r) {
            if (rows[r].mota > rows[best_mota].mota) best_mota = r;
            if (rows[r].idf1 > rows[best_idf1].idf1) best_idf1 = r;
        }
        SweepRow m = rows[best_mota];
        m.row = "argmax_MOTA";
        SweepRow i = rows[best_idf1];
        i.row = "argmax_IDF1";
        rows.push_back(m);
        rows.push_back(i);
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "variant,row,alpha,MOTA,IDF1\n";
    for (const SweepRow& r : rows) {
        os << to_string(r.variant) << ',' << r.row << ',' << text::shortest(r.alpha) << ',' << text::fixed(r.mota, 6)
           << ',' << text::fixed(r.idf1, 6) << '\n';
    }
}

std::vector<fs::path> run_synth(const std::vector<Scenario>& scenarios, const fs::path& out,
                                const std::string& image_ext) {
    std::set<std::string> names;
    for (const Scenario& s : scenarios) {
        if (!names.insert(s.name).second) throw ConfigError("two scenarios are named '" + s.name + "'");
    }
    std::vector<fs::path> dirs;
    for (const Scenario& s : scenarios) {
        const fs::path dir = out / s.name;
        export_sequence(generate(s), dir, image_ext);
        dirs.push_back(dir);
    }
    return dirs;
}

std::vector<BenchResult> run_bench(const std::vector<SequenceData>& sequences, const TrackerConfig& cfg,
                                   int repeats) {
    if (repeats < 1) throw ConfigError("bench repeats must be at least 1");
    std::vector<BenchResult> out;
    for (const SequenceData& src : sequences) {
        SequenceData seq = src;
        if (seq.images.empty()) {
            for (std::size_t f = 0; f < src.frame_count(); ++f) seq.images.push_back(src.image(f));
        }
        const auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < repeats; ++r) {
            const ResultBuffer res = track_sequence(seq, cfg);
            (void)res;
        }
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        BenchResult b;
        b.name = seq.name;
        b.frames = seq.frame_count() * static_cast<std::size_t>(repeats);
        b.seconds = dt.count();
        b.fps = b.seconds > 0.0 ? static_cast<double>(b.frames) / b.seconds : 0.0;
        out.push_back(b);
    }
    return out;
}

}  // namespace tmot
