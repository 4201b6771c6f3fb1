// tmot: batch front end for tracking, evaluation, alpha sweeps, synthetic
// sequence export and throughput measurement.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tmot/app.hpp"
#include "tmot/error.hpp"

namespace {

using namespace tmot;

enum Exit { kOk = 0, kConfig = 2, kData = 3, kInternal = 4 };

// Tracker overrides. Unset fields keep the preset (or library default).
struct Overrides {
    std::optional<std::string> preset;
    std::optional<double> alpha;
    std::optional<std::string> variant;
    std::optional<double> high_thresh;
    std::optional<double> low_thresh;
    std::optional<double> match_thresh_first;
    std::optional<double> match_thresh_second;
    std::optional<double> match_thresh_tentative;
    std::optional<double> recovery_thresh;
    std::optional<double> new_track_thresh;
    std::optional<int> max_lost_frames;
    std::optional<int> min_hits;
    std::optional<bool> thermal_second_stage;
    std::optional<int> hist_bins;
    std::optional<unsigned> hist_range;
    std::optional<std::string> roi_source;

    TrackerConfig build() const {
        TrackerConfig c = preset ? TrackerConfig::preset(*preset) : TrackerConfig{};
        if (alpha) c.alpha = *alpha;
        if (variant) c.variant = parse_variant(*variant);
        if (high_thresh) c.high_thresh = *high_thresh;
        if (low_thresh) c.low_thresh = *low_thresh;
        if (match_thresh_first) c.match_thresh_first = *match_thresh_first;
        if (match_thresh_second) c.match_thresh_second = *match_thresh_second;
        if (match_thresh_tentative) c.match_thresh_tentative = *match_thresh_tentative;
        if (recovery_thresh) c.recovery_thresh = *recovery_thresh;
        if (new_track_thresh) c.new_track_thresh = *new_track_thresh;
        if (max_lost_frames) c.max_lost_frames = *max_lost_frames;
        if (min_hits) c.min_hits = *min_hits;
        if (thermal_second_stage) c.use_thermal_in_second_stage = *thermal_second_stage;
        if (hist_bins) c.histogram.bins = *hist_bins;
        if (hist_range) c.histogram.range_max = *hist_range;
        if (roi_source) c.roi_source = parse_roi_source(*roi_source);
        c.validate();
        return c;
    }
};

void add_tracker_flags(CLI::App& app, Overrides& o) {
    auto* g = app.add_option_group("tracker", "Tracker settings (flags override --config and --preset)");
    g->add_option("--preset", o.preset, "paper-byte (alpha 0.3) or paper-ocsort (alpha 0.8)");
    g->add_option("--alpha", o.alpha, "Weight of motion similarity in the fused score, in [0, 1]");
    g->add_option("--variant", o.variant, "byte or ocsort");
    g->add_option("--high-thresh", o.high_thresh, "Score splitting high and low detections");
    g->add_option("--low-thresh", o.low_thresh, "Detections below this are dropped");
    g->add_option("--match-thresh-first", o.match_thresh_first, "Minimum fused similarity, first stage");
    g->add_option("--match-thresh-second", o.match_thresh_second, "Minimum similarity, second stage");
    g->add_option("--match-thresh-tentative", o.match_thresh_tentative, "Minimum similarity for tentative tracks");
    g->add_option("--recovery-thresh", o.recovery_thresh, "Minimum IoU for lost-track recovery (ocsort)");
    g->add_option("--new-track-thresh", o.new_track_thresh, "Minimum score to start a track");
    g->add_option("--max-lost-frames", o.max_lost_frames, "Frames a lost track is kept");
    g->add_option("--min-hits", o.min_hits, "Matches before a track is confirmed");
    g->add_option("--thermal-second-stage", o.thermal_second_stage, "Fuse thermal similarity in the second stage");
    g->add_option("--hist-bins", o.hist_bins, "Histogram bins (0: 32 for 8-bit, 64 for 16-bit)");
    g->add_option("--hist-range", o.hist_range, "Histogram value range (0: 2^bitDepth)");
    g->add_option("--roi-source", o.roi_source, "predicted or last-observation");
}

std::vector<SequenceData> synthetic_battery(std::uint64_t seed) {
    std::vector<SequenceData> out;
    for (const Scenario& s : scenario_battery(seed)) out.push_back(from_synthetic(generate(s)));
    return out;
}

void write_or_print(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << body;
    if (!out.flush()) throw IoError("write failed for " + path);
}

int run(int argc, char** argv) {
    CLI::App app{"Thermal-aware multi-object tracking toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI/TOML file with default flag values (keys are flag names)");

    Overrides ov;
    add_tracker_flags(app, ov);
    int jobs = 1;
    std::uint64_t seed = 1;
    app.add_option("--jobs,-j", jobs, "Sequences processed in parallel")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed for synthetic scenarios");

    // track
    auto* track = app.add_subcommand("track", "Track sequences and write MOT result files");
    std::vector<std::string> t_seqs, t_dets;
    std::string t_out;
    track->add_option("--seq", t_seqs, "Sequence directory (repeatable)")->required();
    track->add_option("--det", t_dets, "Detection file per sequence (default <seq>/det/det.txt)");
    track->add_option("--out", t_out, "Output directory")->required();

    // eval
    auto* eval = app.add_subcommand("eval", "Score result files against ground truth");
    std::vector<std::string> e_seqs;
    std::string e_results, e_out;
    double e_iou = 0.5;
    double e_minvis = -1.0;
    eval->add_option("--seq", e_seqs, "Sequence directory with gt/gt.txt (repeatable)")->required();
    eval->add_option("--results", e_results, "Directory of <name>.txt result files")->required();
    eval->add_option("--out", e_out, "Metrics CSV path (default stdout)");
    eval->add_option("--iou-thresh", e_iou, "Minimum IoU for a match");
    eval->add_option("--min-visibility", e_minvis, "Ignore ground truth less visible than this");

    // sweep-alpha
    auto* sweep = app.add_subcommand("sweep-alpha", "Track and score over a grid of alpha values");
    std::vector<std::string> s_seqs, s_variants{"byte", "ocsort"};
    std::vector<double> s_grid;
    std::string s_out;
    bool s_battery = false;
    sweep->add_option("--seq", s_seqs, "Sequence directory with detections and ground truth (repeatable)");
    sweep->add_flag("--battery", s_battery, "Use the built-in synthetic battery");
    sweep->add_option("--grid", s_grid, "Alpha values, comma separated (default 0,0.1,...,1)")->delimiter(',');
    sweep->add_option("--variants", s_variants, "Variants to sweep")->delimiter(',');
    sweep->add_option("--out", s_out, "Sweep CSV path (default stdout)");

    // synth
    auto* synth = app.add_subcommand("synth", "Export synthetic sequences");
    std::vector<std::string> y_presets, y_scenarios;
    std::string y_out, y_ext = ".png";
    bool y_battery = false;
    synth->add_option("--preset", y_presets, "Scenario preset (repeatable)");
    synth->add_option("--scenario", y_scenarios, "Scenario file (repeatable)");
    synth->add_flag("--battery", y_battery, "Export the full battery");
    synth->add_option("--out", y_out, "Output directory")->required();
    synth->add_option("--image-ext", y_ext, ".png or .pgm");

    // bench
    auto* bench = app.add_subcommand("bench", "Measure tracking throughput");
    std::vector<std::string> b_seqs;
    bool b_battery = false;
    int b_repeats = 3;
    bench->add_option("--seq", b_seqs, "Sequence directory (repeatable)");
    bench->add_flag("--battery", b_battery, "Use the built-in synthetic battery");
    bench->add_option("--repeats", b_repeats, "Runs per sequence")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    if (*track) {
        TrackRequest req;
        for (const auto& s : t_seqs) req.sequences.emplace_back(s);
        for (const auto& d : t_dets) req.detections.emplace_back(d);
        req.config = ov.build();
        req.output_dir = t_out;
        req.jobs = jobs;
        for (const TrackSummary& s : run_track(req)) {
            for (const auto& w : s.warnings) std::cerr << s.name << ": warning: " << w << '\n';
            std::cout << s.name << ": frames=" << s.frames << " detections=" << s.detections
                      << " records=" << s.records << " identities=" << s.identities << " -> " << s.output.string()
                      << '\n';
        }
    } else if (*eval) {
        EvalRequest req;
        for (const auto& s : e_seqs) req.sequences.emplace_back(s);
        req.results_dir = e_results;
        req.options.iou_thresh = e_iou;
        req.options.min_visibility = e_minvis;
        if (!(e_iou > 0.0 && e_iou <= 1.0)) throw ConfigError("--iou-thresh must lie in (0, 1]");
        const auto rows = run_eval(req);
        std::ostringstream csv;
        write_metrics_csv(csv, rows, true);
        write_or_print(e_out, csv.str());
    } else if (*sweep) {
        if (s_seqs.empty() == !s_battery) throw ConfigError("sweep-alpha needs either --seq or --battery");
        std::vector<SequenceData> seqs;
        if (s_battery) {
            seqs = synthetic_battery(seed);
        } else {
            for (const auto& s : s_seqs) seqs.push_back(load_sequence(s, std::nullopt, true));
        }
        std::vector<TrackerVariant> variants;
        for (const auto& v : s_variants) variants.push_back(parse_variant(v));
        const auto rows = run_sweep_alpha(seqs, s_grid.empty() ? default_alpha_grid() : s_grid, variants,
                                          ov.build(), jobs);
        std::ostringstream csv;
        write_sweep_csv(csv, rows);
        write_or_print(s_out, csv.str());
    } else if (*synth) {
        std::vector<Scenario> scenarios;
        if (y_battery) scenarios = scenario_battery(seed);
        for (const auto& p : y_presets) scenarios.push_back(preset_scenario(p, seed));
        for (const auto& f : y_scenarios) scenarios.push_back(load_scenario(f));
        if (scenarios.empty()) throw ConfigError("synth needs --preset, --scenario or --battery");
        if (y_ext != ".png" && y_ext != ".pgm") throw ConfigError("--image-ext must be .png or .pgm");
        for (const auto& dir : run_synth(scenarios, y_out, y_ext)) std::cout << dir.string() << '\n';
    } else if (*bench) {
        if (b_seqs.empty() == !b_battery) throw ConfigError("bench needs either --seq or --battery");
        std::vector<SequenceData> seqs;
        if (b_battery) {
            seqs = synthetic_battery(seed);
        } else {
            for (const auto& s : b_seqs) seqs.push_back(load_sequence(s));
        }
        for (const BenchResult& r : run_bench(seqs, ov.build(), b_repeats)) {
            std::cout << r.name << ": frames=" << r.frames << " seconds=" << r.seconds << " fps=" << r.fps << '\n';
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const tmot::ConfigError& e) {
        std::cerr << "tmot: configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const tmot::DataError& e) {
        std::cerr << "tmot: data error: " << e.what() << '\n';
        return kData;
    } catch (const tmot::GeometryError& e) {
        std::cerr << "tmot: data error: " << e.what() << '\n';
        return kData;
    } catch (const tmot::SequenceError& e) {
        std::cerr << "tmot: data error: " << e.what() << '\n';
        return kData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "tmot: data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception& e) {
        std::cerr << "tmot: internal error: " << e.what() << '\n';
        return kInternal;
    }
}
