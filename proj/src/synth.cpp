#include "tmot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "tmot/error.hpp"
#include "text.hpp"

namespace tmot {

std::string_view to_string(TrajectoryKind k) {
    switch (k) {
        case TrajectoryKind::Linear: return "linear";
        case TrajectoryKind::Crossing: return "crossing";
        case TrajectoryKind::StopAndGo: return "stop-and-go";
    }
    return "linear";
}

namespace {

TrajectoryKind parse_kind(std::string_view s) {
    if (s == "linear") return TrajectoryKind::Linear;
    if (s == "crossing") return TrajectoryKind::Crossing;
    if (s == "stop-and-go") return TrajectoryKind::StopAndGo;
    throw ConfigError("unknown trajectory kind '" + std::string(s) + "' (expected linear|crossing|stop-and-go)");
}

double snap(double v) { return std::floor(v + 0.5); }

}  // namespace

BoundingBox ObjectSpec::box_at(std::size_t frame) const {
    const auto t = static_cast<double>(frame);
    double px = x;
    double py = y;
    switch (kind) {
        case TrajectoryKind::Linear:
            px += vx * t;
            py += vy * t;
            break;
        case TrajectoryKind::Crossing:
            px += vx * t + (frame >= cross_frame ? shift_x : 0.0);
            py += vy * t + (frame >= cross_frame ? shift_y : 0.0);
            break;
        case TrajectoryKind::StopAndGo: {
            const std::size_t period = static_cast<std::size_t>(go_frames + stop_frames);
            const std::size_t full = frame / period;
            const std::size_t rest = frame % period;
            const auto moved = static_cast<double>(full * static_cast<std::size_t>(go_frames) +
                                                   std::min(rest, static_cast<std::size_t>(go_frames)));
            px += vx * moved;
            py += vy * moved;
            break;
        }
    }
    return BoundingBox{snap(px), snap(py), std::max(1.0, snap(width)), std::max(1.0, snap(height))};
}

void Scenario::validate() const {
    if (frame_count < 1) throw ConfigError("scenario needs at least one frame");
    if (width < 1 || height < 1) throw ConfigError("scenario image size must be positive");
    if (bit_depth != 8 && bit_depth != 16) throw ConfigError("scenario bit_depth must be 8 or 16");
    if (!(frame_rate > 0.0)) throw ConfigError("scenario frame_rate must be positive");
    const auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
    };
    prob(corruption.dropout, "dropout");
    prob(corruption.min_visibility, "min_visibility");
    prob(corruption.score_min, "score_min");
    prob(corruption.score_max, "score_max");
    prob(corruption.clutter_score_min, "clutter_score_min");
    prob(corruption.clutter_score_max, "clutter_score_max");
    if (corruption.score_min > corruption.score_max || corruption.clutter_score_min > corruption.clutter_score_max) {
        throw ConfigError("score ranges must satisfy min <= max");
    }
    if (!(corruption.jitter >= 0.0) || !(corruption.clutter_rate >= 0.0)) {
        throw ConfigError("jitter and clutter_rate must be non-negative");
    }
    const std::uint32_t max_value = (1u << bit_depth) - 1u;
    std::set<std::uint16_t> seen;
    for (const ObjectSpec& o : objects) {
        if (!(o.width >= 1.0) || !(o.height >= 1.0)) throw ConfigError("object boxes must be at least 1x1");
        if (o.intensity < 1 || o.intensity > max_value) {
            throw ConfigError("object intensity " + std::to_string(o.intensity) + " outside [1, " +
                              std::to_string(max_value) + "]");
        }
        if (o.kind == TrajectoryKind::StopAndGo && (o.go_frames < 1 || o.stop_frames < 0)) {
            throw ConfigError("stop-and-go needs go >= 1 and stop >= 0");
        }
        if (distinct_intensities && !seen.insert(o.intensity).second) {
            throw ConfigError("intensity " + std::to_string(o.intensity) +
                              " used by two objects while distinct intensities are required");
        }
    }
}

SequenceManifest SyntheticSequence::manifest(std::string image_ext) const {
    SequenceManifest m;
    m.name = scenario.name;
    m.image_ext = std::move(image_ext);
    m.frame_rate = scenario.frame_rate;
    m.frame_count = scenario.frame_count;
    m.width = scenario.width;
    m.height = scenario.height;
    m.bit_depth = scenario.bit_depth;
    m.modality = Modality::Thermal;
    return m;
}

double ScenarioRng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double ScenarioRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double ScenarioRng::normal(double sigma) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool ScenarioRng::bernoulli(double p) {
    return uniform() < p;
}

int ScenarioRng::poisson(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform();
    while (prod > limit) {
        ++k;
        prod *= uniform();
    }
    return k;
}

SyntheticSequence generate(const Scenario& scn) {
    scn.validate();
    SyntheticSequence seq;
    seq.scenario = scn;
    ScenarioRng rng(scn.seed);
    const DetectorCorruption& c = scn.corruption;
    const std::size_t n_obj = scn.objects.size();
    seq.ground_truth.resize(n_obj);
    for (std::size_t i = 0; i < n_obj; ++i) seq.ground_truth[i].id = static_cast<int>(i + 1);

    const auto pixel_count = static_cast<std::size_t>(scn.width) * static_cast<std::size_t>(scn.height);
    for (std::size_t f = 0; f < scn.frame_count; ++f) {
        std::vector<std::uint16_t> pixels(pixel_count, 0);
        std::vector<int> owner(pixel_count, -1);
        std::vector<BoundingBox> boxes(n_obj);
        for (std::size_t i = 0; i < n_obj; ++i) {
            boxes[i] = scn.objects[i].box_at(f);
            const auto clipped = clip_to_image(boxes[i], scn.width, scn.height);
            if (!clipped) continue;
            const int x0 = static_cast<int>(clipped->left);
            const int y0 = static_cast<int>(clipped->top);
            const int x1 = static_cast<int>(clipped->right());
            const int y1 = static_cast<int>(clipped->bottom());
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    const std::size_t idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(scn.width) +
                                            static_cast<std::size_t>(x);
                    pixels[idx] = scn.objects[i].intensity;
                    owner[idx] = static_cast<int>(i);
                }
            }
        }
        std::vector<std::size_t> visible(n_obj, 0);
        for (int o : owner) {
            if (o >= 0) ++visible[static_cast<std::size_t>(o)];
        }
        seq.images.emplace_back(scn.width, scn.height, scn.bit_depth, std::move(pixels));

        bool crossing_frame = false;
        std::vector<Detection> dets;
        for (std::size_t i = 0; i < n_obj; ++i) {
            const ObjectSpec& obj = scn.objects[i];
            if (obj.kind == TrajectoryKind::Crossing && obj.cross_frame == f) crossing_frame = true;
            if (!clip_to_image(boxes[i], scn.width, scn.height)) continue;
            const double visibility = static_cast<double>(visible[i]) / boxes[i].area();
            seq.ground_truth[i].frames[f] = GroundTruthEntry{boxes[i], visibility, false, 1};

            // fixed draw order per object: dropout, 4 jitters, score
            const bool dropped = rng.bernoulli(c.dropout);
            const double jl = rng.normal(c.jitter);
            const double jt = rng.normal(c.jitter);
            const double jw = rng.normal(c.jitter);
            const double jh = rng.normal(c.jitter);
            const double score = rng.uniform(c.score_min, c.score_max);
            if (dropped || visibility < c.min_visibility) continue;
            Detection d;
            d.bbox = c.jitter > 0.0 ? BoundingBox{boxes[i].left + jl, boxes[i].top + jt,
                                                  std::max(1.0, boxes[i].width + jw),
                                                  std::max(1.0, boxes[i].height + jh)}
                                    : boxes[i];
            d.score = score;
            d.class_id = 1;
            dets.push_back(d);
        }
        if (scn.adversarial_order && crossing_frame) std::reverse(dets.begin(), dets.end());

        const int clutter = rng.poisson(c.clutter_rate);
        for (int k = 0; k < clutter; ++k) {
            const double w = rng.uniform(10.0, 40.0);
            const double h = rng.uniform(20.0, 80.0);
            const double l = rng.uniform(0.0, std::max(1.0, scn.width - w));
            const double t = rng.uniform(0.0, std::max(1.0, scn.height - h));
            dets.push_back(Detection{BoundingBox{l, t, w, h},
                                     rng.uniform(c.clutter_score_min, c.clutter_score_max), 1});
        }
        if (!dets.empty()) seq.detections.frames[f] = std::move(dets);
    }
    std::erase_if(seq.ground_truth, [](const GroundTruthTrack& t) { return t.frames.empty(); });
    return seq;
}

void export_sequence(const SyntheticSequence& seq, const std::filesystem::path& dir, const std::string& image_ext) {
    const SequenceManifest m = seq.manifest(image_ext);
    std::filesystem::create_directories(dir);
    write_manifest(dir, m);
    SequenceManifest located = m;
    located.root = dir;
    for (std::size_t f = 0; f < seq.images.size(); ++f) {
        save_image(located.image_path(f), seq.images[f]);
    }
    write_ground_truth(dir / "gt" / "gt.txt", seq.ground_truth);
    write_detections(dir / "det" / "det.txt", seq.detections);
}

namespace {

bool parse_bool(std::string_view v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("scenario key '" + key + "' expects a boolean, got '" + std::string(v) + "'");
}

double parse_number(std::string_view v, const std::string& key) {
    const auto d = text::parse_double(v);
    if (!d) throw ConfigError("scenario key '" + key + "' expects a number, got '" + std::string(v) + "'");
    return *d;
}

long long parse_integer(std::string_view v, const std::string& key) {
    const auto i = text::parse_int(v);
    if (!i || *i < 0) {
        throw ConfigError("scenario key '" + key + "' expects a non-negative integer, got '" + std::string(v) + "'");
    }
    return *i;
}

ObjectSpec parse_object(std::string_view spec) {
    std::istringstream words{std::string(spec)};
    std::string kind;
    words >> kind;
    ObjectSpec o;
    o.kind = parse_kind(kind);
    std::string item;
    while (words >> item) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("object attribute '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq);
        const std::string_view val = std::string_view(item).substr(eq + 1);
        if (key == "x") o.x = parse_number(val, key);
        else if (key == "y") o.y = parse_number(val, key);
        else if (key == "w") o.width = parse_number(val, key);
        else if (key == "h") o.height = parse_number(val, key);
        else if (key == "vx") o.vx = parse_number(val, key);
        else if (key == "vy") o.vy = parse_number(val, key);
        else if (key == "intensity") o.intensity = static_cast<std::uint16_t>(std::min<long long>(parse_integer(val, key), 65535));
        else if (key == "cross_frame") o.cross_frame = static_cast<std::size_t>(parse_integer(val, key));
        else if (key == "shift_x") o.shift_x = parse_number(val, key);
        else if (key == "shift_y") o.shift_y = parse_number(val, key);
        else if (key == "go") o.go_frames = static_cast<int>(parse_integer(val, key));
        else if (key == "stop") o.stop_frames = static_cast<int>(parse_integer(val, key));
        else throw ConfigError("unknown object attribute '" + key + "'");
    }
    return o;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
    Scenario s;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw ConfigError("scenario line is not key=value: '" + std::string(t) + "'");
        const std::string key(text::trim(t.substr(0, eq)));
        const std::string_view val = text::trim(t.substr(eq + 1));
        DetectorCorruption& c = s.corruption;
        if (key == "name") s.name = std::string(val);
        else if (key == "seed") s.seed = static_cast<std::uint64_t>(parse_integer(val, key));
        else if (key == "frames") s.frame_count = static_cast<std::size_t>(parse_integer(val, key));
        else if (key == "width") s.width = static_cast<int>(parse_integer(val, key));
        else if (key == "height") s.height = static_cast<int>(parse_integer(val, key));
        else if (key == "bit_depth") s.bit_depth = static_cast<int>(parse_integer(val, key));
        else if (key == "frame_rate") s.frame_rate = parse_number(val, key);
        else if (key == "distinct_intensities") s.distinct_intensities = parse_bool(val, key);
        else if (key == "adversarial_order") s.adversarial_order = parse_bool(val, key);
        else if (key == "jitter") c.jitter = parse_number(val, key);
        else if (key == "dropout") c.dropout = parse_number(val, key);
        else if (key == "min_visibility") c.min_visibility = parse_number(val, key);
        else if (key == "score_min") c.score_min = parse_number(val, key);
        else if (key == "score_max") c.score_max = parse_number(val, key);
        else if (key == "clutter_rate") c.clutter_rate = parse_number(val, key);
        else if (key == "clutter_score_min") c.clutter_score_min = parse_number(val, key);
        else if (key == "clutter_score_max") c.clutter_score_max = parse_number(val, key);
        else if (key == "object") s.objects.push_back(parse_object(val));
        else throw ConfigError("unknown scenario key '" + key + "'");
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario " + path.string());
    return parse_scenario(in);
}

void write_scenario(std::ostream& out, const Scenario& s) {
    const auto num = [](double v) { return text::shortest(v); };
    const DetectorCorruption& c = s.corruption;
    out << "name = " << s.name << '\n'
        << "seed = " << s.seed << '\n'
        << "frames = " << s.frame_count << '\n'
        << "width = " << s.width << '\n'
        << "height = " << s.height << '\n'
        << "bit_depth = " << s.bit_depth << '\n'
        << "frame_rate = " << num(s.frame_rate) << '\n'
        << "distinct_intensities = " << (s.distinct_intensities ? "true" : "false") << '\n'
        << "adversarial_order = " << (s.adversarial_order ? "true" : "false") << '\n'
        << "jitter = " << num(c.jitter) << '\n'
        << "dropout = " << num(c.dropout) << '\n'
        << "min_visibility = " << num(c.min_visibility) << '\n'
        << "score_min = " << num(c.score_min) << '\n'
        << "score_max = " << num(c.score_max) << '\n'
        << "clutter_rate = " << num(c.clutter_rate) << '\n'
        << "clutter_score_min = " << num(c.clutter_score_min) << '\n'
        << "clutter_score_max = " << num(c.clutter_score_max) << '\n';
    for (const ObjectSpec& o : s.objects) {
        out << "object = " << to_string(o.kind) << " x=" << num(o.x) << " y=" << num(o.y) << " w=" << num(o.width)
            << " h=" << num(o.height) << " vx=" << num(o.vx) << " vy=" << num(o.vy) << " intensity=" << o.intensity;
        if (o.kind == TrajectoryKind::Crossing) {
            out << " cross_frame=" << o.cross_frame << " shift_x=" << num(o.shift_x) << " shift_y=" << num(o.shift_y);
        }
        if (o.kind == TrajectoryKind::StopAndGo) {
            out << " go=" << o.go_frames << " stop=" << o.stop_frames;
        }
        out << '\n';
    }
}

std::vector<std::string> preset_names() {
    return {"crossing", "linear", "stop-and-go", "passing", "dense"};
}

Scenario preset_scenario(std::string_view name, std::uint64_t seed) {
    Scenario s;
    s.name = std::string(name);
    s.seed = seed;
    auto obj = [](TrajectoryKind kind, double x, double y, double w, double h, double vx, double vy,
                  std::uint16_t intensity) {
        ObjectSpec o;
        o.kind = kind;
        o.x = x;
        o.y = y;
        o.width = w;
        o.height = h;
        o.vx = vx;
        o.vy = vy;
        o.intensity = intensity;
        return o;
    };
    if (name == "crossing") {
        // Two objects approach head-on along the column x = 320 and pass
        // side by side on frame 7, mirrored about that column. Both
        // predictions sit on the mirror axis, so each has exactly equal
        // IoU with both detections there.
        s.frame_count = 14;
        s.adversarial_order = true;
        ObjectSpec a = obj(TrajectoryKind::Crossing, 310, 16, 20, 60, 0, 30, 200);
        a.cross_frame = 7;
        a.shift_x = 10;
        ObjectSpec b = obj(TrajectoryKind::Crossing, 310, 436, 20, 60, 0, -30, 50);
        b.cross_frame = 7;
        b.shift_x = -10;
        s.objects = {a, b};
    } else if (name == "linear") {
        s.frame_count = 30;
        s.corruption.jitter = 1.0;
        s.corruption.dropout = 0.05;
        s.corruption.score_min = 0.65;
        s.corruption.score_max = 0.95;
        s.objects = {obj(TrajectoryKind::Linear, 40, 100, 24, 60, 12, 2, 220),
                     obj(TrajectoryKind::Linear, 560, 300, 28, 70, -10, -3, 120),
                     obj(TrajectoryKind::Linear, 300, 20, 20, 50, 1, 12, 60)};
    } else if (name == "stop-and-go") {
        s.frame_count = 30;
        s.corruption.jitter = 0.5;
        s.corruption.dropout = 0.05;
        s.corruption.score_min = 0.7;
        s.corruption.score_max = 0.95;
        ObjectSpec a = obj(TrajectoryKind::StopAndGo, 60, 200, 22, 55, 15, 0, 180);
        a.go_frames = 3;
        a.stop_frames = 3;
        ObjectSpec b = obj(TrajectoryKind::StopAndGo, 500, 120, 26, 64, -12, 6, 90);
        b.go_frames = 2;
        b.stop_frames = 2;
        s.objects = {a, b};
    } else if (name == "passing") {
        // The second object is drawn over the first while they pass.
        s.frame_count = 30;
        s.corruption.jitter = 0.5;
        s.corruption.min_visibility = 0.3;
        s.corruption.score_min = 0.6;
        s.corruption.score_max = 0.95;
        s.objects = {obj(TrajectoryKind::Linear, 80, 200, 24, 60, 10, 0, 210),
                     obj(TrajectoryKind::Linear, 540, 215, 24, 60, -10, 0, 70)};
    } else if (name == "dense") {
        s.frame_count = 40;
        s.corruption.jitter = 1.5;
        s.corruption.dropout = 0.1;
        s.corruption.min_visibility = 0.3;
        s.corruption.score_min = 0.5;
        s.corruption.score_max = 0.95;
        s.corruption.clutter_rate = 0.5;
        s.objects = {obj(TrajectoryKind::Linear, 30, 40, 20, 50, 8, 6, 250),
                     obj(TrajectoryKind::Linear, 600, 60, 22, 54, -9, 5, 200),
                     obj(TrajectoryKind::Linear, 50, 420, 18, 46, 10, -7, 150),
                     obj(TrajectoryKind::Linear, 580, 430, 24, 58, -8, -8, 100),
                     obj(TrajectoryKind::Linear, 320, 30, 20, 52, 0, 10, 40),
                     obj(TrajectoryKind::Linear, 200, 250, 26, 62, 6, 0, 75)};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown scenario preset '" + std::string(name) + "'; known presets: " + known);
    }
    s.validate();
    return s;
}

std::vector<Scenario> scenario_battery(std::uint64_t seed) {
    std::vector<Scenario> out;
    std::uint64_t k = 0;
    for (const auto& name : preset_names()) {
        out.push_back(preset_scenario(name, seed + k++));
    }
    return out;
}

}  // namespace tmot
