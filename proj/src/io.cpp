#include "tmot/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "tmot/error.hpp"
#include "text.hpp"

namespace tmot {
namespace {

std::ifstream open_for_read(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_for_write(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

void finish_write(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

[[noreturn]] void fail_line(const fs::path& path, std::size_t line_no, const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

// Splits a CSV record into trimmed fields and checks the minimum width.
std::vector<std::string_view> fields_of(std::string_view line, std::size_t min_fields, const fs::path& path,
                                        std::size_t line_no) {
    auto fields = text::split(line, ',');
    for (auto& f : fields) {
        f = text::trim(f);
    }
    if (fields.size() < min_fields) {
        fail_line(path, line_no,
                  "expected at least " + std::to_string(min_fields) + " fields, got " + std::to_string(fields.size()));
    }
    return fields;
}

double number(std::string_view field, const char* column, const fs::path& path, std::size_t line_no) {
    const auto v = text::parse_double(field);
    if (!v) {
        fail_line(path, line_no, std::string("non-numeric ") + column + " '" + std::string(field) + "'");
    }
    return *v;
}

long long integer(std::string_view field, const char* column, const fs::path& path, std::size_t line_no) {
    const auto v = text::parse_int(field);
    if (!v) {
        fail_line(path, line_no, std::string("non-integer ") + column + " '" + std::string(field) + "'");
    }
    return *v;
}

std::size_t frame_index(std::string_view field, const fs::path& path, std::size_t line_no) {
    const long long f = integer(field, "frame", path, line_no);
    if (f < 1) {
        fail_line(path, line_no, "frame numbers start at 1, got " + std::to_string(f));
    }
    return static_cast<std::size_t>(f - 1);
}

bool skippable(std::string_view line) {
    const auto t = text::trim(line);
    return t.empty() || t.front() == '#';
}

std::string box_fields(const BoundingBox& b) {
    return text::shortest(b.left) + "," + text::shortest(b.top) + "," + text::shortest(b.width) + "," +
           text::shortest(b.height);
}

}  // namespace

fs::path SequenceManifest::image_path(std::size_t frame) const {
    char name_buf[32];
    std::snprintf(name_buf, sizeof(name_buf), "%06zu", frame + 1);
    return root / image_dir / (std::string(name_buf) + image_ext);
}

SequenceManifest load_manifest(const fs::path& dir) {
    const fs::path ini = dir / "seqinfo.ini";
    std::ifstream in = open_for_read(ini);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';' || t.front() == '[') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            fail_line(ini, line_no, "expected key=value, got '" + std::string(t) + "'");
        }
        kv[std::string(text::trim(t.substr(0, eq)))] = std::string(text::trim(t.substr(eq + 1)));
    }

    SequenceManifest m;
    m.root = dir;
    const auto malformed = [&](const std::string& key, const std::string& why) -> DataError {
        return DataError(ini.string() + ": key '" + key + "' " + why);
    };
    const auto get_int = [&](const std::string& key) -> std::optional<long long> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        const auto v = text::parse_int(it->second);
        if (!v) throw malformed(key, "is not an integer: '" + it->second + "'");
        return v;
    };

    m.name = kv.count("name") ? kv["name"] : dir.filename().string();
    if (m.name.empty()) {
        m.name = fs::absolute(dir).lexically_normal().filename().string();
    }
    if (kv.count("imDir")) m.image_dir = kv["imDir"];
    if (kv.count("imExt")) {
        m.image_ext = kv["imExt"];
        if (!m.image_ext.empty() && m.image_ext.front() != '.') m.image_ext.insert(0, ".");
    }

    if (const auto it = kv.find("frameRate"); it != kv.end()) {
        const auto v = text::parse_double(it->second);
        if (!v || !(*v > 0.0)) throw malformed("frameRate", "must be a positive number: '" + it->second + "'");
        m.frame_rate = *v;
    } else {
        m.warnings.push_back("frameRate missing; defaulting to 5");
    }

    const auto length = get_int("seqLength");
    if (!length) throw malformed("seqLength", "is required");
    if (*length < 1) throw malformed("seqLength", "must be at least 1, got " + std::to_string(*length));
    m.frame_count = static_cast<std::size_t>(*length);

    if (const auto w = get_int("imWidth")) {
        if (*w < 1) throw malformed("imWidth", "must be positive");
        m.width = static_cast<int>(*w);
    } else {
        m.warnings.push_back("imWidth missing; defaulting to 640");
    }
    if (const auto h = get_int("imHeight")) {
        if (*h < 1) throw malformed("imHeight", "must be positive");
        m.height = static_cast<int>(*h);
    } else {
        m.warnings.push_back("imHeight missing; defaulting to 512");
    }
    if (const auto d = get_int("bitDepth")) {
        if (*d != 8 && *d != 16) throw malformed("bitDepth", "must be 8 or 16");
        m.bit_depth = static_cast<int>(*d);
    } else {
        m.warnings.push_back("bitDepth missing; defaulting to 8");
    }
    if (const auto it = kv.find("modality"); it != kv.end()) {
        if (it->second == "thermal") {
            m.modality = Modality::Thermal;
        } else if (it->second == "rgb-gray") {
            m.modality = Modality::RgbGray;
        } else {
            throw malformed("modality", "must be thermal or rgb-gray: '" + it->second + "'");
        }
    }
    return m;
}

void write_manifest(const fs::path& dir, const SequenceManifest& m) {
    const fs::path ini = dir / "seqinfo.ini";
    std::ofstream out = open_for_write(ini);
    out << "[Sequence]\n"
        << "name=" << m.name << '\n'
        << "imDir=" << m.image_dir << '\n'
        << "frameRate=" << text::shortest(m.frame_rate) << '\n'
        << "seqLength=" << m.frame_count << '\n'
        << "imWidth=" << m.width << '\n'
        << "imHeight=" << m.height << '\n'
        << "imExt=" << m.image_ext << '\n'
        << "bitDepth=" << m.bit_depth << '\n'
        << "modality=" << (m.modality == Modality::Thermal ? "thermal" : "rgb-gray") << '\n';
    finish_write(out, ini);
}

const std::vector<Detection>& DetectionTable::at(std::size_t frame) const {
    static const std::vector<Detection> kEmpty;
    const auto it = frames.find(frame);
    return it == frames.end() ? kEmpty : it->second;
}

DetectionTable read_detections(const fs::path& path) {
    std::ifstream in = open_for_read(path);
    DetectionTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        const auto f = fields_of(line, 7, path, line_no);
        const std::size_t frame = frame_index(f[0], path, line_no);
        Detection d;
        d.bbox = BoundingBox{number(f[2], "left", path, line_no), number(f[3], "top", path, line_no),
                             number(f[4], "width", path, line_no), number(f[5], "height", path, line_no)};
        double score = number(f[6], "score", path, line_no);
        if (score < 0.0 || score > 1.0) {
            score = std::clamp(score, 0.0, 1.0);
            ++table.clamped_scores;
        }
        d.score = score;
        if (f.size() > 7) {
            const auto cls = text::parse_int(f[7]);
            if (cls && *cls >= 0) d.class_id = static_cast<int>(*cls);
        }
        table.frames[frame].push_back(d);
    }
    return table;
}

void write_detections(const fs::path& path, const DetectionTable& table) {
    std::ofstream out = open_for_write(path);
    for (const auto& [frame, dets] : table.frames) {
        for (const Detection& d : dets) {
            out << frame + 1 << ",-1," << box_fields(d.bbox) << ',' << text::shortest(d.score) << ','
                << (d.class_id > 0 ? d.class_id : -1) << ",-1,-1\n";
        }
    }
    finish_write(out, path);
}

GroundTruth read_ground_truth(const fs::path& path) {
    std::ifstream in = open_for_read(path);
    std::map<int, GroundTruthTrack> tracks;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        const auto f = fields_of(line, 6, path, line_no);
        const std::size_t frame = frame_index(f[0], path, line_no);
        const auto id = static_cast<int>(integer(f[1], "id", path, line_no));
        GroundTruthEntry e;
        e.box = BoundingBox{number(f[2], "left", path, line_no), number(f[3], "top", path, line_no),
                            number(f[4], "width", path, line_no), number(f[5], "height", path, line_no)};
        if (f.size() > 6) e.ignore = number(f[6], "conf", path, line_no) == 0.0;
        if (f.size() > 7) e.class_id = static_cast<int>(integer(f[7], "class", path, line_no));
        if (f.size() > 8) e.visibility = number(f[8], "visibility", path, line_no);
        GroundTruthTrack& t = tracks[id];
        t.id = id;
        if (!t.frames.emplace(frame, e).second) {
            fail_line(path, line_no, "duplicate annotation for id " + std::to_string(id) + " in frame " +
                                         std::to_string(frame + 1));
        }
    }
    GroundTruth gt;
    gt.reserve(tracks.size());
    for (auto& [id, t] : tracks) gt.push_back(std::move(t));
    return gt;
}

void write_ground_truth(const fs::path& path, const GroundTruth& gt) {
    struct Row {
        std::size_t frame;
        int id;
        const GroundTruthEntry* e;
    };
    std::vector<Row> rows;
    for (const auto& t : gt) {
        for (const auto& [frame, e] : t.frames) rows.push_back(Row{frame, t.id, &e});
    }
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return std::tie(a.frame, a.id) < std::tie(b.frame, b.id); });
    std::ofstream out = open_for_write(path);
    for (const Row& r : rows) {
        out << r.frame + 1 << ',' << r.id << ',' << box_fields(r.e->box) << ',' << (r.e->ignore ? 0 : 1) << ','
            << r.e->class_id << ',' << text::shortest(r.e->visibility) << '\n';
    }
    finish_write(out, path);
}

void write_results(const fs::path& path, const ResultBuffer& buffer) {
    ResultBuffer sorted = buffer;
    std::stable_sort(sorted.begin(), sorted.end(), [](const TrackRecord& a, const TrackRecord& b) {
        return std::tie(a.frame, a.id) < std::tie(b.frame, b.id);
    });
    std::ofstream out = open_for_write(path);
    for (const TrackRecord& r : sorted) {
        out << r.frame + 1 << ',' << r.id.value << ',' << box_fields(r.box) << ',' << text::shortest(r.score)
            << ",-1,-1,-1\n";
    }
    finish_write(out, path);
}

ResultBuffer read_results(const fs::path& path) {
    std::ifstream in = open_for_read(path);
    ResultBuffer buffer;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        const auto f = fields_of(line, 7, path, line_no);
        TrackRecord r;
        r.frame = frame_index(f[0], path, line_no);
        const long long id = integer(f[1], "id", path, line_no);
        if (id < 1) fail_line(path, line_no, "track ids must be positive");
        r.id = TrackId{static_cast<std::uint32_t>(id)};
        r.box = BoundingBox{number(f[2], "left", path, line_no), number(f[3], "top", path, line_no),
                            number(f[4], "width", path, line_no), number(f[5], "height", path, line_no)};
        r.score = number(f[6], "score", path, line_no);
        buffer.push_back(r);
    }
    return buffer;
}

}  // namespace tmot
