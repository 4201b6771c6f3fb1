// Python bindings: geometry, motion, assignment, histograms, the tracker,
// evaluation, file formats and the scenario generator.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "tmot/app.hpp"
#include "tmot/assignment.hpp"
#include "tmot/association.hpp"
#include "tmot/error.hpp"
#include "tmot/io.hpp"
#include "tmot/metrics.hpp"
#include "tmot/motion.hpp"
#include "tmot/synth.hpp"
#include "tmot/tracker.hpp"

namespace py = pybind11;
using namespace tmot;

namespace {

using ImageArray = py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>;
using MatrixArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const ImageArray& a, int bit_depth) {
    if (a.ndim() != 2) throw py::value_error("image must be a 2-D array");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    std::vector<std::uint16_t> data(a.data(), a.data() + a.size());
    return GrayImage(w, h, bit_depth, std::move(data));
}

ImageArray from_image(const GrayImage& img) {
    ImageArray out({img.height(), img.width()});
    std::copy(img.data().begin(), img.data().end(), out.mutable_data());
    return out;
}

SimilarityMatrix to_similarity(const MatrixArray& a) {
    if (a.ndim() != 2) throw py::value_error("similarity must be a 2-D array");
    const auto r = static_cast<std::size_t>(a.shape(0));
    const auto c = static_cast<std::size_t>(a.shape(1));
    return SimilarityMatrix(r, c, std::vector<double>(a.data(), a.data() + a.size()));
}

MatrixArray from_similarity(const SimilarityMatrix& s) {
    MatrixArray out({s.rows(), s.cols()});
    std::copy(s.values().begin(), s.values().end(), out.mutable_data());
    return out;
}

template <bool Thermal>
void bind_tracker(py::module_& m, const char* name) {
    using T = BasicTracker<Thermal>;
    py::class_<T>(m, name)
        .def(py::init<TrackerConfig>(), py::arg("config") = TrackerConfig{})
        .def(
            "step",
            [](T& t, const ImageArray& img, const std::vector<Detection>& dets, int bit_depth) {
                return t.step(to_image(img, bit_depth), dets);
            },
            py::arg("image"), py::arg("detections"), py::arg("bit_depth") = 8)
        .def("finish", &T::finish)
        .def_property_readonly("config", &T::config)
        .def_property_readonly("frames_processed", &T::frames_processed)
        .def_property_readonly("next_id", [](const T& t) { return t.next_id().value; })
        .def_property_readonly("track_count", [](const T& t) { return t.tracks().size(); });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Thermal-aware multi-object tracking";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    auto data_error = py::register_exception<DataError>(m, "DataError", error.ptr());
    py::register_exception<IoError>(m, "IoError", data_error.ptr());
    py::register_exception<GeometryError>(m, "GeometryError", error.ptr());
    py::register_exception<SequenceError>(m, "SequenceError", error.ptr());

    // core
    py::class_<BoundingBox>(m, "BoundingBox")
        .def(py::init<>())
        .def(py::init([](double l, double t, double w, double h) { return BoundingBox{l, t, w, h}; }), py::arg("left"),
             py::arg("top"), py::arg("width"), py::arg("height"))
        .def_readwrite("left", &BoundingBox::left)
        .def_readwrite("top", &BoundingBox::top)
        .def_readwrite("width", &BoundingBox::width)
        .def_readwrite("height", &BoundingBox::height)
        .def_property_readonly("area", &BoundingBox::area)
        .def(py::self == py::self)
        .def("__repr__", [](const BoundingBox& b) {
            std::ostringstream os;
            os << "BoundingBox(" << b.left << ", " << b.top << ", " << b.width << ", " << b.height << ")";
            return os.str();
        });

    py::class_<Detection>(m, "Detection")
        .def(py::init([](BoundingBox b, double score, int cls) { return Detection{b, score, cls}; }), py::arg("box"),
             py::arg("score"), py::arg("class_id") = 0)
        .def_readwrite("box", &Detection::bbox)
        .def_readwrite("score", &Detection::score)
        .def_readwrite("class_id", &Detection::class_id)
        .def(py::self == py::self);

    m.def("iou", &iou, py::arg("a"), py::arg("b"));

    // motion
    py::class_<KalmanState>(m, "KalmanState")
        .def_readwrite("mean", &KalmanState::mean)
        .def_readwrite("covariance", &KalmanState::covariance)
        .def("box", &KalmanState::box);
    m.def("kf_initiate", [](const BoundingBox& b) { return kf_initiate(b); }, py::arg("box"));
    m.def("kf_predict", [](const KalmanState& s) { return kf_predict(s); }, py::arg("state"));
    m.def("kf_update", [](const KalmanState& s, const BoundingBox& b) { return kf_update(s, b); }, py::arg("state"),
          py::arg("box"));

    // association
    py::class_<AssignmentResult>(m, "AssignmentResult")
        .def_readonly("matches", &AssignmentResult::matches)
        .def_readonly("unmatched_tracks", &AssignmentResult::unmatched_tracks)
        .def_readonly("unmatched_dets", &AssignmentResult::unmatched_dets);
    m.def(
        "solve_assignment",
        [](const MatrixArray& sim, double min_similarity) { return solve_assignment(to_similarity(sim), min_similarity); },
        py::arg("similarity"), py::arg("min_similarity") = 0.0);

    py::class_<Histogram>(m, "Histogram")
        .def_readonly("bins", &Histogram::bins)
        .def_readonly("range_max", &Histogram::range_max)
        .def_readonly("weights", &Histogram::weights)
        .def("is_empty", &Histogram::is_empty);
    m.def(
        "compute_histogram",
        [](const std::vector<std::uint16_t>& values, int bins, std::uint32_t range_max) {
            return compute_histogram(values, bins, range_max);
        },
        py::arg("values"), py::arg("bins"), py::arg("range_max"));
    m.def("bhattacharyya", &bhattacharyya, py::arg("h1"), py::arg("h2"));
    m.def(
        "fuse",
        [](const MatrixArray& motion, const MatrixArray& thermal, double alpha) {
            return from_similarity(fuse(to_similarity(motion), to_similarity(thermal), alpha));
        },
        py::arg("motion"), py::arg("thermal"), py::arg("alpha"));

    // tracker
    py::enum_<TrackerVariant>(m, "TrackerVariant")
        .value("BYTE", TrackerVariant::Byte)
        .value("OCSORT", TrackerVariant::OcSort);
    py::enum_<TrackRoiSource>(m, "TrackRoiSource")
        .value("PREDICTED", TrackRoiSource::Predicted)
        .value("LAST_OBSERVATION", TrackRoiSource::LastObservation);

    py::class_<TrackerConfig>(m, "TrackerConfig")
        .def(py::init<>())
        .def_readwrite("variant", &TrackerConfig::variant)
        .def_readwrite("alpha", &TrackerConfig::alpha)
        .def_readwrite("high_thresh", &TrackerConfig::high_thresh)
        .def_readwrite("low_thresh", &TrackerConfig::low_thresh)
        .def_readwrite("match_thresh_first", &TrackerConfig::match_thresh_first)
        .def_readwrite("match_thresh_second", &TrackerConfig::match_thresh_second)
        .def_readwrite("match_thresh_tentative", &TrackerConfig::match_thresh_tentative)
        .def_readwrite("recovery_thresh", &TrackerConfig::recovery_thresh)
        .def_readwrite("new_track_thresh", &TrackerConfig::new_track_thresh)
        .def_readwrite("max_lost_frames", &TrackerConfig::max_lost_frames)
        .def_readwrite("min_hits", &TrackerConfig::min_hits)
        .def_readwrite("use_thermal_in_second_stage", &TrackerConfig::use_thermal_in_second_stage)
        .def_readwrite("roi_source", &TrackerConfig::roi_source)
        .def("validate", &TrackerConfig::validate)
        .def_static("paper_byte", &TrackerConfig::paper_byte)
        .def_static("paper_ocsort", &TrackerConfig::paper_ocsort)
        .def_static("preset", &TrackerConfig::preset, py::arg("name"));

    py::class_<TrackOutput>(m, "TrackOutput")
        .def_property_readonly("id", [](const TrackOutput& o) { return o.id.value; })
        .def_readonly("box", &TrackOutput::box)
        .def_readonly("score", &TrackOutput::score);
    py::class_<TrackRecord>(m, "TrackRecord")
        .def(py::init([](std::size_t frame, std::uint32_t id, BoundingBox b, double score) {
                 return TrackRecord{frame, TrackId{id}, b, score};
             }),
             py::arg("frame"), py::arg("id"), py::arg("box"), py::arg("score") = 1.0)
        .def_readonly("frame", &TrackRecord::frame)
        .def_property_readonly("id", [](const TrackRecord& r) { return r.id.value; })
        .def_readonly("box", &TrackRecord::box)
        .def_readonly("score", &TrackRecord::score)
        .def(py::self == py::self);

    bind_tracker<true>(m, "Tracker");
    bind_tracker<false>(m, "MotionOnlyTracker");

    // metrics
    py::class_<GroundTruthEntry>(m, "GroundTruthEntry")
        .def(py::init([](BoundingBox b, double vis, bool ignore) { return GroundTruthEntry{b, vis, ignore, 1}; }),
             py::arg("box"), py::arg("visibility") = 1.0, py::arg("ignore") = false)
        .def_readwrite("box", &GroundTruthEntry::box)
        .def_readwrite("visibility", &GroundTruthEntry::visibility)
        .def_readwrite("ignore", &GroundTruthEntry::ignore);
    py::class_<GroundTruthTrack>(m, "GroundTruthTrack")
        .def(py::init([](int id, std::map<std::size_t, GroundTruthEntry> frames) {
                 return GroundTruthTrack{id, std::move(frames)};
             }),
             py::arg("id"), py::arg("frames"))
        .def_readwrite("id", &GroundTruthTrack::id)
        .def_readwrite("frames", &GroundTruthTrack::frames);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("idf1", &EvalReport::idf1)
        .def_readonly("idp", &EvalReport::idp)
        .def_readonly("idr", &EvalReport::idr)
        .def_readonly("rcll", &EvalReport::rcll)
        .def_readonly("prcn", &EvalReport::prcn)
        .def_readonly("mota", &EvalReport::mota)
        .def_readonly("motp", &EvalReport::motp)
        .def_readonly("tp", &EvalReport::tp)
        .def_readonly("fp", &EvalReport::fp)
        .def_readonly("fn", &EvalReport::fn)
        .def_readonly("id_switches", &EvalReport::id_switches);
    m.def(
        "evaluate_sequence",
        [](const GroundTruth& gt, const ResultBuffer& hyp, double iou_thresh) {
            EvalOptions o;
            o.iou_thresh = iou_thresh;
            return evaluate_sequence(gt, hyp, o);
        },
        py::arg("ground_truth"), py::arg("results"), py::arg("iou_thresh") = 0.5);
    m.def("aggregate", [](const std::vector<EvalReport>& r) { return aggregate(r); }, py::arg("reports"));

    // io
    m.def("read_detections", [](const fs::path& p) { return read_detections(p).frames; }, py::arg("path"));
    m.def("read_ground_truth", &read_ground_truth, py::arg("path"));
    m.def("read_results", &read_results, py::arg("path"));
    m.def("write_results", &write_results, py::arg("path"), py::arg("results"));
    m.def(
        "load_image", [](const fs::path& p) { return from_image(load_image(p)); }, py::arg("path"));
    m.def(
        "track_sequence",
        [](const fs::path& dir, const TrackerConfig& cfg) { return track_sequence(load_sequence(dir), cfg); },
        py::arg("directory"), py::arg("config") = TrackerConfig{},
        py::call_guard<py::gil_scoped_release>());

    // synth
    py::class_<SyntheticSequence>(m, "SyntheticSequence")
        .def_property_readonly("name", [](const SyntheticSequence& s) { return s.scenario.name; })
        .def_property_readonly("frame_count", [](const SyntheticSequence& s) { return s.images.size(); })
        .def_property_readonly("bit_depth", [](const SyntheticSequence& s) { return s.scenario.bit_depth; })
        .def("image", [](const SyntheticSequence& s, std::size_t f) { return from_image(s.images.at(f)); })
        .def("detections", [](const SyntheticSequence& s, std::size_t f) { return s.detections.at(f); })
        .def_readonly("ground_truth", &SyntheticSequence::ground_truth)
        .def(
            "track",
            [](const SyntheticSequence& s, const TrackerConfig& cfg) {
                BasicTracker<true> t(cfg);
                for (std::size_t f = 0; f < s.images.size(); ++f) t.step(f, s.images[f], s.detections.at(f));
                return t.finish();
            },
            py::arg("config") = TrackerConfig{})
        .def("export", &export_sequence, py::arg("directory"), py::arg("image_ext") = ".png");
    m.def("preset_names", &preset_names);
    m.def(
        "generate_preset", [](const std::string& name, std::uint64_t seed) { return generate(preset_scenario(name, seed)); },
        py::arg("name"), py::arg("seed") = 1);
    m.def(
        "generate_scenario_file", [](const fs::path& p) { return generate(load_scenario(p)); }, py::arg("path"));

    m.def(
        "sweep_alpha",
        [](const std::vector<double>& grid, std::uint64_t seed, int jobs) {
            std::vector<SequenceData> seqs;
            for (const Scenario& s : scenario_battery(seed)) seqs.push_back(from_synthetic(generate(s)));
            py::list out;
            for (const SweepRow& r : run_sweep_alpha(seqs, grid, {TrackerVariant::Byte, TrackerVariant::OcSort},
                                                     TrackerConfig{}, jobs)) {
                out.append(py::make_tuple(std::string(to_string(r.variant)), r.row, r.alpha, r.mota, r.idf1));
            }
            return out;
        },
        py::arg("grid") = default_alpha_grid(), py::arg("seed") = 1, py::arg("jobs") = 1);
}
