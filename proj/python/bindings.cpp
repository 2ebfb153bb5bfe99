#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "biofuse/cli.hpp"
#include "biofuse/compat.hpp"
#include "biofuse/core.hpp"
#include "biofuse/evaluation.hpp"
#include "biofuse/io.hpp"
#include "biofuse/matching.hpp"
#include "biofuse/reduction.hpp"
#include "biofuse/synth.hpp"

namespace py = pybind11;
using namespace biofuse;

namespace {

std::optional<Descriptor> to_descriptor(const std::optional<std::vector<double>>& v) {
    if (!v) return std::nullopt;
    if (v->size() != kDescriptorSize) {
        throw Error(ErrorCode::InvalidDescriptor, "descriptor must have 128 values, got " + std::to_string(v->size()));
    }
    Descriptor d{};
    std::copy(v->begin(), v->end(), d.begin());
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Face and fingerprint point-set fusion";

    static py::exception<Error> error(m, "BiofuseError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string message = std::string(to_string(e.code())) + ": " + e.what();
            py::set_error(error, message.c_str());
        }
    });

    py::enum_<Modality>(m, "Modality").value("FACE", Modality::Face).value("FINGER", Modality::Finger);
    py::enum_<TemplateKind>(m, "TemplateKind")
        .value("FACE", TemplateKind::Face)
        .value("FINGER", TemplateKind::Finger)
        .value("FUSED", TemplateKind::Fused);

    py::class_<FeaturePoint>(m, "FeaturePoint")
        .def(py::init([](double x, double y, double theta, std::optional<std::vector<double>> descriptor,
                         Modality modality) {
                 FeaturePoint p;
                 p.x = x;
                 p.y = y;
                 p.theta = theta;
                 p.descriptor = to_descriptor(descriptor);
                 p.modality = modality;
                 return p;
             }),
             py::arg("x"), py::arg("y"), py::arg("theta") = 0.0, py::arg("descriptor") = py::none(),
             py::arg("modality") = Modality::Face)
        .def_readwrite("x", &FeaturePoint::x)
        .def_readwrite("y", &FeaturePoint::y)
        .def_readwrite("theta", &FeaturePoint::theta)
        .def_readwrite("modality", &FeaturePoint::modality)
        .def_property(
            "descriptor",
            [](const FeaturePoint& p) -> std::optional<std::vector<double>> {
                if (!p.descriptor) return std::nullopt;
                return std::vector<double>(p.descriptor->begin(), p.descriptor->end());
            },
            [](FeaturePoint& p, std::optional<std::vector<double>> v) { p.descriptor = to_descriptor(v); })
        .def("__eq__", [](const FeaturePoint& a, const FeaturePoint& b) { return a == b; });

    py::class_<Template>(m, "Template")
        .def(py::init([](TemplateKind kind, std::vector<FeaturePoint> points) {
                 Template t;
                 t.kind = kind;
                 t.points = std::move(points);
                 return t;
             }),
             py::arg("kind") = TemplateKind::Face, py::arg("points") = std::vector<FeaturePoint>{})
        .def_readwrite("kind", &Template::kind)
        .def_readwrite("points", &Template::points)
        .def_readwrite("dpi", &Template::dpi)
        .def_property(
            "reference_point",
            [](const Template& t) -> std::optional<std::pair<double, double>> {
                if (!t.referencePoint) return std::nullopt;
                return std::pair{t.referencePoint->x, t.referencePoint->y};
            },
            [](Template& t, std::optional<std::pair<double, double>> p) {
                if (p) {
                    t.referencePoint = Point2{p->first, p->second};
                } else {
                    t.referencePoint.reset();
                }
            })
        .def("__len__", [](const Template& t) { return t.points.size(); })
        .def("__eq__", [](const Template& a, const Template& b) { return a == b; })
        .def("to_text", &serialize_template)
        .def_static(
            "from_text", [](const std::string& text) { return parse_template(text); }, py::arg("text"))
        .def("save", [](const Template& t, const std::filesystem::path& p) { save_template(t, p); })
        .def_static(
            "load", [](const std::filesystem::path& p) { return load_template(p); }, py::arg("path"));

    m.def("spatial_distance", &spatial_distance);
    m.def("direction_distance", &direction_distance);
    m.def("descriptor_distance", [](const std::vector<double>& a, const std::vector<double>& b) {
        return descriptor_distance(a, b);
    });

    m.def(
        "point_pattern_match",
        [](const Template& db, const Template& q, double r0, double theta0, double k0) {
            MatchThresholds th;
            th.r0 = r0;
            th.theta0 = theta0;
            th.k0 = k0;
            return point_pattern_match(db, q, th).score;
        },
        py::arg("db"), py::arg("query"), py::arg("r0") = 4.0, py::arg("theta0") = 3.0, py::arg("k0") = 6.0);
    m.def(
        "delaunay_match", [](const Template& db, const Template& q) { return delaunay_match(db, q).score; },
        py::arg("db"), py::arg("query"));
    m.def("delaunay_triangulate", [](const std::vector<std::pair<double, double>>& pts) {
        std::vector<Point2> p;
        p.reserve(pts.size());
        for (const auto& [x, y] : pts) p.push_back({x, y});
        return delaunay_triangulate(p);
    });

    m.def("concatenate", &concatenate, py::arg("face"), py::arg("finger"));
    m.def(
        "kmeans_reduce",
        [](const Template& t, int kMin, int kMax, std::uint64_t seed) { return kmeans_reduce(t, KRange{kMin, kMax}, seed); },
        py::arg("fused"), py::arg("k_min") = 2, py::arg("k_max") = 30, py::arg("seed") = 0);
    m.def(
        "neighborhood_eliminate", [](const Template& t, double r) { return neighborhood_eliminate(t, r); },
        py::arg("template"), py::arg("radius"));

    m.def(
        "accuracy",
        [](const std::vector<double>& genuine, const std::vector<double>& impostor, int steps) {
            TrialSet t;
            t.genuine = genuine;
            t.impostor = impostor;
            const EvalReport r = sweep_metrics(t, steps);
            return py::dict(py::arg("accuracy") = r.accuracy, py::arg("far") = r.far, py::arg("frr") = r.frr,
                            py::arg("threshold") = r.threshold);
        },
        py::arg("genuine"), py::arg("impostor"), py::arg("steps") = 1000);
    m.def("trial_counts", [](int subjects, int samples, int impostorsPerSubject, std::uint64_t seed) {
        const TrialPlan p = plan_trials(subjects, samples, impostorsPerSubject, seed);
        return std::pair{p.genuine.size(), p.impostor.size()};
    }, py::arg("subjects"), py::arg("samples"), py::arg("impostors_per_subject") = 0, py::arg("seed") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs one command line; returns (exit code, stdout, stderr).");

    m.attr("__version__") = kVersion;
}
