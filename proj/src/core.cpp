#include "biofuse/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace biofuse {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidDescriptor: return "invalid-descriptor";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::EmptyForeground: return "empty-foreground";
    case ErrorCode::InsufficientEdge: return "insufficient-edge";
    case ErrorCode::SegmentationFailure: return "segmentation-failure";
    case ErrorCode::MissingReference: return "missing-reference";
    case ErrorCode::MissingDpi: return "missing-dpi";
    case ErrorCode::MissingMetadata: return "missing-metadata";
    case ErrorCode::OutOfBounds: return "out-of-bounds";
    case ErrorCode::IncompatibleTemplate: return "incompatible-template";
    case ErrorCode::TooFewPoints: return "too-few-points";
    case ErrorCode::DegenerateClustering: return "degenerate-clustering";
    case ErrorCode::DegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::DegenerateTriangle: return "degenerate-triangle";
    case ErrorCode::KindMismatch: return "kind-mismatch";
    case ErrorCode::Alignment: return "alignment";
    case ErrorCode::EmptyTrials: return "empty-trials";
    case ErrorCode::Manifest: return "manifest";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Format: return "format";
    case ErrorCode::UnsupportedFormat: return "unsupported-format";
    case ErrorCode::Io: return "io";
    case ErrorCode::Config: return "config";
    }
    return "unknown";
}

std::string_view to_string(Modality m) {
    return m == Modality::Face ? "FACE" : "FINGER";
}

std::string_view to_string(TemplateKind k) {
    switch (k) {
    case TemplateKind::Face: return "FACE";
    case TemplateKind::Finger: return "FINGER";
    case TemplateKind::Fused: return "FUSED";
    }
    return "FUSED";
}

std::optional<Modality> parse_modality(std::string_view s) {
    if (s == "FACE") return Modality::Face;
    if (s == "FINGER") return Modality::Finger;
    return std::nullopt;
}

std::optional<TemplateKind> parse_template_kind(std::string_view s) {
    if (s == "FACE") return TemplateKind::Face;
    if (s == "FINGER") return TemplateKind::Finger;
    if (s == "FUSED") return TemplateKind::Fused;
    return std::nullopt;
}

std::string_view to_string(Landmark l) {
    switch (l) {
    case Landmark::LeftEye: return "leftEye";
    case Landmark::RightEye: return "rightEye";
    case Landmark::NoseTip: return "noseTip";
    case Landmark::Mouth: return "mouth";
    }
    return "mouth";
}

std::optional<Landmark> parse_landmark(std::string_view s) {
    if (s == "leftEye") return Landmark::LeftEye;
    if (s == "rightEye") return Landmark::RightEye;
    if (s == "noseTip") return Landmark::NoseTip;
    if (s == "mouth") return Landmark::Mouth;
    return std::nullopt;
}

std::size_t Template::count(Modality m) const {
    std::size_t n = 0;
    for (const auto& p : points) {
        if (p.modality == m) ++n;
    }
    return n;
}

void MatchThresholds::validate() const {
    if (!(r0 > 0.0) || !(theta0 > 0.0) || !(k0 > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "match thresholds must be strictly positive");
    }
}

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
    if (w < 0 || h < 0) throw Error(ErrorCode::InvalidArgument, "negative image dimensions");
}

void GrayImage::validate() const {
    if (width < 0 || height < 0 ||
        pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::InvalidArgument, "image pixel count does not match width x height");
    }
}

double wrap_degrees(double deg) {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0) r += 360.0;
    // fmod of a tiny negative value can round back up to exactly 360
    if (r >= 360.0) r = 0.0;
    return r;
}

double spatial_distance(const FeaturePoint& a, const FeaturePoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

double direction_distance(double a_deg, double b_deg) {
    const double d = std::fabs(a_deg - b_deg);
    return std::min(d, 360.0 - d);
}

double descriptor_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != kDescriptorSize || b.size() != kDescriptorSize) {
        throw Error(ErrorCode::InvalidDescriptor,
                    "descriptor length must be 128, got " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < kDescriptorSize; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

void require_descriptors(const Template& t, std::string_view context) {
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        if (!t.points[i].descriptor) {
            throw Error(ErrorCode::IncompatibleTemplate,
                        std::string(context) + ": point " + std::to_string(i) + " has no descriptor");
        }
    }
}

}  // namespace biofuse
