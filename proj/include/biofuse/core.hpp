#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace biofuse {

inline constexpr std::size_t kDescriptorSize = 128;

using Descriptor = std::array<double, kDescriptorSize>;

enum class ErrorCode {
    InvalidDescriptor,
    InvalidArgument,
    EmptyForeground,
    InsufficientEdge,
    SegmentationFailure,
    MissingReference,
    MissingDpi,
    MissingMetadata,
    OutOfBounds,
    IncompatibleTemplate,
    TooFewPoints,
    DegenerateClustering,
    DegenerateGeometry,
    DegenerateTriangle,
    KindMismatch,
    Alignment,
    EmptyTrials,
    Manifest,
    Parse,
    Format,
    UnsupportedFormat,
    Io,
    Config,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every biofuse operation. The code identifies the
/// failed precondition; the message carries the detail (file, line, value).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class Modality { Face, Finger };
enum class TemplateKind { Face, Finger, Fused };

std::string_view to_string(Modality m);
std::string_view to_string(TemplateKind k);
std::optional<Modality> parse_modality(std::string_view s);
std::optional<TemplateKind> parse_template_kind(std::string_view s);

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

enum class Landmark { LeftEye, RightEye, NoseTip, Mouth };

std::string_view to_string(Landmark l);
std::optional<Landmark> parse_landmark(std::string_view s);

using Landmarks = std::map<Landmark, Point2>;

/// One keypoint: a face SIFT feature or a fingerprint minutia. Minutiae carry
/// no descriptor until the compat stage attaches one.
struct FeaturePoint {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // degrees, [0, 360)
    std::optional<Descriptor> descriptor;
    Modality modality = Modality::Face;

    friend bool operator==(const FeaturePoint&, const FeaturePoint&) = default;
};

struct Template {
    std::vector<FeaturePoint> points;
    TemplateKind kind = TemplateKind::Face;
    std::optional<Point2> referencePoint;
    Landmarks landmarks;
    std::optional<int> dpi;

    std::size_t count(Modality m) const;

    friend bool operator==(const Template&, const Template&) = default;
};

/// Pairing thresholds for point-pattern matching.
struct MatchThresholds {
    double r0 = 4.0;      // pixels
    double theta0 = 3.0;  // degrees
    double k0 = 6.0;      // descriptor distance

    void validate() const;
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

    void validate() const;

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

/// Wraps an angle in degrees into [0, 360).
double wrap_degrees(double deg);

double spatial_distance(const FeaturePoint& a, const FeaturePoint& b);
double direction_distance(double a_deg, double b_deg);
double descriptor_distance(std::span<const double> a, std::span<const double> b);

/// Throws IncompatibleTemplate unless every point of the template carries a
/// descriptor.
void require_descriptors(const Template& t, std::string_view context);

}  // namespace biofuse
