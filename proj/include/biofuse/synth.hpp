#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "biofuse/core.hpp"
#include "biofuse/io.hpp"

namespace biofuse {

/// Per-sample variability. The first five fields are per-point noise; the
/// rest model acquisition differences between sessions (face pose, finger
/// placement and skin elasticity), occasional failed captures and the lower
/// stability of points far from the facial landmarks or the finger core.
/// All zeros reproduces the anchor.
struct PerturbationSpec {
    double spatialSigma = 1.5;     // px
    double thetaSigma = 1.0;       // degrees
    double descriptorSigma = 0.02; // on the [0, 1] descriptor scale
    double dropRate = 0.1;
    double spuriousRate = 0.1;

    double poseRotationSigma = 0.5;  // degrees, face in-plane rotation about the face centre
    double poseShiftSigma = 1.0;     // px, face translation left after landmark alignment
    double placementRotation = 12.0; // degrees, finger rotation drawn uniformly in +-value
    double placementShift = 20.0;    // px, finger translation drawn uniformly in +-value
    double distortion = 1.0;         // px, finger elastic displacement scale at 100 px from the core
    double pixelNoise = 6.0;         // intensity standard deviation added to finger images
    double referenceSigma = 0.75;    // px, error of the supplied finger reference point
    double failureRate = 0.08;       // per capture: misplaced face crop or misdetected core
    double failureShift = 30.0;      // px, offset of a failed capture
    double peripheralNoise = 8.0;    // px and degrees, extra noise at the periphery

    void validate() const;
    KeyValues to_key_values() const;
    static PerturbationSpec from_key_values(const KeyValues& kv, std::string_view prefix = "");
};

struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    bool contains(Point2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Smooth random displacement of finger skin, growing linearly with the
/// distance from the core.
struct ElasticField {
    double scale = 0.0;  // px at 100 px from the core
    std::array<double, 4> amplitude{};
    std::array<double, 2> phase{};

    Point2 displacement(double u, double v) const;  // u, v relative to the core
};

/// Ridge pattern of one synthetic finger: elliptical rings around the core
/// with an optional phase winding.
struct RidgeModel {
    double wavelength = 9.0;  // px
    double axisRatio = 1.0;   // minor / major ellipse axis
    double axisAngle = 0.0;   // degrees
    int winding = 0;
    double phase = 0.0;       // radians

    double phase_at(double u, double v) const;  // u, v relative to the core
    /// Ridge flow direction in degrees, [0, 180).
    double orientation_at(double u, double v) const;

    friend bool operator==(const RidgeModel&, const RidgeModel&) = default;
};

/// Layout of the anchor pointsets. Keypoints gather in clumps (around the
/// facial landmarks and elsewhere on the face; in minutiae-rich finger
/// regions) whose members share a dominant orientation.
struct AnchorShape {
    int faceClumpsPerLandmark = 3;
    double landmarkClumpMin = 8.0;   // px, clump centre distance from its landmark
    double landmarkClumpMax = 40.0;
    int faceBackgroundClumps = 6;
    int faceBackgroundPoints = 50;
    double faceClumpSpread = 10.0;   // px
    double faceClumpTheta = 4.0;     // degrees
    int fingerClumps = 5;
    double fingerClumpSpread = 4.0;  // px
    double fingerClumpGap = 60.0;    // px, minimum distance between finger clump centres

    friend bool operator==(const AnchorShape&, const AnchorShape&) = default;
};

struct SubjectModel {
    int subjectId = 0;
    std::uint64_t seed = 0;
    Template faceAnchor;    // kind FACE, descriptors on the [0, 1] scale, landmarks set
    Template fingerAnchor;  // kind FINGER in the canonical frame, no descriptors, core as referencePoint
    std::vector<int> faceClump;    // clump id per face anchor point
    std::vector<int> fingerClump;  // clump id per finger anchor point
    RidgeModel ridge;
    int imageWidth = 0;
    int imageHeight = 0;
    Rect foreground;  // finger foreground rectangle in the canonical frame
    AnchorShape shape;

    friend bool operator==(const SubjectModel&, const SubjectModel&) = default;
};

struct SyntheticSample {
    Template face;      // kind FACE, raw descriptors in [0, 255]
    Template finger;    // kind FINGER, minutiae only, dpi 500
    GrayImage fingerImage;
    double rotation = 0.0;  // finger placement rotation applied, degrees
    Point2 shift;           // finger placement translation applied
};

inline constexpr int kFacePoints = 145;
inline constexpr int kFingerPoints = 50;
inline constexpr int kSyntheticDpi = 500;

SubjectModel gen_subject(int subjectId, std::uint64_t seed, const AnchorShape& shape = {});

/// Deterministic in (model, sampleIndex, spec).
SyntheticSample gen_sample(const SubjectModel& model, int sampleIndex, const PerturbationSpec& spec);

/// Renders the finger foreground of `model` under a rigid placement
/// (rotation about the image centre, then translation).
GrayImage render_finger(const SubjectModel& model, double rotationDeg, Point2 shift, const ElasticField& field,
                        std::uint64_t noiseSeed, double pixelNoise);

/// Writes S x N samples plus `manifest.txt` under `dir` and returns the
/// manifest.
Manifest build_dataset(const std::filesystem::path& dir, int subjects, int samples, std::uint64_t seed,
                       const PerturbationSpec& spec);

}  // namespace biofuse
