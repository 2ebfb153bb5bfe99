#include "biofuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "biofuse/compat.hpp"
#include "biofuse/rng.hpp"

namespace biofuse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// face frame
constexpr double kFaceWidth = 400.0;
constexpr double kFaceHeight = 480.0;
constexpr Point2 kFaceCentre{200.0, 270.0};

// finger frame
constexpr int kFingerImageWidth = 320;
constexpr int kFingerImageHeight = 368;
constexpr double kFacePeripheryStart = 60.0;    // px from the nearest landmark
constexpr double kFingerPeripheryStart = 90.0;  // px from the core
constexpr double kPeripheralRamp = 60.0;

constexpr double kSpuriousMin = 4.0;
constexpr double kSpuriousMax = 10.0;

Point2 rotate_vec(Point2 v, double deg) {
    const double c = std::cos(deg * kDeg);
    const double s = std::sin(deg * kDeg);
    return {v.x * c - v.y * s, v.x * s + v.y * c};
}

Descriptor random_unit_descriptor(Rng& rng) {
    Descriptor d{};
    for (auto& v : d) v = rng.uniform();
    const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
    const double a = *lo;
    const double range = *hi - *lo;
    for (auto& v : d) v = (v - a) / range;
    return d;
}

Point2 offset_in_annulus(Rng& rng, double rMin, double rMax) {
    const double r = rng.uniform(rMin, rMax);
    const double a = rng.uniform(0.0, 2.0 * kPi);
    return {r * std::cos(a), r * std::sin(a)};
}

Point2 clamp_to(Point2 p, const Rect& r) {
    return {std::clamp(p.x, r.x0, r.x1), std::clamp(p.y, r.y0, r.y1)};
}

Point2 image_centre(const SubjectModel& m) {
    return {(m.imageWidth - 1) / 2.0, (m.imageHeight - 1) / 2.0};
}

// canonical finger frame -> sample image
Point2 place(Point2 q, const SubjectModel& m, double rotationDeg, Point2 shift) {
    const Point2 c = image_centre(m);
    const Point2 r = rotate_vec({q.x - c.x, q.y - c.y}, rotationDeg);
    return {r.x + c.x + shift.x, r.y + c.y + shift.y};
}

double finger_theta(const SubjectModel& m, Point2 q, double polarity) {
    const Point2 core = *m.fingerAnchor.referencePoint;
    return wrap_degrees(m.ridge.orientation_at(q.x - core.x, q.y - core.y) + polarity);
}

// 0 near the anatomical centre, rising to 1 over the periphery
double peripheral_weight(double distance, double inner) {
    return std::clamp((distance - inner) / kPeripheralRamp, 0.0, 1.0);
}

double nearest_landmark(const Template& face, Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [lm, q] : face.landmarks) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
    return best;
}

Template make_face_anchor(Rng& rng, const AnchorShape& shape, std::vector<int>& clumpOf) {
    Template t;
    t.kind = TemplateKind::Face;
    const std::array<std::pair<Landmark, Point2>, 4> base{{{Landmark::LeftEye, {140.0, 190.0}},
                                                           {Landmark::RightEye, {260.0, 190.0}},
                                                           {Landmark::NoseTip, {200.0, 270.0}},
                                                           {Landmark::Mouth, {200.0, 350.0}}}};
    for (const auto& [lm, p] : base) t.landmarks[lm] = {p.x + rng.normal(0.0, 6.0), p.y + rng.normal(0.0, 6.0)};

    struct Clump {
        Point2 centre;
        double psi;
    };
    std::vector<Clump> clumps;
    for (const auto& [lm, p] : t.landmarks) {
        for (int i = 0; i < shape.faceClumpsPerLandmark; ++i) {
            const Point2 off = offset_in_annulus(rng, shape.landmarkClumpMin, shape.landmarkClumpMax);
            clumps.push_back({{p.x + off.x, p.y + off.y}, rng.uniform(0.0, 360.0)});
        }
    }
    const Rect frame{40.0, 60.0, kFaceWidth - 40.0, kFaceHeight - 40.0};
    for (int i = 0; i < shape.faceBackgroundClumps; ++i) {
        Point2 c;
        bool far = false;
        while (!far) {
            c = {rng.uniform(frame.x0, frame.x1), rng.uniform(frame.y0, frame.y1)};
            far = std::all_of(t.landmarks.begin(), t.landmarks.end(), [&](const auto& kv) {
                return std::hypot(kv.second.x - c.x, kv.second.y - c.y) > 110.0;
            });
        }
        clumps.push_back({c, rng.uniform(0.0, 360.0)});
    }
    const int landmarkClumps = static_cast<int>(t.landmarks.size()) * shape.faceClumpsPerLandmark;
    const int backgroundPoints = shape.faceBackgroundClumps > 0 ? shape.faceBackgroundPoints : 0;
    const Rect bounds{0.0, 0.0, kFaceWidth - 1.0, kFaceHeight - 1.0};
    for (int i = 0; i < kFacePoints; ++i) {
        const int c = i < kFacePoints - backgroundPoints ? i % landmarkClumps
                                                         : landmarkClumps + (i % shape.faceBackgroundClumps);
        FeaturePoint p;
        p.modality = Modality::Face;
        const Point2 pos = clamp_to({clumps[c].centre.x + rng.normal(0.0, shape.faceClumpSpread),
                                     clumps[c].centre.y + rng.normal(0.0, shape.faceClumpSpread)},
                                    bounds);
        p.x = pos.x;
        p.y = pos.y;
        p.theta = wrap_degrees(clumps[c].psi + rng.normal(0.0, shape.faceClumpTheta));
        p.descriptor = random_unit_descriptor(rng);
        t.points.push_back(std::move(p));
        clumpOf.push_back(c);
    }
    return t;
}

void make_finger_anchor(Rng& rng, SubjectModel& m) {
    m.imageWidth = kFingerImageWidth;
    m.imageHeight = kFingerImageHeight;
    const double cx = (kFingerImageWidth - 1) / 2.0;
    const double cy = (kFingerImageHeight - 1) / 2.0;
    m.foreground = {cx - 110.0, cy - 135.0, cx + 110.0, cy + 135.0};

    m.ridge.wavelength = rng.uniform(7.5, 10.5);
    m.ridge.axisRatio = rng.uniform(0.5, 1.0);
    m.ridge.axisAngle = rng.uniform(0.0, 180.0);
    m.ridge.winding = static_cast<int>(rng.below(2));
    m.ridge.phase = rng.uniform(0.0, 2.0 * kPi);

    Template& t = m.fingerAnchor;
    t.kind = TemplateKind::Finger;
    t.dpi = kSyntheticDpi;
    t.referencePoint = Point2{cx + rng.uniform(-25.0, 25.0), cy + rng.uniform(-30.0, 30.0)};

    const Rect inner{m.foreground.x0 + 20.0, m.foreground.y0 + 20.0, m.foreground.x1 - 20.0, m.foreground.y1 - 20.0};
    struct Clump {
        Point2 centre;
        double polarity;
    };
    std::vector<Clump> clumps;
    while (static_cast<int>(clumps.size()) < m.shape.fingerClumps) {
        const Point2 c{rng.uniform(inner.x0, inner.x1), rng.uniform(inner.y0, inner.y1)};
        const bool apart = std::all_of(clumps.begin(), clumps.end(), [&](const Clump& o) {
            return std::hypot(o.centre.x - c.x, o.centre.y - c.y) >= m.shape.fingerClumpGap;
        });
        const double polarity = rng.below(2) == 0 ? 0.0 : 180.0;
        if (apart) clumps.push_back({c, polarity});
    }
    const Rect bounds{m.foreground.x0 + 10.0, m.foreground.y0 + 10.0, m.foreground.x1 - 10.0,
                      m.foreground.y1 - 10.0};
    for (int i = 0; i < kFingerPoints; ++i) {
        const int c = i % m.shape.fingerClumps;
        const Point2 pos = clamp_to({clumps[c].centre.x + rng.normal(0.0, m.shape.fingerClumpSpread),
                                     clumps[c].centre.y + rng.normal(0.0, m.shape.fingerClumpSpread)},
                                    bounds);
        FeaturePoint p;
        p.modality = Modality::Finger;
        p.x = pos.x;
        p.y = pos.y;
        p.theta = finger_theta(m, pos, clumps[c].polarity);
        t.points.push_back(p);
        m.fingerClump.push_back(c);
    }
}

}  // namespace

void PerturbationSpec::validate() const {
    const auto rate_ok = [](double r) { return r >= 0.0 && r < 1.0; };
    if (!rate_ok(dropRate) || !rate_ok(spuriousRate) || !rate_ok(failureRate)) {
        throw Error(ErrorCode::InvalidArgument, "perturbation rates must lie in [0, 1)");
    }
    for (double s : {spatialSigma, thetaSigma, descriptorSigma, poseRotationSigma, poseShiftSigma, placementRotation,
                     placementShift, distortion, pixelNoise, referenceSigma, failureShift,
                     peripheralNoise}) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw Error(ErrorCode::InvalidArgument, "perturbation magnitudes must be finite and >= 0");
        }
    }
    if (placementRotation > 30.0) throw Error(ErrorCode::InvalidArgument, "placementRotation must be <= 30 degrees");
    if (placementShift > 20.0) throw Error(ErrorCode::InvalidArgument, "placementShift must be <= 20 px");
}

namespace {

struct SpecField {
    const char* name;
    double PerturbationSpec::*member;
};

constexpr std::array<SpecField, 15> kSpecFields{{
    {"spatialSigma", &PerturbationSpec::spatialSigma},
    {"thetaSigma", &PerturbationSpec::thetaSigma},
    {"descriptorSigma", &PerturbationSpec::descriptorSigma},
    {"dropRate", &PerturbationSpec::dropRate},
    {"spuriousRate", &PerturbationSpec::spuriousRate},
    {"poseRotationSigma", &PerturbationSpec::poseRotationSigma},
    {"poseShiftSigma", &PerturbationSpec::poseShiftSigma},
    {"placementRotation", &PerturbationSpec::placementRotation},
    {"placementShift", &PerturbationSpec::placementShift},
    {"distortion", &PerturbationSpec::distortion},
    {"pixelNoise", &PerturbationSpec::pixelNoise},
    {"referenceSigma", &PerturbationSpec::referenceSigma},
    {"failureRate", &PerturbationSpec::failureRate},
    {"failureShift", &PerturbationSpec::failureShift},
    {"peripheralNoise", &PerturbationSpec::peripheralNoise},
}};

}  // namespace

KeyValues PerturbationSpec::to_key_values() const {
    KeyValues kv;
    for (const auto& f : kSpecFields) kv.set(f.name, format_decimal(this->*(f.member)));
    return kv;
}

PerturbationSpec PerturbationSpec::from_key_values(const KeyValues& kv, std::string_view prefix) {
    PerturbationSpec spec;
    for (const auto& f : kSpecFields) {
        const std::string key = std::string(prefix) + f.name;
        if (const auto v = kv.get(key)) spec.*(f.member) = parse_number(*v, key);
    }
    spec.validate();
    return spec;
}

Point2 ElasticField::displacement(double u, double v) const {
    if (scale == 0.0) return {};
    const double r = std::hypot(u, v) / 100.0;
    constexpr double k = 2.0 * kPi / 200.0;
    return {scale * r * (amplitude[0] * std::cos(k * v + phase[0]) + amplitude[1] * std::sin(k * u + phase[1])),
            scale * r * (amplitude[2] * std::cos(k * u + phase[1]) + amplitude[3] * std::sin(k * v + phase[0]))};
}

double RidgeModel::phase_at(double u, double v) const {
    const double c = std::cos(axisAngle * kDeg);
    const double s = std::sin(axisAngle * kDeg);
    const double a = u * c + v * s;
    const double b = (-u * s + v * c) / axisRatio;
    const double r = std::hypot(a, b);
    return 2.0 * kPi * r / wavelength + winding * std::atan2(v, u) + phase;
}

double RidgeModel::orientation_at(double u, double v) const {
    const double c = std::cos(axisAngle * kDeg);
    const double s = std::sin(axisAngle * kDeg);
    const double a = u * c + v * s;
    const double b = (-u * s + v * c) / axisRatio;
    const double r = std::hypot(a, b);
    const double rr = u * u + v * v;
    if (r == 0.0 || rr == 0.0) return 0.0;
    // gradient of the phase; ridges run perpendicular to it
    const double dra = a / r;
    const double drb = b / (r * axisRatio);
    double gx = 2.0 * kPi / wavelength * (dra * c - drb * s) + winding * (-v / rr);
    double gy = 2.0 * kPi / wavelength * (dra * s + drb * c) + winding * (u / rr);
    double deg = std::atan2(gy, gx) / kDeg + 90.0;
    deg = std::fmod(deg, 180.0);
    if (deg < 0.0) deg += 180.0;
    return deg;
}

SubjectModel gen_subject(int subjectId, std::uint64_t seed, const AnchorShape& shape) {
    SubjectModel m;
    m.shape = shape;
    m.subjectId = subjectId;
    m.seed = seed;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(subjectId), 0));
    m.faceAnchor = make_face_anchor(rng, shape, m.faceClump);
    make_finger_anchor(rng, m);
    return m;
}

GrayImage render_finger(const SubjectModel& m, double rotationDeg, Point2 shift, const ElasticField& field,
                        std::uint64_t noiseSeed, double pixelNoise) {
    GrayImage img(m.imageWidth, m.imageHeight, 255);
    const Point2 c = image_centre(m);
    const Point2 core = *m.fingerAnchor.referencePoint;
    Rng noise(noiseSeed);
    for (int y = 0; y < m.imageHeight; ++y) {
        for (int x = 0; x < m.imageWidth; ++x) {
            const Point2 r = rotate_vec({x - shift.x - c.x, y - shift.y - c.y}, -rotationDeg);
            const Point2 q{r.x + c.x, r.y + c.y};
            if (!m.foreground.contains(q)) continue;
            // undo the skin displacement (one fixed-point step)
            const Point2 d0 = field.displacement(q.x - core.x, q.y - core.y);
            const Point2 d = field.displacement(q.x - d0.x - core.x, q.y - d0.y - core.y);
            const double phase = m.ridge.phase_at(q.x - d.x - core.x, q.y - d.y - core.y);
            double v = 65.0 + 35.0 * std::cos(phase);
            if (pixelNoise > 0.0) v += noise.normal(0.0, pixelNoise);
            img.at(x, y) = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 120.0)));
        }
    }
    return img;
}

SyntheticSample gen_sample(const SubjectModel& m, int sampleIndex, const PerturbationSpec& spec) {
    spec.validate();
    SyntheticSample out;
    Rng rng(derive_seed(m.seed, static_cast<std::uint64_t>(m.subjectId), 1 + static_cast<std::uint64_t>(sampleIndex)));

    // face: pose change, then per-point noise
    const double pose = rng.normal(0.0, spec.poseRotationSigma);
    Point2 poseShift{rng.normal(0.0, spec.poseShiftSigma), rng.normal(0.0, spec.poseShiftSigma)};
    // an occasional failed capture displaces the whole set
    const bool faceFailed = rng.bernoulli(spec.failureRate);
    if (faceFailed) {
        const double a = rng.uniform(0.0, 2.0 * kPi);
        poseShift = {poseShift.x + spec.failureShift * std::cos(a), poseShift.y + spec.failureShift * std::sin(a)};
    }
    const auto pose_map = [&](Point2 p) {
        const Point2 r = rotate_vec({p.x - kFaceCentre.x, p.y - kFaceCentre.y}, pose);
        return Point2{r.x + kFaceCentre.x + poseShift.x, r.y + kFaceCentre.y + poseShift.y};
    };
    const auto clamp_face = [](Point2 p) { return clamp_to(p, {0.0, 0.0, kFaceWidth - 1.0, kFaceHeight - 1.0}); };

    Template& face = out.face;
    face.kind = TemplateKind::Face;
    for (const auto& [lm, p] : m.faceAnchor.landmarks) {
        const Point2 q = pose_map(p);
        face.landmarks[lm] = clamp_face({q.x + rng.normal(0.0, spec.spatialSigma), q.y + rng.normal(0.0, spec.spatialSigma)});
    }
    std::vector<FeaturePoint> spurious;
    for (std::size_t i = 0; i < m.faceAnchor.points.size(); ++i) {
        const auto& a = m.faceAnchor.points[i];
        const bool dropped = rng.bernoulli(spec.dropRate);
        const bool extra = rng.bernoulli(spec.spuriousRate);
        const Point2 q = pose_map({a.x, a.y});
        if (!dropped) {
            FeaturePoint p = a;
            const double extraSigma =
                spec.peripheralNoise * peripheral_weight(nearest_landmark(m.faceAnchor, {a.x, a.y}), kFacePeripheryStart);
            const double sigma = std::hypot(spec.spatialSigma, extraSigma);
            const Point2 pos = clamp_face({q.x + rng.normal(0.0, sigma), q.y + rng.normal(0.0, sigma)});
            p.x = pos.x;
            p.y = pos.y;
            p.theta = wrap_degrees(a.theta + pose + rng.normal(0.0, std::hypot(spec.thetaSigma, extraSigma)));
            for (auto& v : *p.descriptor) v = 255.0 * std::clamp(v + rng.normal(0.0, spec.descriptorSigma), 0.0, 1.0);
            face.points.push_back(std::move(p));
        }
        if (extra) {
            FeaturePoint p;
            p.modality = Modality::Face;
            const Point2 off = offset_in_annulus(rng, kSpuriousMin, kSpuriousMax);
            const Point2 pos = clamp_face({q.x + off.x, q.y + off.y});
            p.x = pos.x;
            p.y = pos.y;
            p.theta = wrap_degrees(a.theta + pose + rng.normal(0.0, m.shape.faceClumpTheta));
            Descriptor d = random_unit_descriptor(rng);
            for (auto& v : d) v *= 255.0;
            p.descriptor = d;
            spurious.push_back(std::move(p));
        }
    }
    face.points.insert(face.points.end(), spurious.begin(), spurious.end());

    // finger: skin distortion, placement, per-point noise
    out.rotation = rng.uniform(-spec.placementRotation, spec.placementRotation);
    out.shift = {rng.uniform(-spec.placementShift, spec.placementShift),
                 rng.uniform(-spec.placementShift, spec.placementShift)};
    ElasticField field;
    field.scale = spec.distortion;
    for (auto& a : field.amplitude) a = rng.normal();
    for (auto& p : field.phase) p = rng.uniform(0.0, 2.0 * kPi);
    const std::uint64_t noiseSeed = rng.next_u64();
    const bool fingerFailed = rng.bernoulli(spec.failureRate);

    const Point2 core = *m.fingerAnchor.referencePoint;
    const Rect imageBounds{0.0, 0.0, m.imageWidth - 1.0, m.imageHeight - 1.0};
    const auto skin = [&](Point2 q) {
        const Point2 d = field.displacement(q.x - core.x, q.y - core.y);
        return Point2{q.x + d.x, q.y + d.y};
    };

    Template& finger = out.finger;
    finger.kind = TemplateKind::Finger;
    finger.dpi = kSyntheticDpi;
    Point2 refNoise{rng.normal(0.0, spec.referenceSigma), rng.normal(0.0, spec.referenceSigma)};
    if (fingerFailed) {
        const double a = rng.uniform(0.0, 2.0 * kPi);
        refNoise = {refNoise.x + spec.failureShift * std::cos(a), refNoise.y + spec.failureShift * std::sin(a)};
    }
    finger.referencePoint = place({core.x + refNoise.x, core.y + refNoise.y}, m, out.rotation, out.shift);
    spurious.clear();
    for (std::size_t i = 0; i < m.fingerAnchor.points.size(); ++i) {
        const auto& a = m.fingerAnchor.points[i];
        const bool dropped = rng.bernoulli(spec.dropRate);
        const bool extra = rng.bernoulli(spec.spuriousRate);
        if (!dropped) {
            FeaturePoint p = a;
            const double extraSigma =
                spec.peripheralNoise * peripheral_weight(std::hypot(a.x - core.x, a.y - core.y), kFingerPeripheryStart);
            const double sigma = std::hypot(spec.spatialSigma, extraSigma);
            const Point2 q = skin({a.x + rng.normal(0.0, sigma), a.y + rng.normal(0.0, sigma)});
            const Point2 pos = clamp_to(place(q, m, out.rotation, out.shift), imageBounds);
            p.x = pos.x;
            p.y = pos.y;
            p.theta = wrap_degrees(a.theta + out.rotation + rng.normal(0.0, std::hypot(spec.thetaSigma, extraSigma)));
            finger.points.push_back(p);
        }
        if (extra) {
            const Point2 off = offset_in_annulus(rng, kSpuriousMin, kSpuriousMax);
            const Point2 q0 = clamp_to({a.x + off.x, a.y + off.y}, m.foreground);
            const double polarity = rng.below(2) == 0 ? 0.0 : 180.0;
            FeaturePoint p;
            p.modality = Modality::Finger;
            const Point2 pos = clamp_to(place(skin(q0), m, out.rotation, out.shift), imageBounds);
            p.x = pos.x;
            p.y = pos.y;
            p.theta = wrap_degrees(finger_theta(m, q0, polarity) + out.rotation);
            spurious.push_back(p);
        }
    }
    finger.points.insert(finger.points.end(), spurious.begin(), spurious.end());
    out.fingerImage = render_finger(m, out.rotation, out.shift, field, noiseSeed, spec.pixelNoise);
    return out;
}

Manifest build_dataset(const std::filesystem::path& dir, int subjects, int samples, std::uint64_t seed,
                       const PerturbationSpec& spec) {
    if (subjects < 2) throw Error(ErrorCode::InvalidArgument, "build_dataset: at least 2 subjects required");
    if (samples < 2) throw Error(ErrorCode::InvalidArgument, "build_dataset: at least 2 samples per subject required");
    spec.validate();
    Manifest manifest;
    manifest.baseDir = dir;
    manifest.generator = spec.to_key_values();
    manifest.generator.set("seed", std::to_string(seed));
    manifest.generator.set("subjects", std::to_string(subjects));
    manifest.generator.set("samples", std::to_string(samples));
    for (int s = 1; s <= subjects; ++s) {
        const SubjectModel model = gen_subject(s, seed);
        SubjectRecord rec;
        rec.subjectId = s;
        for (int k = 0; k < samples; ++k) {
            const SyntheticSample sample = gen_sample(model, k, spec);
            char stem[32];
            std::snprintf(stem, sizeof(stem), "s%03d_%d", s, k);
            SampleRecord r;
            r.sampleId = k;
            r.face = std::filesystem::path("face") / (std::string(stem) + ".tpl");
            r.fingerTemplate = std::filesystem::path("finger") / (std::string(stem) + ".tpl");
            r.fingerImage = std::filesystem::path("finger") / (std::string(stem) + ".pgm");
            save_template(sample.face, dir / r.face);
            save_template(sample.finger, dir / r.fingerTemplate);
            save_image_pgm(sample.fingerImage, dir / r.fingerImage);
            rec.samples.push_back(std::move(r));
        }
        manifest.subjects.push_back(std::move(rec));
    }
    save_manifest(manifest, dir / "manifest.txt");
    return manifest;
}

}  // namespace biofuse
