#include "biofuse/protocol.hpp"

#include <array>
#include <functional>
#include <memory>
#include <set>

namespace biofuse {

namespace {

using Grid = std::vector<std::vector<Template>>;
using Scorer = std::function<double(const Trial&)>;

template <typename Fn>
Grid map_grid(const std::vector<std::vector<PreparedSample>>& data, Fn&& fn) {
    Grid g(data.size());
    for (std::size_t s = 0; s < data.size(); ++s) {
        g[s].reserve(data[s].size());
        for (const auto& sample : data[s]) g[s].push_back(fn(sample));
    }
    return g;
}

Scorer make_scorer(const Grid& g, MatcherKind kind, const MatcherConfig& mc) {
    if (kind == MatcherKind::PointPattern) {
        return [&g, th = mc.point](const Trial& t) {
            return point_pattern_match(g[t.dbSubject][0], g[t.querySubject][t.querySample], th).score;
        };
    }
    auto tri = std::make_shared<std::vector<std::vector<TriangulatedTemplate>>>(g.size());
    for (std::size_t s = 0; s < g.size(); ++s) {
        for (const auto& t : g[s]) (*tri)[s].push_back(triangulate_features(t));
    }
    return [tri, th = mc.triangle](const Trial& t) {
        return delaunay_match((*tri)[t.dbSubject][0], (*tri)[t.querySubject][t.querySample], th).score;
    };
}

TrialSet score_trials(const TrialPlan& plan, const Scorer& score, std::string label) {
    TrialSet out;
    out.label = std::move(label);
    out.genuine.reserve(plan.genuine.size());
    out.impostor.reserve(plan.impostor.size());
    for (const auto& t : plan.genuine) out.genuine.push_back(score(t));
    for (const auto& t : plan.impostor) out.impostor.push_back(score(t));
    return out;
}

// Bounds from enrollment-against-enrollment scores, self matches included.
ScoreBounds training_bounds(std::size_t subjects, const Scorer& score) {
    ScoreBounds b{0.0, 0.0};
    bool first = true;
    for (std::size_t s = 0; s < subjects; ++s) {
        for (std::size_t t = 0; t < subjects; ++t) {
            const double v = score({static_cast<int>(s), static_cast<int>(t), 0, s == t});
            if (first || v < b.lo) b.lo = v;
            if (first || v > b.hi) b.hi = v;
            first = false;
        }
    }
    return b;
}

TrialSet fuse_scores(const TrialSet& face, const TrialSet& finger, const PipelineConfig& config, std::size_t subjects,
                     const Scorer& faceScore, const Scorer& fingerScore, std::string label) {
    std::optional<ScoreBounds> fb, gb;
    if (config.fusionBounds == FusionBounds::Training) {
        fb = training_bounds(subjects, faceScore);
        gb = training_bounds(subjects, fingerScore);
    }
    TrialSet out = score_level_fuse(face, finger, fb, gb);
    out.label = std::move(label);
    return out;
}

struct Emitter {
    ProtocolResult& result;
    int steps;

    void operator()(TrialSet trials) {
        result.reports.push_back(sweep_metrics(trials, steps));
        result.trials.push_back(std::move(trials));
    }
};

std::size_t samples_per_subject(const std::vector<std::vector<PreparedSample>>& data) {
    if (data.empty()) throw Error(ErrorCode::Manifest, "dataset has no subjects");
    const std::size_t n = data.front().size();
    for (const auto& s : data) {
        if (s.size() != n) throw Error(ErrorCode::Manifest, "every subject must have the same number of samples");
    }
    return n;
}

template <typename E>
struct Named {
    E value;
    std::string_view name;
};

constexpr std::array<Named<ReductionStrategy>, 4> kStrategies{{{ReductionStrategy::None, "none"},
                                                               {ReductionStrategy::KMeans, "kmeans"},
                                                               {ReductionStrategy::Neighborhood, "neighborhood"},
                                                               {ReductionStrategy::Region, "region"}}};
constexpr std::array<Named<ReductionStage>, 2> kStages{{{ReductionStage::BeforeFusion, "before"},
                                                        {ReductionStage::AfterFusion, "after"}}};

}  // namespace

std::string_view to_string(ReductionStrategy r) {
    for (const auto& s : kStrategies) {
        if (s.value == r) return s.name;
    }
    return "?";
}

std::string_view to_string(ReductionStage st) {
    for (const auto& s : kStages) {
        if (s.value == st) return s.name;
    }
    return "?";
}

std::optional<ReductionStrategy> parse_reduction_strategy(std::string_view text) {
    for (const auto& s : kStrategies) {
        if (s.name == text) return s.value;
    }
    return std::nullopt;
}

std::optional<ReductionStage> parse_reduction_stage(std::string_view text) {
    for (const auto& s : kStages) {
        if (s.name == text) return s.value;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

void PipelineConfig::validate() const {
    matcher.point.validate();
    matcher.triangle.validate();
    gabor.validate();
    region.validate();
    if (reduction == ReductionStrategy::KMeans && stage != ReductionStage::AfterFusion) {
        throw Error(ErrorCode::Config, "kmeans reduction applies to the fused pointset only (stage after)");
    }
    if ((reduction == ReductionStrategy::Neighborhood || reduction == ReductionStrategy::Region) &&
        stage != ReductionStage::BeforeFusion) {
        throw Error(ErrorCode::Config, std::string(to_string(reduction)) + " reduction applies per modality (stage before)");
    }
    if (!(faceNeighborhood > 0.0) || !(fingerNeighborhood > 0.0)) {
        throw Error(ErrorCode::Config, "neighborhood radii must be positive");
    }
    if (kmeans.kRange && (kmeans.kRange->min < 2 || kmeans.kRange->max < kmeans.kRange->min)) {
        throw Error(ErrorCode::Config, "kmeans k range must satisfy 2 <= kMin <= kMax");
    }
    if (!(kmeans.thetaWeight >= 0.0) || kmeans.maxIterations < 1) {
        throw Error(ErrorCode::Config, "kmeans thetaWeight must be >= 0 and maxIterations >= 1");
    }
    if (deskewThreshold < 1 || deskewThreshold > 255) throw Error(ErrorCode::Config, "deskew threshold must be in 1..255");
    if (targetDpi <= 0) throw Error(ErrorCode::Config, "target dpi must be positive");
    if (sweepSteps < 2) throw Error(ErrorCode::Config, "evaluation steps must be >= 2");
    if (impostorsPerSubject < 0) throw Error(ErrorCode::Config, "impostors per subject must be >= 0");
}

namespace {

// Typed accessors over a KeyValues map that track which keys were consumed.
class ConfigReader {
public:
    explicit ConfigReader(const KeyValues& kv) : kv_(kv) {}

    void number(std::string_view key, double& out) {
        if (const auto v = take(key)) out = parse_config_number(*v, key);
    }
    void integer(std::string_view key, int& out) {
        if (const auto v = take(key)) out = static_cast<int>(parse_config_integer(*v, key));
    }
    void seed(std::string_view key, std::uint64_t& out) {
        if (const auto v = take(key)) {
            const long long x = parse_config_integer(*v, key);
            if (x < 0) throw Error(ErrorCode::Config, std::string(key) + ": seed must be non-negative");
            out = static_cast<std::uint64_t>(x);
        }
    }
    void boolean(std::string_view key, bool& out) {
        if (const auto v = take(key)) {
            if (*v == "true") {
                out = true;
            } else if (*v == "false") {
                out = false;
            } else {
                throw Error(ErrorCode::Config, std::string(key) + ": expected true or false");
            }
        }
    }
    std::optional<std::string> text(std::string_view key) { return take(key); }

    void reject_unknown() const {
        for (const auto& [k, v] : kv_.entries()) {
            if (!used_.count(k)) throw Error(ErrorCode::Config, "unknown configuration key '" + k + "'");
        }
    }

private:
    std::optional<std::string> take(std::string_view key) {
        auto v = kv_.get(key);
        if (v) used_.insert(std::string(key));
        return v;
    }
    static double parse_config_number(const std::string& v, std::string_view key) {
        try {
            return parse_number(v, key);
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, e.what());
        }
    }
    static long long parse_config_integer(const std::string& v, std::string_view key) {
        try {
            return parse_integer(v, key);
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, e.what());
        }
    }

    const KeyValues& kv_;
    std::set<std::string> used_;
};

}  // namespace

PipelineConfig PipelineConfig::from_key_values(const KeyValues& kv) {
    PipelineConfig c;
    ConfigReader r(kv);
    if (const auto v = r.text("matcher.kind")) {
        if (*v == "point-pattern") {
            c.matcher.kind = MatcherKind::PointPattern;
        } else if (*v == "delaunay") {
            c.matcher.kind = MatcherKind::Delaunay;
        } else {
            throw Error(ErrorCode::Config, "matcher.kind: expected point-pattern or delaunay");
        }
    }
    r.number("matcher.r0", c.matcher.point.r0);
    r.number("matcher.theta0", c.matcher.point.theta0);
    r.number("matcher.k0", c.matcher.point.k0);
    r.number("triangle.dAlpha", c.matcher.triangle.dAlpha);
    r.number("triangle.dL", c.matcher.triangle.dL);
    r.number("triangle.dTheta", c.matcher.triangle.dTheta);
    r.number("triangle.dRatio", c.matcher.triangle.dRatio);
    r.boolean("triangle.oneToOne", c.matcher.triangle.oneToOne);

    if (const auto v = r.text("reduction.strategy")) {
        const auto s = parse_reduction_strategy(*v);
        if (!s) throw Error(ErrorCode::Config, "reduction.strategy: expected none, kmeans, neighborhood or region");
        c.reduction = *s;
        // the stage follows the strategy unless given explicitly
        c.stage = *s == ReductionStrategy::KMeans || *s == ReductionStrategy::None ? ReductionStage::AfterFusion
                                                                                   : ReductionStage::BeforeFusion;
    }
    if (const auto v = r.text("reduction.stage")) {
        const auto s = parse_reduction_stage(*v);
        if (!s) throw Error(ErrorCode::Config, "reduction.stage: expected before or after");
        c.stage = *s;
    }
    r.number("region.faceRadius", c.region.faceRadius);
    r.number("region.fingerRadius", c.region.fingerRadius);
    r.number("neighborhood.faceRadius", c.faceNeighborhood);
    r.number("neighborhood.fingerRadius", c.fingerNeighborhood);

    if (kv.contains("kmeans.kMin") || kv.contains("kmeans.kMax")) {
        KRange k;
        r.integer("kmeans.kMin", k.min);
        r.integer("kmeans.kMax", k.max);
        c.kmeans.kRange = k;
    }
    r.seed("kmeans.seed", c.kmeans.seed);
    r.number("kmeans.thetaWeight", c.kmeans.thetaWeight);
    r.integer("kmeans.maxIterations", c.kmeans.maxIterations);

    r.integer("gabor.scaleCount", c.gabor.scaleCount);
    r.integer("gabor.patchRadius", c.gabor.patchRadius);
    r.number("gabor.baseWavelength", c.gabor.baseWavelength);
    r.number("gabor.wavelengthRatio", c.gabor.wavelengthRatio);
    r.number("gabor.sigmaFactor", c.gabor.sigmaFactor);
    if (const auto v = r.text("normalization.mode")) {
        if (*v == "per-descriptor") {
            c.normalization = NormalizationMode::PerDescriptor;
        } else if (*v == "per-component") {
            c.normalization = NormalizationMode::PerComponent;
        } else {
            throw Error(ErrorCode::Config, "normalization.mode: expected per-descriptor or per-component");
        }
    }
    r.integer("deskew.threshold", c.deskewThreshold);
    r.number("registration.referenceX", c.canonicalReference.x);
    r.number("registration.referenceY", c.canonicalReference.y);
    r.integer("registration.targetDpi", c.targetDpi);
    r.integer("evaluation.steps", c.sweepSteps);
    r.integer("protocol.impostorsPerSubject", c.impostorsPerSubject);
    r.seed("protocol.seed", c.protocolSeed);
    if (const auto v = r.text("fusion.bounds")) {
        if (*v == "pooled") {
            c.fusionBounds = FusionBounds::Pooled;
        } else if (*v == "training") {
            c.fusionBounds = FusionBounds::Training;
        } else {
            throw Error(ErrorCode::Config, "fusion.bounds: expected pooled or training");
        }
    }
    r.reject_unknown();
    try {
        c.validate();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw;
        throw Error(ErrorCode::Config, e.what());
    }
    return c;
}

KeyValues PipelineConfig::to_key_values() const {
    KeyValues kv;
    const auto num = [&](const char* k, double v) { kv.set(k, format_decimal(v)); };
    const auto integer = [&](const char* k, long long v) { kv.set(k, std::to_string(v)); };
    kv.set("matcher.kind", std::string(to_string(matcher.kind)));
    num("matcher.r0", matcher.point.r0);
    num("matcher.theta0", matcher.point.theta0);
    num("matcher.k0", matcher.point.k0);
    num("triangle.dAlpha", matcher.triangle.dAlpha);
    num("triangle.dL", matcher.triangle.dL);
    num("triangle.dTheta", matcher.triangle.dTheta);
    num("triangle.dRatio", matcher.triangle.dRatio);
    kv.set("triangle.oneToOne", matcher.triangle.oneToOne ? "true" : "false");
    kv.set("reduction.strategy", std::string(to_string(reduction)));
    kv.set("reduction.stage", std::string(to_string(stage)));
    num("region.faceRadius", region.faceRadius);
    num("region.fingerRadius", region.fingerRadius);
    num("neighborhood.faceRadius", faceNeighborhood);
    num("neighborhood.fingerRadius", fingerNeighborhood);
    if (kmeans.kRange) {
        integer("kmeans.kMin", kmeans.kRange->min);
        integer("kmeans.kMax", kmeans.kRange->max);
    }
    kv.set("kmeans.seed", std::to_string(kmeans.seed));
    num("kmeans.thetaWeight", kmeans.thetaWeight);
    integer("kmeans.maxIterations", kmeans.maxIterations);
    integer("gabor.scaleCount", gabor.scaleCount);
    integer("gabor.patchRadius", gabor.patchRadius);
    num("gabor.baseWavelength", gabor.baseWavelength);
    num("gabor.wavelengthRatio", gabor.wavelengthRatio);
    num("gabor.sigmaFactor", gabor.sigmaFactor);
    kv.set("normalization.mode", normalization == NormalizationMode::PerDescriptor ? "per-descriptor" : "per-component");
    integer("deskew.threshold", deskewThreshold);
    num("registration.referenceX", canonicalReference.x);
    num("registration.referenceY", canonicalReference.y);
    integer("registration.targetDpi", targetDpi);
    integer("evaluation.steps", sweepSteps);
    integer("protocol.impostorsPerSubject", impostorsPerSubject);
    kv.set("protocol.seed", std::to_string(protocolSeed));
    kv.set("fusion.bounds", fusionBounds == FusionBounds::Pooled ? "pooled" : "training");
    return kv;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    return from_key_values(KeyValues::load(path));
}

// ---------------------------------------------------------------------------

PreparedSample prepare_sample(const Template& face, const Template& fingerMinutiae, const GrayImage& fingerImage,
                              const PipelineConfig& config, const GaborBank& bank) {
    if (face.kind != TemplateKind::Face) throw Error(ErrorCode::KindMismatch, "face template must have kind FACE");
    if (fingerMinutiae.kind != TemplateKind::Finger) {
        throw Error(ErrorCode::KindMismatch, "finger template must have kind FINGER");
    }
    PreparedSample out;
    out.face = normalize_descriptors(face, config.normalization);

    const DeskewResult d = deskew(fingerImage, config.deskewThreshold);
    out.deskewAngle = d.angle;
    const Template upright = apply_deskew(fingerMinutiae, d);
    const auto align = [&](const Template& t) {
        return register_to(scale_normalize(t, config.targetDpi), config.canonicalReference);
    };
    out.fingerMinutiae = align(upright);
    out.finger = align(normalize_descriptors(make_compatible(upright, d.rotated, bank), config.normalization));
    return out;
}

Template reduce_before_fusion(const Template& t, ReductionStrategy r, const PipelineConfig& config) {
    switch (r) {
        case ReductionStrategy::None:
            return t;
        case ReductionStrategy::Neighborhood:
            return neighborhood_eliminate(t, t.kind == TemplateKind::Face ? config.faceNeighborhood
                                                                          : config.fingerNeighborhood);
        case ReductionStrategy::Region:
            return region_select(t, config.region);
        case ReductionStrategy::KMeans:
            break;
    }
    throw Error(ErrorCode::Config, "kmeans reduction applies to the fused pointset only");
}

Template fuse_with_reduction(const Template& face, const Template& finger, const PipelineConfig& config) {
    config.validate();
    if (config.stage == ReductionStage::BeforeFusion) {
        return concatenate(reduce_before_fusion(face, config.reduction, config),
                           reduce_before_fusion(finger, config.reduction, config));
    }
    Template fused = concatenate(face, finger);
    if (config.reduction == ReductionStrategy::KMeans) return kmeans_reduce(fused, config.kmeans);
    return fused;
}

std::vector<std::vector<PreparedSample>> prepare_dataset(const Manifest& manifest, const PipelineConfig& config) {
    config.validate();
    const GaborBank bank(config.gabor);
    std::vector<std::vector<PreparedSample>> data;
    data.reserve(manifest.subjects.size());
    for (const auto& subject : manifest.subjects) {
        auto& row = data.emplace_back();
        for (const auto& rec : subject.samples) {
            try {
                row.push_back(prepare_sample(load_template(manifest.resolve(rec.face), TemplateKind::Face),
                                             load_template(manifest.resolve(rec.fingerTemplate), TemplateKind::Finger),
                                             load_image_pgm(manifest.resolve(rec.fingerImage)), config, bank));
            } catch (const Error& e) {
                throw Error(e.code(), "subject " + std::to_string(subject.subjectId) + " sample " +
                                          std::to_string(rec.sampleId) + ": " + e.what());
            }
        }
    }
    return data;
}

ProtocolResult run_protocol(const std::vector<std::vector<PreparedSample>>& data, const PipelineConfig& config) {
    config.validate();
    const std::size_t n = samples_per_subject(data);
    ProtocolResult result;
    result.plan = plan_trials(static_cast<int>(data.size()), static_cast<int>(n), config.impostorsPerSubject,
                              config.protocolSeed);
    Emitter emit{result, config.sweepSteps};

    const Grid face = map_grid(data, [](const PreparedSample& s) { return s.face; });
    const Grid finger = map_grid(data, [](const PreparedSample& s) { return s.finger; });
    const Grid fused = map_grid(data, [&](const PreparedSample& s) { return fuse_with_reduction(s.face, s.finger, config); });

    const Scorer faceScore = make_scorer(face, config.matcher.kind, config.matcher);
    const Scorer fingerScore = make_scorer(finger, config.matcher.kind, config.matcher);
    const Scorer fusedScore = make_scorer(fused, config.matcher.kind, config.matcher);

    TrialSet f = score_trials(result.plan, faceScore, "face");
    TrialSet g = score_trials(result.plan, fingerScore, "finger");
    TrialSet sf = fuse_scores(f, g, config, data.size(), faceScore, fingerScore, "score_fusion");
    emit(std::move(f));
    emit(std::move(g));
    emit(std::move(sf));
    emit(score_trials(result.plan, fusedScore, "feature_fusion"));
    return result;
}

ProtocolResult run_protocol(const Manifest& manifest, const PipelineConfig& config) {
    return run_protocol(prepare_dataset(manifest, config), config);
}

ProtocolResult run_sessions(const std::vector<std::vector<PreparedSample>>& data, const PipelineConfig& config) {
    config.validate();
    const std::size_t n = samples_per_subject(data);
    ProtocolResult result;
    result.plan = plan_trials(static_cast<int>(data.size()), static_cast<int>(n), config.impostorsPerSubject,
                              config.protocolSeed);
    Emitter emit{result, config.sweepSteps};
    const auto& mc = config.matcher;
    constexpr auto PP = MatcherKind::PointPattern;
    constexpr auto DT = MatcherKind::Delaunay;

    const Grid face = map_grid(data, [](const PreparedSample& s) { return s.face; });
    const Grid minutiae = map_grid(data, [](const PreparedSample& s) { return s.fingerMinutiae; });
    const Grid finger = map_grid(data, [](const PreparedSample& s) { return s.finger; });
    const Grid fused = map_grid(data, [](const PreparedSample& s) { return concatenate(s.face, s.finger); });
    const Grid kmeansFused = map_grid(data, [&](const PreparedSample& s) {
        return kmeans_reduce(concatenate(s.face, s.finger), config.kmeans);
    });
    const Grid neighborhoodFused = map_grid(data, [&](const PreparedSample& s) {
        return concatenate(reduce_before_fusion(s.face, ReductionStrategy::Neighborhood, config),
                           reduce_before_fusion(s.finger, ReductionStrategy::Neighborhood, config));
    });
    const Grid regionFused = map_grid(data, [&](const PreparedSample& s) {
        return concatenate(region_select(s.face, config.region), region_select(s.finger, config.region));
    });

    // A: monomodal, raw feature sets
    const Scorer facePP = make_scorer(face, PP, mc);
    TrialSet facePPTrials = score_trials(result.plan, facePP, "A_face_pp");
    emit(facePPTrials);
    emit(score_trials(result.plan, make_scorer(minutiae, PP, mc), "A_finger_minutiae_pp"));

    // B: finger with keydescriptors; score fusion against k-means feature fusion
    const Scorer fingerPP = make_scorer(finger, PP, mc);
    TrialSet fingerPPTrials = score_trials(result.plan, fingerPP, "B_finger_pp");
    emit(fingerPPTrials);
    emit(fuse_scores(facePPTrials, fingerPPTrials, config, data.size(), facePP, fingerPP, "B_score_fusion_pp"));
    emit(score_trials(result.plan, make_scorer(kmeansFused, PP, mc), "B_feature_fusion_kmeans_pp"));

    // C: reduction before fusion
    emit(score_trials(result.plan, make_scorer(neighborhoodFused, PP, mc), "C_feature_fusion_neighborhood_pp"));
    emit(score_trials(result.plan, make_scorer(regionFused, PP, mc), "C_feature_fusion_region_pp"));

    // D: triangle matcher
    const Scorer faceDT = make_scorer(face, DT, mc);
    const Scorer fingerDT = make_scorer(finger, DT, mc);
    TrialSet faceDTTrials = score_trials(result.plan, faceDT, "D_face_dt");
    TrialSet fingerDTTrials = score_trials(result.plan, fingerDT, "D_finger_dt");
    emit(faceDTTrials);
    emit(fingerDTTrials);
    emit(fuse_scores(faceDTTrials, fingerDTTrials, config, data.size(), faceDT, fingerDT, "D_score_fusion_dt"));
    emit(score_trials(result.plan, make_scorer(fused, DT, mc), "D_feature_fusion_dt"));
    emit(score_trials(result.plan, make_scorer(regionFused, DT, mc), "D_feature_fusion_region_dt"));
    return result;
}

std::vector<RetentionRow> retention_counts(const PreparedSample& s, const PipelineConfig& config) {
    const auto row = [](std::string name, const Template& t) {
        return RetentionRow{std::move(name), t.count(Modality::Face), t.count(Modality::Finger), t.points.size()};
    };
    std::vector<RetentionRow> rows;
    rows.push_back(row("extracted", concatenate(s.face, s.finger)));
    rows.push_back(row("kmeans", kmeans_reduce(concatenate(s.face, s.finger), config.kmeans)));
    rows.push_back(row("neighborhood",
                       concatenate(reduce_before_fusion(s.face, ReductionStrategy::Neighborhood, config),
                                   reduce_before_fusion(s.finger, ReductionStrategy::Neighborhood, config))));
    rows.push_back(row("region", concatenate(region_select(s.face, config.region), region_select(s.finger, config.region))));
    return rows;
}

std::string format_report(const std::vector<EvalReport>& reports) {
    std::string out;
    for (const auto& r : reports) {
        out += r.label + ' ' + format_decimal(r.far) + ' ' + format_decimal(r.frr) + ' ' + format_decimal(r.accuracy) +
               ' ' + format_decimal(r.threshold) + '\n';
    }
    return out;
}

std::string format_roc(const EvalReport& report) {
    std::string out;
    for (const auto& p : report.roc) {
        out += format_decimal(p.threshold) + ' ' + format_decimal(p.far) + ' ' + format_decimal(p.frr) + '\n';
    }
    return out;
}

std::string format_retention(const std::vector<RetentionRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
        out += r.technique + ' ' + std::to_string(r.face) + ' ' + std::to_string(r.finger) + ' ' +
               std::to_string(r.fused) + '\n';
    }
    return out;
}

void write_reports(const ProtocolResult& result, const std::filesystem::path& dir) {
    write_file(dir / "report.txt", format_report(result.reports));
    std::string counts;
    for (const auto& r : result.reports) {
        counts += r.label + ' ' + std::to_string(r.genuineCount) + ' ' + std::to_string(r.impostorCount) + '\n';
    }
    write_file(dir / "trials.txt", counts);
    for (const auto& r : result.reports) write_file(dir / "roc" / (r.label + ".txt"), format_roc(r));
}

}  // namespace biofuse
