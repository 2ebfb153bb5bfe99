#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "biofuse/compat.hpp"
#include "biofuse/core.hpp"
#include "biofuse/evaluation.hpp"
#include "biofuse/io.hpp"
#include "biofuse/matching.hpp"
#include "biofuse/reduction.hpp"

namespace biofuse {

enum class ReductionStrategy { None, KMeans, Neighborhood, Region };
enum class ReductionStage { BeforeFusion, AfterFusion };
enum class FusionBounds { Pooled, Training };

std::string_view to_string(ReductionStrategy r);
std::string_view to_string(ReductionStage s);
std::optional<ReductionStrategy> parse_reduction_strategy(std::string_view s);
std::optional<ReductionStage> parse_reduction_stage(std::string_view s);

struct PipelineConfig {
    MatcherConfig matcher;
    ReductionStrategy reduction = ReductionStrategy::KMeans;
    ReductionStage stage = ReductionStage::AfterFusion;
    GaborBankSpec gabor;
    NormalizationMode normalization = NormalizationMode::PerDescriptor;
    RegionSpec region;
    double faceNeighborhood = 20.0;
    double fingerNeighborhood = 15.0;
    KMeansOptions kmeans;
    int deskewThreshold = 128;
    Point2 canonicalReference{200.0, 720.0};  // finger core after registration, below the face frame
    int targetDpi = 500;
    int sweepSteps = 1000;
    int impostorsPerSubject = 0;  // 0: every other subject's first sample
    std::uint64_t protocolSeed = 0;
    FusionBounds fusionBounds = FusionBounds::Pooled;

    /// KMeans runs on the fused set only; Neighborhood and Region run per
    /// modality before fusion.
    void validate() const;

    KeyValues to_key_values() const;
    /// Unknown keys are rejected.
    static PipelineConfig from_key_values(const KeyValues& kv);
    static PipelineConfig load(const std::filesystem::path& path);
};

/// One sample after the compatibility stage.
struct PreparedSample {
    Template face;             // descriptors min-max normalized
    Template fingerMinutiae;   // deskewed, scaled and registered; no descriptors
    Template finger;           // as above with Gabor descriptors
    double deskewAngle = 0.0;
};

PreparedSample prepare_sample(const Template& face, const Template& fingerMinutiae, const GrayImage& fingerImage,
                              const PipelineConfig& config, const GaborBank& bank);

/// Per-modality reduction applied before concatenation.
Template reduce_before_fusion(const Template& t, ReductionStrategy r, const PipelineConfig& config);

/// Fused template for the configured reduction (before or after fusion).
Template fuse_with_reduction(const Template& face, const Template& finger, const PipelineConfig& config);

struct ProtocolResult {
    std::vector<EvalReport> reports;  // in emission order
    std::vector<TrialSet> trials;     // same order as reports
    TrialPlan plan;
};

/// Prepared samples for every manifest entry, indexed [subject][sample].
std::vector<std::vector<PreparedSample>> prepare_dataset(const Manifest& manifest, const PipelineConfig& config);

/// Face-only, finger-only, score-level and feature-level fusion under the
/// configured matcher and reduction. Labels: face, finger, score_fusion,
/// feature_fusion.
ProtocolResult run_protocol(const Manifest& manifest, const PipelineConfig& config);
ProtocolResult run_protocol(const std::vector<std::vector<PreparedSample>>& data, const PipelineConfig& config);

/// The four experimental sessions: monomodal (A), descriptor-augmented
/// finger and k-means fusion against score fusion (B), reduction before
/// fusion (C) and the triangle matcher (D).
ProtocolResult run_sessions(const std::vector<std::vector<PreparedSample>>& data, const PipelineConfig& config);

struct RetentionRow {
    std::string technique;
    std::size_t face = 0;
    std::size_t finger = 0;
    std::size_t fused = 0;
};

/// Points kept by each reduction technique for one prepared sample.
std::vector<RetentionRow> retention_counts(const PreparedSample& s, const PipelineConfig& config);

/// report.txt, trials.txt and roc/<label>.txt under `dir`.
void write_reports(const ProtocolResult& result, const std::filesystem::path& dir);
std::string format_report(const std::vector<EvalReport>& reports);
std::string format_roc(const EvalReport& report);
std::string format_retention(const std::vector<RetentionRow>& rows);

}  // namespace biofuse
