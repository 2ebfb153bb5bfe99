#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biofuse/core.hpp"

namespace biofuse {

struct TrialSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
    std::string label;
};

struct RocPoint {
    double threshold = 0.0;
    double far = 0.0;  // percent
    double frr = 0.0;  // percent
};

struct EvalReport {
    std::string label;
    double far = 0.0;       // percent, at the chosen threshold
    double frr = 0.0;       // percent, at the chosen threshold
    double accuracy = 0.0;  // percent, max over the sweep of 100 * (1 - (FAR + FRR) / 2)
    double threshold = 0.0;
    std::vector<RocPoint> roc;
    std::size_t genuineCount = 0;
    std::size_t impostorCount = 0;
};

struct ScoreBounds {
    double lo = 0.0;
    double hi = 1.0;
};

/// Min-max maps `v` into [0, 1] by the given bounds; a degenerate range
/// maps everything to 0.
double min_max_scale(double v, const ScoreBounds& b);

/// Bounds over the pooled genuine and impostor scores.
ScoreBounds pooled_bounds(const TrialSet& t);

/// Sum-rule fusion of two aligned trial sets. Each modality is min-max
/// normalized (by its pooled scores unless bounds are given) and the
/// normalized scores are added trial by trial.
TrialSet score_level_fuse(const TrialSet& face, const TrialSet& finger,
                          const std::optional<ScoreBounds>& faceBounds = std::nullopt,
                          const std::optional<ScoreBounds>& fingerBounds = std::nullopt);

/// Sweeps `steps` thresholds uniformly over [min, max] of all scores. An
/// impostor is accepted when its score >= threshold; a genuine attempt is
/// rejected when its score < threshold. The reported operating point is the
/// lowest threshold reaching the maximum accuracy.
EvalReport sweep_metrics(const TrialSet& trials, int steps = 1000);

/// One comparison: the enrollment (sample 0) of `dbSubject` against sample
/// `querySample` of `querySubject`. Indices are positions in the manifest.
struct Trial {
    int dbSubject = 0;
    int querySubject = 0;
    int querySample = 0;
    bool genuine = false;
};

struct TrialPlan {
    std::vector<Trial> genuine;
    std::vector<Trial> impostor;
};

/// Verification protocol over S subjects with N samples each. Genuine:
/// samples 1..N-1 of each subject against its own enrollment. Impostor: with
/// impostorsPerSubject == 0, each enrollment against sample 0 of every other
/// subject; otherwise that many distinct random (other subject, sample)
/// attacks per subject drawn from `seed`.
TrialPlan plan_trials(int subjects, int samplesPerSubject, int impostorsPerSubject = 0, std::uint64_t seed = 0);

}  // namespace biofuse
