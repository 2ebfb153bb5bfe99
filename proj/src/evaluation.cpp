#include "biofuse/evaluation.hpp"

#include <algorithm>
#include <string>

#include "biofuse/rng.hpp"

namespace biofuse {

double min_max_scale(double v, const ScoreBounds& b) {
    const double range = b.hi - b.lo;
    return range > 0.0 ? (v - b.lo) / range : 0.0;
}

ScoreBounds pooled_bounds(const TrialSet& t) {
    if (t.genuine.empty() && t.impostor.empty()) return {};
    double lo = t.genuine.empty() ? t.impostor.front() : t.genuine.front();
    double hi = lo;
    for (double v : t.genuine) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : t.impostor) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

TrialSet score_level_fuse(const TrialSet& face, const TrialSet& finger, const std::optional<ScoreBounds>& faceBounds,
                          const std::optional<ScoreBounds>& fingerBounds) {
    if (face.genuine.size() != finger.genuine.size() || face.impostor.size() != finger.impostor.size()) {
        throw Error(ErrorCode::Alignment, "score fusion: trial sets differ in size (" +
                                              std::to_string(face.genuine.size()) + "/" +
                                              std::to_string(face.impostor.size()) + " vs " +
                                              std::to_string(finger.genuine.size()) + "/" +
                                              std::to_string(finger.impostor.size()) + ")");
    }
    const ScoreBounds fb = faceBounds.value_or(pooled_bounds(face));
    const ScoreBounds gb = fingerBounds.value_or(pooled_bounds(finger));
    TrialSet out;
    out.label = face.label + "+" + finger.label;
    out.genuine.reserve(face.genuine.size());
    out.impostor.reserve(face.impostor.size());
    for (std::size_t i = 0; i < face.genuine.size(); ++i) {
        out.genuine.push_back(min_max_scale(face.genuine[i], fb) + min_max_scale(finger.genuine[i], gb));
    }
    for (std::size_t i = 0; i < face.impostor.size(); ++i) {
        out.impostor.push_back(min_max_scale(face.impostor[i], fb) + min_max_scale(finger.impostor[i], gb));
    }
    return out;
}

EvalReport sweep_metrics(const TrialSet& trials, int steps) {
    if (trials.genuine.empty() || trials.impostor.empty()) {
        throw Error(ErrorCode::EmptyTrials, "sweep_metrics: '" + trials.label + "' needs genuine and impostor scores");
    }
    if (steps < 2) throw Error(ErrorCode::InvalidArgument, "sweep_metrics: steps must be >= 2");

    std::vector<double> genuine = trials.genuine;
    std::vector<double> impostor = trials.impostor;
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());
    const double lo = std::min(genuine.front(), impostor.front());
    const double hi = std::max(genuine.back(), impostor.back());

    EvalReport report;
    report.label = trials.label;
    report.genuineCount = genuine.size();
    report.impostorCount = impostor.size();
    report.roc.reserve(static_cast<std::size_t>(steps));
    report.accuracy = -1.0;
    const double ng = static_cast<double>(genuine.size());
    const double ni = static_cast<double>(impostor.size());
    for (int i = 0; i < steps; ++i) {
        const double tau = i == steps - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
        const auto rejected = std::lower_bound(genuine.begin(), genuine.end(), tau) - genuine.begin();
        const auto accepted = impostor.end() - std::lower_bound(impostor.begin(), impostor.end(), tau);
        RocPoint p{tau, 100.0 * static_cast<double>(accepted) / ni, 100.0 * static_cast<double>(rejected) / ng};
        const double acc = 100.0 * (1.0 - (p.far + p.frr) / 200.0);
        if (acc > report.accuracy) {
            report.accuracy = acc;
            report.threshold = tau;
            report.far = p.far;
            report.frr = p.frr;
        }
        report.roc.push_back(p);
    }
    return report;
}

TrialPlan plan_trials(int subjects, int samplesPerSubject, int impostorsPerSubject, std::uint64_t seed) {
    if (subjects < 2) throw Error(ErrorCode::Manifest, "protocol needs at least 2 subjects");
    if (samplesPerSubject < 2) throw Error(ErrorCode::Manifest, "protocol needs at least 2 samples per subject");
    if (impostorsPerSubject < 0) throw Error(ErrorCode::InvalidArgument, "impostors per subject must be >= 0");
    const int pool = (subjects - 1) * samplesPerSubject;
    if (impostorsPerSubject > pool) {
        throw Error(ErrorCode::InvalidArgument, "impostors per subject exceeds the " + std::to_string(pool) +
                                                    " available cross-subject samples");
    }
    TrialPlan plan;
    plan.genuine.reserve(static_cast<std::size_t>(subjects) * (samplesPerSubject - 1));
    for (int s = 0; s < subjects; ++s) {
        for (int k = 1; k < samplesPerSubject; ++k) plan.genuine.push_back({s, s, k, true});
    }
    for (int s = 0; s < subjects; ++s) {
        if (impostorsPerSubject == 0) {
            for (int t = 0; t < subjects; ++t) {
                if (t != s) plan.impostor.push_back({s, t, 0, false});
            }
            continue;
        }
        // partial Fisher-Yates over the (other subject, sample) pool
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        std::vector<int> slots(static_cast<std::size_t>(pool));
        for (int i = 0; i < pool; ++i) slots[i] = i;
        for (int i = 0; i < impostorsPerSubject; ++i) {
            const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(pool - i)));
            std::swap(slots[i], slots[j]);
        }
        std::vector<int> chosen(slots.begin(), slots.begin() + impostorsPerSubject);
        std::sort(chosen.begin(), chosen.end());
        for (int slot : chosen) {
            int t = slot / samplesPerSubject;
            if (t >= s) ++t;  // skip the subject itself
            plan.impostor.push_back({s, t, slot % samplesPerSubject, false});
        }
    }
    return plan;
}

}  // namespace biofuse
