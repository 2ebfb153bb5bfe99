#include "biofuse/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "biofuse/rng.hpp"

namespace biofuse {

namespace {

double dist3(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double dist3_sq(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
}

std::vector<Vec3> compute_centroids(std::span<const Vec3> points, std::span<const int> assignment, int k) {
    std::vector<Vec3> sums(static_cast<std::size_t>(k), Vec3{0, 0, 0});
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& s = sums[static_cast<std::size_t>(assignment[i])];
        for (int d = 0; d < 3; ++d) s[d] += points[i][d];
        ++counts[static_cast<std::size_t>(assignment[i])];
    }
    for (int c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        for (int d = 0; d < 3; ++d) sums[c][d] /= counts[c];
    }
    return sums;
}

}  // namespace

Template concatenate(const Template& face, const Template& finger) {
    require_descriptors(face, "concatenate (face)");
    require_descriptors(finger, "concatenate (finger)");
    Template out;
    out.kind = TemplateKind::Fused;
    out.points.reserve(face.points.size() + finger.points.size());
    out.points.insert(out.points.end(), face.points.begin(), face.points.end());
    out.points.insert(out.points.end(), finger.points.begin(), finger.points.end());
    out.landmarks = face.landmarks;
    out.referencePoint = finger.referencePoint;
    out.dpi = finger.dpi ? finger.dpi : face.dpi;
    return out;
}

ClusteringQuality pbm_index(std::span<const Vec3> points, std::span<const int> assignment,
                            std::span<const Vec3> centroids) {
    const int k = static_cast<int>(centroids.size());
    if (k < 2) throw Error(ErrorCode::DegenerateClustering, "PBM index needs k >= 2");
    if (assignment.size() != points.size()) {
        throw Error(ErrorCode::InvalidArgument, "PBM index: assignment size differs from point count");
    }
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int a : assignment) {
        if (a < 0 || a >= k) throw Error(ErrorCode::InvalidArgument, "PBM index: label out of range");
        ++sizes[static_cast<std::size_t>(a)];
    }
    for (int c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
            throw Error(ErrorCode::DegenerateClustering, "PBM index: cluster " + std::to_string(c) + " is empty");
        }
    }

    Vec3 global{0, 0, 0};
    for (const auto& p : points) {
        for (int d = 0; d < 3; ++d) global[d] += p[d];
    }
    for (int d = 0; d < 3; ++d) global[d] /= static_cast<double>(points.size());

    ClusteringQuality q;
    q.k = k;
    for (std::size_t i = 0; i < points.size(); ++i) {
        q.e1 += dist3(points[i], global);
        q.ek += dist3(points[i], centroids[static_cast<std::size_t>(assignment[i])]);
    }
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) q.dk = std::max(q.dk, dist3(centroids[a], centroids[b]));
    }
    if (q.ek == 0.0) {
        q.pbm = std::numeric_limits<double>::infinity();
    } else {
        const double inner = (1.0 / k) * (q.e1 / q.ek) * q.dk;
        q.pbm = inner * inner;
    }
    return q;
}

KMeansResult kmeans(std::span<const Vec3> points, int k, std::uint64_t seed, int maxIterations) {
    const std::size_t n = points.size();
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw Error(ErrorCode::InvalidArgument,
                    "kmeans: k = " + std::to_string(k) + " invalid for " + std::to_string(n) + " points");
    }

    // farthest-point seeding
    Rng rng(seed);
    std::vector<Vec3> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    centroids.push_back(points[rng.below(n)]);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centroids.size() < static_cast<std::size_t>(k)) {
        std::size_t best = 0;
        double bestD = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], dist3_sq(points[i], centroids.back()));
            if (nearest[i] > bestD) {
                bestD = nearest[i];
                best = i;
            }
        }
        centroids.push_back(points[best]);
    }

    KMeansResult result;
    result.assignment.assign(n, -1);
    std::vector<int> next(n);
    for (int iter = 0; iter < maxIterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double bestD = dist3_sq(points[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = dist3_sq(points[i], centroids[c]);
                if (d < bestD) {
                    bestD = d;
                    best = c;
                }
            }
            next[i] = best;
        }
        // refill empty clusters with the point farthest from its centre
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (int a : next) ++sizes[static_cast<std::size_t>(a)];
        for (int c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far = n;
            double farD = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(next[i])] < 2) continue;
                const double d = dist3_sq(points[i], centroids[static_cast<std::size_t>(next[i])]);
                if (d > farD) {
                    farD = d;
                    far = i;
                }
            }
            --sizes[static_cast<std::size_t>(next[far])];
            next[far] = c;
            sizes[c] = 1;
        }
        result.iterations = iter + 1;
        const bool stable = next == result.assignment;
        result.assignment = next;
        centroids = compute_centroids(points, result.assignment, k);
        if (stable) break;
    }
    result.centroids = std::move(centroids);
    return result;
}

KMeansReduction kmeans_reduce_detailed(const Template& fused, const KMeansOptions& options) {
    const std::size_t n = fused.points.size();
    if (n < 3) throw Error(ErrorCode::TooFewPoints, "kmeans_reduce needs at least 3 points, got " + std::to_string(n));
    KRange range = options.kRange.value_or(KRange{2, std::min(static_cast<int>(n) - 1, 30)});
    range.max = std::min(range.max, static_cast<int>(n));
    range.min = std::max(range.min, 2);
    if (range.min > range.max) {
        throw Error(ErrorCode::InvalidArgument, "kmeans_reduce: empty k range for " + std::to_string(n) + " points");
    }

    std::vector<Vec3> features(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = fused.points[i];
        features[i] = {p.x, p.y, options.thetaWeight * p.theta};
    }

    KMeansReduction out;
    std::optional<KMeansResult> best;
    ClusteringQuality bestQ;
    for (int k = range.min; k <= range.max; ++k) {
        KMeansResult r = kmeans(features, k, options.seed, options.maxIterations);
        const ClusteringQuality q = pbm_index(features, r.assignment, r.centroids);
        out.sweep.push_back(q);
        bool better = false;
        if (!best) {
            better = true;
        } else if (std::isinf(bestQ.pbm)) {
            better = !std::isinf(q.pbm);  // a finite index beats the degenerate sentinel
        } else if (!std::isinf(q.pbm)) {
            better = q.pbm > bestQ.pbm;
        }
        if (better) {
            best = std::move(r);
            bestQ = q;
        }
    }
    out.quality = bestQ;

    // clusters are emitted in order of their first member
    const int k = bestQ.k;
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(best->assignment[i])].push_back(i);
    std::sort(members.begin(), members.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    Template reduced = fused;
    reduced.points.clear();
    for (const auto& group : members) {
        FeaturePoint c;
        double sx = 0, sy = 0, st = 0;
        std::size_t faces = 0;
        std::size_t withDescriptor = 0;
        Descriptor acc{};
        for (std::size_t i : group) {
            const auto& p = fused.points[i];
            sx += p.x;
            sy += p.y;
            st += p.theta;
            if (p.modality == Modality::Face) ++faces;
            if (p.descriptor) {
                ++withDescriptor;
                for (std::size_t d = 0; d < kDescriptorSize; ++d) acc[d] += (*p.descriptor)[d];
            }
        }
        const double m = static_cast<double>(group.size());
        if (group.size() == 1) {
            c = fused.points[group.front()];
        } else {
            c.x = sx / m;
            c.y = sy / m;
            c.theta = wrap_degrees(st / m);
            if (withDescriptor == group.size()) {
                for (double& v : acc) v /= m;
                c.descriptor = acc;
            } else if (withDescriptor != 0) {
                throw Error(ErrorCode::IncompatibleTemplate, "kmeans_reduce: cluster mixes points with and without descriptors");
            }
            // majority modality; ties go to the first member's modality
            if (2 * faces > group.size()) {
                c.modality = Modality::Face;
            } else if (2 * faces < group.size()) {
                c.modality = Modality::Finger;
            } else {
                c.modality = fused.points[group.front()].modality;
            }
        }
        reduced.points.push_back(std::move(c));
    }
    out.reduced = std::move(reduced);
    return out;
}

Template kmeans_reduce(const Template& fused, KRange kRange, std::uint64_t seed) {
    KMeansOptions options;
    options.kRange = kRange;
    options.seed = seed;
    return kmeans_reduce_detailed(fused, options).reduced;
}

Template kmeans_reduce(const Template& fused, const KMeansOptions& options) {
    return kmeans_reduce_detailed(fused, options).reduced;
}

namespace {

Template eliminate(const Template& t, double faceRadius, double fingerRadius, bool perModality) {
    if (!(faceRadius > 0.0) || !(fingerRadius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "neighborhood radius must be positive");
    }
    Template out = t;
    out.points.clear();
    for (const auto& p : t.points) {
        const double radius = p.modality == Modality::Face ? faceRadius : fingerRadius;
        bool keep = true;
        for (const auto& kept : out.points) {
            if (perModality && kept.modality != p.modality) continue;
            if (spatial_distance(kept, p) < radius) {
                keep = false;
                break;
            }
        }
        if (keep) out.points.push_back(p);
    }
    return out;
}

}  // namespace

Template neighborhood_eliminate(const Template& t, double radius) {
    return eliminate(t, radius, radius, false);
}

Template neighborhood_eliminate(const Template& t, double faceRadius, double fingerRadius) {
    return eliminate(t, faceRadius, fingerRadius, true);
}

void RegionSpec::validate() const {
    if (!(faceRadius > 0.0) || !(fingerRadius > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "region radii must be positive");
    }
}

Template region_select(const Template& t, const RegionSpec& spec) {
    spec.validate();
    const bool needFace = t.kind != TemplateKind::Finger;
    const bool needFinger = t.kind != TemplateKind::Face;
    if (needFace && t.landmarks.empty()) {
        throw Error(ErrorCode::MissingMetadata, "region_select: template has no face landmarks");
    }
    if (needFinger && !t.referencePoint) {
        throw Error(ErrorCode::MissingMetadata, "region_select: template has no reference point");
    }
    Template out = t;
    out.points.clear();
    for (const auto& p : t.points) {
        bool keep = false;
        if (p.modality == Modality::Face) {
            if (t.landmarks.empty()) {
                throw Error(ErrorCode::MissingMetadata, "region_select: face point without landmarks");
            }
            for (const auto& [key, lm] : t.landmarks) {
                if (std::hypot(p.x - lm.x, p.y - lm.y) <= spec.faceRadius) {
                    keep = true;
                    break;
                }
            }
        } else {
            if (!t.referencePoint) {
                throw Error(ErrorCode::MissingMetadata, "region_select: finger point without reference point");
            }
            keep = std::hypot(p.x - t.referencePoint->x, p.y - t.referencePoint->y) <= spec.fingerRadius;
        }
        if (keep) out.points.push_back(p);
    }
    return out;
}

}  // namespace biofuse
