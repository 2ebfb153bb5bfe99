#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "biofuse/core.hpp"

namespace biofuse {

/// Face points followed by finger points, tags preserved. The fused template
/// keeps the face landmarks and the finger reference point and dpi.
Template concatenate(const Template& face, const Template& finger);

using Vec3 = std::array<double, 3>;

struct ClusteringQuality {
    int k = 0;
    double pbm = 0.0;
    double e1 = 0.0;
    double ek = 0.0;
    double dk = 0.0;
};

/// PBM validity index ((1/k) * (E1/Ek) * Dk)^2 in the given feature space.
/// Ek == 0 yields +infinity.
ClusteringQuality pbm_index(std::span<const Vec3> points, std::span<const int> assignment,
                            std::span<const Vec3> centroids);

struct KMeansResult {
    std::vector<int> assignment;
    std::vector<Vec3> centroids;
    int iterations = 0;
};

/// Lloyd's k-means with deterministic farthest-point seeding. The first
/// centre is picked by `seed`; clusters never end up empty.
KMeansResult kmeans(std::span<const Vec3> points, int k, std::uint64_t seed, int maxIterations = 100);

struct KRange {
    int min = 2;
    int max = 30;
};

struct KMeansOptions {
    std::optional<KRange> kRange;  // default 2 .. min(n - 1, 30)
    std::uint64_t seed = 0;
    double thetaWeight = 1.0;
    int maxIterations = 100;
};

struct KMeansReduction {
    Template reduced;
    ClusteringQuality quality;
    std::vector<ClusteringQuality> sweep;
};

/// Clusters (x, y, w * theta) for every k in range, keeps the k with the
/// highest PBM and replaces each cluster by its centroid. Centroid
/// descriptors are the component-wise mean of the members' descriptors and
/// the modality is the members' majority.
KMeansReduction kmeans_reduce_detailed(const Template& fused, const KMeansOptions& options);
Template kmeans_reduce(const Template& fused, KRange kRange, std::uint64_t seed);
Template kmeans_reduce(const Template& fused, const KMeansOptions& options = {});

/// Sequential sweep in input order: a point survives iff no already kept point
/// lies strictly closer than `radius`.
Template neighborhood_eliminate(const Template& t, double radius);

/// Per-modality neighborhood elimination (face radius for face points,
/// finger radius for finger points). Points of different modality never
/// eliminate each other.
Template neighborhood_eliminate(const Template& t, double faceRadius, double fingerRadius);

struct RegionSpec {
    double faceRadius = 85.0;
    double fingerRadius = 120.0;

    void validate() const;
};

/// Keeps face points within faceRadius of any landmark and finger points
/// within fingerRadius of the reference point.
Template region_select(const Template& t, const RegionSpec& spec = {});

}  // namespace biofuse
