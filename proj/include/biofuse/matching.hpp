#pragma once

#include <array>
#include <utility>
#include <vector>

#include "biofuse/core.hpp"
#include "biofuse/delaunay.hpp"

namespace biofuse {

enum class MatcherKind { PointPattern, Delaunay };

std::string_view to_string(MatcherKind m);

struct MatchResult {
    std::vector<std::pair<int, int>> pairs;  // (db index, query index)
    double score = 0.0;
    MatcherKind matcher = MatcherKind::PointPattern;
    bool degenerate = false;  // Delaunay only: a side could not be triangulated
};

/// Point-pattern matcher. A (db, query) pair is a candidate when the spatial,
/// direction and descriptor distances are all within threshold; pairs are
/// then taken greedily by ascending descriptor distance, ties broken by db
/// then query index. When either point has no descriptor (raw minutiae) the
/// descriptor test is skipped and candidates are ordered by spatial distance.
/// Score = 2 * pairs / (|db| + |query|).
MatchResult point_pattern_match(const Template& db, const Template& query, const MatchThresholds& th = {});

struct TriangleFeature {
    double alphaMin = 0.0;  // degrees
    double alphaMed = 0.0;  // degrees
    double longest = 0.0;   // L, pixels
    std::array<double, 3> thetas{};  // vertex orientations, ascending
    double r12 = 0.0;  // l1 / l2
    double r23 = 0.0;  // l2 / l3
};

TriangleFeature triangle_features(const Template& t, const Triangle& tri);

struct TriangleThresholds {
    double dAlpha = 3.0;
    double dL = 6.0;
    double dTheta = 3.0;
    double dRatio = 0.05;
    bool oneToOne = true;  // false counts every passing (db, query) triangle pair

    void validate() const;
};

/// True when every attribute difference is within threshold; `cost` receives
/// the sum of threshold-normalized differences.
bool triangles_correspond(const TriangleFeature& a, const TriangleFeature& b, const TriangleThresholds& th,
                          double* cost = nullptr);

/// Delaunay-triangle matcher. Score = 2 * matched / (|T_db| + |T_query|).
/// Pairs hold triangle indices into the respective triangulations.
MatchResult delaunay_match(const Template& db, const Template& query, const TriangleThresholds& th = {});

/// Triangulation plus features, computed once per template.
struct TriangulatedTemplate {
    std::vector<Triangle> triangles;
    std::vector<TriangleFeature> features;
    bool degenerate = false;
};

TriangulatedTemplate triangulate_features(const Template& t);

MatchResult delaunay_match(const TriangulatedTemplate& db, const TriangulatedTemplate& query,
                           const TriangleThresholds& th = {});

struct MatcherConfig {
    MatcherKind kind = MatcherKind::PointPattern;
    MatchThresholds point;
    TriangleThresholds triangle;
};

/// Single-modality match; both templates must have the same kind.
double monomodal_match(const Template& db, const Template& query, const MatcherConfig& config = {});

}  // namespace biofuse
