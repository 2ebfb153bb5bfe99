#include "biofuse/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>

namespace biofuse {

namespace {

struct Candidate {
    double cost;
    int db;
    int query;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
    return std::tie(a.cost, a.db, a.query) < std::tie(b.cost, b.db, b.query);
}

std::vector<std::pair<int, int>> greedy_assign(std::vector<Candidate>& candidates, std::size_t dbCount,
                                               std::size_t queryCount) {
    std::sort(candidates.begin(), candidates.end(), candidate_less);
    std::vector<char> dbUsed(dbCount, 0), queryUsed(queryCount, 0);
    std::vector<std::pair<int, int>> pairs;
    for (const auto& c : candidates) {
        if (dbUsed[c.db] || queryUsed[c.query]) continue;
        dbUsed[c.db] = 1;
        queryUsed[c.query] = 1;
        pairs.emplace_back(c.db, c.query);
    }
    return pairs;
}

double pair_score(std::size_t matched, std::size_t a, std::size_t b) {
    if (a + b == 0) return 0.0;
    return std::clamp(2.0 * static_cast<double>(matched) / static_cast<double>(a + b), 0.0, 1.0);
}

TriangleFeature features_from(const Point2& p0, const Point2& p1, const Point2& p2, std::array<double, 3> thetas) {
    const double a = std::hypot(p1.x - p2.x, p1.y - p2.y);  // opposite p0
    const double b = std::hypot(p0.x - p2.x, p0.y - p2.y);  // opposite p1
    const double c = std::hypot(p0.x - p1.x, p0.y - p1.y);  // opposite p2
    std::array<double, 3> sides{a, b, c};
    std::sort(sides.begin(), sides.end());
    const double cross = (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);
    if (sides[0] <= 0.0 || std::fabs(cross) <= 1e-12 * sides[2] * sides[2]) {
        throw Error(ErrorCode::DegenerateTriangle, "triangle vertices are collinear or coincident");
    }
    const auto angle = [](double opposite, double s1, double s2) {
        const double cosv = std::clamp((s1 * s1 + s2 * s2 - opposite * opposite) / (2.0 * s1 * s2), -1.0, 1.0);
        return std::acos(cosv) * 180.0 / std::numbers::pi;
    };
    std::array<double, 3> angles{angle(a, b, c), angle(b, a, c), angle(c, a, b)};
    std::sort(angles.begin(), angles.end());
    std::sort(thetas.begin(), thetas.end());

    TriangleFeature f;
    f.alphaMin = angles[0];
    f.alphaMed = angles[1];
    f.longest = sides[2];
    f.thetas = thetas;
    f.r12 = sides[0] / sides[1];
    f.r23 = sides[1] / sides[2];
    return f;
}

}  // namespace

std::string_view to_string(MatcherKind m) {
    return m == MatcherKind::PointPattern ? "point-pattern" : "delaunay";
}

MatchResult point_pattern_match(const Template& db, const Template& query, const MatchThresholds& th) {
    th.validate();
    MatchResult result;
    result.matcher = MatcherKind::PointPattern;
    if (db.points.empty() || query.points.empty()) return result;

    const double r0sq = th.r0 * th.r0;
    std::vector<Candidate> candidates;
    for (int i = 0; i < static_cast<int>(db.points.size()); ++i) {
        const auto& a = db.points[i];
        for (int j = 0; j < static_cast<int>(query.points.size()); ++j) {
            const auto& b = query.points[j];
            const double dx = a.x - b.x;
            const double dy = a.y - b.y;
            const double sdsq = dx * dx + dy * dy;
            if (sdsq > r0sq) continue;
            if (direction_distance(a.theta, b.theta) > th.theta0) continue;
            double cost;
            if (a.descriptor && b.descriptor) {
                cost = descriptor_distance(*a.descriptor, *b.descriptor);
                if (cost > th.k0) continue;
            } else {
                cost = std::sqrt(sdsq);
            }
            candidates.push_back({cost, i, j});
        }
    }
    result.pairs = greedy_assign(candidates, db.points.size(), query.points.size());
    result.score = pair_score(result.pairs.size(), db.points.size(), query.points.size());
    return result;
}

TriangleFeature triangle_features(const Template& t, const Triangle& tri) {
    for (int v : tri) {
        if (v < 0 || v >= static_cast<int>(t.points.size())) {
            throw Error(ErrorCode::InvalidArgument, "triangle vertex index out of range");
        }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
        throw Error(ErrorCode::DegenerateTriangle, "triangle vertices must be distinct");
    }
    const auto& a = t.points[tri[0]];
    const auto& b = t.points[tri[1]];
    const auto& c = t.points[tri[2]];
    return features_from({a.x, a.y}, {b.x, b.y}, {c.x, c.y}, {a.theta, b.theta, c.theta});
}

void TriangleThresholds::validate() const {
    if (!(dAlpha > 0.0) || !(dL > 0.0) || !(dTheta > 0.0) || !(dRatio > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "triangle thresholds must be positive");
    }
}

bool triangles_correspond(const TriangleFeature& a, const TriangleFeature& b, const TriangleThresholds& th,
                          double* cost) {
    const double dMin = std::fabs(a.alphaMin - b.alphaMin);
    const double dMed = std::fabs(a.alphaMed - b.alphaMed);
    const double dL = std::fabs(a.longest - b.longest);
    const double d12 = std::fabs(a.r12 - b.r12);
    const double d23 = std::fabs(a.r23 - b.r23);
    if (dMin > th.dAlpha || dMed > th.dAlpha || dL > th.dL || d12 > th.dRatio || d23 > th.dRatio) return false;
    double thetaCost = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double dt = direction_distance(a.thetas[i], b.thetas[i]);
        if (dt > th.dTheta) return false;
        thetaCost += dt / th.dTheta;
    }
    if (cost) {
        *cost = dMin / th.dAlpha + dMed / th.dAlpha + dL / th.dL + thetaCost + d12 / th.dRatio + d23 / th.dRatio;
    }
    return true;
}

TriangulatedTemplate triangulate_features(const Template& t) {
    TriangulatedTemplate out;
    std::vector<Point2> raw;
    raw.reserve(t.points.size());
    for (const auto& p : t.points) raw.push_back({p.x, p.y});
    try {
        out.triangles = delaunay_triangulate(raw);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateGeometry) throw;
        out.degenerate = true;
        return out;
    }
    // features use the same (duplicate-perturbed) coordinates as the triangulation
    const std::vector<Point2> pts = perturb_duplicates(raw);
    out.features.reserve(out.triangles.size());
    for (const auto& tri : out.triangles) {
        out.features.push_back(features_from(pts[tri[0]], pts[tri[1]], pts[tri[2]],
                                             {t.points[tri[0]].theta, t.points[tri[1]].theta,
                                              t.points[tri[2]].theta}));
    }
    return out;
}

MatchResult delaunay_match(const TriangulatedTemplate& db, const TriangulatedTemplate& query,
                           const TriangleThresholds& th) {
    th.validate();
    MatchResult result;
    result.matcher = MatcherKind::Delaunay;
    if (db.degenerate || query.degenerate) {
        result.degenerate = true;
        return result;
    }
    // query triangles sorted by longest side so each db triangle scans a window
    std::vector<int> order(query.features.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::tie(query.features[a].longest, a) < std::tie(query.features[b].longest, b);
    });
    std::vector<double> sortedL(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) sortedL[i] = query.features[order[i]].longest;

    std::vector<Candidate> candidates;
    for (int i = 0; i < static_cast<int>(db.features.size()); ++i) {
        const auto& f = db.features[i];
        auto it = std::lower_bound(sortedL.begin(), sortedL.end(), f.longest - th.dL);
        for (auto k = static_cast<std::size_t>(it - sortedL.begin()); k < sortedL.size(); ++k) {
            if (sortedL[k] > f.longest + th.dL) break;
            double cost = 0.0;
            if (triangles_correspond(f, query.features[order[k]], th, &cost)) {
                candidates.push_back({cost, i, order[k]});
            }
        }
    }
    if (th.oneToOne) {
        result.pairs = greedy_assign(candidates, db.features.size(), query.features.size());
    } else {
        std::sort(candidates.begin(), candidates.end(), candidate_less);
        for (const auto& c : candidates) result.pairs.emplace_back(c.db, c.query);
    }
    result.score = pair_score(result.pairs.size(), db.features.size(), query.features.size());
    return result;
}

MatchResult delaunay_match(const Template& db, const Template& query, const TriangleThresholds& th) {
    return delaunay_match(triangulate_features(db), triangulate_features(query), th);
}

double monomodal_match(const Template& db, const Template& query, const MatcherConfig& config) {
    if (db.kind != query.kind) {
        throw Error(ErrorCode::KindMismatch, std::string("cannot match ") + std::string(to_string(db.kind)) +
                                                 " against " + std::string(to_string(query.kind)));
    }
    if (config.kind == MatcherKind::PointPattern) return point_pattern_match(db, query, config.point).score;
    return delaunay_match(db, query, config.triangle).score;
}

}  // namespace biofuse
