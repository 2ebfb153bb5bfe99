#pragma once

// Random generators and brute-force oracles shared by the test binaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "biofuse/compat.hpp"
#include "biofuse/core.hpp"
#include "biofuse/delaunay.hpp"
#include "biofuse/matching.hpp"
#include "biofuse/reduction.hpp"
#include "biofuse/rng.hpp"

namespace testsupport {

using biofuse::Descriptor;
using biofuse::FeaturePoint;
using biofuse::Modality;
using biofuse::Point2;
using biofuse::Rng;
using biofuse::Template;
using biofuse::TemplateKind;
using biofuse::Vec3;

inline Descriptor random_descriptor(Rng& rng, double lo = 0.0, double hi = 1.0) {
    Descriptor d{};
    for (auto& v : d) v = rng.uniform(lo, hi);
    return d;
}

inline FeaturePoint random_point(Rng& rng, double extent, Modality m = Modality::Face, bool withDescriptor = true) {
    FeaturePoint p;
    p.x = rng.uniform(0.0, extent);
    p.y = rng.uniform(0.0, extent);
    p.theta = rng.uniform(0.0, 360.0);
    p.modality = m;
    if (withDescriptor) p.descriptor = random_descriptor(rng);
    return p;
}

inline Template random_template(Rng& rng, int n, double extent, TemplateKind kind = TemplateKind::Face,
                                bool withDescriptor = true) {
    Template t;
    t.kind = kind;
    const Modality m = kind == TemplateKind::Finger ? Modality::Finger : Modality::Face;
    for (int i = 0; i < n; ++i) t.points.push_back(random_point(rng, extent, m, withDescriptor));
    return t;
}

/// Copy with every attribute nudged by less than the given bounds.
inline Template jittered(const Template& t, Rng& rng, double spatial, double angle, double descriptor) {
    Template out = t;
    for (auto& p : out.points) {
        const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const double r = rng.uniform(0.0, spatial);
        p.x += r * std::cos(a);
        p.y += r * std::sin(a);
        p.theta = biofuse::wrap_degrees(p.theta + rng.uniform(-angle, angle));
        if (p.descriptor) {
            // spread the budget so the L2 norm stays below `descriptor`
            const double per = descriptor / std::sqrt(static_cast<double>(biofuse::kDescriptorSize));
            for (auto& v : *p.descriptor) v += rng.uniform(-per, per);
        }
    }
    return out;
}

inline std::vector<Point2> random_points(Rng& rng, int n, double extent) {
    std::vector<Point2> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = {rng.uniform(0.0, extent), rng.uniform(0.0, extent)};
    return pts;
}

inline void shuffle(std::vector<FeaturePoint>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// --- assignment oracle -------------------------------------------------------

/// Maximum one-to-one matching size of a bipartite relation with at most 20
/// right-hand vertices, by dynamic programming over subsets of used columns.
inline int max_assignment(const std::vector<std::vector<bool>>& allowed, int cols) {
    const std::size_t states = std::size_t{1} << cols;
    std::vector<int> best(states, -1);
    best[0] = 0;
    for (const auto& row : allowed) {
        std::vector<int> next = best;  // row left unmatched
        for (std::size_t mask = 0; mask < states; ++mask) {
            if (best[mask] < 0) continue;
            for (int c = 0; c < cols; ++c) {
                if (!row[static_cast<std::size_t>(c)] || (mask >> c) & 1u) continue;
                const std::size_t m2 = mask | (std::size_t{1} << c);
                next[m2] = std::max(next[m2], best[mask] + 1);
            }
        }
        best = std::move(next);
    }
    return *std::max_element(best.begin(), best.end());
}

/// Candidate relation of the point matcher written from the three distance
/// definitions.
inline std::vector<std::vector<bool>> point_candidates(const Template& db, const Template& q,
                                                       const biofuse::MatchThresholds& th) {
    std::vector<std::vector<bool>> rel(db.points.size(), std::vector<bool>(q.points.size(), false));
    for (std::size_t i = 0; i < db.points.size(); ++i) {
        for (std::size_t j = 0; j < q.points.size(); ++j) {
            const auto& a = db.points[i];
            const auto& b = q.points[j];
            const double sd = std::hypot(a.x - b.x, a.y - b.y);
            double dd = std::fabs(a.theta - b.theta);
            dd = std::min(dd, 360.0 - dd);
            bool ok = sd <= th.r0 && dd <= th.theta0;
            if (ok && a.descriptor && b.descriptor) {
                double s = 0.0;
                for (std::size_t k = 0; k < biofuse::kDescriptorSize; ++k) {
                    const double d = (*a.descriptor)[k] - (*b.descriptor)[k];
                    s += d * d;
                }
                ok = std::sqrt(s) <= th.k0;
            }
            rel[i][j] = ok;
        }
    }
    return rel;
}

/// Seeded instance with at most 8 points per side: the query is a shuffled,
/// jittered copy of the db with jitter below every threshold.
inline std::pair<Template, Template> jitter_instance(Rng& rng) {
    const int n = 1 + static_cast<int>(rng.below(8));
    Template db = random_template(rng, n, 120.0);
    Template q = jittered(db, rng, 1.5, 1.0, 0.5);
    shuffle(q.points, rng);
    return {std::move(db), std::move(q)};
}

/// Instance without the below-threshold guarantee. Half the draws perturb a
/// copy of the db by up to three times each threshold, drop points and add
/// unrelated ones; the other half draw both sides independently in a window
/// of 10 to 60 px with an orientation band of 5 to 60 degrees.
inline std::pair<Template, Template> arbitrary_instance(Rng& rng) {
    if (rng.bernoulli(0.5)) {
        const int n = 1 + static_cast<int>(rng.below(8));
        Template db = random_template(rng, n, 40.0);
        Template q = jittered(db, rng, 12.0, 9.0, 18.0);
        std::vector<FeaturePoint> kept;
        for (const auto& p : q.points)
            if (!rng.bernoulli(0.2)) kept.push_back(p);
        while (kept.size() < 8 && rng.bernoulli(0.3)) kept.push_back(random_point(rng, 40.0));
        q.points = std::move(kept);
        shuffle(q.points, rng);
        return {std::move(db), std::move(q)};
    }
    const double window = rng.uniform(10.0, 60.0);
    const double band = rng.uniform(5.0, 60.0);
    auto side = [&] {
        Template t = random_template(rng, 1 + static_cast<int>(rng.below(8)), window);
        for (auto& p : t.points) p.theta = rng.uniform(0.0, band);
        return t;
    };
    Template db = side();
    Template q = side();
    return {std::move(db), std::move(q)};
}

/// Crowded instance: both sides drawn independently into a 12 px window with
/// a 6 degree orientation band, so the candidate relation is dense.
inline std::pair<Template, Template> crowded_instance(Rng& rng) {
    auto side = [&rng] {
        Template t = random_template(rng, 1 + static_cast<int>(rng.below(8)), 12.0);
        for (auto& p : t.points) p.theta = rng.uniform(0.0, 6.0);
        return t;
    };
    Template db = side();
    Template q = side();
    return {std::move(db), std::move(q)};
}

// --- geometry oracles ----------------------------------------------------------

inline double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

/// Number of points on the convex hull boundary (monotone chain, collinear
/// boundary points included).
inline int hull_count(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return static_cast<int>(n);
    std::vector<Point2> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) < 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) < 0) --k;
        h[k++] = pts[i];
    }
    return static_cast<int>(k - 1);
}

struct Circle {
    Point2 centre;
    double radius = 0.0;
};

inline Circle circumcircle(Point2 a, Point2 b, Point2 c) {
    const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    const double a2 = a.x * a.x + a.y * a.y;
    const double b2 = b.x * b.x + b.y * b.y;
    const double c2 = c.x * c.x + c.y * c.y;
    const Point2 o{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
                   (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
    return {o, std::hypot(a.x - o.x, a.y - o.y)};
}

/// Index of a point strictly inside some triangle's circumcircle (beyond a
/// tolerance relative to the radius), or -1.
inline int circumcircle_violation(const std::vector<Point2>& pts, const std::vector<biofuse::Triangle>& tris,
                                  double relTol = 1e-9) {
    for (const auto& t : tris) {
        const Circle c = circumcircle(pts[t[0]], pts[t[1]], pts[t[2]]);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (static_cast<int>(i) == t[0] || static_cast<int>(i) == t[1] || static_cast<int>(i) == t[2]) continue;
            const double d = std::hypot(pts[i].x - c.centre.x, pts[i].y - c.centre.y);
            if (d < c.radius * (1.0 - relTol)) return static_cast<int>(i);
        }
    }
    return -1;
}

/// Triangle attributes computed from the law of cosines, independent of the
/// library's feature code.
struct OracleTriangle {
    double aMin, aMed, longest, r12, r23;
    std::array<double, 3> thetas;
};

inline OracleTriangle oracle_triangle(const Template& t, const biofuse::Triangle& tri) {
    const auto& a = t.points[tri[0]];
    const auto& b = t.points[tri[1]];
    const auto& c = t.points[tri[2]];
    std::array<double, 3> len{std::hypot(b.x - c.x, b.y - c.y), std::hypot(a.x - c.x, a.y - c.y),
                              std::hypot(a.x - b.x, a.y - b.y)};
    std::array<double, 3> ang{};
    for (int i = 0; i < 3; ++i) {
        const double opp = len[i];
        const double s1 = len[(i + 1) % 3];
        const double s2 = len[(i + 2) % 3];
        ang[i] = std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2), -1.0, 1.0)) * 180.0 /
                 std::numbers::pi;
    }
    std::sort(len.begin(), len.end());
    std::sort(ang.begin(), ang.end());
    std::array<double, 3> th{a.theta, b.theta, c.theta};
    std::sort(th.begin(), th.end());
    return {ang[0], ang[1], len[2], len[0] / len[1], len[1] / len[2], th};
}

inline bool oracle_correspond(const OracleTriangle& a, const OracleTriangle& b, const biofuse::TriangleThresholds& th) {
    auto dir = [](double x, double y) {
        const double d = std::fabs(x - y);
        return std::min(d, 360.0 - d);
    };
    bool ok = std::fabs(a.aMin - b.aMin) <= th.dAlpha && std::fabs(a.aMed - b.aMed) <= th.dAlpha &&
              std::fabs(a.longest - b.longest) <= th.dL && std::fabs(a.r12 - b.r12) <= th.dRatio &&
              std::fabs(a.r23 - b.r23) <= th.dRatio;
    for (int i = 0; i < 3; ++i) ok = ok && dir(a.thetas[i], b.thetas[i]) <= th.dTheta;
    return ok;
}

inline std::vector<std::vector<bool>> triangle_candidates(const Template& db, const std::vector<biofuse::Triangle>& tdb,
                                                          const Template& q, const std::vector<biofuse::Triangle>& tq,
                                                          const biofuse::TriangleThresholds& th) {
    std::vector<std::vector<bool>> rel(tdb.size(), std::vector<bool>(tq.size(), false));
    for (std::size_t i = 0; i < tdb.size(); ++i) {
        const OracleTriangle a = oracle_triangle(db, tdb[i]);
        for (std::size_t j = 0; j < tq.size(); ++j) rel[i][j] = oracle_correspond(a, oracle_triangle(q, tq[j]), th);
    }
    return rel;
}

// --- clustering oracle ---------------------------------------------------------

inline double dist3(const Vec3& a, const Vec3& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]));
}

/// PBM written straight from ((1/k) * (E1/Ek) * Dk)^2 with centroids
/// recomputed from the assignment.
inline double pbm_direct(const std::vector<Vec3>& pts, const std::vector<int>& assign, int k) {
    Vec3 g{0, 0, 0};
    for (const auto& p : pts)
        for (int d = 0; d < 3; ++d) g[d] += p[d] / static_cast<double>(pts.size());
    std::vector<Vec3> c(static_cast<std::size_t>(k), Vec3{0, 0, 0});
    std::vector<int> n(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ++n[assign[i]];
        for (int d = 0; d < 3; ++d) c[assign[i]][d] += pts[i][d];
    }
    for (int j = 0; j < k; ++j)
        for (int d = 0; d < 3; ++d) c[j][d] /= n[j];
    double e1 = 0.0;
    double ek = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        e1 += dist3(pts[i], g);
        ek += dist3(pts[i], c[assign[i]]);
    }
    double dk = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) dk = std::max(dk, dist3(c[a], c[b]));
    if (ek == 0.0) return std::numeric_limits<double>::infinity();
    const double v = (1.0 / k) * (e1 / ek) * dk;
    return v * v;
}

inline std::vector<Vec3> centroids_of(const std::vector<Vec3>& pts, const std::vector<int>& assign, int k) {
    std::vector<Vec3> c(static_cast<std::size_t>(k), Vec3{0, 0, 0});
    std::vector<int> n(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ++n[assign[i]];
        for (int d = 0; d < 3; ++d) c[assign[i]][d] += pts[i][d];
    }
    for (int j = 0; j < k; ++j)
        for (int d = 0; d < 3; ++d) c[j][d] /= n[j];
    return c;
}

/// Random clustering of n points into k non-empty clusters.
inline std::vector<int> random_assignment(Rng& rng, int n, int k) {
    std::vector<int> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[i] = i < k ? i : static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    for (std::size_t i = a.size(); i > 1; --i) std::swap(a[i - 1], a[rng.below(i)]);
    return a;
}

// --- images --------------------------------------------------------------------

/// Dark filled rectangle (half sizes hw, hh) rotated by `deg` about the image
/// centre, on a white background.
inline biofuse::GrayImage rotated_rectangle(int w, int h, double hw, double hh, double deg) {
    biofuse::GrayImage img(w, h, 255);
    const double cx = (w - 1) / 2.0;
    const double cy = (h - 1) / 2.0;
    const double c = std::cos(deg * std::numbers::pi / 180.0);
    const double s = std::sin(deg * std::numbers::pi / 180.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double u = (x - cx) * c + (y - cy) * s;
            const double v = -(x - cx) * s + (y - cy) * c;
            if (std::fabs(u) <= hw && std::fabs(v) <= hh) img.at(x, y) = 40;
        }
    }
    return img;
}

/// Sinusoidal grating whose intensity varies along direction `deg`.
inline biofuse::GrayImage grating(int size, double deg, double wavelength) {
    biofuse::GrayImage img(size, size, 0);
    const double c = std::cos(deg * std::numbers::pi / 180.0);
    const double s = std::sin(deg * std::numbers::pi / 180.0);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double v = 127.5 + 120.0 * std::cos(2.0 * std::numbers::pi * (x * c + y * s) / wavelength);
            img.at(x, y) = static_cast<std::uint8_t>(std::lround(v));
        }
    }
    return img;
}

/// Orientation index whose channels carry the largest |response| at the
/// given scale.
inline std::size_t strongest_orientation(const Descriptor& d, const biofuse::GaborBankSpec& spec, std::size_t scale) {
    std::size_t best = 0;
    double bestMag = -1.0;
    for (std::size_t o = 0; o < spec.orientations.size(); ++o) {
        double mag = 0.0;
        for (std::size_t ph = 0; ph < spec.phases.size(); ++ph) {
            const std::size_t ch = biofuse::GaborBank::channel_index(o, scale, ph, static_cast<std::size_t>(spec.scaleCount),
                                                                     spec.phases.size());
            mag = std::max(mag, std::fabs(d[ch]));
        }
        if (mag > bestMag) {
            bestMag = mag;
            best = o;
        }
    }
    return best;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("biofuse_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testsupport
