#include "biofuse/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>

namespace biofuse {

namespace {

struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;  // n[i] is the neighbour across the edge opposite v[i]
};

double orient(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 when d lies inside the circumcircle of the counter-clockwise triangle
// (a, b, c). `permanent` receives the magnitude scale of the determinant.
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d, double& permanent) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double t1 = alift * (bdx * cdy - cdx * bdy);
    const double t2 = blift * (cdx * ady - adx * cdy);
    const double t3 = clift * (adx * bdy - bdx * ady);
    permanent = alift * (std::fabs(bdx * cdy) + std::fabs(cdx * bdy)) +
                blift * (std::fabs(cdx * ady) + std::fabs(adx * cdy)) +
                clift * (std::fabs(adx * bdy) + std::fabs(bdx * ady));
    return t1 + t2 + t3;
}

int local_index_of_neighbor(const Tri& t, int neighbor) {
    for (int i = 0; i < 3; ++i) {
        if (t.n[i] == neighbor) return i;
    }
    return -1;
}

void link_adjacency(std::vector<Tri>& tris, std::size_t vertexCount) {
    std::unordered_map<std::uint64_t, std::pair<int, int>> open;
    open.reserve(tris.size() * 2);
    const auto key = [vertexCount](int a, int b) {
        const auto lo = static_cast<std::uint64_t>(std::min(a, b));
        const auto hi = static_cast<std::uint64_t>(std::max(a, b));
        return lo * vertexCount + hi;
    };
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        for (int i = 0; i < 3; ++i) {
            const int a = tris[t].v[(i + 1) % 3];
            const int b = tris[t].v[(i + 2) % 3];
            const auto k = key(a, b);
            auto it = open.find(k);
            if (it == open.end()) {
                open.emplace(k, std::make_pair(t, i));
            } else {
                const auto [u, j] = it->second;
                tris[t].n[i] = u;
                tris[u].n[j] = t;
                open.erase(it);
            }
        }
    }
}

}  // namespace

std::vector<Point2> perturb_duplicates(std::span<const Point2> points) {
    std::vector<Point2> out(points.begin(), points.end());
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].x != points[b].x) return points[a].x < points[b].x;
        if (points[a].y != points[b].y) return points[a].y < points[b].y;
        return a < b;
    });
    constexpr double kJitter = 1e-6;
    constexpr double kGoldenAngle = 2.399963229728653;
    for (std::size_t r = 1; r < order.size(); ++r) {
        const std::size_t prev = order[r - 1];
        const std::size_t cur = order[r];
        if (points[cur] == points[prev]) {
            const double a = kGoldenAngle * static_cast<double>(cur);
            out[cur].x += kJitter * std::cos(a);
            out[cur].y += kJitter * std::sin(a);
        }
    }
    return out;
}

std::vector<Triangle> delaunay_triangulate(std::span<const Point2> input) {
    const std::size_t n = input.size();
    if (n < 3) throw Error(ErrorCode::DegenerateGeometry, "triangulation needs at least 3 points");
    const std::vector<Point2> pts = perturb_duplicates(input);

    double minx = pts[0].x, maxx = pts[0].x, miny = pts[0].y, maxy = pts[0].y;
    for (const auto& p : pts) {
        minx = std::min(minx, p.x);
        maxx = std::max(maxx, p.x);
        miny = std::min(miny, p.y);
        maxy = std::max(maxy, p.y);
    }
    const double scale = std::max({maxx - minx, maxy - miny, 1e-300});
    const double collinearEps = 1e-12 * scale * scale;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (pts[a].x != pts[b].x) return pts[a].x < pts[b].x;
        if (pts[a].y != pts[b].y) return pts[a].y < pts[b].y;
        return a < b;
    });

    // first point off the line through the two lexicographically smallest
    const Point2& p0 = pts[order[0]];
    const Point2& p1 = pts[order[1]];
    std::size_t k = 2;
    while (k < n && std::fabs(orient(p0, p1, pts[order[k]])) <= collinearEps) ++k;
    if (k == n) throw Error(ErrorCode::DegenerateGeometry, "all points are collinear");

    std::vector<Tri> tris;
    tris.reserve(2 * n);
    const int apex = order[k];
    const bool ccw = orient(p0, p1, pts[apex]) > 0.0;
    // fan from the apex over the collinear chain order[0..k-1]
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const int a = order[i];
        const int b = order[i + 1];
        if (ccw) {
            tris.push_back({{a, b, apex}, {-1, -1, -1}});
        } else {
            tris.push_back({{b, a, apex}, {-1, -1, -1}});
        }
    }
    std::vector<int> hull;  // counter-clockwise
    if (ccw) {
        for (std::size_t i = 0; i < k; ++i) hull.push_back(order[i]);
        hull.push_back(apex);
    } else {
        hull.push_back(order[0]);
        hull.push_back(apex);
        for (std::size_t i = k - 1; i >= 1; --i) hull.push_back(order[i]);
    }

    // the chain points between order[0] and apex were consumed; continue the
    // sweep with the remaining points (they are all lexicographically larger)
    for (std::size_t r = k + 1; r < n; ++r) {
        const int c = order[r];
        const std::size_t h = hull.size();
        std::vector<char> visible(h, 0);
        bool any = false;
        for (std::size_t i = 0; i < h; ++i) {
            if (orient(pts[hull[i]], pts[hull[(i + 1) % h]], pts[c]) < 0.0) {
                visible[i] = 1;
                any = true;
            }
        }
        if (!any) continue;  // numerically on the hull boundary; never happens for distinct points
        // start of the visible run (circular)
        std::size_t s = 0;
        while (!(visible[s] && !visible[(s + h - 1) % h])) ++s;
        std::size_t e = s;
        while (visible[(e + 1) % h] && (e + 1) % h != s) e = (e + 1) % h;
        for (std::size_t i = s;; i = (i + 1) % h) {
            const int a = hull[i];
            const int b = hull[(i + 1) % h];
            tris.push_back({{a, c, b}, {-1, -1, -1}});
            if (i == e) break;
        }
        std::vector<int> next;
        next.reserve(h + 1);
        // walk from the end of the visible run around to its start, then add c
        for (std::size_t i = (e + 1) % h;; i = (i + 1) % h) {
            next.push_back(hull[i]);
            if (i == s) break;
        }
        next.push_back(c);
        hull = std::move(next);
    }

    link_adjacency(tris, n);

    // Lawson flips
    std::vector<std::pair<int, int>> stack;
    stack.reserve(tris.size() * 3);
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
        for (int i = 0; i < 3; ++i) {
            if (tris[t].n[i] > t) stack.emplace_back(t, i);
        }
    }
    constexpr double kInCircleRel = 1e-12;
    while (!stack.empty()) {
        const auto [t, i] = stack.back();
        stack.pop_back();
        const int u = tris[t].n[i];
        if (u < 0) continue;
        const int j = local_index_of_neighbor(tris[u], t);
        const int p = tris[t].v[i];
        const int a = tris[t].v[(i + 1) % 3];
        const int b = tris[t].v[(i + 2) % 3];
        const int q = tris[u].v[j];
        double permanent = 0.0;
        const double det = incircle(pts[p], pts[a], pts[b], pts[q], permanent);
        if (!(det > kInCircleRel * permanent)) continue;

        const int nPA = tris[t].n[(i + 2) % 3];
        const int nBP = tris[t].n[(i + 1) % 3];
        const int nAQ = tris[u].n[(j + 1) % 3];
        const int nQB = tris[u].n[(j + 2) % 3];
        tris[t] = {{p, a, q}, {nAQ, u, nPA}};
        tris[u] = {{q, b, p}, {nBP, t, nQB}};
        if (nAQ >= 0) tris[nAQ].n[local_index_of_neighbor(tris[nAQ], u)] = t;
        if (nBP >= 0) tris[nBP].n[local_index_of_neighbor(tris[nBP], t)] = u;
        stack.emplace_back(t, 0);
        stack.emplace_back(t, 2);
        stack.emplace_back(u, 0);
        stack.emplace_back(u, 2);
    }

    std::vector<Triangle> out;
    out.reserve(tris.size());
    for (const auto& t : tris) out.push_back(t.v);
    return out;
}

std::vector<Triangle> delaunay_triangulate(const Template& t) {
    std::vector<Point2> pts;
    pts.reserve(t.points.size());
    for (const auto& p : t.points) pts.push_back({p.x, p.y});
    return delaunay_triangulate(pts);
}

}  // namespace biofuse
