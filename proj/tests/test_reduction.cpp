#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "biofuse/reduction.hpp"
#include "support.hpp"

using namespace biofuse;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

FeaturePoint pt(double x, double y, Modality m = Modality::Face, double theta = 0.0) {
    FeaturePoint p;
    p.x = x;
    p.y = y;
    p.theta = theta;
    p.modality = m;
    p.descriptor = Descriptor{};
    return p;
}

Template blobs(biofuse::Rng& rng, const std::vector<Point2>& centres, int perBlob, double spread) {
    Template t;
    t.kind = TemplateKind::Fused;
    for (const auto& c : centres) {
        for (int i = 0; i < perBlob; ++i) {
            FeaturePoint p = pt(c.x + rng.uniform(-spread, spread), c.y + rng.uniform(-spread, spread));
            p.theta = rng.uniform(0.0, spread);
            p.descriptor = testsupport::random_descriptor(rng);
            t.points.push_back(p);
        }
    }
    return t;
}

}  // namespace

TEST_CASE("concatenate keeps order, tags and counts") {
    biofuse::Rng rng(1);
    Template face = testsupport::random_template(rng, 145, 300.0, TemplateKind::Face);
    Template finger = testsupport::random_template(rng, 50, 300.0, TemplateKind::Finger);
    face.landmarks[Landmark::NoseTip] = {150, 150};
    finger.referencePoint = Point2{100, 700};
    finger.dpi = 500;
    const Template f = concatenate(face, finger);
    CHECK(f.kind == TemplateKind::Fused);
    REQUIRE(f.points.size() == 195);
    CHECK(f.count(Modality::Face) == 145);
    CHECK(f.count(Modality::Finger) == 50);
    CHECK(f.points[0] == face.points[0]);
    CHECK(f.points[145] == finger.points[0]);
    CHECK(f.landmarks == face.landmarks);
    CHECK(f.referencePoint == finger.referencePoint);

    const Template onlyFinger = concatenate(Template{}, finger);
    CHECK(onlyFinger.kind == TemplateKind::Fused);
    CHECK(onlyFinger.points == finger.points);

    Template bare = finger;
    bare.points[3].descriptor.reset();
    CHECK(code_of([&] { concatenate(face, bare); }) == ErrorCode::IncompatibleTemplate);
}

TEST_CASE("PBM hand-computed instance") {
    const std::vector<Vec3> pts{{0, 0, 0}, {0, 1, 0}, {10, 0, 0}, {10, 1, 0}};
    const std::vector<int> assign{0, 0, 1, 1};
    const std::vector<Vec3> cents{{0, 0.5, 0}, {10, 0.5, 0}};
    const ClusteringQuality q = pbm_index(pts, assign, cents);
    CHECK(q.e1 == doctest::Approx(4.0 * std::sqrt(25.25)).epsilon(1e-12));
    CHECK(q.ek == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(q.dk == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(q.pbm == doctest::Approx(2525.0).epsilon(1e-9));
}

TEST_CASE("PBM with zero within-cluster scatter is +infinity") {
    const std::vector<Vec3> pts{{0, 0, 0}, {0, 0, 0}, {5, 5, 5}, {5, 5, 5}};
    const std::vector<int> assign{0, 0, 1, 1};
    const std::vector<Vec3> cents{{0, 0, 0}, {5, 5, 5}};
    CHECK(pbm_index(pts, assign, cents).pbm == std::numeric_limits<double>::infinity());
}

TEST_CASE("PBM errors") {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    const std::vector<Vec3> cents{{0, 0, 0}, {1.5, 0, 0}, {9, 9, 9}};
    CHECK(code_of([&] { pbm_index(pts, std::vector<int>{0, 1, 1}, cents); }) == ErrorCode::DegenerateClustering);
    CHECK(code_of([&] { pbm_index(pts, std::vector<int>{0, 0, 0}, std::span(cents).first(1)); }) ==
          ErrorCode::DegenerateClustering);
}

TEST_CASE("PBM prefers the natural split of two blobs") {
    biofuse::Rng rng(3);
    std::vector<Vec3> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({rng.uniform(0, 2), rng.uniform(0, 2), 0});
    for (int i = 0; i < 20; ++i) pts.push_back({rng.uniform(50, 52), rng.uniform(0, 2), 0});
    const auto r2 = kmeans(pts, 2, 0);
    const auto r3 = kmeans(pts, 3, 0);
    CHECK(pbm_index(pts, r2.assignment, r2.centroids).pbm > pbm_index(pts, r3.assignment, r3.centroids).pbm);
}

TEST_CASE("PBM agrees with the direct formula") {
    biofuse::Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        const int n = 3 + static_cast<int>(rng.below(40));
        const int k = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(n - 1, 8))));
        std::vector<Vec3> pts(static_cast<std::size_t>(n));
        for (auto& p : pts) p = {rng.uniform(0, 300), rng.uniform(0, 300), rng.uniform(0, 360)};
        const auto assign = testsupport::random_assignment(rng, n, k);
        const auto cents = testsupport::centroids_of(pts, assign, k);
        const double got = pbm_index(pts, assign, cents).pbm;
        const double want = testsupport::pbm_direct(pts, assign, k);
        if (std::isinf(want)) {
            CHECK(std::isinf(got));
        } else {
            CHECK(std::fabs(got - want) <= 1e-9 * std::fabs(want));
        }
    }
}

TEST_CASE("kmeans finds three separated blobs") {
    biofuse::Rng rng(5);
    const Template t = blobs(rng, {{20, 20}, {200, 40}, {110, 220}}, 10, 3.0);
    KMeansOptions opts;
    opts.kRange = KRange{2, 8};
    const KMeansReduction r = kmeans_reduce_detailed(t, opts);
    CHECK(r.quality.k == 3);
    CHECK(r.reduced.points.size() == 3);
    CHECK(r.sweep.size() == 7);
}

TEST_CASE("kmeans with k equal to n returns the points") {
    Template t;
    t.kind = TemplateKind::Fused;
    t.points = {pt(0, 0), pt(40, 5, Modality::Finger, 30), pt(90, 70, Modality::Face, 200)};
    t.points[1].descriptor->fill(0.25);
    const Template r = kmeans_reduce(t, KRange{3, 3}, 0);
    REQUIRE(r.points.size() == 3);
    for (const auto& p : t.points) CHECK(std::find(r.points.begin(), r.points.end(), p) != r.points.end());
}

TEST_CASE("kmeans errors") {
    Template t;
    t.points = {pt(0, 0), pt(1, 1)};
    CHECK(code_of([&] { kmeans_reduce(t); }) == ErrorCode::TooFewPoints);
    t.points.push_back(pt(2, 2));
    CHECK(code_of([&] { kmeans_reduce(t, KRange{5, 6}, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("kmeans centroids stay inside their members' hull") {
    biofuse::Rng rng(21);
    for (int i = 0; i < 30; ++i) {
        Template t = testsupport::random_template(rng, 10 + static_cast<int>(rng.below(30)), 300.0, TemplateKind::Fused);
        for (std::size_t j = 0; j < t.points.size(); j += 3) t.points[j].modality = Modality::Finger;
        KMeansOptions opts;
        opts.kRange = KRange{2, 6};
        opts.seed = i;
        const Template r = kmeans_reduce(t, opts);
        CHECK(r.points.size() >= 2);
        CHECK(r.points.size() <= 6);
        for (const auto& c : r.points) {
            CHECK(c.x >= 0.0);
            CHECK(c.x <= 300.0);
            REQUIRE(c.descriptor.has_value());
            for (double v : *c.descriptor) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("kmeans is deterministic") {
    biofuse::Rng rng(22);
    const Template t = testsupport::random_template(rng, 60, 300.0, TemplateKind::Fused);
    CHECK(kmeans_reduce(t, KRange{2, 12}, 9) == kmeans_reduce(t, KRange{2, 12}, 9));
}

TEST_CASE("kmeans clusters are never empty") {
    biofuse::Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        std::vector<Vec3> pts(static_cast<std::size_t>(5 + rng.below(30)));
        for (auto& p : pts) p = {std::round(rng.uniform(0, 4)), std::round(rng.uniform(0, 4)), 0};
        const int k = 2 + static_cast<int>(rng.below(4));
        const KMeansResult r = kmeans(pts, k, i);
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (int a : r.assignment) ++sizes[static_cast<std::size_t>(a)];
        for (int s : sizes) CHECK(s > 0);
    }
}

TEST_CASE("neighborhood elimination examples") {
    Template t;
    t.points = {pt(0, 0), pt(10, 0)};
    CHECK(neighborhood_eliminate(t, 15.0).points.size() == 1);
    CHECK(neighborhood_eliminate(t, 15.0).points[0] == t.points[0]);

    Template grid;
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) grid.points.push_back(pt(25.0 * x, 25.0 * y));
    CHECK(neighborhood_eliminate(grid, 20.0).points.size() == 25);

    Template mixed;
    mixed.kind = TemplateKind::Fused;
    mixed.points = {pt(0, 0), pt(1, 1, Modality::Finger), pt(12, 0), pt(12, 1, Modality::Finger)};
    const Template r = neighborhood_eliminate(mixed, 10.0, 15.0);
    CHECK(r.count(Modality::Face) == 2);
    CHECK(r.count(Modality::Finger) == 1);

    CHECK(code_of([&] { neighborhood_eliminate(t, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("neighborhood elimination properties") {
    biofuse::Rng rng(31);
    for (int i = 0; i < 1000; ++i) {
        const Template t = testsupport::random_template(rng, 1 + static_cast<int>(rng.below(60)), 200.0);
        const double radius = rng.uniform(1.0, 40.0);
        const Template r = neighborhood_eliminate(t, radius);
        for (std::size_t a = 0; a < r.points.size(); ++a)
            for (std::size_t b = a + 1; b < r.points.size(); ++b)
                CHECK(spatial_distance(r.points[a], r.points[b]) >= radius);
        // every dropped point has a kept neighbour closer than the radius
        for (const auto& p : t.points) {
            if (std::find(r.points.begin(), r.points.end(), p) != r.points.end()) continue;
            bool covered = false;
            for (const auto& q : r.points) covered = covered || spatial_distance(p, q) < radius;
            CHECK(covered);
        }
        CHECK(neighborhood_eliminate(r, radius) == r);
    }
}

TEST_CASE("region selection examples") {
    Template face;
    face.landmarks[Landmark::NoseTip] = {100, 100};
    face.points = {pt(180, 100), pt(186, 100)};
    const Template rf = region_select(face);
    REQUIRE(rf.points.size() == 1);
    CHECK(rf.points[0].x == 180.0);

    Template finger;
    finger.kind = TemplateKind::Finger;
    finger.referencePoint = Point2{0, 0};
    finger.points = {pt(121, 0, Modality::Finger), pt(0, 120, Modality::Finger)};
    const Template rg = region_select(finger);
    REQUIRE(rg.points.size() == 1);
    CHECK(rg.points[0].y == 120.0);

    Template noLandmarks = face;
    noLandmarks.landmarks.clear();
    CHECK(code_of([&] { region_select(noLandmarks); }) == ErrorCode::MissingMetadata);
    Template noCore = finger;
    noCore.referencePoint.reset();
    CHECK(code_of([&] { region_select(noCore); }) == ErrorCode::MissingMetadata);
    CHECK(code_of([&] { region_select(face, RegionSpec{-1.0, 5.0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("region selection properties") {
    biofuse::Rng rng(41);
    for (int i = 0; i < 1000; ++i) {
        Template t = testsupport::random_template(rng, static_cast<int>(rng.below(50)), 600.0, TemplateKind::Fused);
        for (auto& p : t.points)
            if (rng.bernoulli(0.4)) p.modality = Modality::Finger;
        t.landmarks[Landmark::LeftEye] = {rng.uniform(0, 600), rng.uniform(0, 600)};
        t.landmarks[Landmark::Mouth] = {rng.uniform(0, 600), rng.uniform(0, 600)};
        t.referencePoint = Point2{rng.uniform(0, 600), rng.uniform(0, 600)};
        const RegionSpec spec{rng.uniform(10, 200), rng.uniform(10, 200)};
        const Template r = region_select(t, spec);
        CHECK(r.points.size() <= t.points.size());
        for (const auto& p : r.points) {
            if (p.modality == Modality::Finger) {
                CHECK(std::hypot(p.x - t.referencePoint->x, p.y - t.referencePoint->y) <= spec.fingerRadius);
            } else {
                double nearest = 1e18;
                for (const auto& [key, lm] : t.landmarks) nearest = std::min(nearest, std::hypot(p.x - lm.x, p.y - lm.y));
                CHECK(nearest <= spec.faceRadius);
            }
        }
        CHECK(region_select(r, spec) == r);
    }
}
