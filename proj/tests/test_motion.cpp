#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/motion.hpp"
#include "core/rng.hpp"
#include "testutil.hpp"

using namespace hop;

namespace {

// Forward model of the motion-field equations: flow generated exactly
// from (T, omega, Z, f) at principal-point-relative coordinates.
Vec2 synth_flow(double x, double y, const Vec3& T, const Vec3& om, double Z, double f) {
    double bx = -om.y * f + om.z * y + om.x * x * y / f - om.y * x * x / f;
    double by = -om.x * f + om.z * x + om.y * x * y / f - om.x * y * y / f;
    double vx = bx + (T.z * x - T.x * f) / Z;
    double vy = by + (T.z * y - T.y * f) / Z;
    return {vx, vy};
}

FlowField make_field(const std::vector<Vec2>& pts, const Vec3& T, const Vec3& om, double Z,
                     double f) {
    FlowField flow;
    flow.frame_dt = 1.0;
    for (const Vec2& p : pts) {
        Vec2 v = synth_flow(p.x, p.y, T, om, Z, f);
        flow.matches.push_back({p, p + v});
    }
    return flow;
}

std::vector<Vec2> scatter_points(Rng& rng, int n, double extent) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i)
        pts.emplace_back(rng.uniform(-extent, extent), rng.uniform(-extent, extent));
    return pts;
}

Image8 shift_image(const Image8& src, int dx, int dy) {
    Image8 out(src.width, src.height, 0);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            int sx = x - dx, sy = y - dy;
            if (sx >= 0 && sy >= 0 && sx < src.width && sy < src.height)
                out.at(x, y) = src.at(sx, sy);
        }
    return out;
}

}  // namespace

TEST_CASE("feature selection") {
    SUBCASE("constant image yields nothing") {
        Image8 img(64, 64, 99);
        CHECK(select_features(img, 100, 0.01, 8).empty());
    }
    SUBCASE("a single high-contrast corner is found first") {
        Image8 img(64, 64, 30);
        for (int y = 20; y < 64; ++y)
            for (int x = 20; x < 64; ++x) img.at(x, y) = 220;
        auto pts = select_features(img, 10, 0.01, 8);
        REQUIRE_FALSE(pts.empty());
        CHECK(std::fabs(pts[0].x - 20) <= 2.0);
        CHECK(std::fabs(pts[0].y - 20) <= 2.0);
    }
    SUBCASE("checkerboard corners respect the suppression distance") {
        Image8 img(128, 128, 0);
        for (int y = 0; y < 128; ++y)
            for (int x = 0; x < 128; ++x)
                if (((x / 16) + (y / 16)) % 2 == 0) img.at(x, y) = 255;
        auto pts = select_features(img, 200, 0.05, 10);
        CHECK(pts.size() >= 20);
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j) {
                double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
                CHECK(d >= 10.0);
            }
    }
}

TEST_CASE("pyramidal LK recovers displacements") {
    Image8 base = testutil::textured_map(256, 256, 301).raster;
    LkParams lk;

    SUBCASE("identical frames give zero flow") {
        auto pts = select_features(base, 80, 0.01, 8);
        REQUIRE(pts.size() >= 20);
        FlowField flow = track_flow(base, base, pts, lk);
        CHECK(flow.matches.size() >= pts.size() * 3 / 4);
        for (const auto& m : flow.matches) {
            CHECK(std::fabs(m.p_curr.x - m.p_prev.x) <= 0.05);
            CHECK(std::fabs(m.p_curr.y - m.p_prev.y) <= 0.05);
        }
    }
    SUBCASE("integer shift is recovered within a quarter pixel") {
        Image8 moved = shift_image(base, 5, -3);
        std::vector<Vec2> pts;
        for (const Vec2& p : select_features(base, 120, 0.01, 8))
            if (p.x > 30 && p.x < 226 && p.y > 30 && p.y < 226) pts.push_back(p);
        REQUIRE(pts.size() >= 20);
        FlowField flow = track_flow(base, moved, pts, lk);
        CHECK(flow.matches.size() >= pts.size() / 2);
        for (const auto& m : flow.matches) {
            CHECK(std::fabs((m.p_curr.x - m.p_prev.x) - 5.0) <= 0.25);
            CHECK(std::fabs((m.p_curr.y - m.p_prev.y) + 3.0) <= 0.25);
        }
    }
    SUBCASE("uncorrelated noise drops most tracks") {
        Image8 junk = testutil::noise_image(256, 256, 999);
        auto pts = select_features(base, 100, 0.01, 8);
        REQUIRE(pts.size() >= 20);
        FlowField flow = track_flow(base, junk, pts, lk);
        CHECK(flow.matches.size() <= pts.size() / 4);
    }
    SUBCASE("sub-pixel shift of a smooth texture") {
        Image8 smooth(256, 256);
        for (int y = 0; y < 256; ++y)
            for (int x = 0; x < 256; ++x)
                smooth.at(x, y) = quantize_intensity(
                    128 + 55 * std::sin(x / 7.0) * std::cos(y / 9.0) +
                    45 * std::sin((2 * x - y) / 13.0));
        const double dx = 4.5, dy = -2.25;
        Image8 moved(256, 256);
        for (int y = 0; y < 256; ++y)
            for (int x = 0; x < 256; ++x)
                moved.at(x, y) =
                    quantize_intensity(bilinear_clamped(smooth, x - dx, y - dy));

        std::vector<Vec2> pts;
        for (const Vec2& p : select_features(smooth, 150, 0.01, 8))
            if (p.x > 30 && p.x < 226 && p.y > 30 && p.y < 226) pts.push_back(p);
        REQUIRE(pts.size() >= 15);
        FlowField flow = track_flow(smooth, moved, pts, lk);
        REQUIRE(flow.matches.size() >= pts.size() / 2);
        for (const auto& m : flow.matches) {
            CHECK(std::fabs((m.p_curr.x - m.p_prev.x) - dx) <= 0.25);
            CHECK(std::fabs((m.p_curr.y - m.p_prev.y) - dy) <= 0.25);
        }
    }
}

TEST_CASE("motion-field translation on closed-form flow") {
    Rng rng(411);
    auto pts = scatter_points(rng, 40, 120.0);

    SUBCASE("zero flow, zero rotation gives zero translation") {
        FlowField flow = make_field(pts, Vec3(0, 0, 0), Vec3(0, 0, 0), 50, 100);
        Vec3 T = solve_translation_motion_field(flow, Vec3(0, 0, 0), 50, 100);
        CHECK(T.norm() <= 1e-12);
    }
    SUBCASE("uniform flow vx=-2 at f=100 Z=50 means 1 m east") {
        FlowField flow;
        flow.frame_dt = 1.0;
        for (const Vec2& p : pts) flow.matches.push_back({p, p + Vec2(-2.0, 0.0)});
        Vec3 T = solve_translation_motion_field(flow, Vec3(0, 0, 0), 50, 100);
        CHECK(T.x == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::fabs(T.y) <= 1e-9);
        CHECK(std::fabs(T.z) <= 1e-9);
    }
    SUBCASE("radial flow is descent") {
        FlowField flow;
        flow.frame_dt = 1.0;
        for (const Vec2& p : pts)
            flow.matches.push_back({p, p + Vec2(0.02 * p.x, 0.02 * p.y)});
        Vec3 T = solve_translation_motion_field(flow, Vec3(0, 0, 0), 50, 100);
        CHECK(std::fabs(T.x) <= 1e-9);
        CHECK(std::fabs(T.y) <= 1e-9);
        CHECK(T.z == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("exactly consistent systems invert to machine precision") {
        for (int trial = 0; trial < 100; ++trial) {
            Vec3 T(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-1, 1));
            Vec3 om(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.5, 0.5));
            double Z = rng.uniform(20, 120);
            double f = rng.uniform(200, 800);
            auto tpts = scatter_points(rng, 30, 150.0);
            FlowField flow = make_field(tpts, T, om, Z, f);
            Vec3 est = solve_translation_motion_field(flow, om, Z, f);
            CHECK((est - T).norm() <= 1e-9);
        }
    }
    SUBCASE("pure rotation is fully compensated") {
        for (int trial = 0; trial < 20; ++trial) {
            Vec3 om(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.6, 0.6));
            auto tpts = scatter_points(rng, 30, 150.0);
            FlowField flow = make_field(tpts, Vec3(0, 0, 0), om, 60, 400);
            Vec3 est = solve_translation_motion_field(flow, om, 60, 400);
            CHECK(est.norm() <= 1e-9);
        }
    }
    SUBCASE("too few matches") {
        FlowField flow;
        flow.matches.push_back({Vec2(0, 0), Vec2(1, 1)});
        CHECK_THROWS_AS(solve_translation_motion_field(flow, Vec3(0, 0, 0), 50, 100), Error);
    }
    SUBCASE("coincident points are rank deficient") {
        FlowField flow;
        for (int i = 0; i < 10; ++i) flow.matches.push_back({Vec2(5, 5), Vec2(6, 5)});
        CHECK_THROWS_AS(solve_translation_motion_field(flow, Vec3(0, 0, 0), 50, 100), Error);
    }
}

TEST_CASE("homography estimation") {
    Rng rng(431);

    SUBCASE("identity correspondences") {
        FlowField flow;
        for (int i = 0; i < 24; ++i) {
            Vec2 p(rng.uniform(-100, 100), rng.uniform(-100, 100));
            flow.matches.push_back({p, p});
        }
        HomographyFit fit = estimate_homography(flow, 1.0, 200);
        Mat3 I = Mat3::identity();
        for (int i = 0; i < 9; ++i) CHECK(std::fabs(fit.H.m[i] - I.m[i]) <= 1e-9);
        CHECK(fit.inlier_count == 24);
    }
    SUBCASE("pure translation") {
        double tx = 7.25, ty = -2.5;
        FlowField flow;
        for (int i = 0; i < 30; ++i) {
            Vec2 p(rng.uniform(-80, 80), rng.uniform(-80, 80));
            flow.matches.push_back({p, p + Vec2(tx, ty)});
        }
        HomographyFit fit = estimate_homography(flow, 1.0, 200);
        CHECK(std::fabs(fit.H(0, 0) - 1) <= 1e-6);
        CHECK(std::fabs(fit.H(0, 1)) <= 1e-6);
        CHECK(std::fabs(fit.H(0, 2) - tx) <= 1e-6);
        CHECK(std::fabs(fit.H(1, 0)) <= 1e-6);
        CHECK(std::fabs(fit.H(1, 1) - 1) <= 1e-6);
        CHECK(std::fabs(fit.H(1, 2) - ty) <= 1e-6);
        CHECK(std::fabs(fit.H(2, 0)) <= 1e-9);
        CHECK(std::fabs(fit.H(2, 1)) <= 1e-9);
    }
    SUBCASE("robust to 20 percent gross outliers") {
        double tx = 3.0, ty = 4.0;
        FlowField flow;
        for (int i = 0; i < 80; ++i) {
            Vec2 p(rng.uniform(-100, 100), rng.uniform(-100, 100));
            flow.matches.push_back({p, p + Vec2(tx, ty)});
        }
        for (int i = 0; i < 20; ++i) {
            Vec2 p(rng.uniform(-100, 100), rng.uniform(-100, 100));
            flow.matches.push_back({p, Vec2(rng.uniform(-100, 100), rng.uniform(-100, 100))});
        }
        HomographyFit fit = estimate_homography(flow, 0.5, 500);
        CHECK(std::fabs(fit.H(0, 2) - tx) <= 1e-3);
        CHECK(std::fabs(fit.H(1, 2) - ty) <= 1e-3);
        CHECK(fit.inlier_count >= 78);
        CHECK(fit.inlier_count <= 84);
    }
    SUBCASE("needs four matches") {
        FlowField flow;
        for (int i = 0; i < 3; ++i) flow.matches.push_back({Vec2(i, 0), Vec2(i, 0)});
        CHECK_THROWS_AS(estimate_homography(flow, 1.0, 100), Error);
    }
}

TEST_CASE("translation from the homography factorization") {
    SUBCASE("H equal to R carries no translation") {
        HomographyEstimate est;
        est.H = rot_z(0.3);
        est.R = rot_z(0.3);
        est.h = 80;
        CHECK(decompose_translation(est).norm() <= 1e-12);
    }
    SUBCASE("third column scales by altitude") {
        HomographyEstimate est;
        est.H = Mat3::identity();
        est.H(0, 2) = 0.01;
        est.H(1, 2) = -0.02;
        est.h = 80;
        Vec3 T = decompose_translation(est);
        CHECK(T.x == doctest::Approx(0.8));
        CHECK(T.y == doctest::Approx(-1.6));
        CHECK(std::fabs(T.z) <= 1e-12);
    }
    SUBCASE("planar forward model round-trips") {
        // ground plane at depth h in the previous camera frame; camera
        // displaces by C with a yaw-only rotation. The homography mapping
        // current to previous normalized coordinates is H = R + C N^T / h'.
        Rng rng(619);
        for (int trial = 0; trial < 50; ++trial) {
            double h = rng.uniform(30, 120);
            Vec3 C(rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0);
            double dyaw = rng.uniform(-0.3, 0.3);
            Mat3 R = rot_z(dyaw);

            FlowField flow;  // matches: p_prev = current-frame pt, p_curr = previous-frame pt
            for (int i = 0; i < 40; ++i) {
                // scene point on the plane, previous camera frame
                Vec3 P(rng.uniform(-30, 30), rng.uniform(-30, 30), h);
                Vec3 Pc = R.transposed() * (P - C);  // same point, current frame
                REQUIRE(Pc.z > 1.0);
                Vec2 prev_n(P.x / P.z, P.y / P.z);
                Vec2 curr_n(Pc.x / Pc.z, Pc.y / Pc.z);
                flow.matches.push_back({curr_n, prev_n});
            }
            HomographyFit fit = estimate_homography(flow, 1e-6, 300);
            HomographyEstimate est;
            est.H = fit.H;
            est.R = R;
            est.h = h;  // altitude unchanged for planar motion
            Vec3 T = decompose_translation(est);
            CHECK((T - C).norm() <= 1e-6);
        }
    }
}

TEST_CASE("motion-field and homography estimates agree without rotation") {
    Rng rng(701);
    for (int trial = 0; trial < 20; ++trial) {
        double h = rng.uniform(40, 100);
        double f = rng.uniform(300, 600);
        Vec3 C(rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0);

        FlowField px_flow;      // pixel coordinates, prev -> curr
        FlowField norm_flow;    // normalized coordinates, curr -> prev
        for (int i = 0; i < 40; ++i) {
            Vec3 P(rng.uniform(-20, 20), rng.uniform(-20, 20), h);
            Vec3 Pc = P - C;
            Vec2 prev_px(f * P.x / P.z, f * P.y / P.z);
            Vec2 curr_px(f * Pc.x / Pc.z, f * Pc.y / Pc.z);
            px_flow.matches.push_back({prev_px, curr_px});
            norm_flow.matches.push_back(
                {Vec2(curr_px.x / f, curr_px.y / f), Vec2(prev_px.x / f, prev_px.y / f)});
        }
        Vec3 T_mf = solve_translation_motion_field(px_flow, Vec3(0, 0, 0), h, f);
        HomographyFit fit = estimate_homography(norm_flow, 1e-6, 300);
        HomographyEstimate est;
        est.H = fit.H;
        est.h = h;
        Vec3 T_h = decompose_translation(est);
        CHECK(std::fabs(T_mf.x - T_h.x) <= 1e-6);
        CHECK(std::fabs(T_mf.y - T_h.y) <= 1e-6);
    }
}

TEST_CASE("position prediction in the map frame") {
    GeoMap map = testutil::textured_map(850, 500);

    SUBCASE("zero translation keeps the position") {
        MapPoint p(100, 200);
        MapPoint q = predict_position(p, Vec3(0, 0, 0), 0.7, map, 180);
        CHECK(q.x == 100);
        CHECK(q.y == 200);
    }
    SUBCASE("one meter east at yaw 0 is +3.15 px") {
        MapPoint q = predict_position(MapPoint(100, 200), Vec3(1, 0, 0), 0.0, map, 180);
        CHECK(q.x == doctest::Approx(103.15));
        CHECK(q.y == doctest::Approx(200.0));
    }
    SUBCASE("heading east turns camera-forward motion into map east") {
        // at yaw pi/2 the camera's forward axis (-y in image coords) is east
        MapPoint q = predict_position(MapPoint(100, 200), Vec3(0, -1, 0),
                                      3.14159265358979323846 / 2.0, map, 180);
        CHECK(q.x == doctest::Approx(103.15));
        CHECK(q.y == doctest::Approx(200.0).epsilon(1e-9));
    }
    SUBCASE("prediction clamps to the window lattice") {
        MapPoint q = predict_position(MapPoint(660, 310), Vec3(1000, 1000, 0), 0.0, map, 180);
        CHECK(q.x == 850 - 180);
        CHECK(q.y == 500 - 180);
    }
}
