#include "core/motion.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace hop {

// ---------------------------------------------------------------- features

std::vector<Vec2> select_features(const Image8& image, int max_count, double quality,
                                  double min_dist_px) {
    std::vector<Vec2> out;
    if (image.width < 3 || image.height < 3 || max_count <= 0) return out;

    const int w = image.width, h = image.height;
    std::vector<float> gx(size_t(w) * h), gy(size_t(w) * h);
    for (int y = 0; y < h; ++y) {
        int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            gx[size_t(y) * w + x] = 0.5f * (float(image.at(xp, y)) - float(image.at(xm, y)));
            gy[size_t(y) * w + x] = 0.5f * (float(image.at(x, yp)) - float(image.at(x, ym)));
        }
    }

    // min eigenvalue of the 3x3-aggregated structure tensor
    std::vector<float> response(size_t(w) * h, 0.f);
    float gmax = 0.f;
    for (int y = 1; y + 1 < h; ++y) {
        for (int x = 1; x + 1 < w; ++x) {
            double a = 0, b = 0, c = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    double ix = gx[size_t(y + dy) * w + x + dx];
                    double iy = gy[size_t(y + dy) * w + x + dx];
                    a += ix * ix;
                    b += ix * iy;
                    c += iy * iy;
                }
            double lmin = 0.5 * ((a + c) - std::sqrt((a - c) * (a - c) + 4.0 * b * b));
            response[size_t(y) * w + x] = float(lmin);
            if (lmin > gmax) gmax = float(lmin);
        }
    }
    if (gmax <= 0.f) return out;

    struct Cand {
        float r;
        int x, y;
    };
    std::vector<Cand> cands;
    float thr = float(quality) * gmax;
    for (int y = 1; y + 1 < h; ++y)
        for (int x = 1; x + 1 < w; ++x) {
            float r = response[size_t(y) * w + x];
            if (r >= thr) cands.push_back({r, x, y});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.r != b.r) return a.r > b.r;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });

    double min_d2 = min_dist_px * min_dist_px;
    for (const Cand& c : cands) {
        bool ok = true;
        for (const Vec2& p : out) {
            double dx = p.x - c.x, dy = p.y - c.y;
            if (dx * dx + dy * dy < min_d2) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        out.emplace_back(double(c.x), double(c.y));
        if (int(out.size()) >= max_count) break;
    }
    return out;
}

// ---------------------------------------------------------------- LK flow

namespace {

struct PyrLevel {
    ImageF img;
    ImageF ix;
    ImageF iy;
};

ImageF downsample(const ImageF& src) {
    int w = (src.width + 1) / 2, h = (src.height + 1) / 2;
    ImageF out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // 3x3 [1 2 1] lowpass centered on the even source pixel
            double acc = 0, wsum = 0;
            static const double k[3] = {0.25, 0.5, 0.25};
            for (int dy = -1; dy <= 1; ++dy) {
                int sy = std::clamp(2 * y + dy, 0, src.height - 1);
                for (int dx = -1; dx <= 1; ++dx) {
                    int sx = std::clamp(2 * x + dx, 0, src.width - 1);
                    double wgt = k[dy + 1] * k[dx + 1];
                    acc += wgt * src.at(sx, sy);
                    wsum += wgt;
                }
            }
            out.at(x, y) = float(acc / wsum);
        }
    }
    return out;
}

std::vector<PyrLevel> build_pyramid(const Image8& img, int levels) {
    std::vector<PyrLevel> pyr(levels);
    pyr[0].img = to_float(img);
    for (int l = 1; l < levels; ++l) pyr[l].img = downsample(pyr[l - 1].img);
    for (int l = 0; l < levels; ++l) {
        const ImageF& im = pyr[l].img;
        pyr[l].ix = ImageF(im.width, im.height);
        pyr[l].iy = ImageF(im.width, im.height);
        for (int y = 0; y < im.height; ++y) {
            int ym = std::max(y - 1, 0), yp = std::min(y + 1, im.height - 1);
            for (int x = 0; x < im.width; ++x) {
                int xm = std::max(x - 1, 0), xp = std::min(x + 1, im.width - 1);
                pyr[l].ix.at(x, y) = 0.5f * (im.at(xp, y) - im.at(xm, y));
                pyr[l].iy.at(x, y) = 0.5f * (im.at(x, yp) - im.at(x, ym));
            }
        }
    }
    return pyr;
}

}  // namespace

FlowField track_flow(const Image8& prev_image, const Image8& curr_image,
                     const std::vector<Vec2>& points, const LkParams& params,
                     double frame_dt) {
    if (prev_image.width != curr_image.width || prev_image.height != curr_image.height)
        fail_usage("track_flow expects equal image sizes");
    if (params.levels < 1) fail_usage("pyramid needs at least one level");
    if (!(frame_dt > 0)) fail_usage("frame_dt must be positive");

    FlowField flow;
    flow.frame_dt = frame_dt;
    if (points.empty()) return flow;

    auto prev_pyr = build_pyramid(prev_image, params.levels);
    auto curr_pyr = build_pyramid(curr_image, params.levels);
    const int half = params.window_px / 2;
    const int wlen = (2 * half + 1) * (2 * half + 1);
    std::vector<double> tmpl(wlen), grad_x(wlen), grad_y(wlen);

    for (const Vec2& p : points) {
        Vec2 d(0, 0);  // displacement estimate, scaled per level
        bool lost = false;
        double last_residual = 0;

        for (int l = params.levels - 1; l >= 0; --l) {
            const PyrLevel& A = prev_pyr[l];
            const PyrLevel& B = curr_pyr[l];
            double scale = double(1 << l);
            Vec2 pl(p.x / scale, p.y / scale);

            if (pl.x - half < 0 || pl.y - half < 0 || pl.x + half > A.img.width - 1 ||
                pl.y + half > A.img.height - 1) {
                // window not contained at this level; try finer ones
                d = d * 2.0;
                continue;
            }

            // template window and its gradient matrix, sampled once per level
            double gxx = 0, gxy = 0, gyy = 0;
            int k = 0;
            for (int wy = -half; wy <= half; ++wy)
                for (int wx = -half; wx <= half; ++wx, ++k) {
                    double ax = pl.x + wx, ay = pl.y + wy;
                    tmpl[k] = bilinear_clamped(A.img, ax, ay);
                    double ix = bilinear_clamped(A.ix, ax, ay);
                    double iy = bilinear_clamped(A.iy, ax, ay);
                    grad_x[k] = ix;
                    grad_y[k] = iy;
                    gxx += ix * ix;
                    gxy += ix * iy;
                    gyy += iy * iy;
                }
            double det = gxx * gyy - gxy * gxy;
            if (det < 1e-6 || gxx + gyy < 1e-3) {
                lost = true;
                break;
            }

            for (int it = 0; it < params.max_iters; ++it) {
                double bx = 0, by = 0;
                k = 0;
                for (int wy = -half; wy <= half; ++wy)
                    for (int wx = -half; wx <= half; ++wx, ++k) {
                        double diff = tmpl[k] - bilinear_clamped(B.img, pl.x + wx + d.x,
                                                                 pl.y + wy + d.y);
                        bx += diff * grad_x[k];
                        by += diff * grad_y[k];
                    }
                double sx = (gyy * bx - gxy * by) / det;
                double sy = (gxx * by - gxy * bx) / det;
                d.x += sx;
                d.y += sy;
                if (std::sqrt(sx * sx + sy * sy) < params.eps) break;
            }

            if (l == 0) {
                double acc = 0;
                k = 0;
                for (int wy = -half; wy <= half; ++wy)
                    for (int wx = -half; wx <= half; ++wx, ++k)
                        acc += std::fabs(tmpl[k] - bilinear_clamped(B.img, pl.x + wx + d.x,
                                                                    pl.y + wy + d.y));
                last_residual = acc / wlen;
            } else {
                d = d * 2.0;
            }
        }
        if (lost) continue;

        Vec2 q = p + d;
        if (q.x < 0 || q.y < 0 || q.x > curr_image.width - 1 || q.y > curr_image.height - 1)
            continue;
        if (last_residual > params.residual_max) continue;
        flow.matches.push_back({p, q});
    }
    return flow;
}

// ------------------------------------------------- motion-field translation

Vec3 solve_translation_motion_field(const FlowField& flow, const Vec3& omega_rad_s,
                                    double depth_m, double focal_px,
                                    const Vec2& principal_point) {
    if (flow.matches.size() < 2) fail_data("motion-field solve needs at least 2 matches");
    if (!(depth_m > 0) || !(focal_px > 0)) fail_usage("depth and focal length must be positive");

    const double f = focal_px;
    const double Z = depth_m;
    const Vec3 om = omega_rad_s * flow.frame_dt;  // radians per frame interval

    struct Row {
        double a0, a1, a2, rhs;
    };
    std::vector<Row> rows;
    rows.reserve(flow.matches.size() * 2);
    for (const auto& m : flow.matches) {
        double x = m.p_prev.x - principal_point.x;
        double y = m.p_prev.y - principal_point.y;
        double vx = m.p_curr.x - m.p_prev.x;
        double vy = m.p_curr.y - m.p_prev.y;
        double bx = -om.y * f + om.z * y + om.x * x * y / f - om.y * x * x / f;
        double by = -om.x * f + om.z * x + om.y * x * y / f - om.x * y * y / f;
        rows.push_back({-f, 0.0, x, (vx - bx) * Z});
        rows.push_back({0.0, -f, y, (vy - by) * Z});
    }

    std::vector<char> active(rows.size(), 1);
    Vec3 sol;
    for (int round = 0; round < 4; ++round) {
        Mat3 ata;
        Vec3 atb;
        int used = 0;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (!active[i]) continue;
            const Row& r = rows[i];
            double a[3] = {r.a0, r.a1, r.a2};
            for (int p = 0; p < 3; ++p)
                for (int q = 0; q < 3; ++q) ata(p, q) += a[p] * a[q];
            atb.x += r.a0 * r.rhs;
            atb.y += r.a1 * r.rhs;
            atb.z += r.a2 * r.rhs;
            ++used;
        }
        if (used < 3) fail_data("motion-field system is rank deficient");
        try {
            sol = solve3(ata, atb);
        } catch (const Error&) {
            fail_data("motion-field system is rank deficient");
        }
        if (round == 3) break;

        // 2-sigma residual trim
        double sum2 = 0;
        int n = 0;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (!active[i]) continue;
            const Row& r = rows[i];
            double res = r.a0 * sol.x + r.a1 * sol.y + r.a2 * sol.z - r.rhs;
            sum2 += res * res;
            ++n;
        }
        double sigma = std::sqrt(sum2 / n);
        if (sigma < 1e-12) break;
        int kept = 0;
        std::vector<char> next = active;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (!active[i]) continue;
            const Row& r = rows[i];
            double res = r.a0 * sol.x + r.a1 * sol.y + r.a2 * sol.z - r.rhs;
            if (std::fabs(res) > 2.0 * sigma)
                next[i] = 0;
            else
                ++kept;
        }
        if (kept < 6) break;
        active.swap(next);
    }
    return sol;
}

// --------------------------------------------------------------- homography

namespace {

struct Similarity {
    double scale = 1, tx = 0, ty = 0;
    Vec2 apply(const Vec2& p) const { return {scale * (p.x + tx), scale * (p.y + ty)}; }
};

Similarity hartley_normalization(const std::vector<Vec2>& pts) {
    double mx = 0, my = 0;
    for (const Vec2& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= pts.size();
    my /= pts.size();
    double mean_dist = 0;
    for (const Vec2& p : pts) mean_dist += std::hypot(p.x - mx, p.y - my);
    mean_dist /= pts.size();
    Similarity s;
    s.tx = -mx;
    s.ty = -my;
    s.scale = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;
    return s;
}

// Direct linear transform on normalized correspondences; smallest
// eigenvector of A^T A via the symmetric Jacobi solver.
bool dlt(const std::vector<Vec2>& src, const std::vector<Vec2>& dst, Mat3& out) {
    const size_t n = src.size();
    std::vector<double> ata(81, 0.0);
    auto accumulate = [&](const double* row) {
        for (int i = 0; i < 9; ++i)
            for (int j = 0; j < 9; ++j) ata[size_t(i) * 9 + j] += row[i] * row[j];
    };
    for (size_t k = 0; k < n; ++k) {
        double x = src[k].x, y = src[k].y;
        double u = dst[k].x, v = dst[k].y;
        double r1[9] = {-x, -y, -1, 0, 0, 0, u * x, u * y, u};
        double r2[9] = {0, 0, 0, -x, -y, -1, v * x, v * y, v};
        accumulate(r1);
        accumulate(r2);
    }
    std::vector<double> vals, vecs;
    jacobi_symmetric_eig(ata, 9, vals, vecs);
    for (int i = 0; i < 9; ++i) out.m[i] = vecs[size_t(i) * 9 + 0];
    double norm = 0;
    for (double v : out.m) norm += v * v;
    return norm > 1e-20;
}

Mat3 denormalize(const Mat3& hn, const Similarity& s_src, const Similarity& s_dst) {
    Mat3 t_src = Mat3::identity();
    t_src(0, 0) = s_src.scale;
    t_src(1, 1) = s_src.scale;
    t_src(0, 2) = s_src.scale * s_src.tx;
    t_src(1, 2) = s_src.scale * s_src.ty;
    Mat3 t_dst_inv = Mat3::identity();
    t_dst_inv(0, 0) = 1.0 / s_dst.scale;
    t_dst_inv(1, 1) = 1.0 / s_dst.scale;
    t_dst_inv(0, 2) = -s_dst.tx;
    t_dst_inv(1, 2) = -s_dst.ty;
    return t_dst_inv * hn * t_src;
}

double transfer_error(const Mat3& h, const Vec2& src, const Vec2& dst) {
    double wz = h(2, 0) * src.x + h(2, 1) * src.y + h(2, 2);
    if (std::fabs(wz) < 1e-12) return 1e30;
    double px = (h(0, 0) * src.x + h(0, 1) * src.y + h(0, 2)) / wz;
    double py = (h(1, 0) * src.x + h(1, 1) * src.y + h(1, 2)) / wz;
    return std::hypot(px - dst.x, py - dst.y);
}

}  // namespace

HomographyFit estimate_homography(const FlowField& flow, double ransac_thresh_px,
                                  int max_iters, uint64_t seed) {
    const size_t n = flow.matches.size();
    if (n < 4) fail_data("homography needs at least 4 matches");

    std::vector<Vec2> src(n), dst(n);
    for (size_t i = 0; i < n; ++i) {
        src[i] = flow.matches[i].p_prev;
        dst[i] = flow.matches[i].p_curr;
    }
    Similarity ns = hartley_normalization(src);
    Similarity nd = hartley_normalization(dst);
    std::vector<Vec2> srcn(n), dstn(n);
    for (size_t i = 0; i < n; ++i) {
        srcn[i] = ns.apply(src[i]);
        dstn[i] = nd.apply(dst[i]);
    }

    Rng rng(seed);
    std::vector<char> best_mask(n, 0);
    int best_count = 0;
    double best_err = 1e300;

    std::vector<Vec2> s4(4), d4(4);
    for (int it = 0; it < max_iters; ++it) {
        size_t idx[4];
        idx[0] = rng.uniform_u64(n);
        do idx[1] = rng.uniform_u64(n); while (idx[1] == idx[0]);
        do idx[2] = rng.uniform_u64(n); while (idx[2] == idx[0] || idx[2] == idx[1]);
        do idx[3] = rng.uniform_u64(n);
        while (idx[3] == idx[0] || idx[3] == idx[1] || idx[3] == idx[2]);
        for (int k = 0; k < 4; ++k) {
            s4[k] = srcn[idx[k]];
            d4[k] = dstn[idx[k]];
        }
        Mat3 hn;
        if (!dlt(s4, d4, hn)) continue;
        Mat3 h = denormalize(hn, ns, nd);
        if (std::fabs(h(2, 2)) < 1e-12) continue;

        int count = 0;
        double err_sum = 0;
        for (size_t i = 0; i < n; ++i) {
            double e = transfer_error(h, src[i], dst[i]);
            if (e <= ransac_thresh_px) {
                ++count;
                err_sum += e;
            }
        }
        if (count > best_count || (count == best_count && err_sum < best_err)) {
            best_count = count;
            best_err = err_sum;
            for (size_t i = 0; i < n; ++i)
                best_mask[i] = transfer_error(h, src[i], dst[i]) <= ransac_thresh_px;
        }
    }
    if (best_count < 4) fail_data("homography estimation found no consensus");

    // refit on the consensus set
    std::vector<Vec2> si, di;
    for (size_t i = 0; i < n; ++i)
        if (best_mask[i]) {
            si.push_back(srcn[i]);
            di.push_back(dstn[i]);
        }
    Mat3 hn;
    if (!dlt(si, di, hn)) fail_data("degenerate homography configuration");
    Mat3 h = denormalize(hn, ns, nd);
    if (std::fabs(h(2, 2)) < 1e-12) fail_data("degenerate homography configuration");
    for (double& v : h.m) v /= h(2, 2);

    HomographyFit fit;
    fit.H = h;
    fit.inlier_count = 0;
    for (size_t i = 0; i < n; ++i)
        if (transfer_error(h, src[i], dst[i]) <= ransac_thresh_px) ++fit.inlier_count;
    return fit;
}

Vec3 decompose_translation(const HomographyEstimate& est) {
    if (!(est.h > 0)) fail_usage("altitude must be positive");
    double nn = est.N.norm();
    if (std::fabs(nn - 1.0) > 1e-6) fail_usage("plane normal must be unit length");
    return (est.H - est.R) * est.N * est.h;
}

MapPoint predict_position(const MapPoint& prev, const Vec3& translation_m, double yaw,
                          const GeoMap& map, int window_px) {
    double c = std::cos(yaw), s = std::sin(yaw);
    // camera axes in map coordinates at heading yaw:
    //   image x -> (cos, sin), image y -> (-sin, cos)   [x east, y south]
    double east_m = translation_m.x * c - translation_m.y * s;
    double south_m = translation_m.x * s + translation_m.y * c;
    MapPoint out(prev.x + meters_to_px(east_m, map), prev.y + meters_to_px(south_m, map));
    out.x = std::clamp(out.x, 0.0, double(map.width() - window_px));
    out.y = std::clamp(out.y, 0.0, double(map.height() - window_px));
    return out;
}

}  // namespace hop
