// SPDX-License-Identifier: Apache-2.0
#include "gs2d/geometry.hpp"

#include "gs2d/ppm.hpp"
#include "gs2d/predicates.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace gs2d {

namespace {

constexpr real kMergeEps = 1e-6;

// ---------------------------------------------------------------------------
// Bowyer-Watson incremental Delaunay with a super-triangle bootstrap.
//
// Predicates are exact (filtered doubles with a rational fallback), so the
// triangulation of points-plus-super-vertices is the true Delaunay
// triangulation of that padded set. The super triangle is placed far outside
// the data; if it was still too close (detectable as stripped triangles not
// covering the hull) the build retries farther out.
// ---------------------------------------------------------------------------

struct Tri {
    int v[3];  // CCW vertex indices
    int nb[3]; // nb[i] = neighbor across the edge opposite v[i], -1 if none
    bool alive = true;
};

class BowyerWatson {
  public:
    BowyerWatson(const std::vector<Vec2>& sorted_pts, real super_scale) : pts_(sorted_pts) {
        const std::size_t n = pts_.size();
        real min_x = pts_[0].x, max_x = pts_[0].x;
        real min_y = pts_[0].y, max_y = pts_[0].y;
        for (const auto& p : pts_) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
        real cx = 0.5 * (min_x + max_x);
        real cy = 0.5 * (min_y + max_y);
        real d = std::max({max_x - min_x, max_y - min_y, real(1.0)}) * super_scale;
        // Asymmetric placement keeps the super vertices off the data's
        // symmetry axes.
        pts_.push_back({cx - 3.5 * d, cy - 2.4 * d});
        pts_.push_back({cx + 3.2 * d, cy - 2.6 * d});
        pts_.push_back({cx + 0.1 * d, cy + 3.4 * d});

        int s0 = static_cast<int>(n), s1 = s0 + 1, s2 = s0 + 2;
        if (orient2d(pts_[s0], pts_[s1], pts_[s2]) <= 0)
            std::swap(s1, s2);
        tris_.push_back({{s0, s1, s2}, {-1, -1, -1}, true});
        last_ = 0;

        for (std::size_t i = 0; i < n; ++i)
            insert(static_cast<int>(i));
    }

    // Triangles whose vertices are all real points.
    std::vector<std::array<int, 3>> real_triangles(std::size_t n_real) const {
        std::vector<std::array<int, 3>> out;
        for (const auto& t : tris_) {
            if (!t.alive)
                continue;
            if (t.v[0] < static_cast<int>(n_real) && t.v[1] < static_cast<int>(n_real) &&
                t.v[2] < static_cast<int>(n_real))
                out.push_back({t.v[0], t.v[1], t.v[2]});
        }
        return out;
    }

  private:
    int locate(const Vec2& p) const {
        int t = last_;
        std::size_t guard = tris_.size() * 4 + 16;
        for (std::size_t step = 0; step < guard; ++step) {
            const Tri& tr = tris_[t];
            int next = -1;
            for (int e = 0; e < 3; ++e) {
                const Vec2& a = pts_[tr.v[(e + 1) % 3]];
                const Vec2& b = pts_[tr.v[(e + 2) % 3]];
                if (orient2d(a, b, p) < 0) {
                    next = tr.nb[e];
                    break;
                }
            }
            if (next == -1)
                return t;
            t = next;
        }
        // Walk failed to settle (should not happen with exact predicates);
        // fall back to a linear scan.
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            if (!tris_[i].alive)
                continue;
            const Tri& tr = tris_[i];
            bool inside = true;
            for (int e = 0; e < 3 && inside; ++e)
                inside = orient2d(pts_[tr.v[(e + 1) % 3]], pts_[tr.v[(e + 2) % 3]], p) >= 0;
            if (inside)
                return static_cast<int>(i);
        }
        throw std::runtime_error("delaunay: point location failed");
    }

    void insert(int pi) {
        const Vec2& p = pts_[pi];
        int seed = locate(p);

        // Grow the cavity: triangles whose circumcircle strictly contains p.
        std::vector<int> cavity;
        std::vector<int> stack{seed};
        std::vector<char> in_cavity(tris_.size(), 0);
        in_cavity[seed] = 1;
        while (!stack.empty()) {
            int ti = stack.back();
            stack.pop_back();
            cavity.push_back(ti);
            for (int e = 0; e < 3; ++e) {
                int nb = tris_[ti].nb[e];
                if (nb < 0 || in_cavity[nb])
                    continue;
                const Tri& t = tris_[nb];
                if (incircle(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p) > 0) {
                    in_cavity[nb] = 1;
                    stack.push_back(nb);
                }
            }
        }

        // Boundary edges of the cavity, CCW with the cavity on the left.
        struct BEdge {
            int a, b, outer;
        };
        std::vector<BEdge> boundary;
        for (int ti : cavity) {
            const Tri& t = tris_[ti];
            for (int e = 0; e < 3; ++e) {
                int nb = t.nb[e];
                if (nb >= 0 && in_cavity[nb])
                    continue;
                boundary.push_back({t.v[(e + 1) % 3], t.v[(e + 2) % 3], nb});
            }
        }
        for (int ti : cavity)
            tris_[ti].alive = false;

        // Re-fan the cavity from p and stitch adjacency.
        std::unordered_map<long long, std::pair<int, int>> side; // vertex -> (tri, slot)
        auto link_side = [&](int vertex, int tri, int slot) {
            long long key = vertex;
            auto it = side.find(key);
            if (it == side.end()) {
                side.emplace(key, std::make_pair(tri, slot));
            } else {
                tris_[tri].nb[slot] = it->second.first;
                tris_[it->second.first].nb[it->second.second] = tri;
                side.erase(it);
            }
        };

        for (const BEdge& be : boundary) {
            int ti = static_cast<int>(tris_.size());
            tris_.push_back({{be.a, be.b, pi}, {-1, -1, -1}, true});
            // Slot 2 (opposite p) faces the outer neighbor. Repoint only the
            // outer slot across this exact edge; the same outer triangle can
            // touch the cavity on more than one edge.
            tris_[ti].nb[2] = be.outer;
            if (be.outer >= 0) {
                Tri& out = tris_[be.outer];
                for (int e = 0; e < 3; ++e) {
                    int ea = out.v[(e + 1) % 3];
                    int eb = out.v[(e + 2) % 3];
                    if ((ea == be.a && eb == be.b) || (ea == be.b && eb == be.a)) {
                        out.nb[e] = ti;
                        break;
                    }
                }
            }
            // Side edge (p, a) is opposite b (slot 1); (b, p) opposite a (slot 0).
            link_side(be.a, ti, 1);
            link_side(be.b, ti, 0);
            last_ = ti;
        }
    }

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    int last_ = 0;
};

real hull_area(const std::vector<Vec2>& pts) {
    // Andrew monotone chain on the already-sorted points.
    const std::size_t n = pts.size();
    std::vector<int> hull;
    auto build = [&](auto begin_i, auto end_i, auto step) {
        std::size_t base = hull.size();
        for (auto i = begin_i; i != end_i; i += step) {
            while (hull.size() >= base + 2 &&
                   orient2d(pts[hull[hull.size() - 2]], pts[hull[hull.size() - 1]],
                            pts[static_cast<std::size_t>(i)]) <= 0)
                hull.pop_back();
            hull.push_back(static_cast<int>(i));
        }
        hull.pop_back();
    };
    build(static_cast<long long>(0), static_cast<long long>(n), 1);
    build(static_cast<long long>(n) - 1, static_cast<long long>(-1), -1);

    real area2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2& a = pts[hull[i]];
        const Vec2& b = pts[hull[(i + 1) % hull.size()]];
        area2 += a.x * b.y - a.y * b.x;
    }
    return std::abs(area2) * 0.5;
}

} // namespace

real triangle_area(const std::array<Vec2, 3>& tri) {
    return 0.5 * std::abs((tri[1].x - tri[0].x) * (tri[2].y - tri[0].y) -
                          (tri[1].y - tri[0].y) * (tri[2].x - tri[0].x));
}

real mean_nn_distance(const std::vector<Vec2>& points) {
    if (points.size() < 2)
        throw std::invalid_argument("mean_nn_distance: need at least 2 points");
    PointIndex index(points);
    real sum = 0.0;
    for (const auto& p : points)
        sum += index.knn_radius(p, 2); // first hit is the point itself
    return sum / static_cast<real>(points.size());
}

AugmentedPoints add_boundary_points(const std::vector<Vec2>& points, int width, int height,
                                    real spacing) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("add_boundary_points: empty raster");
    if (!(spacing > 0.0))
        throw std::invalid_argument("add_boundary_points: spacing must be positive");

    AugmentedPoints out;
    out.points = points;
    out.first_boundary = points.size();

    auto try_add = [&](Vec2 p) {
        for (const auto& q : out.points)
            if (std::abs(q.x - p.x) < kMergeEps && std::abs(q.y - p.y) < kMergeEps)
                return;
        out.points.push_back(p);
    };

    const Vec2 corners[4] = {{0.5, 0.5},
                             {width - 0.5, 0.5},
                             {width - 0.5, height - 0.5},
                             {0.5, height - 0.5}};
    // Walk the boundary cycle; each edge contributes its starting corner
    // plus enough evenly spaced points to keep intervals <= spacing.
    for (int e = 0; e < 4; ++e) {
        Vec2 a = corners[e];
        Vec2 b = corners[(e + 1) % 4];
        real len = (b - a).norm();
        int segs = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int j = 0; j < segs; ++j) {
            real t = static_cast<real>(j) / segs;
            try_add({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t});
        }
    }
    return out;
}

TriangleMesh delaunay(const std::vector<Vec2>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("delaunay: need at least 3 points");
    for (const auto& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("delaunay: non-finite point");

    // Insertion runs in lexicographic order so the result depends only on
    // the point set, not the caller's ordering.
    std::vector<int> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (points[a].x != points[b].x)
            return points[a].x < points[b].x;
        return points[a].y < points[b].y;
    });
    std::vector<Vec2> sorted(points.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        sorted[i] = points[order[i]];
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].x == sorted[i - 1].x && sorted[i].y == sorted[i - 1].y)
            throw std::invalid_argument("delaunay: duplicate points");

    real target = hull_area(sorted);
    if (target <= 0.0)
        throw std::invalid_argument("delaunay: all points collinear");

    std::vector<std::array<int, 3>> tris;
    real super_scale = 1e7;
    for (int attempt = 0;; ++attempt) {
        BowyerWatson bw(sorted, super_scale);
        tris = bw.real_triangles(sorted.size());
        real covered = 0.0;
        for (const auto& t : tris)
            covered += triangle_area({sorted[t[0]], sorted[t[1]], sorted[t[2]]});
        if (std::abs(covered - target) <= 1e-9 * target)
            break;
        if (attempt >= 3)
            throw std::runtime_error("delaunay: hull coverage failure");
        super_scale *= 100.0;
    }

    TriangleMesh mesh;
    mesh.points = points;
    mesh.triangles.reserve(tris.size());
    for (const auto& t : tris) {
        std::array<int, 3> tri = {order[t[0]], order[t[1]], order[t[2]]};
        if (orient2d(points[tri[0]], points[tri[1]], points[tri[2]]) < 0)
            std::swap(tri[1], tri[2]);
        mesh.triangles.push_back(tri);
    }
    // Canonical order, independent of insertion history.
    for (auto& t : mesh.triangles) {
        int mi = 0;
        for (int i = 1; i < 3; ++i)
            if (t[i] < t[mi])
                mi = i;
        std::array<int, 3> rot = {t[mi], t[(mi + 1) % 3], t[(mi + 2) % 3]};
        t = rot;
    }
    std::sort(mesh.triangles.begin(), mesh.triangles.end());
    return mesh;
}

std::array<Vec2, 6> six_point_set(const std::array<Vec2, 3>& tri) {
    if (triangle_area(tri) < 1e-12)
        throw std::invalid_argument("six_point_set: degenerate triangle");
    return {tri[0],
            tri[1],
            tri[2],
            {(tri[0].x + tri[1].x) * 0.5, (tri[0].y + tri[1].y) * 0.5},
            {(tri[1].x + tri[2].x) * 0.5, (tri[1].y + tri[2].y) * 0.5},
            {(tri[0].x + tri[2].x) * 0.5, (tri[0].y + tri[2].y) * 0.5}};
}

FittedEllipse fit_ellipse(const std::array<Vec2, 6>& pts) {
    // Direct constrained least-squares conic fit, solved via the stable
    // block decomposition of the generalized eigenproblem. Points are
    // centered and isotropically scaled first; an isotropic similarity maps
    // ellipses to ellipses, so the geometry denormalizes directly.
    real mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= 6.0;
    my /= 6.0;
    real scale = 0.0;
    for (const auto& p : pts)
        scale += (p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my);
    scale = std::sqrt(scale / 6.0);
    if (!(scale > 0.0))
        throw std::domain_error("fit_ellipse: coincident points");

    Eigen::Matrix<double, 6, 3> d1, d2;
    for (int i = 0; i < 6; ++i) {
        double x = (pts[i].x - mx) / scale;
        double y = (pts[i].y - my) / scale;
        d1(i, 0) = x * x;
        d1(i, 1) = x * y;
        d1(i, 2) = y * y;
        d2(i, 0) = x;
        d2(i, 1) = y;
        d2(i, 2) = 1.0;
    }
    Eigen::Matrix3d s1 = d1.transpose() * d1;
    Eigen::Matrix3d s2 = d1.transpose() * d2;
    Eigen::Matrix3d s3 = d2.transpose() * d2;

    Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
    if (!lu.isInvertible())
        throw std::domain_error("fit_ellipse: degenerate point configuration");
    Eigen::Matrix3d t = -lu.solve(s2.transpose());
    Eigen::Matrix3d m0 = s1 + s2 * t;
    Eigen::Matrix3d m;
    m.row(0) = m0.row(2) / 2.0;
    m.row(1) = -m0.row(1);
    m.row(2) = m0.row(0) / 2.0;

    Eigen::EigenSolver<Eigen::Matrix3d> es(m);
    if (es.info() != Eigen::Success)
        throw std::domain_error("fit_ellipse: eigensolver failure");

    Eigen::Vector3d a1;
    bool found = false;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(es.eigenvalues()[i].imag()) >
            1e-9 * (1.0 + std::abs(es.eigenvalues()[i].real())))
            continue;
        Eigen::Vector3d v = es.eigenvectors().col(i).real();
        double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        if (cond > 0.0) {
            a1 = v;
            found = true;
            break;
        }
    }
    if (!found)
        throw std::domain_error("fit_ellipse: no ellipse solution");

    Eigen::Vector3d a2 = t * a1;
    double A = a1(0), B = a1(1), C = a1(2);
    double D = a2(0), E = a2(1), F = a2(2);

    double denom = 4.0 * A * C - B * B;
    double x0 = (B * E - 2.0 * C * D) / denom;
    double y0 = (B * D - 2.0 * A * E) / denom;
    double mu = A * x0 * x0 + B * x0 * y0 + C * y0 * y0 + D * x0 + E * y0 + F;
    if (mu == 0.0)
        throw std::domain_error("fit_ellipse: degenerate (point) ellipse");
    if (mu > 0.0) {
        // The eigenvector sign is arbitrary; normalize so the quadratic
        // part is positive definite and mu negative.
        A = -A;
        B = -B;
        C = -C;
        mu = -mu;
    }

    // Eigen decomposition of [[A, B/2], [B/2, C]]; the major axis belongs
    // to the eigenvalue of smaller magnitude.
    double half = 0.5 * (A + C);
    double r = std::sqrt(0.25 * (A - C) * (A - C) + 0.25 * B * B);
    double lam_min = half - r;
    double lam_max = half + r;
    double sa_major = -mu / lam_min;
    double sa_minor = -mu / lam_max;
    if (!(sa_major > 0.0) || !(sa_minor > 0.0))
        throw std::domain_error("fit_ellipse: not an ellipse");

    // Eigenvector of lam_min: take the better-conditioned of the two
    // analytic forms (the other degenerates when B is tiny).
    double vx = B / 2.0, vy = lam_min - A;
    double wx = lam_min - C, wy = B / 2.0;
    if (wx * wx + wy * wy > vx * vx + vy * vy) {
        vx = wx;
        vy = wy;
    }
    if (vx == 0.0 && vy == 0.0)
        vx = 1.0; // circle: any direction works

    FittedEllipse e;
    e.center = {x0 * scale + mx, y0 * scale + my};
    e.semi_x = std::sqrt(sa_major) * scale * 0.5;
    e.semi_y = std::sqrt(sa_minor) * scale * 0.5;
    double angle = std::atan2(vy, vx);
    angle = std::fmod(angle, M_PI);
    if (angle < 0.0)
        angle += M_PI;
    e.theta01 = angle / M_PI;
    if (e.theta01 >= 1.0)
        e.theta01 -= 1.0;
    if (!std::isfinite(e.center.x) || !std::isfinite(e.center.y) || !std::isfinite(e.semi_x) ||
        !std::isfinite(e.semi_y))
        throw std::domain_error("fit_ellipse: non-finite result");
    return e;
}

std::array<real, 6> triangle_feature(const std::array<Vec2, 3>& tri) {
    real area = triangle_area(tri);
    if (area < 1e-12)
        throw std::invalid_argument("triangle_feature: zero area");
    real s = std::sqrt(1.0 / area);
    Vec2 c = {(tri[0].x + tri[1].x + tri[2].x) / 3.0, (tri[0].y + tri[1].y + tri[2].y) / 3.0};
    return {s * (tri[0].x - c.x), s * (tri[0].y - c.y), s * (tri[1].x - c.x),
            s * (tri[1].y - c.y), s * (tri[2].x - c.x), s * (tri[2].y - c.y)};
}

std::array<real, 4> ellipse_feature(const FittedEllipse& e, int width, int height) {
    NdcPos c = pixel_to_ndc({e.center.x, e.center.y}, width, height);
    return {c.x, c.y, e.semi_x / (e.semi_y + 1e-6), e.theta01};
}

void save_mesh_obj(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw io_error("cannot open '" + path + "' for writing");
    for (const auto& p : mesh.points)
        out << "v " << p.x << " " << p.y << " 0\n";
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    if (!out)
        throw io_error("short write to '" + path + "'");
}

} // namespace gs2d
