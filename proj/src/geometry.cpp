#include "dcm/geometry.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace dcm {

std::vector<Vec> convex_hull_2d(std::vector<Vec> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
        if (a[0] != b[0]) return a[0] < b[0];
        return a[1] < b[1];
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec& a, const Vec& b) {
                              return a[0] == b[0] && a[1] == b[1];
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;

    auto cross2 = [](const Vec& o, const Vec& a, const Vec& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<Vec> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

struct Face {
    int a, b, c;
    Vec n;      // outward, not normalized
    bool alive = true;
};

double tetra_volume6(const Vec& a, const Vec& b, const Vec& c, const Vec& d) {
    return dot(cross(b - a, c - a), d - a);
}

} // namespace

std::vector<HullTri> convex_hull_3d(const std::vector<Vec>& pts) {
    const std::size_t n = pts.size();
    if (n < 4) throw std::invalid_argument("convex_hull_3d: need at least 4 points");

    double scale = 0;
    for (const auto& p : pts) scale = std::max(scale, norm(p));
    const double eps = 1e-10 * (1.0 + scale);

    // Initial non-degenerate tetrahedron.
    int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
    for (std::size_t i = 1; i < n; ++i)
        if (norm(pts[i] - pts[i0]) > eps) {
            i1 = static_cast<int>(i);
            break;
        }
    if (i1 < 0) throw std::invalid_argument("convex_hull_3d: degenerate point set");
    for (std::size_t i = 0; i < n; ++i)
        if (norm(cross(pts[i1] - pts[i0], pts[i] - pts[i0])) > eps * eps) {
            i2 = static_cast<int>(i);
            break;
        }
    if (i2 < 0) throw std::invalid_argument("convex_hull_3d: collinear point set");
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(tetra_volume6(pts[i0], pts[i1], pts[i2], pts[i])) > eps * eps * eps) {
            i3 = static_cast<int>(i);
            break;
        }
    if (i3 < 0) throw std::invalid_argument("convex_hull_3d: coplanar point set");

    if (tetra_volume6(pts[i0], pts[i1], pts[i2], pts[i3]) < 0) std::swap(i1, i2);

    std::vector<Face> faces;
    auto add_face = [&](int a, int b, int c) {
        Face f{a, b, c, cross(pts[b] - pts[a], pts[c] - pts[a]), true};
        faces.push_back(f);
    };
    // outward faces of the positively oriented tetra (i0, i1, i2, i3)
    add_face(i0, i2, i1);
    add_face(i0, i1, i3);
    add_face(i0, i3, i2);
    add_face(i1, i2, i3);

    for (std::size_t p = 0; p < n; ++p) {
        if (static_cast<int>(p) == i0 || static_cast<int>(p) == i1 ||
            static_cast<int>(p) == i2 || static_cast<int>(p) == i3)
            continue;
        std::vector<char> visible(faces.size(), 0);
        bool any = false;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!faces[f].alive) continue;
            if (dot(faces[f].n, pts[p] - pts[faces[f].a]) > eps * (1.0 + norm(faces[f].n))) {
                visible[f] = 1;
                any = true;
            }
        }
        if (!any) continue;

        // Horizon = edges between visible and hidden faces; directed edge
        // counts distinguish them.
        std::map<std::pair<int, int>, int> edge_count;
        for (std::size_t f = 0; f < faces.size(); ++f) {
            if (!faces[f].alive || !visible[f]) continue;
            int vs[3] = {faces[f].a, faces[f].b, faces[f].c};
            for (int e = 0; e < 3; ++e) {
                int u = vs[e], v = vs[(e + 1) % 3];
                auto it = edge_count.find({v, u});
                if (it != edge_count.end())
                    edge_count.erase(it);
                else
                    edge_count[{u, v}]++;
            }
            faces[f].alive = false;
        }
        for (const auto& [edge, cnt] : edge_count) {
            (void)cnt;
            add_face(edge.first, edge.second, static_cast<int>(p));
        }
    }

    std::vector<HullTri> out;
    for (const auto& f : faces)
        if (f.alive) out.push_back({f.a, f.b, f.c});

    // Coverage check: every input point must lie inside the facet planes.
    for (const auto& p : pts)
        for (const auto& f : faces) {
            if (!f.alive) continue;
            double nn = norm(f.n);
            if (nn <= 0) continue;
            if (dot(f.n, p - pts[f.a]) > 1e-8 * nn * (1.0 + scale))
                throw std::logic_error("convex_hull_3d: point escaped the hull");
        }
    return out;
}

namespace {

Vec project_segment(const Vec& a, const Vec& b) {
    Vec d = b - a;
    double dd = norm2(d);
    if (dd <= 0) return a;
    double t = -dot(a, d) / dd;
    t = std::clamp(t, 0.0, 1.0);
    return a + d * t;
}

} // namespace

Vec min_norm_point(const std::vector<Vec>& pts) {
    if (pts.empty()) throw std::invalid_argument("min_norm_point: empty set");
    if (pts.size() == 1) return pts[0];
    if (pts.size() == 2) return project_segment(pts[0], pts[1]);

    // Coplanar face: project the origin onto the affine plane, keep it if it
    // lies inside, otherwise fall back to the nearest edge projection.
    const int n = pts[0].dim;
    Vec best = pts[0];
    double bestn = norm2(best);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            Vec q = project_segment(pts[i], pts[j]);
            if (norm2(q) < bestn) {
                bestn = norm2(q);
                best = q;
            }
        }

    if (n == 3 && pts.size() >= 3) {
        Vec u = pts[1] - pts[0], w = pts[2] - pts[0];
        Vec nrm = cross(u, w);
        if (norm2(nrm) > 0) {
            Vec q = nrm * (dot(pts[0], nrm) / norm2(nrm));  // plane foot point
            if (norm2(q) < bestn) {
                // Accept the foot point only when it lies inside the face
                // (barycentric test over a triangle fan).
                bool in_any = false;
                for (std::size_t j = 1; j + 1 < pts.size() && !in_any; ++j) {
                    Vec e1 = pts[j] - pts[0], e2 = pts[j + 1] - pts[0], r = q - pts[0];
                    double d11 = dot(e1, e1), d12 = dot(e1, e2), d22 = dot(e2, e2);
                    double r1 = dot(r, e1), r2 = dot(r, e2);
                    double det = d11 * d22 - d12 * d12;
                    if (det <= 0) continue;
                    double s = (d22 * r1 - d12 * r2) / det;
                    double t = (d11 * r2 - d12 * r1) / det;
                    if (s >= -1e-12 && t >= -1e-12 && s + t <= 1 + 1e-12) in_any = true;
                }
                if (in_any) {
                    bestn = norm2(q);
                    best = q;
                }
            }
        }
    } else if (n == 2 && pts.size() >= 3) {
        // Origin inside the 2-d hull -> the minimum is the origin itself.
        auto hull = convex_hull_2d(pts);
        bool inside = hull.size() >= 3;
        for (std::size_t i = 0; i < hull.size() && inside; ++i) {
            const Vec& a = hull[i];
            const Vec& b = hull[(i + 1) % hull.size()];
            double cr = (b[0] - a[0]) * (0 - a[1]) - (b[1] - a[1]) * (0 - a[0]);
            if (cr < -1e-12) inside = false;
        }
        if (inside) return Vec::zero(n);
    }
    return best;
}

} // namespace dcm
