#include "semb/geom.hpp"

#include <algorithm>
#include <cmath>

namespace semb {

double line_side(cpx p, cpx a, cpx b) {
    cpx d = b - a;
    double len = std::abs(d);
    if (len == 0.0) return 0.0;
    return cross(d, p - a) / len;
}

double polygon_area(const std::vector<cpx>& poly) {
    double s = 0.0;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * s;
}

std::vector<cpx> clip_halfplane_y(const std::vector<cpx>& poly, double y, int side) {
    std::vector<cpx> out;
    size_t n = poly.size();
    auto keep = [&](cpx p) { return side * (p.imag() - y) >= 0.0; };
    for (size_t i = 0; i < n; ++i) {
        cpx a = poly[i], b = poly[(i + 1) % n];
        bool ka = keep(a), kb = keep(b);
        if (ka) out.push_back(a);
        if (ka != kb) {
            double t = (y - a.imag()) / (b.imag() - a.imag());
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

bool point_strictly_inside(const std::vector<cpx>& poly, cpx p, double eps) {
    size_t n = poly.size();
    // Reject points within eps of the boundary first.
    for (size_t i = 0; i < n; ++i) {
        cpx a = poly[i], b = poly[(i + 1) % n];
        cpx d = b - a;
        double len2 = std::norm(d);
        double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
        if (std::abs(p - (a + t * d)) <= eps) return false;
    }
    // Winding number.
    double w = 0.0;
    for (size_t i = 0; i < n; ++i) {
        cpx a = poly[i] - p, b = poly[(i + 1) % n] - p;
        w += std::atan2(cross(a, b), dot(a, b));
    }
    return std::abs(w) > 3.0;  // |w| is ~2pi inside, ~0 outside
}

static bool segments_cross(cpx a, cpx b, cpx c, cpx d, double eps) {
    double d1 = cross(b - a, c - a);
    double d2 = cross(b - a, d - a);
    double d3 = cross(d - c, a - c);
    double d4 = cross(d - c, b - c);
    double s1 = std::abs(b - a), s2 = std::abs(d - c);
    // Proper crossing only: each segment strictly straddles the other's line.
    return (d1 > eps * s1 && d2 < -eps * s1 && ((d3 > eps * s2 && d4 < -eps * s2) || (d3 < -eps * s2 && d4 > eps * s2))) ||
           (d1 < -eps * s1 && d2 > eps * s1 && ((d3 > eps * s2 && d4 < -eps * s2) || (d3 < -eps * s2 && d4 > eps * s2)));
}

bool interiors_overlap(const std::vector<cpx>& a, const std::vector<cpx>& b, double eps) {
    size_t n = a.size(), m = b.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j)
            if (segments_cross(a[i], a[(i + 1) % n], b[j], b[(j + 1) % m], eps)) return true;
    for (cpx p : a)
        if (point_strictly_inside(b, p, eps)) return true;
    for (cpx p : b)
        if (point_strictly_inside(a, p, eps)) return true;
    // One polygon could sit inside the other with all vertices on the
    // boundary only in degenerate shared-edge configurations; centroid probes
    // cover the practical containment case.
    cpx ca{0, 0}, cb{0, 0};
    for (cpx p : a) ca += p;
    for (cpx p : b) cb += p;
    ca /= double(n);
    cb /= double(m);
    return point_strictly_inside(b, ca, eps) || point_strictly_inside(a, cb, eps);
}

IncircleFit fit_incircle(const std::array<cpx, 4>& quad) {
    IncircleFit fit;
    std::vector<cpx> poly(quad.begin(), quad.end());
    fit.orient = polygon_area(poly) >= 0.0 ? 1.0 : -1.0;
    // Each edge gives a linear equation  n_i . c - d_i = r  with n_i the
    // inward unit normal. Solve the 4x3 least-squares system by normal
    // equations (well conditioned at this size).
    double A[3][3] = {{0}}, rhs[3] = {0};
    double nx[4], ny[4], dd[4];
    for (int i = 0; i < 4; ++i) {
        cpx e = quad[(i + 1) % 4] - quad[i];
        double len = std::abs(e);
        cpx nrm = len > 0.0 ? (cpx(0, 1) * e / len) * fit.orient : cpx(0, 0);
        nx[i] = nrm.real();
        ny[i] = nrm.imag();
        dd[i] = dot(nrm, quad[i]);
        double row[3] = {nx[i], ny[i], -1.0};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) A[r][c] += row[r] * row[c];
            rhs[r] += row[r] * dd[i];
        }
    }
    // 3x3 Gaussian elimination with partial pivoting.
    double M[3][4];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) M[r][c] = A[r][c];
        M[r][3] = rhs[r];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(M[r][col]) > std::abs(M[piv][col])) piv = r;
        std::swap(M[col], M[piv]);
        if (M[col][col] == 0.0) continue;
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            double f = M[r][col] / M[col][col];
            for (int c = col; c < 4; ++c) M[r][c] -= f * M[col][c];
        }
    }
    double sol[3] = {0, 0, 0};
    for (int r = 0; r < 3; ++r) sol[r] = M[r][r] != 0.0 ? M[r][3] / M[r][r] : 0.0;
    fit.center = cpx(sol[0], sol[1]);
    fit.r = sol[2];
    fit.residual = 0.0;
    for (int i = 0; i < 4; ++i) {
        double d = nx[i] * sol[0] + ny[i] * sol[1] - dd[i];
        fit.residual = std::max(fit.residual, std::abs(d - fit.r));
    }
    return fit;
}

double half_angle(const std::array<cpx, 4>& quad, int i, double orient) {
    cpx u = quad[(i + 3) % 4] - quad[i];
    cpx v = quad[(i + 1) % 4] - quad[i];
    // Interior angle swept from v to u on the interior side.
    double ang = std::atan2(orient * cross(v, u), dot(v, u));
    if (ang < 0.0) ang += 2.0 * std::acos(-1.0);
    return 0.5 * ang;
}

double pitot_residual(const std::array<cpx, 4>& quad) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (i % 2 ? -1.0 : 1.0) * std::abs(quad[(i + 1) % 4] - quad[i]);
    return s;
}

void triangle_incircle(cpx a, cpx b, cpx c, cpx& center, double& r) {
    double la = std::abs(b - c), lb = std::abs(c - a), lc = std::abs(a - b);
    double p = la + lb + lc;
    center = (la * a + lb * b + lc * c) / p;
    r = std::abs(cross(b - a, c - a)) / p;
}

std::vector<cpx> hyperbola_points_at_level(cpx w0, cpx b0, cpx w1, double y) {
    const double kTauMax = 50.0;
    std::vector<cpx> out;
    double two_a = std::abs(b0 - w0) - std::abs(b0 - w1);
    cpx m = 0.5 * (w0 + w1);
    cpx axis = w1 - w0;
    double c2 = 0.5 * std::abs(axis);
    if (c2 == 0.0) return out;
    cpx u = axis / (2.0 * c2);
    cpx uperp = u * cpx(0, 1);
    double a = 0.5 * two_a;
    double b2 = c2 * c2 - a * a;
    if (b2 < 0.0) b2 = 0.0;
    double b = std::sqrt(b2);

    if (std::abs(a) < 1e-14 * c2) {
        // Degenerate: perpendicular bisector of (w0, w1).
        double denom = uperp.imag();
        if (std::abs(denom) < 1e-15) return out;
        double t = (y - m.imag()) / denom;
        out.push_back(m + t * uperp);
        return out;
    }

    auto point = [&](double tau) { return m + u * (a * std::cosh(tau)) + uperp * (b * std::sinh(tau)); };
    auto g = [&](double tau) { return point(tau).imag() - y; };

    // Height along the branch is A cosh(tau) + B sinh(tau) + C: at most one
    // interior critical point, so split into monotone pieces and bisect.
    double A = a * u.imag(), B = b * uperp.imag();
    std::vector<double> knots = {-kTauMax, kTauMax};
    if (std::abs(B) < std::abs(A)) {
        double tc = std::atanh(-B / A);
        if (tc > -kTauMax && tc < kTauMax) knots.insert(knots.begin() + 1, tc);
    }
    for (size_t k = 0; k + 1 < knots.size(); ++k) {
        double lo = knots[k], hi = knots[k + 1];
        double glo = g(lo), ghi = g(hi);
        if (glo == 0.0) {
            out.push_back(point(lo));
            continue;
        }
        if (glo * ghi > 0.0) continue;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double gm = g(mid);
            if ((gm < 0.0) == (glo < 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
            if (hi - lo < 1e-15 * (1.0 + std::abs(lo))) break;
        }
        out.push_back(point(0.5 * (lo + hi)));
    }
    // Deduplicate nearly equal roots (tangent level lines).
    if (out.size() == 2 && std::abs(out[0] - out[1]) < 1e-9 * (1.0 + c2)) out.pop_back();
    return out;
}

}  // namespace semb
