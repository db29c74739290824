#include "semb/surgery.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "semb/error.hpp"

namespace semb {

namespace {

// Contour plus vertex colors, kept ccw while the surgery runs.
struct CQuad {
    std::array<cpx, 4> v;
    std::array<int, 4> col;
};

double quad_scale(const std::array<cpx, 4>& v) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s = std::max(s, std::abs(v[(i + 1) % 4] - v[i]));
    return s;
}

cpx seg_at_level(cpx a, cpx b, double y) {
    double t = (y - a.imag()) / (b.imag() - a.imag());
    return a + t * (b - a);
}

// Mirror across the real axis: used to reduce from-below alignments to the
// from-above construction. Conjugation reverses orientation, so the contour
// is reversed to stay ccw (keeping index 0, which preserves alternation).
CQuad mirror_quad(const CQuad& q) {
    CQuad out;
    out.v = {std::conj(q.v[0]), std::conj(q.v[3]), std::conj(q.v[2]), std::conj(q.v[1])};
    out.col = {q.col[0], q.col[3], q.col[2], q.col[1]};
    return out;
}

// Pick the conic point that lies on the level segment of the current region:
// strictly between the abscissas lo/hi and inside the container polygon.
cpx branch_point(cpx f0, cpx ref, cpx f1, double y, double xa, double xb,
                 const std::vector<cpx>& container) {
    std::vector<cpx> cands = hyperbola_points_at_level(f0, ref, f1, y);
    if (cands.empty())
        throw SembError(ErrorCode::validation, "alignment level misses the tangential locus");
    double lo = std::min(xa, xb), hi = std::max(xa, xb);
    double m = 1e-9 * (std::abs(f1 - f0) + std::abs(ref - f0));
    int best = -1, best_rank = -1;
    for (size_t i = 0; i < cands.size(); ++i) {
        bool in_interval = cands[i].real() > lo + m && cands[i].real() < hi - m;
        bool in_poly = point_strictly_inside(container, cands[i], 0.0);
        int rank = (in_interval ? 2 : 0) + (in_poly ? 1 : 0);
        if (rank > best_rank) {
            best_rank = rank;
            best = int(i);
        }
    }
    if (best_rank <= 0)
        throw SembError(ErrorCode::validation, "no admissible point of the tangential locus at this level");
    return cands[best];
}

// Triangle (apex, lo0, lo1) in ccw order with the side [lo0, lo1] on the
// level line; the incircle tangency point of that side becomes the fourth
// vertex, giving the quad (apex, lo0, M, lo1) with a straight angle at M.
CQuad cap_quad(cpx apex, cpx lo0, cpx lo1, int apex_col, std::vector<cpx>& created) {
    double a = std::abs(lo1 - apex), b = std::abs(apex - lo0), c = std::abs(lo1 - lo0);
    if (!(std::abs(cross(lo0 - apex, lo1 - apex)) > 0.0))
        throw SembError(ErrorCode::validation, "degenerate cap triangle in alignment");
    double s = 0.5 * (a + b + c);
    cpx M = lo0 + (s - a) * (lo1 - lo0) / c;
    created.push_back(M);
    return CQuad{{apex, lo0, M, lo1}, {apex_col, 1 - apex_col, apex_col, 1 - apex_col}};
}

// The four alignment constructions, dispatched on the number
// of vertices below the level; the input is ccw and y avoids its vertices.
std::vector<CQuad> align_above(const CQuad& q, double y, std::string& label,
                               std::vector<cpx>& created) {
    std::array<bool, 4> below{};
    int n_below = 0;
    for (int i = 0; i < 4; ++i) {
        below[i] = q.v[i].imag() < y;
        n_below += below[i] ? 1 : 0;
    }
    if (n_below == 0 || n_below == 4)
        throw SembError(ErrorCode::validation, "alignment level outside the quad");
    std::vector<cpx> poly(q.v.begin(), q.v.end());
    auto at = [&](int i) { return q.v[(i + 4) % 4]; };
    auto col = [&](int i) { return q.col[(i + 4) % 4]; };
    std::vector<CQuad> out;

    if (n_below == 1) {
        label = "1";
        int i = 0;
        while (!below[i]) ++i;
        cpx p0 = seg_at_level(at(i - 1), at(i), y);
        cpx p1 = seg_at_level(at(i), at(i + 1), y);
        cpx vt = branch_point(at(i - 1), at(i), at(i + 1), y, p0.real(), p1.real(), poly);
        created.push_back(p0);
        created.push_back(p1);
        created.push_back(vt);
        out.push_back(cap_quad(at(i - 1), p0, vt, col(i - 1), created));
        out.push_back(CQuad{{at(i - 1), vt, at(i + 1), at(i + 2)},
                            {col(i - 1), col(i), col(i + 1), col(i + 2)}});
        out.push_back(cap_quad(at(i + 1), vt, p1, col(i + 1), created));
    } else if (n_below == 2 && ((below[0] && below[2]) || (below[1] && below[3]))) {
        label = "2b";
        for (int j = 0; j < 4; ++j) {
            if (below[j]) continue;
            cpx pin = seg_at_level(at(j - 1), at(j), y);
            cpx pout = seg_at_level(at(j), at(j + 1), y);
            created.push_back(pin);
            created.push_back(pout);
            out.push_back(cap_quad(at(j), pout, pin, col(j), created));
        }
    } else if (n_below == 2) {
        label = "2a";
        int i = 0;
        while (!(below[i] && below[(i + 1) % 4])) ++i;
        cpx pa = seg_at_level(at(i + 3), at(i), y);
        cpx pb = seg_at_level(at(i + 1), at(i + 2), y);
        cpx vtb = branch_point(at(i), at(i + 1), at(i + 2), y, pa.real(), pb.real(), poly);
        std::vector<cpx> poly2{at(i), vtb, at(i + 2), at(i + 3)};
        cpx vta = branch_point(vtb, at(i), at(i + 3), y, pa.real(), vtb.real(), poly2);
        created.push_back(pa);
        created.push_back(pb);
        created.push_back(vtb);
        created.push_back(vta);
        out.push_back(cap_quad(at(i + 3), pa, vta, col(i + 3), created));
        out.push_back(CQuad{{vta, vtb, at(i + 2), at(i + 3)}, {col(i), col(i + 1), col(i + 2), col(i + 3)}});
        out.push_back(cap_quad(at(i + 2), vtb, pb, col(i + 2), created));
    } else {
        label = "3";
        int j = 0;
        while (below[j]) ++j;
        cpx pin = seg_at_level(at(j - 1), at(j), y);
        cpx pout = seg_at_level(at(j), at(j + 1), y);
        created.push_back(pin);
        created.push_back(pout);
        out.push_back(cap_quad(at(j), pout, pin, col(j), created));
    }
    return out;
}

TangentialQuad to_tangential(CQuad q) {
    if (q.col[0] != kWhite) {
        q.v = {q.v[1], q.v[2], q.v[3], q.v[0]};
        q.col = {q.col[1], q.col[2], q.col[3], q.col[0]};
    }
    return tangential_quad(q.v);
}

}  // namespace

TangentialQuad tangential_quad(const std::array<cpx, 4>& v) {
    TangentialQuad t;
    t.v = v;
    std::vector<cpx> poly(v.begin(), v.end());
    t.orient = polygon_area(poly) >= 0.0 ? 1.0 : -1.0;
    IncircleFit fit = fit_incircle(v);
    t.center = fit.center;
    t.r = fit.r;
    for (int i = 0; i < 4; ++i) {
        double d = t.orient * line_side(t.center, v[i], v[(i + 1) % 4]);
        t.support_residual = std::max(t.support_residual, std::abs(d - t.r));
        t.phi[i] = half_angle(v, i, t.orient);
    }
    t.pitot = pitot_residual(v);
    return t;
}

cpx hyperbola_point(cpx w0, cpx b0, cpx w1, double y) {
    std::vector<cpx> cands = hyperbola_points_at_level(w0, b0, w1, y);
    if (cands.empty())
        throw SembError(ErrorCode::validation, "no point of the tangential locus at this level");
    if (cands.size() == 1) return cands[0];
    // Prefer the completion across the diagonal (w0 w1) from b0, the convex
    // configuration; fall back to the point farther from b0.
    double sb = line_side(b0, w0, w1);
    cpx best = cands[0];
    double best_key = -1e300;
    for (cpx c : cands) {
        double s = line_side(c, w0, w1);
        double key = (s * sb < 0.0 ? 1e100 : 0.0) + std::abs(c - b0);
        if (key > best_key) {
            best_key = key;
            best = c;
        }
    }
    return best;
}

TangentialQuad triangle_to_quad(cpx j, cpx k, cpx l, int side) {
    if (side < 0 || side > 2) throw SembError(ErrorCode::invalid_argument, "side selector must be 0, 1 or 2");
    double area2 = cross(k - j, l - j);
    double scale = quad_scale({j, k, l, j});
    if (!(std::abs(area2) > 1e-14 * scale * scale))
        throw SembError(ErrorCode::validation, "triangle_to_quad: zero-area triangle");
    std::array<cpx, 3> t{j, k, l};
    cpx a = t[side], b = t[(side + 1) % 3];
    double la = std::abs(b - t[(side + 2) % 3]);  // side opposite a
    double lb = std::abs(t[(side + 2) % 3] - a);  // side opposite b
    double lc = std::abs(b - a);
    double s = 0.5 * (la + lb + lc);
    cpx M = a + (s - la) * (b - a) / lc;
    std::array<cpx, 4> v;
    switch (side) {
        case 0: v = {j, M, k, l}; break;
        case 1: v = {j, k, M, l}; break;
        default: v = {j, k, l, M}; break;
    }
    return tangential_quad(v);
}

HalfPlaneClip horizontal_align(const TangentialQuad& z, double y, ClipSide side) {
    HalfPlaneClip clip;
    clip.source = z.v;
    clip.y = y;
    clip.side = side;

    CQuad q;
    q.v = z.v;
    q.col = {kWhite, kBlack, kWhite, kBlack};
    std::vector<cpx> poly(q.v.begin(), q.v.end());
    double area = polygon_area(poly);
    double scale = quad_scale(q.v);
    if (!(std::abs(area) > 1e-14 * scale * scale))
        throw SembError(ErrorCode::validation, "horizontal_align: degenerate quad");
    if (area < 0.0) {
        q.v = {q.v[0], q.v[3], q.v[2], q.v[1]};
        q.col = {q.col[0], q.col[3], q.col[2], q.col[1]};
    }
    double vspan = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int k = i + 1; k < 4; ++k) vspan = std::max(vspan, std::abs(q.v[i].imag() - q.v[k].imag()));
    for (cpx v : q.v)
        if (std::abs(v.imag() - y) <= 1e-12 * vspan)
            throw SembError(ErrorCode::validation, "alignment level passes through a vertex");

    bool flip = side == ClipSide::below;
    CQuad work = flip ? mirror_quad(q) : q;
    double yy = flip ? -y : y;

    std::vector<cpx> created;
    std::vector<CQuad> pieces = align_above(work, yy, clip.case_label, created);

    double total = 0.0;
    for (const CQuad& piece : pieces) total += polygon_area({piece.v.begin(), piece.v.end()});
    std::vector<cpx> wpoly(work.v.begin(), work.v.end());
    double clipped = polygon_area(clip_halfplane_y(wpoly, yy, +1));
    clip.area_residual = std::abs(total - clipped) / std::abs(area);
    if (clip.case_label == "2b" && clip.area_residual > 1e-6)
        throw SembError(ErrorCode::validation,
                        "horizontal_align: non-convex quad outside the two-triangle case");

    for (CQuad piece : pieces) {
        if (flip) piece = mirror_quad(piece);
        clip.quads.push_back(to_tangential(piece));
    }
    for (cpx p : created) clip.new_vertices.push_back(flip ? std::conj(p) : p);
    return clip;
}

BadLevelReport bad_level_measure(const TangentialQuad& z, double beta, int base_samples) {
    if (!(beta > 0.0)) throw SembError(ErrorCode::invalid_argument, "beta must be positive");
    if (base_samples < 16) throw SembError(ErrorCode::invalid_argument, "too few sweep samples");
    BadLevelReport rep;
    double ymin = 1e300, ymax = -1e300;
    for (cpx v : z.v) {
        ymin = std::min(ymin, v.imag());
        ymax = std::max(ymax, v.imag());
    }
    rep.span = ymax - ymin;
    if (!(rep.span > 0.0)) throw SembError(ErrorCode::validation, "quad has no vertical extent");

    std::vector<double> levels;
    for (int k = 0; k < base_samples; ++k)
        levels.push_back(ymin + (k + 0.5) * rep.span / base_samples);
    // Refine geometrically near every vertex ordinate: the bad set is
    // expected to concentrate there, and geometric cells keep its measure
    // estimate proportional to the deepest bad offset.
    const double fac[3] = {1.0, 2.0, 5.0};
    for (cpx v : z.v)
        for (int m = 2; m <= 13; ++m)
            for (double f : fac)
                for (double sgn : {-1.0, 1.0}) {
                    double y = v.imag() + sgn * f * std::pow(10.0, -m) * rep.span;
                    if (y > ymin + 1e-15 * rep.span && y < ymax - 1e-15 * rep.span) levels.push_back(y);
                }
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [&](double a, double b) { return std::abs(a - b) < 1e-15 * rep.span; }),
                 levels.end());

    rep.level = levels;
    rep.min_radius.resize(levels.size());
    rep.bad.resize(levels.size());
    for (size_t i = 0; i < levels.size(); ++i) {
        double r = 0.0;
        try {
            HalfPlaneClip clip = horizontal_align(z, levels[i], ClipSide::above);
            r = 1e300;
            for (const TangentialQuad& t : clip.quads) r = std::min(r, t.r);
        } catch (const SembError&) {
            r = 0.0;
        }
        rep.min_radius[i] = r;
        rep.bad[i] = r < beta ? 1 : 0;
    }
    for (size_t i = 0; i < levels.size(); ++i) {
        if (!rep.bad[i]) continue;
        double lo = i == 0 ? ymin : 0.5 * (levels[i - 1] + levels[i]);
        double hi = i + 1 == levels.size() ? ymax : 0.5 * (levels[i] + levels[i + 1]);
        rep.measure += hi - lo;
    }
    return rep;
}

namespace {

// Vertex-merging accumulator for the welded embedding: positions are glued
// within a tolerance through a spatial hash, colors must agree on merge.
struct Builder {
    double tol;
    double cell;
    std::vector<cpx> pos;
    std::vector<int> color;
    std::unordered_map<long long, std::vector<int>> grid;
    std::vector<std::array<int, 4>> qv;
    std::vector<double> qtheta;
    std::vector<double> qr;

    explicit Builder(double merge_tol) : tol(merge_tol), cell(4.0 * merge_tol) {}

    long long key(long long ix, long long iy) const { return ix * 2000003LL + iy; }

    int vertex(cpx p, int col) {
        long long ix = std::llround(p.real() / cell), iy = std::llround(p.imag() / cell);
        for (long long dx = -1; dx <= 1; ++dx)
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = grid.find(key(ix + dx, iy + dy));
                if (it == grid.end()) continue;
                for (int id : it->second)
                    if (std::abs(pos[id] - p) <= tol) {
                        if (color[id] != col)
                            throw SembError(ErrorCode::validation, "weld: color clash at a glued vertex");
                        return id;
                    }
            }
        int id = int(pos.size());
        pos.push_back(p);
        color.push_back(col);
        grid[key(ix, iy)].push_back(id);
        return id;
    }

    int add_quad(CQuad q) {
        if (q.col[0] != kWhite) {
            q.v = {q.v[1], q.v[2], q.v[3], q.v[0]};
            q.col = {q.col[1], q.col[2], q.col[3], q.col[0]};
        }
        TangentialQuad t = tangential_quad(q.v);
        std::array<int, 4> ids;
        for (int k = 0; k < 4; ++k) ids[k] = vertex(q.v[k], q.col[k]);
        qv.push_back(ids);
        qtheta.push_back(recover_theta(t));
        qr.push_back(t.r);
        return int(qv.size()) - 1;
    }
};

CQuad embedding_cquad(const SEmbedding& s, int qi) {
    CQuad q;
    for (int k = 0; k < 4; ++k) {
        q.v[k] = s.pos[s.quads[qi].v[k]];
        q.col[k] = s.color[s.quads[qi].v[k]];
    }
    return q;
}

}  // namespace

SEmbedding weld_square_district(const SEmbedding& s, const WeldParams& p, WeldReport* report) {
    if (s.quads.empty()) throw SembError(ErrorCode::invalid_argument, "weld: empty embedding");
    if (p.strip_layers < 2 || p.strip_layers % 2 != 0)
        throw SembError(ErrorCode::invalid_argument, "weld: strip_layers must be even and >= 2");
    if (p.district_cols < 1) throw SembError(ErrorCode::invalid_argument, "weld: district_cols must be >= 1");
    if (!(p.kappa > 0.0 && p.kappa < 1.0))
        throw SembError(ErrorCode::invalid_argument, "weld: kappa must lie in (0, 1)");
    if (!(p.window_lo > 0.0 && p.window_lo < p.window_hi && p.window_hi < 1.0))
        throw SembError(ErrorCode::invalid_argument, "weld: bad search window");
    if (p.n_levels < 16) throw SembError(ErrorCode::invalid_argument, "weld: too few scan levels");

    WeldReport rep;
    int nq = int(s.quads.size());
    double scale = s.diameter();
    double ymin = 1e300, ymax = -1e300;
    for (cpx v : s.pos) {
        ymin = std::min(ymin, v.imag());
        ymax = std::max(ymax, v.imag());
    }
    double height = ymax - ymin;
    for (int qi = 0; qi < nq; ++qi) rep.delta = std::max(rep.delta, quad_scale(s.quad_points(qi)));
    rep.shift_constant_a = 10.0 * std::exp(-160.0 / rep.delta);
    rep.shift_constant_b = 10.0 * std::exp(-1600.0 / rep.delta);

    std::vector<TangentialQuad> tq(nq);
    std::vector<double> qlo(nq, 1e300), qhi(nq, -1e300);
    for (int qi = 0; qi < nq; ++qi) {
        tq[qi] = quad_geometry(s, qi);
        for (cpx v : tq[qi].v) {
            qlo[qi] = std::min(qlo[qi], v.imag());
            qhi[qi] = std::max(qhi[qi], v.imag());
        }
    }
    std::vector<double> ordinates;
    for (cpx v : s.pos) ordinates.push_back(v.imag());
    std::sort(ordinates.begin(), ordinates.end());
    auto near_ordinate = [&](double y, double margin) {
        auto it = std::lower_bound(ordinates.begin(), ordinates.end(), y);
        if (it != ordinates.end() && std::abs(*it - y) < margin) return true;
        return it != ordinates.begin() && std::abs(*(it - 1) - y) < margin;
    };

    // Good level: scan the window, align every crossing quad, keep the level
    // maximizing the smallest produced incircle radius.
    auto scan_level = [&](double y) -> double {
        double minr = 1e300;
        bool any = false;
        for (int qi = 0; qi < nq; ++qi) {
            if (!(qlo[qi] < y && y < qhi[qi])) continue;
            any = true;
            HalfPlaneClip clip = horizontal_align(tq[qi], y, ClipSide::above);
            if (clip.area_residual > 1e-8) return -1.0;
            for (const TangentialQuad& t : clip.quads) minr = std::min(minr, t.r);
        }
        return any ? minr : -1.0;
    };
    double lo = ymin + p.window_lo * height, hi = ymin + p.window_hi * height;
    double y_b = 0.0, best = -1.0;
    for (int k = 0; k < p.n_levels; ++k) {
        double y = lo + (k + 0.5) * (hi - lo) / p.n_levels;
        if (near_ordinate(y, 1e-9 * height)) continue;
        double score = -1.0;
        try {
            score = scan_level(y);
        } catch (const SembError&) {
            continue;
        }
        if (score > best) {
            best = score;
            y_b = y;
        }
    }
    if (best <= 0.0) throw SembError(ErrorCode::validation, "weld: no good level in the search window");
    rep.y_b = y_b;
    rep.good_level_radius = best;

    // Upper domain: untouched quads above the level plus the alignment
    // pieces of the crossing ones; everything below is discarded.
    Builder B(1e-7 * scale);
    double ytol = 1e-9 * height;
    std::vector<std::pair<int, int>> interior;  // builder quad, source quad
    std::vector<int> base_quads;                // builder quads touching y_b
    for (int qi = 0; qi < nq; ++qi) {
        if (qlo[qi] >= y_b - ytol) {
            interior.push_back({B.add_quad(embedding_cquad(s, qi)), qi});
        } else if (qhi[qi] > y_b + ytol) {
            HalfPlaneClip clip = horizontal_align(tq[qi], y_b, ClipSide::above);
            for (const TangentialQuad& t : clip.quads) {
                CQuad piece{t.v, {kWhite, kBlack, kWhite, kBlack}};
                int bq = B.add_quad(piece);
                base_quads.push_back(bq);
                rep.max_tangency_residual = std::max(rep.max_tangency_residual, t.support_residual);
                ++rep.n_aligned;
            }
        }
    }
    rep.n_interior = int(interior.size());
    for (auto [bq, qi] : interior) rep.interior_quads.push_back(bq);

    // Symmetrization level: the strip must stay below every vertex of the
    // upper domain, so the candidates live in a fraction of that gap.
    double gap = 1e300;
    for (cpx v : B.pos)
        if (v.imag() > y_b + ytol) gap = std::min(gap, v.imag() - y_b);
    if (!(gap < 1e300) || !(gap > 0.0)) throw SembError(ErrorCode::validation, "weld: no room for a strip");
    auto builder_tq = [&](int bq) {
        std::array<cpx, 4> v;
        for (int k = 0; k < 4; ++k) v[k] = B.pos[B.qv[bq][k]];
        return tangential_quad(v);
    };
    double y_r = 0.0;
    best = -1.0;
    for (int k = 0; k < p.n_levels; ++k) {
        double y = y_b + (0.2 + 0.6 * (k + 0.5) / p.n_levels) * gap;
        double minr = 1e300;
        bool ok = true;
        for (int bq : base_quads) {
            try {
                HalfPlaneClip clip = horizontal_align(builder_tq(bq), y, ClipSide::below);
                if (clip.area_residual > 1e-8) {
                    ok = false;
                    break;
                }
                for (const TangentialQuad& t : clip.quads) minr = std::min(minr, t.r);
            } catch (const SembError&) {
                ok = false;
                break;
            }
        }
        if (ok && minr > best) {
            best = minr;
            y_r = y;
        }
    }
    if (best <= 0.0) throw SembError(ErrorCode::validation, "weld: no good symmetrization level");
    rep.y_r = y_r;
    double dt = y_r - y_b;
    rep.strip_height = dt;
    rep.kite_radius_floor = dt * dt * dt * dt;
    if (dt < 100.0 * B.tol)
        throw SembError(ErrorCode::validation, "weld: strip too thin for the gluing tolerance");

    // Strip tile between the two levels; every tile vertex must land on one
    // of them.
    std::vector<CQuad> strip;
    for (int bq : base_quads) {
        HalfPlaneClip clip = horizontal_align(builder_tq(bq), y_r, ClipSide::below);
        for (const TangentialQuad& t : clip.quads) {
            for (cpx v : t.v)
                if (std::abs(v.imag() - y_b) > 1e-6 * dt && std::abs(v.imag() - y_r) > 1e-6 * dt)
                    throw SembError(ErrorCode::validation, "weld: strip vertex off the alignment levels");
            strip.push_back(CQuad{t.v, {kWhite, kBlack, kWhite, kBlack}});
            rep.max_tangency_residual = std::max(rep.max_tangency_residual, t.support_residual);
        }
    }
    rep.n_strip = int(strip.size()) * p.strip_layers;

    // Paste the strip and its mirror alternately below y_b; traces match
    // because reflection fixes the shared level pointwise.
    for (int j = 1; j <= p.strip_layers; ++j) {
        for (const CQuad& tile : strip) {
            CQuad img;
            if (j % 2 == 1) {
                double c = y_b - 0.5 * (j - 1) * dt;
                img = mirror_quad(tile);
                for (cpx& v : img.v) v += cpx(0.0, 2.0 * c);
            } else {
                img = tile;
                for (cpx& v : img.v) v -= cpx(0.0, j * dt);
            }
            B.add_quad(img);
        }
    }

    // Right boundary of the band: one rightmost vertex per level, colors
    // alternating and abscissas two-periodic by the reflection symmetry.
    int L = p.strip_layers;
    double lvl_tol = 1e-6 * dt;
    std::vector<int> bnd(L + 1, -1);
    for (int id = 0; id < int(B.pos.size()); ++id) {
        double dy = y_b - B.pos[id].imag();
        if (dy < -lvl_tol || dy > L * dt + lvl_tol) continue;
        int i = int(std::llround(dy / dt));
        if (i < 0 || i > L || std::abs(dy - i * dt) > lvl_tol) continue;
        if (bnd[i] < 0 || B.pos[id].real() > B.pos[bnd[i]].real()) bnd[i] = id;
    }
    for (int i = 0; i <= L; ++i)
        if (bnd[i] < 0) throw SembError(ErrorCode::validation, "weld: missing band boundary vertex");
    for (int i = 0; i + 1 <= L; ++i)
        if (B.color[bnd[i]] == B.color[bnd[i + 1]])
            throw SembError(ErrorCode::validation, "weld: band boundary colors do not alternate");
    double x0 = B.pos[bnd[0]].real(), x1 = B.pos[bnd[1]].real();
    for (int i = 0; i <= L; ++i) {
        double want = i % 2 == 0 ? x0 : x1;
        if (std::abs(B.pos[bnd[i]].real() - want) > 1e-9 * scale)
            throw SembError(ErrorCode::validation, "weld: band boundary abscissas are not two-periodic");
    }

    // Kite layer: each pair of boundary edges is completed by one new vertex
    // a strip height to the right, producing tangential kites (degenerating
    // to straight-angle triangles when the boundary is already vertical).
    int m = x0 >= x1 - 1e-12 * scale ? 0 : 1;
    double X = m == 0 ? x0 : x1;
    rep.min_kite_radius = 1e300;
    for (int i = m; i + 2 <= L; i += 2) {
        cpx nw(X + dt, y_b - (i + 1) * dt);
        CQuad kite{{B.pos[bnd[i]], B.pos[bnd[i + 1]], B.pos[bnd[i + 2]], nw},
                   {B.color[bnd[i]], B.color[bnd[i + 1]], B.color[bnd[i + 2]], B.color[bnd[i + 1]]}};
        int kq = B.add_quad(kite);
        rep.min_kite_radius = std::min(rep.min_kite_radius, B.qr[kq]);
        ++rep.n_kites;
    }
    if (rep.n_kites == 0) throw SembError(ErrorCode::validation, "weld: band too short for a kite layer");

    // Square district of mesh sqrt(2) * strip height: a diagonal grid whose
    // left column reuses the kite vertices.
    int role_col = B.color[bnd[m]];
    for (int q = m + 1; q + 1 <= L; ++q) {
        for (int c = 0; c + 2 <= 2 * p.district_cols; ++c) {
            if ((c + q) % 2 != m % 2) continue;
            auto gv = [&](int cc, int qq) { return cpx(X + cc * dt, y_b - qq * dt); };
            int cl = (c % 2 == 0) ? role_col : 1 - role_col;
            int cm = 1 - cl;
            CQuad face{{gv(c, q), gv(c + 1, q + 1), gv(c + 2, q), gv(c + 1, q - 1)}, {cl, cm, cl, cm}};
            B.add_quad(face);
            ++rep.n_district;
        }
    }

    // Bottom white arc of the district: the lowest row of white vertices in
    // the welded region should sit on a single level.
    {
        double wlo = 1e300;
        for (int id = 0; id < int(B.pos.size()); ++id)
            if (B.color[id] == kWhite && B.pos[id].real() >= X - 1e-9 * scale)
                wlo = std::min(wlo, B.pos[id].imag());
        double whi = wlo;
        for (int id = 0; id < int(B.pos.size()); ++id)
            if (B.color[id] == kWhite && B.pos[id].real() >= X - 1e-9 * scale &&
                B.pos[id].imag() <= wlo + 0.4 * dt)
                whi = std::max(whi, B.pos[id].imag());
        rep.district_ordinate_spread = whi - wlo;
    }

    // Assemble the embedding: quads, corner table, origami map by breadth
    // first propagation of Q(black) - Q(white) = edge length.
    SEmbedding out;
    out.pos = B.pos;
    out.color = B.color;
    for (size_t i = 0; i < B.qv.size(); ++i) {
        EmbQuad z;
        z.v = B.qv[i];
        z.theta = B.qtheta[i];
        std::array<cpx, 4> pts;
        for (int k = 0; k < 4; ++k) pts[k] = B.pos[z.v[k]];
        IncircleFit fit = fit_incircle(pts);
        z.center = fit.center;
        z.r = fit.r;
        out.quads.push_back(z);
    }
    out.index_corners();

    int nv = out.n_vertices();
    std::vector<std::vector<std::pair<int, double>>> adj(nv);
    for (const EmbQuad& z : out.quads)
        for (int k = 0; k < 4; ++k) {
            int a = z.v[k], b = z.v[(k + 1) % 4];
            double len = std::abs(out.pos[a] - out.pos[b]);
            adj[a].push_back({b, out.color[b] == kBlack ? len : -len});
            adj[b].push_back({a, out.color[a] == kBlack ? len : -len});
        }
    out.q.assign(nv, 0.0);
    std::vector<char> seen(nv, 0);
    std::deque<int> bfs{0};
    seen[0] = 1;
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop_front();
        for (auto [w, inc] : adj[v]) {
            if (!seen[w]) {
                out.q[w] = out.q[v] + inc;
                seen[w] = 1;
                bfs.push_back(w);
            } else {
                rep.max_q_defect = std::max(rep.max_q_defect, std::abs(out.q[w] - out.q[v] - inc));
            }
        }
    }
    for (char c : seen)
        if (!c) throw SembError(ErrorCode::validation, "weld: output is disconnected");
    out.qc.assign(out.quads.size(), 0.0);
    for (size_t qi = 0; qi < out.quads.size(); ++qi) {
        const EmbQuad& z = out.quads[qi];
        double e00 = std::abs(out.pos[z.v[1]] - out.pos[z.v[0]]);
        double e01 = std::abs(out.pos[z.v[1]] - out.pos[z.v[2]]);
        out.qc[qi] = out.q[z.v[1]] - std::sqrt(e00 * e01) * std::cos(z.theta);
    }

    // Final validation: untouched weights, tangency of everything new,
    // properness, and the Lipschitz scale against 5 * delta.
    for (auto [bq, qi] : interior) {
        double before = recover_theta(tq[qi]);
        double after = recover_theta(quad_geometry(out, bq));
        rep.interior_theta_drift = std::max(rep.interior_theta_drift, std::abs(after - before));
    }
    for (size_t i = 0; i < B.qv.size(); ++i) {
        TangentialQuad t = quad_geometry(out, int(i));
        rep.max_tangency_residual = std::max(rep.max_tangency_residual, t.support_residual);
    }
    rep.proper = check_properness(out).proper();
    LipScaleResult lip = lip_scale(out, p.kappa);
    rep.lip_delta = lip.delta;
    rep.lip_ok = !lip.fails_at_diameter && lip.delta <= 5.0 * rep.delta;
    if (report) *report = rep;
    return out;
}

}  // namespace semb
