#include "semb/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <unordered_map>

#include "semb/error.hpp"

namespace semb {

namespace {
const double kPi = std::acos(-1.0);
}

void SEmbedding::index_corners() {
    corners.clear();
    std::unordered_map<long long, int> lookup;
    auto corner_id = [&](int black, int white) {
        long long key = (long long)black * (long long)pos.size() + white;
        auto it = lookup.find(key);
        if (it != lookup.end()) return it->second;
        EmbCorner c;
        c.black = black;
        c.white = white;
        int id = int(corners.size());
        corners.push_back(c);
        lookup[key] = id;
        return id;
    };
    for (size_t qi = 0; qi < quads.size(); ++qi) {
        EmbQuad& z = quads[qi];
        int w0 = z.v[0], b0 = z.v[1], w1 = z.v[2], b1 = z.v[3];
        z.corner[0] = corner_id(b0, w0);  // c00
        z.corner[1] = corner_id(b0, w1);  // c01
        z.corner[2] = corner_id(b1, w1);  // c11
        z.corner[3] = corner_id(b1, w0);  // c10
        for (int k = 0; k < 4; ++k) {
            EmbCorner& c = corners[z.corner[k]];
            if (c.quad_a < 0)
                c.quad_a = int(qi);
            else if (c.quad_b < 0 && c.quad_a != int(qi))
                c.quad_b = int(qi);
        }
    }
}

double SEmbedding::corner_alpha(int c) const { return std::arg(corner_dir(c)); }

cpx SEmbedding::chi_hat(int c) const {
    cpx d = corner_dir(c);
    return std::sqrt(std::abs(d)) * std::exp(cpx(0.0, 0.5 * std::arg(d)));
}

cpx SEmbedding::eta_hat(int c) const {
    return std::exp(cpx(0.0, kPi / 4.0 - 0.5 * corner_alpha(c)));
}

int SEmbedding::transition_sign(double alpha_a, double alpha_b) {
    double d = std::remainder(alpha_b - alpha_a, 2.0 * kPi);
    double w = alpha_a + d - alpha_b;  // in {-2pi, 0, 2pi}
    return std::abs(w) < kPi ? 1 : -1;
}

double SEmbedding::diameter() const {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (cpx p : pos) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    }
    if (pos.empty()) return 0.0;
    return std::hypot(xmax - xmin, ymax - ymin);
}

std::array<cpx, 4> SEmbedding::quad_points(int qi) const {
    const EmbQuad& z = quads[qi];
    return {pos[z.v[0]], pos[z.v[1]], pos[z.v[2]], pos[z.v[3]]};
}

TangentialQuad quad_geometry(const SEmbedding& s, int qi) {
    TangentialQuad t;
    t.id = qi;
    t.v = s.quad_points(qi);
    std::vector<cpx> poly(t.v.begin(), t.v.end());
    t.orient = polygon_area(poly) >= 0.0 ? 1.0 : -1.0;
    const EmbQuad& z = s.quads[qi];
    if (z.r > 0.0) {
        t.center = z.center;
        t.r = z.r;
    } else {
        IncircleFit fit = fit_incircle(t.v);
        t.center = fit.center;
        t.r = fit.r;
    }
    t.support_residual = 0.0;
    for (int i = 0; i < 4; ++i) {
        double d = t.orient * line_side(t.center, t.v[i], t.v[(i + 1) % 4]);
        t.support_residual = std::max(t.support_residual, std::abs(d - t.r));
        t.phi[i] = half_angle(t.v, i, t.orient);
    }
    t.pitot = pitot_residual(t.v);
    return t;
}

double recover_theta(const TangentialQuad& t) {
    double sb = std::sin(t.phi[1]) * std::sin(t.phi[3]);
    double sw = std::sin(t.phi[0]) * std::sin(t.phi[2]);
    if (!(sw > 0.0) || !(sb > 0.0))
        throw SembError(ErrorCode::validation, "recover_theta: vanishing half-angle");
    return std::atan(std::sqrt(sb / sw));
}

PropernessReport check_properness(const SEmbedding& s) {
    PropernessReport rep;
    double diam = s.diameter();
    double eps = 1e-9 * (diam > 0.0 ? diam : 1.0);
    int nq = int(s.quads.size());
    struct Box {
        double x0, x1, y0, y1;
        int i;
    };
    std::vector<Box> boxes(nq);
    std::vector<std::vector<cpx>> polys(nq);
    for (int i = 0; i < nq; ++i) {
        auto p = s.quad_points(i);
        polys[i].assign(p.begin(), p.end());
        Box b{1e300, -1e300, 1e300, -1e300, i};
        for (cpx v : p) {
            b.x0 = std::min(b.x0, v.real());
            b.x1 = std::max(b.x1, v.real());
            b.y0 = std::min(b.y0, v.imag());
            b.y1 = std::max(b.y1, v.imag());
        }
        boxes[i] = b;
        TangentialQuad t = quad_geometry(s, i);
        if (t.r < 1e-12 * diam) rep.degenerate.push_back(i);
    }
    std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) { return a.x0 < b.x0; });
    for (int a = 0; a < nq; ++a) {
        for (int b = a + 1; b < nq; ++b) {
            if (boxes[b].x0 > boxes[a].x1 + eps) break;
            if (boxes[b].y0 > boxes[a].y1 + eps || boxes[a].y0 > boxes[b].y1 + eps) continue;
            int i = boxes[a].i, j = boxes[b].i;
            if (interiors_overlap(polys[i], polys[j], eps))
                rep.overlaps.push_back({std::min(i, j), std::max(i, j)});
        }
    }
    std::sort(rep.overlaps.begin(), rep.overlaps.end());
    return rep;
}

LipScaleResult lip_scale(const SEmbedding& s, double kappa) {
    LipScaleResult res;
    int n = int(s.pos.size());
    double max_dist = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double ds = std::abs(s.pos[i] - s.pos[j]);
            double dq = std::abs(s.q[i] - s.q[j]);
            max_dist = std::max(max_dist, ds);
            if (dq > kappa * ds && ds > res.delta) {
                res.delta = ds;
                res.v0 = i;
                res.v1 = j;
            }
        }
    }
    res.fails_at_diameter = res.delta > 0.0 && res.delta >= max_dist * (1.0 - 1e-12);
    return res;
}

ExpFatReport exp_fat_check(const SEmbedding& s, double delta, double rho) {
    ExpFatReport rep;
    rep.threshold = delta * std::exp(-rho / delta);
    int nq = int(s.quads.size());
    std::vector<int> thin;
    for (int i = 0; i < nq; ++i) {
        TangentialQuad t = quad_geometry(s, i);
        if (t.r < rep.threshold) thin.push_back(i);
    }
    rep.n_thin = int(thin.size());
    // Union-find over thin quads sharing a vertex.
    std::unordered_map<int, int> vert_owner;
    std::vector<int> parent(thin.size());
    for (size_t i = 0; i < thin.size(); ++i) parent[i] = int(i);
    std::function<int(int)> find = [&](int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
    for (size_t i = 0; i < thin.size(); ++i)
        for (int v : s.quads[thin[i]].v) {
            auto it = vert_owner.find(v);
            if (it == vert_owner.end())
                vert_owner[v] = int(i);
            else
                parent[find(int(i))] = find(it->second);
        }
    std::unordered_map<int, std::vector<cpx>> comp_pts;
    for (size_t i = 0; i < thin.size(); ++i)
        for (int v : s.quads[thin[i]].v) comp_pts[find(int(i))].push_back(s.pos[v]);
    rep.n_components = int(comp_pts.size());
    for (auto& [root, pts] : comp_pts) {
        for (size_t i = 0; i < pts.size(); ++i)
            for (size_t j = i + 1; j < pts.size(); ++j)
                rep.max_component_diameter = std::max(rep.max_component_diameter, std::abs(pts[i] - pts[j]));
    }
    rep.pass = rep.max_component_diameter <= rho;
    return rep;
}

namespace {

// Recompute center, r and qc of every quad from the embedding's own
// principal spinor. The coherent corner products are gauge free, so this is
// well defined whenever (pos, q) is an s-embedding with these quads.
void refresh_quads(SEmbedding& s, double* max_spread = nullptr) {
    if (max_spread) *max_spread = 0.0;
    s.qc.assign(s.quads.size(), 0.0);
    for (size_t qi = 0; qi < s.quads.size(); ++qi) {
        EmbQuad& z = s.quads[qi];
        double co = std::cos(z.theta), si = std::sin(z.theta);
        int c00 = z.corner[0], c01 = z.corner[1], c11 = z.corner[2], c10 = z.corner[3];
        auto chi = [&](int c) { return s.chi_hat(c); };
        cpx pb0 = double(s.eps(c00, c01)) * chi(c00) * chi(c01);
        cpx pb1 = double(s.eps(c10, c11)) * chi(c10) * chi(c11);
        cpx pw0 = double(s.eps(c00, c10)) * chi(c00) * chi(c10);
        cpx pw1 = double(s.eps(c01, c11)) * chi(c01) * chi(c11);
        cpx cands[4] = {s.pos[z.v[1]] - pb0 * co, s.pos[z.v[3]] - pb1 * co,
                        s.pos[z.v[0]] + pw0 * si, s.pos[z.v[2]] + pw1 * si};
        cpx center = 0.25 * (cands[0] + cands[1] + cands[2] + cands[3]);
        if (max_spread)
            for (cpx cand : cands) *max_spread = std::max(*max_spread, std::abs(cand - center));
        z.center = center;
        auto pts = s.quad_points(int(qi));
        double orient = polygon_area({pts.begin(), pts.end()}) >= 0.0 ? 1.0 : -1.0;
        double r = 0.0;
        for (int i = 0; i < 4; ++i) r += orient * line_side(center, pts[i], pts[(i + 1) % 4]);
        z.r = r / 4.0;
        s.qc[qi] = s.q[z.v[1]] - std::abs(pb0) * co;
    }
}

}  // namespace

SEmbedding boost(const SEmbedding& s, double t) {
    if (!(std::abs(t) < 1.0)) throw SembError(ErrorCode::invalid_argument, "boost parameter must satisfy |t| < 1");
    double a = (1.0 + t * t) / (1.0 - t * t);
    double b = 2.0 * t / (1.0 - t * t);
    SEmbedding out = s;
    for (size_t i = 0; i < s.pos.size(); ++i) {
        out.pos[i] = cpx(a * s.pos[i].real() + b * s.q[i], s.pos[i].imag());
        out.q[i] = b * s.pos[i].real() + a * s.q[i];
    }
    refresh_quads(out);
    return out;
}

double propagation_residual(const SEmbedding& s, const Spinor& x, int qi) {
    const EmbQuad& z = s.quads[qi];
    int c00 = z.corner[0], c01 = z.corner[1], c11 = z.corner[2], c10 = z.corner[3];
    double co = std::cos(z.theta), si = std::sin(z.theta);
    auto val = [&](int c) { return x.val[c]; };
    auto e = [&](int a, int b) { return double(s.eps(a, b)); };
    double r = 0.0;
    r = std::max(r, std::abs(val(c00) - e(c00, c01) * val(c01) * co - e(c00, c10) * val(c10) * si));
    r = std::max(r, std::abs(val(c01) - e(c01, c00) * val(c00) * co - e(c01, c11) * val(c11) * si));
    r = std::max(r, std::abs(val(c11) - e(c11, c10) * val(c10) * co - e(c11, c01) * val(c01) * si));
    r = std::max(r, std::abs(val(c10) - e(c10, c11) * val(c11) * co - e(c10, c00) * val(c00) * si));
    return r;
}

SpinorReport verify_spinor(const SEmbedding& s, const Spinor& x) {
    SpinorReport rep;
    for (size_t qi = 0; qi < s.quads.size(); ++qi) {
        double r = propagation_residual(s, x, int(qi));
        rep.by_residual.push_back({r, int(qi)});
        if (r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_quad = int(qi);
        }
    }
    std::sort(rep.by_residual.rbegin(), rep.by_residual.rend());
    return rep;
}

Spinor embedding_spinor(const SEmbedding& s) {
    Spinor x;
    x.val.resize(s.corners.size());
    for (size_t c = 0; c < s.corners.size(); ++c) x.val[c] = s.chi_hat(int(c));
    return x;
}

SEmbedding build_embedding(const SEmbedding& shape, const Spinor& x, cpx anchor_pos, int anchor_vertex,
                           BuildReport* report) {
    SEmbedding out = shape;
    int n = shape.n_vertices();
    std::vector<char> placed(n, 0);
    out.pos.assign(n, cpx(0, 0));
    out.q.assign(n, 0.0);
    out.pos[anchor_vertex] = anchor_pos;
    out.q[anchor_vertex] = 0.0;
    placed[anchor_vertex] = 1;
    // Corner adjacency for BFS.
    std::vector<std::vector<int>> at_vertex(n);
    for (size_t c = 0; c < shape.corners.size(); ++c) {
        at_vertex[shape.corners[c].black].push_back(int(c));
        at_vertex[shape.corners[c].white].push_back(int(c));
    }
    BuildReport rep;
    std::deque<int> bfs{anchor_vertex};
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop_front();
        for (int ci : at_vertex[v]) {
            const EmbCorner& c = shape.corners[ci];
            cpx inc = x.val[ci] * x.val[ci];
            double qinc = std::norm(x.val[ci]);
            int other = c.black == v ? c.white : c.black;
            double sgn = c.black == v ? -1.0 : 1.0;  // S(black) = S(white) + inc
            if (!placed[other]) {
                out.pos[other] = out.pos[v] + sgn * inc;
                out.q[other] = out.q[v] + sgn * qinc;
                placed[other] = 1;
                bfs.push_back(other);
            } else {
                double defect = std::abs(out.pos[c.black] - out.pos[c.white] - inc);
                rep.max_closure = std::max(rep.max_closure, defect);
            }
        }
    }
    for (char p : placed)
        if (!p) throw SembError(ErrorCode::validation, "embedding scaffold is disconnected");

    out.qc.assign(shape.quads.size(), 0.0);
    double diam = out.diameter();
    for (size_t qi = 0; qi < shape.quads.size(); ++qi) {
        EmbQuad& z = out.quads[qi];
        double co = std::cos(z.theta), si = std::sin(z.theta);
        int c00 = z.corner[0], c01 = z.corner[1], c11 = z.corner[2], c10 = z.corner[3];
        auto eps_ref = [&](int a, int b) {
            return double(SEmbedding::transition_sign(shape.corner_alpha(a), shape.corner_alpha(b)));
        };
        cpx pb0 = eps_ref(c00, c01) * x.val[c00] * x.val[c01];
        cpx pb1 = eps_ref(c10, c11) * x.val[c10] * x.val[c11];
        cpx pw0 = eps_ref(c00, c10) * x.val[c00] * x.val[c10];
        cpx pw1 = eps_ref(c01, c11) * x.val[c01] * x.val[c11];
        cpx cands[4] = {out.pos[z.v[1]] - pb0 * co, out.pos[z.v[3]] - pb1 * co,
                        out.pos[z.v[0]] + pw0 * si, out.pos[z.v[2]] + pw1 * si};
        cpx center = 0.25 * (cands[0] + cands[1] + cands[2] + cands[3]);
        for (cpx cand : cands) rep.max_center_spread = std::max(rep.max_center_spread, std::abs(cand - center));
        z.center = center;
        double r = 0.0;
        auto pts = out.quad_points(int(qi));
        double orient = polygon_area({pts.begin(), pts.end()}) >= 0.0 ? 1.0 : -1.0;
        for (int i = 0; i < 4; ++i) r += orient * line_side(center, pts[i], pts[(i + 1) % 4]);
        z.r = r / 4.0;
        out.qc[qi] = out.q[z.v[1]] - std::abs(pb0) * co;
        if (z.r < 1e-12 * diam) rep.degenerate.push_back(int(qi));
    }
    if (report) *report = rep;
    return out;
}

}  // namespace semb
