#include "semb/shol.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "semb/error.hpp"

namespace semb {

namespace {

const cpx kSigma = std::polar(1.0, std::acos(-1.0) / 4.0);  // exp(i pi/4)

std::vector<double> real_values(const Spinor& x) {
    double sup = 0.0, imag = 0.0;
    for (cpx v : x.val) {
        sup = std::max(sup, std::abs(v));
        imag = std::max(imag, std::abs(v.imag()));
    }
    if (sup > 0.0 && imag > 1e-8 * sup)
        throw SembError(ErrorCode::invalid_argument,
                        "spinor must be real in the principal section (split complex "
                        "solutions into real and imaginary parts)");
    std::vector<double> out(x.val.size());
    for (size_t c = 0; c < x.val.size(); ++c) out[c] = x.val[c].real();
    return out;
}

struct Increment {
    int a, b;
    double delta;  // H(b) = H(a) + delta
};

// BFS integration of a function from additive increments; closure is the
// worst violated relation after integration.
std::vector<double> integrate(int n, const std::vector<Increment>& incs, int anchor,
                              double* max_closure) {
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const Increment& i : incs) {
        adj[i.a].push_back({i.b, i.delta});
        adj[i.b].push_back({i.a, -i.delta});
    }
    std::vector<double> h(n, 0.0);
    std::vector<char> seen(n, 0);
    std::deque<int> bfs{anchor};
    seen[anchor] = 1;
    while (!bfs.empty()) {
        int a = bfs.front();
        bfs.pop_front();
        for (auto [b, d] : adj[a]) {
            if (seen[b]) continue;
            seen[b] = 1;
            h[b] = h[a] + d;
            bfs.push_back(b);
        }
    }
    double worst = 0.0;
    for (const Increment& i : incs)
        if (seen[i.a] && seen[i.b]) worst = std::max(worst, std::abs(h[i.b] - h[i.a] - i.delta));
    if (max_closure) *max_closure = worst;
    return h;
}

// Complex increments, same scheme.
std::vector<cpx> integrate_cpx(int n, const std::vector<std::pair<std::pair<int, int>, cpx>>& incs,
                               int anchor, double* max_closure) {
    std::vector<std::vector<std::pair<int, cpx>>> adj(n);
    for (const auto& [e, d] : incs) {
        adj[e.first].push_back({e.second, d});
        adj[e.second].push_back({e.first, -d});
    }
    std::vector<cpx> h(n, 0.0);
    std::vector<char> seen(n, 0);
    std::deque<int> bfs{anchor};
    seen[anchor] = 1;
    while (!bfs.empty()) {
        int a = bfs.front();
        bfs.pop_front();
        for (auto [b, d] : adj[a]) {
            if (seen[b]) continue;
            seen[b] = 1;
            h[b] = h[a] + d;
            bfs.push_back(b);
        }
    }
    double worst = 0.0;
    for (const auto& [e, d] : incs)
        if (seen[e.first] && seen[e.second])
            worst = std::max(worst, std::abs(h[e.second] - h[e.first] - d));
    if (max_closure) *max_closure = worst;
    return h;
}

}  // namespace

SHolFunction x_to_f(const SEmbedding& s, const Spinor& x) {
    if (x.val.size() != s.corners.size())
        throw SembError(ErrorCode::invalid_argument, "spinor size does not match the corner table");
    std::vector<double> xr = real_values(x);
    SHolFunction f;
    f.val.assign(s.quads.size(), cpx(0.0, 0.0));
    for (size_t qi = 0; qi < s.quads.size(); ++qi) {
        const auto& cs = s.quads[qi].corner;
        std::array<cpx, 4> eta;
        std::array<double, 4> rhs;
        for (int k = 0; k < 4; ++k) {
            double scale = std::sqrt(std::abs(s.corner_dir(cs[k])));
            if (!(scale > 0.0))
                throw SembError(ErrorCode::validation, "degenerate corner in x_to_f");
            eta[k] = s.eta_hat(cs[k]);
            rhs[k] = xr[cs[k]] / scale;
        }
        bool have = false;
        cpx best{0.0, 0.0};
        double best_det = 0.0;
        std::vector<cpx> candidates;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                double det = cross(eta[i], eta[j]);
                if (std::abs(det) < 1e-8) continue;
                // Solve Re[conj(eta) F] = rhs for the two corners.
                double u = (rhs[i] * eta[j].imag() - rhs[j] * eta[i].imag()) / det;
                double v = (rhs[j] * eta[i].real() - rhs[i] * eta[j].real()) / det;
                cpx cand{u, v};
                candidates.push_back(cand);
                if (!have || std::abs(det) > best_det) {
                    have = true;
                    best = cand;
                    best_det = std::abs(det);
                }
            }
        if (!have)
            throw SembError(ErrorCode::validation,
                            "degenerate quad in x_to_f: all corner directions parallel");
        f.val[qi] = best;
        for (cpx cand : candidates)
            f.pair_spread = std::max(f.pair_spread, std::abs(cand - best));
    }
    return f;
}

Spinor f_to_x(const SEmbedding& s, const SHolFunction& f, double tol, double* max_mismatch) {
    if (f.val.size() != s.quads.size())
        throw SembError(ErrorCode::invalid_argument, "F size does not match the quad list");
    double sup = 0.0;
    for (cpx v : f.val) sup = std::max(sup, std::abs(v));
    Spinor x;
    x.val.assign(s.corners.size(), cpx(0.0, 0.0));
    double worst = 0.0;
    for (size_t c = 0; c < s.corners.size(); ++c) {
        const EmbCorner& ec = s.corners[c];
        double scale = std::sqrt(std::abs(s.corner_dir(int(c))));
        cpx eta = s.eta_hat(int(c));
        double xa = scale * dot(eta, f.val[ec.quad_a]);
        if (ec.quad_b >= 0) {
            double xb = scale * dot(eta, f.val[ec.quad_b]);
            worst = std::max(worst, std::abs(xa - xb));
            xa = 0.5 * (xa + xb);
        }
        x.val[c] = xa;
    }
    if (max_mismatch) *max_mismatch = worst;
    if (tol > 0.0 && worst > tol * std::max(sup, 1e-300))
        throw SembError(ErrorCode::validation, "input is not s-holomorphic: projection mismatch " +
                                                   std::to_string(worst));
    return x;
}

double shol_residual(const SEmbedding& s, const SHolFunction& f) {
    double worst = 0.0;
    for (size_t c = 0; c < s.corners.size(); ++c) {
        const EmbCorner& ec = s.corners[c];
        if (ec.quad_b < 0) continue;
        cpx eta = s.eta_hat(int(c));
        worst = std::max(worst, std::abs(dot(eta, f.val[ec.quad_a] - f.val[ec.quad_b])));
    }
    return worst;
}

HFunction build_H(const SEmbedding& s, const Spinor& x, int anchor_vertex) {
    std::vector<double> xr = real_values(x);
    int nv = s.n_vertices();
    std::vector<Increment> incs;
    for (size_t qi = 0; qi < s.quads.size(); ++qi) {
        const EmbQuad& z = s.quads[qi];
        int c00 = z.corner[0], c01 = z.corner[1], c11 = z.corner[2], c10 = z.corner[3];
        double ct = std::cos(z.theta), st = std::sin(z.theta);
        int zn = nv + int(qi);
        incs.push_back({zn, z.v[1], s.eps(c00, c01) * xr[c00] * xr[c01] * ct});
        incs.push_back({zn, z.v[3], s.eps(c10, c11) * xr[c10] * xr[c11] * ct});
        incs.push_back({z.v[0], zn, s.eps(c00, c10) * xr[c00] * xr[c10] * st});
        incs.push_back({z.v[2], zn, s.eps(c01, c11) * xr[c01] * xr[c11] * st});
        for (int c : z.corner)
            incs.push_back({s.corners[c].white, s.corners[c].black, xr[c] * xr[c]});
    }
    HFunction h;
    std::vector<double> all =
        integrate(nv + int(s.quads.size()), incs, anchor_vertex, &h.max_closure);
    h.at_vertex.assign(all.begin(), all.begin() + nv);
    h.at_quad.assign(all.begin() + nv, all.end());
    return h;
}

HFunction build_H_products(int n_nodes, const std::vector<QuadProductData>& quads,
                           int anchor_node) {
    std::vector<Increment> incs;
    for (size_t qi = 0; qi < quads.size(); ++qi) {
        const QuadProductData& q = quads[qi];
        double ct = std::cos(q.theta), st = std::sin(q.theta);
        int zn = n_nodes + int(qi);
        incs.push_back({zn, q.v[1], q.x00 * q.x01 * ct});
        incs.push_back({zn, q.v[3], q.x10 * q.x11 * ct});
        incs.push_back({q.v[0], zn, q.x00 * q.x10 * st});
        incs.push_back({q.v[2], zn, -q.x01 * q.x11 * st});
        incs.push_back({q.v[0], q.v[1], q.x00 * q.x00});
        incs.push_back({q.v[2], q.v[1], q.x01 * q.x01});
        incs.push_back({q.v[2], q.v[3], q.x11 * q.x11});
        incs.push_back({q.v[0], q.v[3], q.x10 * q.x10});
    }
    HFunction h;
    std::vector<double> all =
        integrate(n_nodes + int(quads.size()), incs, anchor_node, &h.max_closure);
    h.at_vertex.assign(all.begin(), all.begin() + n_nodes);
    h.at_quad.assign(all.begin() + n_nodes, all.end());
    return h;
}

HFunction h_from_f(const SEmbedding& s, const SHolFunction& f, int anchor_vertex) {
    std::vector<Increment> incs;
    for (size_t c = 0; c < s.corners.size(); ++c) {
        const EmbCorner& ec = s.corners[c];
        cpx F = f.val[ec.quad_a];
        cpx d = s.corner_dir(int(c));
        double dq = s.q[ec.black] - s.q[ec.white];
        incs.push_back({ec.white, ec.black, 0.5 * ((F * F * d).imag() + std::norm(F) * dq)});
    }
    HFunction h;
    h.at_vertex = integrate(s.n_vertices(), incs, anchor_vertex, &h.max_closure);
    // Quad values from the averaged X increments, for parity with build_H.
    Spinor x = f_to_x(s, f, 0.0);
    HFunction hx = build_H(s, x, anchor_vertex);
    h.at_quad.resize(s.quads.size());
    for (size_t qi = 0; qi < s.quads.size(); ++qi) {
        const EmbQuad& z = s.quads[qi];
        // Anchor the quad value to its own vertices via the product rule.
        h.at_quad[qi] = h.at_vertex[z.v[0]] + (hx.at_quad[qi] - hx.at_vertex[z.v[0]]);
    }
    return h;
}

ICFunction build_IC(const SEmbedding& s, const SHolFunction& f, int anchor_vertex) {
    if (f.val.size() != s.quads.size())
        throw SembError(ErrorCode::invalid_argument, "F size does not match the quad list");
    std::vector<std::pair<std::pair<int, int>, cpx>> incs;
    ICFunction out;
    for (size_t c = 0; c < s.corners.size(); ++c) {
        const EmbCorner& ec = s.corners[c];
        cpx d = s.corner_dir(int(c));
        double dq = s.q[ec.black] - s.q[ec.white];
        auto step = [&](cpx F) {
            return 0.5 * (std::conj(kSigma) * F * d + kSigma * std::conj(F) * dq);
        };
        cpx da = step(f.val[ec.quad_a]);
        if (ec.quad_b >= 0) {
            cpx db = step(f.val[ec.quad_b]);
            out.max_loop = std::max(out.max_loop, std::abs(da - db));
            da = 0.5 * (da + db);
        }
        incs.push_back({{ec.white, ec.black}, da});
    }
    double closure = 0.0;
    out.at_vertex = integrate_cpx(s.n_vertices(), incs, anchor_vertex, &closure);
    out.max_loop = std::max(out.max_loop, closure);
    return out;
}

MaxPrincipleReport max_principle_check(const SEmbedding& s, const HFunction& a,
                                       const HFunction& b) {
    int nv = s.n_vertices();
    std::vector<char> boundary(nv, 0);
    for (const EmbCorner& c : s.corners)
        if (c.quad_b < 0) boundary[c.black] = boundary[c.white] = 1;
    std::vector<std::vector<int>> quads_at(nv);
    std::vector<std::vector<int>> verts_at(nv);
    for (size_t qi = 0; qi < s.quads.size(); ++qi)
        for (int v : s.quads[qi].v) quads_at[v].push_back(int(qi));
    for (const EmbCorner& c : s.corners) {
        verts_at[c.black].push_back(c.white);
        verts_at[c.white].push_back(c.black);
    }
    auto diff_v = [&](int v) { return a.at_vertex[v] - b.at_vertex[v]; };
    auto diff_q = [&](int qi) { return a.at_quad[qi] - b.at_quad[qi]; };
    MaxPrincipleReport rep;
    for (int v = 0; v < nv; ++v) {
        if (boundary[v] || quads_at[v].empty()) continue;
        double d0 = diff_v(v);
        bool above = true, below = true;
        for (int qi : quads_at[v]) {
            if (diff_q(qi) >= d0) above = false;
            if (diff_q(qi) <= d0) below = false;
        }
        for (int u : verts_at[v]) {
            if (diff_v(u) >= d0) above = false;
            if (diff_v(u) <= d0) below = false;
        }
        if (above || below) {
            rep.pass = false;
            rep.witness = v;
            return rep;
        }
    }
    return rep;
}

std::string f_csv(const SEmbedding& s, const SHolFunction& f) {
    std::ostringstream os;
    os.precision(17);
    os << "quad,re_center,im_center,re_f,im_f\n";
    for (size_t qi = 0; qi < f.val.size(); ++qi)
        os << qi << ',' << s.quads[qi].center.real() << ',' << s.quads[qi].center.imag() << ','
           << f.val[qi].real() << ',' << f.val[qi].imag() << '\n';
    return os.str();
}

std::string h_csv(const SEmbedding& s, const HFunction& h) {
    std::ostringstream os;
    os.precision(17);
    os << "kind,id,re_pos,im_pos,h\n";
    for (size_t v = 0; v < h.at_vertex.size(); ++v)
        os << "vertex," << v << ',' << s.pos[v].real() << ',' << s.pos[v].imag() << ','
           << h.at_vertex[v] << '\n';
    for (size_t qi = 0; qi < h.at_quad.size(); ++qi)
        os << "quad," << qi << ',' << s.quads[qi].center.real() << ',' << s.quads[qi].center.imag()
           << ',' << h.at_quad[qi] << '\n';
    return os.str();
}

}  // namespace semb
