#include "semb/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <unordered_map>

#include "semb/error.hpp"

namespace semb {

namespace {

const double kPi = std::acos(-1.0);

// Incircle fit, half-angle extraction and theta assignment for a quad whose
// vertex contour is already set.
void finish_quad(const SEmbedding& s, EmbQuad& z) {
    std::array<cpx, 4> pts;
    for (int k = 0; k < 4; ++k) pts[k] = s.pos[z.v[k]];
    IncircleFit fit = fit_incircle(pts);
    z.center = fit.center;
    z.r = fit.r;
    double sb = std::sin(half_angle(pts, 1, fit.orient)) * std::sin(half_angle(pts, 3, fit.orient));
    double sw = std::sin(half_angle(pts, 0, fit.orient)) * std::sin(half_angle(pts, 2, fit.orient));
    if (!(sb > 0.0) || !(sw > 0.0))
        throw SembError(ErrorCode::validation, "degenerate quad in construction");
    z.theta = std::atan(std::sqrt(sb / sw));
}

// Make the contour ccw and white-first without breaking the alternation.
void orient_quad(const SEmbedding& s, EmbQuad& z) {
    std::vector<cpx> pts;
    for (int k = 0; k < 4; ++k) pts.push_back(s.pos[z.v[k]]);
    if (polygon_area(pts) < 0.0) std::swap(z.v[1], z.v[3]);
    if (s.color[z.v[0]] != kWhite) z.v = {z.v[1], z.v[2], z.v[3], z.v[0]};
}

}  // namespace

void attach_black_graph(Construction& c) {
    SEmbedding& s = c.emb;
    int nq = int(s.quads.size());

    // The sphere graph rejects degree-1 vertices, so trim quads whose black
    // diagonal ends at such a vertex (cascading) and keep one connected
    // component. The embedding keeps every quad; trimmed ones simply carry
    // no graph edge.
    std::vector<char> keep(nq, 1);
    std::vector<int> deg(s.n_vertices(), 0);
    for (const EmbQuad& z : s.quads) {
        ++deg[z.v[1]];
        ++deg[z.v[3]];
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (int qi = 0; qi < nq; ++qi) {
            if (!keep[qi]) continue;
            if (deg[s.quads[qi].v[1]] == 1 || deg[s.quads[qi].v[3]] == 1) {
                keep[qi] = 0;
                --deg[s.quads[qi].v[1]];
                --deg[s.quads[qi].v[3]];
                changed = true;
            }
        }
    }
    // Largest component of the kept black graph, by union-find on vertices.
    std::vector<int> parent(s.n_vertices());
    for (int v = 0; v < s.n_vertices(); ++v) parent[v] = v;
    std::function<int(int)> find = [&](int v) {
        return parent[v] == v ? v : parent[v] = find(parent[v]);
    };
    for (int qi = 0; qi < nq; ++qi)
        if (keep[qi]) parent[find(s.quads[qi].v[1])] = find(s.quads[qi].v[3]);
    std::vector<int> comp_size(s.n_vertices(), 0);
    for (int qi = 0; qi < nq; ++qi)
        if (keep[qi]) ++comp_size[find(s.quads[qi].v[1])];
    int best = -1;
    for (int v = 0; v < s.n_vertices(); ++v)
        if (best < 0 || comp_size[v] > comp_size[best]) best = v;
    for (int qi = 0; qi < nq; ++qi)
        if (keep[qi] && find(s.quads[qi].v[1]) != best) keep[qi] = 0;

    c.black_vertex.clear();
    c.quad_edge.assign(nq, -1);
    c.graph_ok = false;
    for (int qi = 0; qi < nq; ++qi) s.quads[qi].graph_edge = -1;
    int n_keep = 0;
    for (int qi = 0; qi < nq; ++qi) n_keep += keep[qi];
    if (n_keep == 0) {
        c.graph_note = "black graph empty after trimming degree-1 vertices";
        c.graph = GraphDesc{};
        return;
    }

    std::vector<int> compact(s.n_vertices(), -1);
    for (int qi = 0; qi < nq; ++qi) {
        if (!keep[qi]) continue;
        for (int k : {1, 3})
            if (compact[s.quads[qi].v[k]] < 0) {
                compact[s.quads[qi].v[k]] = int(c.black_vertex.size());
                c.black_vertex.push_back(s.quads[qi].v[k]);
            }
    }
    std::vector<cpx> pos;
    for (int v : c.black_vertex) pos.push_back(s.pos[v]);
    std::vector<std::pair<int, int>> segs;
    std::vector<double> w;
    for (int qi = 0; qi < nq; ++qi) {
        if (!keep[qi]) continue;
        c.quad_edge[qi] = int(segs.size());
        s.quads[qi].graph_edge = int(segs.size());
        segs.push_back({compact[s.quads[qi].v[1]], compact[s.quads[qi].v[3]]});
        w.push_back(std::tan(0.5 * s.quads[qi].theta));
    }
    try {
        c.graph = WeightedPlanarGraph::from_coordinates(pos, segs, w);
        WeightedPlanarGraph::build(c.graph);  // validate now rather than at use
        c.graph_ok = true;
    } catch (const SembError& e) {
        // Keep the embedding usable even when the trimmed black graph fails
        // validation (thin patches can leave a degenerate sphere graph).
        c.graph = GraphDesc{};
        c.graph_ok = false;
        c.graph_note = e.what();
    }
}

LayerSpec massive_layers(int columns, int rows, double mass, int n) {
    if (n <= 0 || 1.0 + mass / n <= 0.0)
        throw SembError(ErrorCode::invalid_argument, "massive spec needs tan(theta) > 0");
    LayerSpec spec;
    spec.rows = rows;
    spec.theta.assign(columns, std::atan(1.0 + mass / n));
    return spec;
}

LayerSpec iid_layers(int columns, int rows, double alpha, int n, std::uint64_t seed,
                     std::vector<double>* z_out) {
    LayerSpec spec;
    spec.rows = rows;
    std::mt19937_64 rng(seed);
    double amp = std::pow(double(n), -alpha);
    if (z_out) z_out->clear();
    for (int k = 0; k < columns; ++k) {
        double z = (rng() & 1) ? 1.0 : -1.0;
        if (z_out) z_out->push_back(z);
        spec.theta.push_back(std::atan(1.0 + z * amp));
    }
    return spec;
}

ZigzagResult zigzag_layered(const LayerSpec& spec) {
    int K = int(spec.theta.size());
    int J = spec.rows;
    if (K < 1 || J < 1) throw SembError(ErrorCode::invalid_argument, "layer spec needs columns and rows");
    for (int k = 0; k < K; ++k)
        if (!(spec.theta[k] > 0.0) || !(spec.theta[k] < kPi / 2))
            throw SembError(ErrorCode::invalid_argument, "column angle outside (0, pi/2)");
    double s = spec.scale;
    if (!(s > 0.0)) throw SembError(ErrorCode::invalid_argument, "scale must be positive");

    // Tangent-line angle recursion: T_k = tan(pi/4 + phi_k/2) with phi_k the
    // tangency angle of column k's support line; T_{k+1} = tan^2(theta_k) T_k.
    std::vector<double> T(K + 1);
    T[0] = 1.0;
    for (int k = 0; k < K; ++k) {
        double t = std::tan(spec.theta[k]);
        T[k + 1] = t * t * T[k];
        if (!(T[k + 1] > 1e-8) || !(T[k + 1] < 1e8))
            throw SembError(ErrorCode::validation,
                            "zig-zag column " + std::to_string(k + 1) + " degenerates");
    }

    ZigzagResult res;
    res.black_x.assign(K + 1, 0.0);
    res.white_x.assign(K + 1, 0.0);
    res.black_q.assign(K + 1, 0.0);
    res.white_q.assign(K + 1, 0.0);
    std::vector<double> center_x(K);
    for (int k = 0; k <= K; ++k) {
        res.white_x[k] = res.black_x[k] + T[k] - 1.0 / T[k];
        res.black_q[k] = res.white_q[k] + T[k] + 1.0 / T[k];
        if (k < K) {
            center_x[k] = res.black_x[k] + T[k];
            res.black_x[k + 1] = center_x[k] + 1.0 / T[k + 1];
            res.white_q[k + 1] = res.black_q[k] - (T[k] + T[k + 1]);
        }
    }

    // Independent closed-form route: column increments as products of
    // tan^2 / cot^2 over the preceding angles.
    res.black_x_formula.assign(K + 1, 0.0);
    res.white_x_formula.assign(K + 1, 0.0);
    res.black_q_formula.assign(K + 1, 0.0);
    res.white_q_formula.assign(K + 1, 0.0);
    res.white_q_formula[0] = 0.0;
    res.black_q_formula[0] = 2.0;
    double pt = 1.0, pc = 1.0;  // products of tan^2 and cot^2 over p < k
    for (int k = 0; k < K; ++k) {
        double t2 = std::pow(std::tan(spec.theta[k]), 2.0);
        double pt_next = pt * t2, pc_next = pc / t2;
        res.black_x_formula[k + 1] = res.black_x_formula[k] + pt + pc_next;
        res.white_x_formula[k + 1] = res.white_x_formula[k] + pc + pt_next;
        res.black_q_formula[k + 1] = res.black_q_formula[k] + pc_next - pt;
        res.white_q_formula[k + 1] = res.white_q_formula[k] + pc - pt_next;
        pt = pt_next;
        pc = pc_next;
    }
    for (int k = 0; k <= K; ++k) {
        res.max_formula_mismatch = std::max(res.max_formula_mismatch,
                                            std::abs(res.black_x[k] - res.black_x_formula[k]));
        res.max_formula_mismatch = std::max(res.max_formula_mismatch,
                                            std::abs(res.white_x[k] - res.white_x_formula[k]));
        res.max_formula_mismatch = std::max(res.max_formula_mismatch,
                                            std::abs(res.black_q[k] - res.black_q_formula[k]));
        res.max_formula_mismatch = std::max(res.max_formula_mismatch,
                                            std::abs(res.white_q[k] - res.white_q_formula[k]));
    }

    SEmbedding& emb = res.c.emb;
    auto vid = [&](int k, int j) { return j * (K + 1) + k; };
    for (int j = 0; j <= J; ++j)
        for (int k = 0; k <= K; ++k) {
            bool black = (k + j) % 2 == 0;
            emb.color.push_back(black ? kBlack : kWhite);
            emb.pos.push_back(cpx(s * (black ? res.black_x[k] : res.white_x[k]), s * 2.0 * j));
            emb.q.push_back(s * (black ? res.black_q[k] : res.white_q[k]));
        }
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) {
            EmbQuad z;
            if ((k + j) % 2 == 0)
                z.v = {vid(k + 1, j), vid(k + 1, j + 1), vid(k, j + 1), vid(k, j)};
            else
                z.v = {vid(k, j), vid(k + 1, j), vid(k + 1, j + 1), vid(k, j + 1)};
            z.center = cpx(s * center_x[k], s * (2.0 * j + 1.0));
            z.r = s;
            z.theta = spec.theta[k];
            emb.quads.push_back(z);
        }
    emb.index_corners();

    // Geometric re-validation of every quad against the analytic data.
    for (const EmbQuad& z : emb.quads) {
        std::array<cpx, 4> pts;
        for (int k = 0; k < 4; ++k) pts[k] = emb.pos[z.v[k]];
        IncircleFit fit = fit_incircle(pts);
        if (std::abs(fit.r - s) > 1e-9 * s || std::abs(fit.center - z.center) > 1e-9 * s ||
            fit.residual > 1e-9 * s)
            throw SembError(ErrorCode::validation, "zig-zag quad fails the incircle check");
        TangentialQuad tq;
        tq.v = pts;
        tq.orient = fit.orient;
        for (int i = 0; i < 4; ++i) tq.phi[i] = half_angle(pts, i, fit.orient);
        if (std::abs(recover_theta(tq) - z.theta) > 1e-9)
            throw SembError(ErrorCode::validation, "zig-zag quad angle mismatch");
    }

    res.c.spinor = embedding_spinor(emb);
    attach_black_graph(res.c);
    return res;
}

Construction square_lattice(int n, double theta) {
    if (n < 2) throw SembError(ErrorCode::invalid_argument, "square lattice needs n >= 2");
    if (!(theta > 0.0) || !(theta < kPi / 2))
        throw SembError(ErrorCode::invalid_argument, "theta outside (0, pi/2)");
    LayerSpec spec;
    spec.theta.assign(n, theta);
    spec.rows = n;
    spec.scale = 0.5;  // unit cells
    return zigzag_layered(spec).c;
}

RhombicTiling square_rhombi(int n, double delta) {
    RhombicTiling t;
    auto vid = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) t.pos.push_back(delta * cpx(i, j));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            t.rhombi.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    return t;
}

RhombicTiling tri_rhombi(int n, double delta) {
    RhombicTiling t;
    double ell = delta * std::sqrt(3.0);
    auto pt = [&](int a, int b) { return ell * cpx(a + 0.5 * b, 0.5 * std::sqrt(3.0) * b); };
    auto lat = [&](int a, int b) { return b * (n + 1) + a; };
    for (int b = 0; b <= n; ++b)
        for (int a = 0; a <= n; ++a) t.pos.push_back(pt(a, b));
    int up0 = int(t.pos.size());
    auto up = [&](int a, int b) { return up0 + b * n + a; };
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) t.pos.push_back((pt(a, b) + pt(a + 1, b) + pt(a, b + 1)) / 3.0);
    int dn0 = int(t.pos.size());
    auto dn = [&](int a, int b) { return dn0 + b * n + a; };
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a)
            t.pos.push_back((pt(a + 1, b) + pt(a + 1, b + 1) + pt(a, b + 1)) / 3.0);
    // One rhombus per interior lattice edge (two incident triangles).
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            // Diagonal edge p(a+1,b) - p(a,b+1): between up(a,b) and dn(a,b).
            t.rhombi.push_back({lat(a + 1, b), up(a, b), lat(a, b + 1), dn(a, b)});
            // Horizontal edge p(a,b) - p(a+1,b): between up(a,b) and dn(a,b-1).
            if (b > 0) t.rhombi.push_back({lat(a, b), up(a, b), lat(a + 1, b), dn(a, b - 1)});
            // Left-leaning edge p(a,b) - p(a,b+1): between up(a,b) and dn(a-1,b).
            if (a > 0) t.rhombi.push_back({lat(a, b), up(a, b), lat(a, b + 1), dn(a - 1, b)});
        }
    return t;
}

RhombicTiling penrose_rhombi(int range, double delta, std::uint64_t seed) {
    RhombicTiling t;
    std::mt19937_64 rng(seed);
    std::array<cpx, 5> d;
    std::array<double, 5> gamma;
    for (int k = 0; k < 5; ++k) {
        d[k] = std::polar(1.0, 2.0 * kPi * k / 5.0);
        gamma[k] = 0.1 + 0.8 * double(rng() >> 11) * 0x1p-53;
    }
    std::map<std::array<int, 5>, int> vid;
    auto vertex = [&](std::array<int, 5> K) {
        auto it = vid.find(K);
        if (it != vid.end()) return it->second;
        cpx p{0.0, 0.0};
        for (int j = 0; j < 5; ++j) p += double(K[j]) * d[j];
        int id = int(t.pos.size());
        t.pos.push_back(delta * p);
        vid[K] = id;
        return id;
    };
    double rad = 0.9 * range;
    for (int k = 0; k < 5; ++k)
        for (int l = k + 1; l < 5; ++l)
            for (int a = -range; a <= range; ++a)
                for (int b = -range; b <= range; ++b) {
                    // Intersection of line a of grid k with line b of grid l.
                    double det = cross(d[k], d[l]);
                    cpx z = ((double(a) - gamma[k]) * cpx(d[l].imag(), -d[l].real()) -
                             (double(b) - gamma[l]) * cpx(d[k].imag(), -d[k].real())) /
                            det;
                    // dot(z, d[k]) == a - gamma[k] and likewise for l.
                    if (std::abs(z) > rad) continue;
                    std::array<int, 5> K{};
                    for (int j = 0; j < 5; ++j) K[j] = int(std::ceil(dot(z, d[j]) + gamma[j]));
                    std::array<int, 4> r;
                    int kk = 0;
                    for (auto [ek, el] : {std::pair{0, 0}, {1, 0}, {1, 1}, {0, 1}}) {
                        std::array<int, 5> Kv = K;
                        Kv[k] = a + ek;
                        Kv[l] = b + el;
                        r[kk++] = vertex(Kv);
                    }
                    t.rhombi.push_back(r);
                }
    return t;
}

Construction isoradial_from_rhombi(const RhombicTiling& t, double delta) {
    if (t.rhombi.empty()) throw SembError(ErrorCode::invalid_argument, "empty tiling");
    for (const auto& r : t.rhombi)
        for (int k = 0; k < 4; ++k) {
            double side = std::abs(t.pos[r[(k + 1) % 4]] - t.pos[r[k]]);
            if (std::abs(side - delta) > 1e-7 * delta)
                throw SembError(ErrorCode::validation, "tiling face is not a delta rhombus");
        }

    // Two-color the tiling vertices over rhombus sides.
    std::vector<int> color(t.pos.size(), -1);
    std::vector<std::vector<int>> adj(t.pos.size());
    for (const auto& r : t.rhombi)
        for (int k = 0; k < 4; ++k) {
            adj[r[k]].push_back(r[(k + 1) % 4]);
            adj[r[(k + 1) % 4]].push_back(r[k]);
        }
    for (size_t v0 = 0; v0 < t.pos.size(); ++v0) {
        if (color[v0] >= 0 || adj[v0].empty()) continue;
        color[v0] = kBlack;
        std::deque<int> bfs{int(v0)};
        while (!bfs.empty()) {
            int v = bfs.front();
            bfs.pop_front();
            for (int u : adj[v]) {
                if (color[u] < 0) {
                    color[u] = 1 - color[v];
                    bfs.push_back(u);
                } else if (color[u] == color[v]) {
                    throw SembError(ErrorCode::validation, "tiling vertex graph is not bipartite");
                }
            }
        }
    }

    Construction c;
    c.emb.pos = t.pos;
    for (size_t v = 0; v < t.pos.size(); ++v) {
        int col = color[v] < 0 ? kWhite : color[v];
        c.emb.color.push_back(col);
        c.emb.q.push_back(col == kBlack ? delta : 0.0);
    }
    for (const auto& r : t.rhombi) {
        EmbQuad z;
        z.v = {r[0], r[1], r[2], r[3]};
        orient_quad(c.emb, z);
        finish_quad(c.emb, z);
        c.emb.quads.push_back(z);
    }
    c.emb.index_corners();
    c.spinor = embedding_spinor(c.emb);
    attach_black_graph(c);
    return c;
}

Triangulation fan_triangulation(int k) {
    if (k < 2) throw SembError(ErrorCode::invalid_argument, "fan needs at least one triangle");
    Triangulation t;
    t.n_vertices = k + 1;
    for (int i = 1; i < k; ++i) t.tris.push_back({0, i, i + 1});
    return t;
}

Triangulation hex_triangulation(int rings) {
    Triangulation t;
    std::map<std::pair<int, int>, int> id;
    auto inside = [&](int a, int b) {
        return std::abs(a) <= rings && std::abs(b) <= rings && std::abs(a + b) <= rings;
    };
    auto vid = [&](int a, int b) {
        auto it = id.find({a, b});
        if (it != id.end()) return it->second;
        int v = t.n_vertices++;
        id[{a, b}] = v;
        return v;
    };
    for (int a = -rings; a <= rings; ++a)
        for (int b = -rings; b <= rings; ++b) {
            if (inside(a, b) && inside(a + 1, b) && inside(a, b + 1))
                t.tris.push_back({vid(a, b), vid(a + 1, b), vid(a, b + 1)});
            if (inside(a + 1, b) && inside(a + 1, b + 1) && inside(a, b + 1))
                t.tris.push_back({vid(a + 1, b), vid(a + 1, b + 1), vid(a, b + 1)});
        }
    return t;
}

Triangulation grid_triangulation(int nx, int ny) {
    Triangulation t;
    t.n_vertices = (nx + 1) * (ny + 1);
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if ((i + j) % 2 == 0) {
                t.tris.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
                t.tris.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
            } else {
                t.tris.push_back({vid(i, j), vid(i + 1, j), vid(i, j + 1)});
                t.tris.push_back({vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
            }
        }
    return t;
}

CirclePattern circle_pattern_from_triangulation(const Triangulation& tri, int max_iter, double tol) {
    int nv = tri.n_vertices;
    int nt = int(tri.tris.size());
    if (nt < 1) throw SembError(ErrorCode::invalid_argument, "empty triangulation");
    if (nt > 20000) throw SembError(ErrorCode::invalid_argument, "triangulation exceeds the size cap");

    // Edge map and interior/boundary classification.
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    std::vector<std::vector<int>> tris_at(nv);
    for (int ti = 0; ti < nt; ++ti) {
        auto [a, b, c0] = std::tuple{tri.tris[ti][0], tri.tris[ti][1], tri.tris[ti][2]};
        for (auto [u, v] : {std::pair{a, b}, {b, c0}, {c0, a}})
            edge_tris[{std::min(u, v), std::max(u, v)}].push_back(ti);
        tris_at[a].push_back(ti);
        tris_at[b].push_back(ti);
        tris_at[c0].push_back(ti);
    }
    for (auto& [e, ts] : edge_tris)
        if (ts.size() > 2) throw SembError(ErrorCode::validation, "non-manifold triangulation edge");
    std::vector<int> n_edges_at(nv, 0);
    for (auto& [e, ts] : edge_tris) {
        ++n_edges_at[e.first];
        ++n_edges_at[e.second];
    }
    std::vector<char> interior(nv, 0);
    for (int v = 0; v < nv; ++v)
        if (!tris_at[v].empty() && int(tris_at[v].size()) == n_edges_at[v]) interior[v] = 1;

    CirclePattern out;
    out.radius.assign(nv, 1.0);
    auto angle_at = [&](int v, int ti) {
        int u = -1, w = -1;
        for (int x : tri.tris[ti])
            if (x != v) (u < 0 ? u : w) = x;
        double a = out.radius[v] + out.radius[u];
        double b = out.radius[v] + out.radius[w];
        double c0 = out.radius[u] + out.radius[w];
        double cosv = (a * a + b * b - c0 * c0) / (2.0 * a * b);
        return std::acos(std::clamp(cosv, -1.0, 1.0));
    };
    // Uniform-neighbor radius updates until all interior angle sums are 2 pi.
    double residual = 1e300;
    int it = 0;
    while (it < max_iter && residual > tol) {
        residual = 0.0;
        ++it;
        for (int v = 0; v < nv; ++v) {
            if (!interior[v]) continue;
            double sum = 0.0;
            for (int ti : tris_at[v]) sum += angle_at(v, ti);
            residual = std::max(residual, std::abs(sum - 2.0 * kPi));
            int k = int(tris_at[v].size());
            double beta = std::sin(sum / (2.0 * k));
            double sigma = std::sin(kPi / k);
            double u = out.radius[v] * beta / (1.0 - beta);
            out.radius[v] = u * (1.0 - sigma) / sigma;
        }
    }
    out.packing_residual = residual;
    out.iterations = it;
    if (residual > 1e-8)
        throw SembError(ErrorCode::validation, "circle packing did not converge: residual " +
                                                   std::to_string(residual));

    // Consistent ccw orientation by BFS over shared edges.
    std::vector<std::array<int, 3>> T = tri.tris;
    {
        std::vector<char> seen(nt, 0);
        std::deque<int> bfs{0};
        seen[0] = 1;
        auto has_directed = [&](int ti, int u, int v) {
            for (int k = 0; k < 3; ++k)
                if (T[ti][k] == u && T[ti][(k + 1) % 3] == v) return true;
            return false;
        };
        while (!bfs.empty()) {
            int ti = bfs.front();
            bfs.pop_front();
            for (int k = 0; k < 3; ++k) {
                int u = T[ti][k], v = T[ti][(k + 1) % 3];
                auto& ts = edge_tris[{std::min(u, v), std::max(u, v)}];
                for (int tj : ts) {
                    if (tj == ti || seen[tj]) continue;
                    seen[tj] = 1;
                    if (has_directed(tj, u, v)) std::swap(T[tj][1], T[tj][2]);
                    bfs.push_back(tj);
                }
            }
        }
        for (char s : seen)
            if (!s) throw SembError(ErrorCode::validation, "triangulation is not edge-connected");
    }

    // Layout: place circle centers by walking the triangle adjacency.
    std::vector<cpx> center(nv);
    std::vector<char> placed(nv, 0);
    {
        center[T[0][0]] = {0.0, 0.0};
        center[T[0][1]] = {out.radius[T[0][0]] + out.radius[T[0][1]], 0.0};
        placed[T[0][0]] = placed[T[0][1]] = 1;
        std::deque<int> bfs{0};
        std::vector<char> done(nt, 0);
        while (!bfs.empty()) {
            int ti = bfs.front();
            bfs.pop_front();
            if (done[ti]) continue;
            int a = -1, b = -1, c0 = -1;
            for (int k = 0; k < 3; ++k)
                if (placed[T[ti][k]] && placed[T[ti][(k + 1) % 3]]) {
                    a = T[ti][k];
                    b = T[ti][(k + 1) % 3];
                    c0 = T[ti][(k + 2) % 3];
                    break;
                }
            if (a < 0) {
                bfs.push_back(ti);
                continue;
            }
            done[ti] = 1;
            if (!placed[c0]) {
                double ra = out.radius[a] + out.radius[c0];
                double rb = out.radius[b] + out.radius[c0];
                cpx ab = center[b] - center[a];
                double d = std::abs(ab);
                double x = (d * d + ra * ra - rb * rb) / (2.0 * d);
                double h2 = ra * ra - x * x;
                double h = std::sqrt(std::max(h2, 0.0));
                cpx u = ab / d;
                // ccw triangle: c on the left of a -> b.
                center[c0] = center[a] + x * u + h * cpx(-u.imag(), u.real());
                placed[c0] = 1;
            }
            for (int k = 0; k < 3; ++k) {
                int u = T[ti][k], v = T[ti][(k + 1) % 3];
                for (int tj : edge_tris[{std::min(u, v), std::max(u, v)}])
                    if (tj != ti && !done[tj]) bfs.push_back(tj);
            }
        }
        for (int v = 0; v < nv; ++v)
            if (!tris_at[v].empty() && !placed[v])
                throw SembError(ErrorCode::validation, "circle layout failed to place a vertex");
    }

    // Embedding: blacks are circle centers and triangle incenters, whites
    // are the tangency points; kites per (triangle, corner).
    Construction& c = out.c;
    std::vector<int> center_id(nv, -1);
    for (int v = 0; v < nv; ++v) {
        if (tris_at[v].empty()) continue;
        center_id[v] = c.emb.n_vertices();
        c.emb.pos.push_back(center[v]);
        c.emb.color.push_back(kBlack);
        c.emb.q.push_back(out.radius[v]);
    }
    std::vector<int> incenter_id(nt);
    for (int ti = 0; ti < nt; ++ti) {
        cpx ic;
        double rho;
        triangle_incircle(center[T[ti][0]], center[T[ti][1]], center[T[ti][2]], ic, rho);
        incenter_id[ti] = c.emb.n_vertices();
        c.emb.pos.push_back(ic);
        c.emb.color.push_back(kBlack);
        c.emb.q.push_back(rho);
    }
    std::map<std::pair<int, int>, int> tangency_id;
    auto tangency = [&](int u, int v) {
        auto key = std::pair{std::min(u, v), std::max(u, v)};
        auto it = tangency_id.find(key);
        if (it != tangency_id.end()) return it->second;
        cpx dir = (center[v] - center[u]) / std::abs(center[v] - center[u]);
        int id = c.emb.n_vertices();
        c.emb.pos.push_back(center[u] + out.radius[u] * dir);
        c.emb.color.push_back(kWhite);
        c.emb.q.push_back(0.0);
        tangency_id[key] = id;
        return id;
    };
    for (int ti = 0; ti < nt; ++ti)
        for (int k = 0; k < 3; ++k) {
            int u = T[ti][k], v = T[ti][(k + 1) % 3], w = T[ti][(k + 2) % 3];
            EmbQuad z;
            z.v = {tangency(u, v), center_id[v], tangency(v, w), incenter_id[ti]};
            orient_quad(c.emb, z);
            finish_quad(c.emb, z);
            c.emb.quads.push_back(z);
        }
    c.emb.index_corners();
    c.spinor = embedding_spinor(c.emb);
    attach_black_graph(c);
    return out;
}

}  // namespace semb
