#include "semb/graph.hpp"

#include <algorithm>
#include <deque>

namespace semb {

namespace {

int find_pos(const std::vector<int>& rot, int e) {
    for (size_t i = 0; i < rot.size(); ++i)
        if (rot[i] == e) return int(i);
    return -1;
}

}  // namespace

WeightedPlanarGraph WeightedPlanarGraph::build(const GraphDesc& d) {
    WeightedPlanarGraph g;
    g.nv_ = d.n_vertices;
    g.nf_ = d.n_faces;
    g.outer_ = d.outer_face;
    g.edges_ = d.edges;
    g.rot_ = d.rotations;
    int ne = int(g.edges_.size());

    if (g.nv_ <= 0 || g.nf_ <= 0) throw SembError(ErrorCode::validation, "graph needs vertices and faces");
    if (g.outer_ < 0 || g.outer_ >= g.nf_) throw SembError(ErrorCode::validation, "outer face id out of range");
    if (int(g.rot_.size()) != g.nv_) throw SembError(ErrorCode::validation, "rotation table size mismatch");
    if (g.nv_ - ne + g.nf_ != 2)
        throw SembError(ErrorCode::validation, "Euler relation |V|-|E|+|F|=2 violated");

    std::vector<int> deg(g.nv_, 0);
    for (int e = 0; e < ne; ++e) {
        const EdgeDesc& ed = g.edges_[e];
        if (ed.v0 < 0 || ed.v0 >= g.nv_ || ed.v1 < 0 || ed.v1 >= g.nv_)
            throw SembError(ErrorCode::validation, "edge endpoint out of range");
        if (ed.v0 == ed.v1) throw SembError(ErrorCode::validation, "loop edges are rejected");
        if (ed.f_left < 0 || ed.f_left >= g.nf_ || ed.f_right < 0 || ed.f_right >= g.nf_)
            throw SembError(ErrorCode::validation, "edge face out of range");
        if (!(ed.x > 0.0)) throw SembError(ErrorCode::validation, "edge weight must be positive");
        ++deg[ed.v0];
        ++deg[ed.v1];
    }
    g.rot_pos_.assign(g.nv_, {});
    for (int v = 0; v < g.nv_; ++v) {
        if (deg[v] < 2) throw SembError(ErrorCode::validation, "degree-1 vertices are rejected");
        if (int(g.rot_[v].size()) != deg[v])
            throw SembError(ErrorCode::validation, "rotation list does not match incident edges");
        std::vector<char> seen(ne, 0);
        for (int e : g.rot_[v]) {
            if (e < 0 || e >= ne || seen[e]) throw SembError(ErrorCode::validation, "bad rotation entry");
            seen[e] = 1;
            if (g.edges_[e].v0 != v && g.edges_[e].v1 != v)
                throw SembError(ErrorCode::validation, "rotation lists a non-incident edge");
        }
    }

    // Face tracing. Half edge 2e+dir, dir 0 meaning v0->v1; the face on the
    // left is f_left for dir 0 and f_right for dir 1. With ccw rotations the
    // successor inside the left face continues from the head along the next
    // edge in ccw order.
    auto head = [&](int h) { return h & 1 ? g.edges_[h >> 1].v0 : g.edges_[h >> 1].v1; };
    auto left_face = [&](int h) { return h & 1 ? g.edges_[h >> 1].f_right : g.edges_[h >> 1].f_left; };
    auto next_he = [&](int h) {
        // Continue the left-face walk: first edge clockwise of the reversed
        // direction, which is the previous entry of the ccw rotation.
        int b = head(h);
        int pos = find_pos(g.rot_[b], h >> 1);
        int n = int(g.rot_[b].size());
        int e2 = g.rot_[b][(pos + n - 1) % n];
        return 2 * e2 + (g.edges_[e2].v0 == b ? 0 : 1);
    };

    g.face_walk_.assign(g.nf_, {});
    std::vector<char> visited(2 * ne, 0);
    std::vector<int> orbits_per_face(g.nf_, 0);
    for (int h0 = 0; h0 < 2 * ne; ++h0) {
        if (visited[h0]) continue;
        int f = left_face(h0);
        ++orbits_per_face[f];
        int h = h0;
        do {
            if (visited[h]) throw SembError(ErrorCode::validation, "face tracing revisited a half-edge");
            visited[h] = 1;
            if (left_face(h) != f)
                throw SembError(ErrorCode::validation, "face labels inconsistent with rotation system");
            g.face_walk_[f].push_back(h >> 1);
            h = next_he(h);
        } while (h != h0);
    }
    for (int f = 0; f < g.nf_; ++f)
        if (orbits_per_face[f] != 1)
            throw SembError(ErrorCode::validation, "rotation system does not realize the declared faces");

    // Corners: the gap ccw of rot[v][k] is filled by the face on the left of
    // that edge oriented out of v, which must also be the face on the right
    // of the next edge.
    g.corners_at_vertex_.assign(g.nv_, {});
    for (int v = 0; v < g.nv_; ++v) {
        int dv = deg[v];
        for (int k = 0; k < dv; ++k) {
            int ef = g.rot_[v][k];
            int et = g.rot_[v][(k + 1) % dv];
            int face_ccw = g.edges_[ef].v0 == v ? g.edges_[ef].f_left : g.edges_[ef].f_right;
            int face_cw = g.edges_[et].v0 == v ? g.edges_[et].f_right : g.edges_[et].f_left;
            if (face_ccw != face_cw)
                throw SembError(ErrorCode::validation, "corner faces inconsistent around a vertex");
            Corner c;
            c.vertex = v;
            c.face = face_ccw;
            c.e_from = ef;
            c.e_to = et;
            g.corners_at_vertex_[v].push_back(int(g.corners_.size()));
            g.corners_.push_back(c);
        }
    }

    g.quads_.resize(ne);
    for (int e = 0; e < ne; ++e) {
        const EdgeDesc& ed = g.edges_[e];
        QuadCorners q;
        q.c00 = g.corner_after(ed.v0, e);   // (v0, f_left)
        q.c01 = g.corner_before(ed.v0, e);  // (v0, f_right)
        q.c10 = g.corner_after(ed.v1, e);   // (v1, f_right) is c11; see below
        q.c11 = q.c10;
        q.c10 = g.corner_before(ed.v1, e);  // (v1, f_left)
        if (g.corners_[q.c00].face != ed.f_left || g.corners_[q.c01].face != ed.f_right ||
            g.corners_[q.c10].face != ed.f_left || g.corners_[q.c11].face != ed.f_right)
            throw SembError(ErrorCode::validation, "quad corner/face bookkeeping failed");
        g.quads_[e] = q;
    }

    g.dual_adj_.assign(g.nf_, {});
    for (int e = 0; e < ne; ++e) {
        g.dual_adj_[g.edges_[e].f_left].push_back({e, g.edges_[e].f_right});
        g.dual_adj_[g.edges_[e].f_right].push_back({e, g.edges_[e].f_left});
    }
    return g;
}

int WeightedPlanarGraph::corner_after(int v, int e) const {
    for (int c : corners_at_vertex_[v])
        if (corners_[c].e_from == e) return c;
    throw SembError(ErrorCode::validation, "corner_after: edge not at vertex");
}

int WeightedPlanarGraph::corner_before(int v, int e) const {
    for (int c : corners_at_vertex_[v])
        if (corners_[c].e_to == e) return c;
    throw SembError(ErrorCode::validation, "corner_before: edge not at vertex");
}

std::vector<int> WeightedPlanarGraph::dual_path(int fa, int fb, const std::vector<char>& banned) const {
    std::vector<int> prev_edge(nf_, -1), prev_face(nf_, -1);
    std::vector<char> seen(nf_, 0);
    std::deque<int> bfs{fa};
    seen[fa] = 1;
    while (!bfs.empty()) {
        int f = bfs.front();
        bfs.pop_front();
        if (f == fb) break;
        for (auto [e, f2] : dual_adj_[f]) {
            if (!banned.empty() && banned[e]) continue;
            if (seen[f2]) continue;
            seen[f2] = 1;
            prev_edge[f2] = e;
            prev_face[f2] = f;
            bfs.push_back(f2);
        }
    }
    if (!seen[fb]) throw SembError(ErrorCode::validation, "dual path: faces disconnected");
    std::vector<int> path;
    for (int f = fb; f != fa; f = prev_face[f]) path.push_back(prev_edge[f]);
    std::reverse(path.begin(), path.end());
    return path;
}

WeightedPlanarGraph WeightedPlanarGraph::dual() const {
    GraphDesc d;
    d.n_vertices = nf_;
    d.n_faces = nv_;
    d.outer_face = 0;
    d.edges.resize(edges_.size());
    for (size_t e = 0; e < edges_.size(); ++e) {
        const EdgeDesc& ed = edges_[e];
        EdgeDesc de;
        de.v0 = ed.f_left;
        de.v1 = ed.f_right;
        de.f_left = ed.v1;
        de.f_right = ed.v0;
        de.x = (1.0 - ed.x) / (1.0 + ed.x);
        d.edges[e] = de;
    }
    d.rotations = face_walk_;
    return build(d);
}

GraphDesc WeightedPlanarGraph::from_coordinates(const std::vector<std::complex<double>>& pos,
                                                const std::vector<std::pair<int, int>>& segs,
                                                const std::vector<double>& weights) {
    int nv = int(pos.size()), ne = int(segs.size());
    GraphDesc d;
    d.n_vertices = nv;
    d.edges.resize(ne);
    d.rotations.assign(nv, {});
    for (int e = 0; e < ne; ++e) {
        d.edges[e].v0 = segs[e].first;
        d.edges[e].v1 = segs[e].second;
        d.edges[e].x = weights[e];
        d.rotations[segs[e].first].push_back(e);
        d.rotations[segs[e].second].push_back(e);
    }
    for (int v = 0; v < nv; ++v) {
        std::sort(d.rotations[v].begin(), d.rotations[v].end(), [&](int a, int b) {
            auto dir = [&](int e) {
                int w = d.edges[e].v0 == v ? d.edges[e].v1 : d.edges[e].v0;
                return std::arg(pos[w] - pos[v]);
            };
            return dir(a) < dir(b);
        });
    }
    // Trace faces with the same convention as build().
    auto head = [&](int h) { return h & 1 ? d.edges[h >> 1].v0 : d.edges[h >> 1].v1; };
    auto tail = [&](int h) { return h & 1 ? d.edges[h >> 1].v1 : d.edges[h >> 1].v0; };
    auto next_he = [&](int h) {
        int b = head(h);
        int p = find_pos(d.rotations[b], h >> 1);
        int n = int(d.rotations[b].size());
        int e2 = d.rotations[b][(p + n - 1) % n];
        return 2 * e2 + (d.edges[e2].v0 == b ? 0 : 1);
    };
    std::vector<char> visited(2 * ne, 0);
    int nf = 0;
    double min_area = 1e300;
    int outer = 0;
    for (int h0 = 0; h0 < 2 * ne; ++h0) {
        if (visited[h0]) continue;
        int f = nf++;
        double area = 0.0;
        int h = h0;
        do {
            visited[h] = 1;
            if (h & 1)
                d.edges[h >> 1].f_right = f;
            else
                d.edges[h >> 1].f_left = f;
            std::complex<double> a = pos[tail(h)], b = pos[head(h)];
            area += 0.5 * (a.real() * b.imag() - a.imag() * b.real());
            h = next_he(h);
        } while (h != h0);
        if (area < min_area) {
            min_area = area;
            outer = f;
        }
    }
    d.n_faces = nf;
    d.outer_face = outer;
    return d;
}

GraphDesc WeightedPlanarGraph::describe() const {
    GraphDesc d;
    d.n_vertices = nv_;
    d.n_faces = nf_;
    d.outer_face = outer_;
    d.edges = edges_;
    d.rotations = rot_;
    return d;
}

}  // namespace semb
