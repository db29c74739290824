#ifndef SEMB_GRAPH_HPP
#define SEMB_GRAPH_HPP

// Weighted planar graph on the sphere: vertices (spin-dual sites), faces
// (spin sites), edges with positive weights x(e), and a rotation system.
// Derived combinatorics: corners (vertex-face incidences), one quad per
// edge, and dual-graph traversal helpers.

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <string>
#include <vector>

#include "semb/error.hpp"

namespace semb {

struct EdgeDesc {
    int v0 = -1, v1 = -1;      // endpoints (vertices)
    int f_left = -1;           // face on the left of v0 -> v1
    int f_right = -1;          // face on the right of v0 -> v1
    double x = 1.0;            // weight, x = tan(theta/2) > 0
};

struct GraphDesc {
    int n_vertices = 0;
    int n_faces = 0;
    int outer_face = 0;
    std::vector<EdgeDesc> edges;
    std::vector<std::vector<int>> rotations;  // ccw cyclic edge order per vertex
};

// A corner sits in the angular gap at `vertex` between consecutive edges of
// the rotation system; `face` is the face filling that gap.
struct Corner {
    int vertex = -1;
    int face = -1;
    int e_from = -1;  // the gap opens ccw of this edge
    int e_to = -1;    // and closes at this edge
};

// Corners of the quad attached to an edge, in the labeling c_pq =
// (vertex p, face q) with (face0, vertex0, face1, vertex1) the ccw contour:
// face0 = f_left, vertex0 = v0, face1 = f_right, vertex1 = v1.
struct QuadCorners {
    int c00 = -1, c01 = -1, c10 = -1, c11 = -1;
};

class WeightedPlanarGraph {
  public:
    static WeightedPlanarGraph build(const GraphDesc& d);

    int n_vertices() const { return nv_; }
    int n_faces() const { return nf_; }
    int outer_face() const { return outer_; }
    int n_edges() const { return int(edges_.size()); }
    const std::vector<EdgeDesc>& edges() const { return edges_; }
    const EdgeDesc& edge(int e) const { return edges_[e]; }
    const std::vector<std::vector<int>>& rotations() const { return rot_; }
    double theta(int e) const { return 2.0 * std::atan(edges_[e].x); }

    const std::vector<Corner>& corners() const { return corners_; }
    const QuadCorners& quad(int e) const { return quads_[e]; }
    // Corners around a vertex in rotation order.
    const std::vector<int>& corners_at(int v) const { return corners_at_vertex_[v]; }
    // Corner in the gap opening ccw of edge e at vertex v / closing at it.
    int corner_after(int v, int e) const;
    int corner_before(int v, int e) const;

    // Dual adjacency: for each face, (edge, neighbor face) pairs.
    const std::vector<std::vector<std::pair<int, int>>>& dual_adjacency() const { return dual_adj_; }
    // Shortest dual path (edge ids crossed) from face a to face b avoiding
    // the edges marked in `banned` (may be empty). Throws if disconnected.
    std::vector<int> dual_path(int fa, int fb, const std::vector<char>& banned = {}) const;

    // Planar dual with Kramers-Wannier weights x* = (1-x)/(1+x).
    WeightedPlanarGraph dual() const;

    GraphDesc describe() const;

    // Builds the rotation system and face list of a straight-line drawing:
    // rotations by angular sort around each vertex, faces by tracing, outer
    // face identified by its negative signed area.
    static GraphDesc from_coordinates(const std::vector<std::complex<double>>& pos,
                                      const std::vector<std::pair<int, int>>& segs,
                                      const std::vector<double>& weights);

  private:
    int nv_ = 0, nf_ = 0, outer_ = 0;
    std::vector<EdgeDesc> edges_;
    std::vector<std::vector<int>> rot_;
    std::vector<std::vector<int>> rot_pos_;  // position of each edge in rot_ (parallel array)
    std::vector<Corner> corners_;
    std::vector<std::vector<int>> corners_at_vertex_;
    std::vector<QuadCorners> quads_;
    std::vector<std::vector<std::pair<int, int>>> dual_adj_;
    std::vector<std::vector<int>> face_walk_;  // per face: boundary edges in trace order

  public:
    const std::vector<int>& face_boundary(int f) const { return face_walk_[f]; }
};

}  // namespace semb

#endif
