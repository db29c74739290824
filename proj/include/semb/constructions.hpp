#ifndef SEMB_CONSTRUCTIONS_HPP
#define SEMB_CONSTRUCTIONS_HPP

// Explicit s-embedding families: square lattices (critical and massive),
// zig-zag layered models, isoradial rhombic grids, and circle-pattern
// embeddings of triangulations.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "semb/embedding.hpp"
#include "semb/graph.hpp"

namespace semb {

// A construction bundles the embedding, its propagation spinor in the
// principal section, and the sphere graph on the black class (one graph
// edge per quad, weights x = tan(theta/2)).
struct Construction {
    SEmbedding emb;
    Spinor spinor;
    GraphDesc graph;
    bool graph_ok = false;
    std::string graph_note;
    std::vector<int> black_vertex;  // graph vertex id -> embedding vertex id
    std::vector<int> quad_edge;     // embedding quad -> graph edge id (-1 if trimmed)
};

// Builds the sphere graph living on the black vertices of an embedding:
// one edge per quad (the black diagonal), rotations by angular sort, faces
// by tracing; boundary whites merge into the outer face.
void attach_black_graph(Construction& c);

struct LayerSpec {
    std::vector<double> theta;  // per-column angle in (0, pi/2)
    int rows = 4;
    double scale = 1.0;  // multiplies the unit-incircle normalization
};

// tan(theta) = 1 + mass/n homogeneous massive spec.
LayerSpec massive_layers(int columns, int rows, double mass, int n);
// tan(theta_k) = 1 + Z_k / n^alpha with Z_k = +-1 Rademacher; realized
// signs returned through z_out.
LayerSpec iid_layers(int columns, int rows, double alpha, int n, std::uint64_t seed,
                     std::vector<double>* z_out = nullptr);

struct ZigzagResult {
    Construction c;
    // Per column k: geometric offsets of the black/white vertical lines and
    // the column Q values, plus the closed-form product-sum evaluations.
    std::vector<double> black_x, white_x, black_q, white_q;
    std::vector<double> black_x_formula, white_x_formula, black_q_formula, white_q_formula;
    double max_formula_mismatch = 0.0;
};

ZigzagResult zigzag_layered(const LayerSpec& spec);

// n x n cells; theta = pi/4 gives the flat grid with Q constant per color.
Construction square_lattice(int n, double theta);

struct RhombicTiling {
    std::vector<cpx> pos;
    std::vector<std::array<int, 4>> rhombi;  // vertex contours, consistent side length
};

RhombicTiling square_rhombi(int n, double delta);
RhombicTiling tri_rhombi(int n, double delta);  // 60/120 rhombi of the triangular lattice
RhombicTiling penrose_rhombi(int range, double delta, std::uint64_t seed);

Construction isoradial_from_rhombi(const RhombicTiling& t, double delta);

struct Triangulation {
    int n_vertices = 0;
    std::vector<std::array<int, 3>> tris;  // ccw after layout
};

Triangulation fan_triangulation(int k);
Triangulation hex_triangulation(int rings);
Triangulation grid_triangulation(int nx, int ny);

struct CirclePattern {
    Construction c;
    std::vector<double> radius;  // per triangulation vertex
    double packing_residual = 0.0;
    int iterations = 0;
};

CirclePattern circle_pattern_from_triangulation(const Triangulation& tri, int max_iter = 200000,
                                                double tol = 1e-10);

}  // namespace semb

#endif
