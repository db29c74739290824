#ifndef SEMB_EMBEDDING_HPP
#define SEMB_EMBEDDING_HPP

// S-embeddings: positions S on the bipartite vertex set plus quad centers,
// origami values Q, per-quad incircle data, and the geometric checks
// (properness, Lipschitz scale, exponential fatness, Lorentz boost).

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "semb/geom.hpp"
#include "semb/graph.hpp"

namespace semb {

constexpr int kBlack = 0;
constexpr int kWhite = 1;

// Corner of an embedding: one edge of the bipartite vertex graph, shared by
// at most two quads.
struct EmbCorner {
    int black = -1, white = -1;
    int quad_a = -1, quad_b = -1;
};

struct EmbQuad {
    // Contour order [white0, black0, white1, black1]; consistently oriented
    // within each quad (ccw for positively oriented drawings).
    std::array<int, 4> v{-1, -1, -1, -1};
    cpx center{0.0, 0.0};
    double r = 0.0;
    double theta = 0.0;
    // Corner ids by label: [c00, c01, c11, c10] = sides 0..3 of the contour:
    // (w0 b0), (b0 w1), (w1 b1), (b1 w0).
    std::array<int, 4> corner{-1, -1, -1, -1};
    int graph_edge = -1;  // provenance link, -1 if standalone
};

class SEmbedding {
  public:
    std::vector<cpx> pos;
    std::vector<double> q;
    std::vector<int> color;  // kBlack / kWhite
    std::vector<EmbQuad> quads;
    std::vector<EmbCorner> corners;
    std::vector<double> qc;  // origami value at quad centers

    // Rebuild the corner table from quads (call after editing quads).
    void index_corners();

    int n_vertices() const { return int(pos.size()); }
    // Corner direction S(black) - S(white) and its principal argument.
    cpx corner_dir(int c) const { return pos[corners[c].black] - pos[corners[c].white]; }
    double corner_alpha(int c) const;
    // Principal square root of the corner direction (the embedding's own
    // propagation solution in the principal section).
    cpx chi_hat(int c) const;
    // eta in the same section.
    cpx eta_hat(int c) const;
    // Transition sign between the principal lifts of two adjacent corners.
    static int transition_sign(double alpha_a, double alpha_b);
    int eps(int ca, int cb) const { return transition_sign(corner_alpha(ca), corner_alpha(cb)); }

    double diameter() const;
    std::array<cpx, 4> quad_points(int qi) const;
};

struct TangentialQuad {
    int id = -1;
    std::array<cpx, 4> v;  // [w0, b0, w1, b1]
    cpx center{0.0, 0.0};
    double r = 0.0;
    std::array<double, 4> phi{};  // half-angles at [w0, b0, w1, b1]
    double orient = 1.0;
    double support_residual = 0.0;  // max |support distance - r|
    double pitot = 0.0;             // alternating edge-length sum
};

TangentialQuad quad_geometry(const SEmbedding& s, int qi);
double recover_theta(const TangentialQuad& t);

struct PropernessReport {
    std::vector<std::pair<int, int>> overlaps;
    std::vector<int> degenerate;
    bool proper() const { return overlaps.empty() && degenerate.empty(); }
};
PropernessReport check_properness(const SEmbedding& s);

struct LipScaleResult {
    double delta = 0.0;
    bool fails_at_diameter = false;  // the diameter pair itself violates Lip
    int v0 = -1, v1 = -1;            // extremal violating pair (if any)
};
// Smallest scale above which |Q(v')-Q(v)| <= kappa |S(v')-S(v)|, by exact
// pair scan.
LipScaleResult lip_scale(const SEmbedding& s, double kappa);

struct ExpFatReport {
    bool pass = false;
    double threshold = 0.0;
    int n_thin = 0;
    int n_components = 0;
    double max_component_diameter = 0.0;
};
// Removes quads with r >= delta * exp(-rho/delta) and measures the diameter
// of the remaining vertex-connected components.
ExpFatReport exp_fat_check(const SEmbedding& s, double delta, double rho);

// Lorentz boost of (Re S, Im S, Q); preserves tangentiality and weights.
SEmbedding boost(const SEmbedding& s, double t);

// A spinor over the corners of an embedding, stored in the principal
// section (value at the principal lift of every corner).
struct Spinor {
    std::vector<cpx> val;
};

// Max residual of the four three-term relations at quad qi, evaluated with
// principal-section values and transition signs.
double propagation_residual(const SEmbedding& s, const Spinor& x, int qi);

struct SpinorReport {
    double max_residual = 0.0;
    int worst_quad = -1;
    std::vector<std::pair<double, int>> by_residual;  // descending
};
SpinorReport verify_spinor(const SEmbedding& s, const Spinor& x);

// The embedding's own propagation solution: chi_hat at every corner.
Spinor embedding_spinor(const SEmbedding& s);

struct BuildReport {
    double max_closure = 0.0;       // worst face-walk closure defect for S
    double max_center_spread = 0.0; // disagreement of the four center formulas
    std::vector<int> degenerate;
};

// Integrate a new embedding from a spinor on the combinatorial scaffold of
// `shape` (its quads, colors and reference section): S increments X(c)^2,
// Q increments |X(c)|^2, centers from the coherent corner products.
SEmbedding build_embedding(const SEmbedding& shape, const Spinor& x, cpx anchor_pos, int anchor_vertex,
                           BuildReport* report = nullptr);

}  // namespace semb

#endif
