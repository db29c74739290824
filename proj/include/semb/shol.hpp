#ifndef SEMB_SHOL_HPP
#define SEMB_SHOL_HPP

// s-holomorphic functions on quads: conversion to and from propagation
// spinors, the primitives H and I_C, and the maximum-principle diagnostic.

#include <string>
#include <vector>

#include "semb/embedding.hpp"

namespace semb {

// One complex value per quad. s-holomorphicity means the projections onto
// eta_c R agree across every interior corner.
struct SHolFunction {
    std::vector<cpx> val;
    // Worst disagreement between the per-pair reconstructions (x_to_f only).
    double pair_spread = 0.0;
};

// Reconstruct F on each quad from a real spinor solution: F is the unique
// complex number with X(c) = |d_c|^(1/2) Re[conj(eta_c) F] at the quad's
// corners; any well-conditioned corner pair determines it.
SHolFunction x_to_f(const SEmbedding& s, const Spinor& x);

// Project back: X(c) = |d_c|^(1/2) Re[conj(eta_c) F(z)]. When a corner
// touches two quads their projections must agree within tol * sup-norm.
Spinor f_to_x(const SEmbedding& s, const SHolFunction& f, double tol = 1e-6,
              double* max_mismatch = nullptr);

// Max projection mismatch over interior corners (absolute, in X units).
double shol_residual(const SEmbedding& s, const SHolFunction& f);

// H lives on Lambda vertices and quad centers, up to an additive constant.
struct HFunction {
    std::vector<double> at_vertex;
    std::vector<double> at_quad;
    double max_closure = 0.0;  // worst violated increment relation
};

// Integrate H from the increment rules driven by a real spinor solution:
//   H(black_p) - H(z) = coherent corner product * cos(theta)
//   H(z) - H(white_q) = coherent corner product * sin(theta)
//   H(black) - H(white) = X(c)^2 across every corner.
HFunction build_H(const SEmbedding& s, const Spinor& x, int anchor_vertex);

// Enumeration front-end: per-quad corner values in the fixed sign scheme
//   X(c00) = X(c01) cos + X(c10) sin,  X(c10) = X(c11) cos + X(c00) sin,
//   X(c11) = X(c10) cos - X(c01) sin,  X(c01) = X(c00) cos - X(c11) sin,
// where only within-quad products enter, so no global section is needed.
struct QuadProductData {
    std::array<int, 4> v{-1, -1, -1, -1};  // node ids [w0, b0, w1, b1]
    double x00 = 0, x01 = 0, x10 = 0, x11 = 0;
    double theta = 0;
};
HFunction build_H_products(int n_nodes, const std::vector<QuadProductData>& quads,
                           int anchor_node);

// The line-integral form: vertex increments through quad z are
// (Im[F(z)^2 dS] + |F(z)|^2 dQ) / 2; coincides with build_H for F = x_to_f(X).
HFunction h_from_f(const SEmbedding& s, const SHolFunction& f, int anchor_vertex);

// Primitive I_C on Lambda vertices: corner increments
// (conj(varsigma) F dS + varsigma conj(F) dQ) / 2 with varsigma = exp(i pi/4);
// path independent exactly when F is s-holomorphic.
struct ICFunction {
    std::vector<cpx> at_vertex;
    double max_loop = 0.0;  // worst disagreement between the two quads at a corner
};
ICFunction build_IC(const SEmbedding& s, const SHolFunction& f, int anchor_vertex);

struct MaxPrincipleReport {
    bool pass = true;
    int witness = -1;  // interior vertex holding a strict local extremum
};
// Scans interior vertices for strict local extrema of a - b over the
// neighbors (incident quads and corner-adjacent vertices).
MaxPrincipleReport max_principle_check(const SEmbedding& s, const HFunction& a,
                                       const HFunction& b);

// CSV dumps: (kind, id, re, im) for F and (kind, id, value) for H.
std::string f_csv(const SEmbedding& s, const SHolFunction& f);
std::string h_csv(const SEmbedding& s, const HFunction& h);

}  // namespace semb

#endif
