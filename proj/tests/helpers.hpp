#ifndef SEMB_TEST_HELPERS_HPP
#define SEMB_TEST_HELPERS_HPP

#include <complex>
#include <random>
#include <vector>

#include "semb/graph.hpp"

namespace semb::testing {

struct GridPatch {
    GraphDesc desc;
    std::vector<std::complex<double>> pos;
    int nx = 0, ny = 0;

    int vid(int i, int j) const { return j * (nx + 1) + i; }
    // Horizontal edge from (i,j) to (i+1,j); stored west -> east.
    int hedge(int i, int j) const { return j * nx + i; }
    // Vertical edge from (i,j) to (i,j+1); stored south -> north.
    int vedge(int i, int j) const { return nx * (ny + 1) + j * (nx + 1) + i; }
    // Face id of cell (i,j): the face left of the west->east bottom edge.
    int cell(int i, int j) const { return desc.edges[hedge(i, j)].f_left; }
};

// nx by ny cell grid with straight unit squares, optional vertex jitter and
// per-edge weights drawn uniformly from [wlo, whi].
inline GridPatch grid_patch(int nx, int ny, unsigned seed = 1, double jitter = 0.0, double wlo = 0.5,
                            double whi = 0.5) {
    GridPatch g;
    g.nx = nx;
    g.ny = ny;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> jit(-jitter, jitter);
    std::uniform_real_distribution<double> wdist(wlo, whi);
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            double dx = 0.0, dy = 0.0;
            if (jitter > 0.0 && i > 0 && i < nx && j > 0 && j < ny) {
                dx = jit(rng);
                dy = jit(rng);
            }
            g.pos.push_back({i + dx, j + dy});
        }
    std::vector<std::pair<int, int>> segs;
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) segs.push_back({g.vid(i, j), g.vid(i + 1, j)});
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) segs.push_back({g.vid(i, j), g.vid(i, j + 1)});
    std::vector<double> w(segs.size());
    for (double& x : w) x = wlo == whi ? wlo : wdist(rng);
    g.desc = WeightedPlanarGraph::from_coordinates(g.pos, segs, w);
    return g;
}

// Low-temperature expansion over face spins: E[prod_{f in faces} sigma_f]
// with weight prod_e x_e^{1{spins across e differ}}.
inline double spin_correlator_direct(const WeightedPlanarGraph& g, const std::vector<int>& faces) {
    int nf = g.n_faces();
    double num = 0.0, den = 0.0;
    for (std::uint64_t m = 0; m < (1ULL << nf); ++m) {
        double w = 1.0;
        for (int e = 0; e < g.n_edges(); ++e) {
            int a = g.edge(e).f_left, b = g.edge(e).f_right;
            if (((m >> a) & 1) != ((m >> b) & 1)) w *= g.edge(e).x;
        }
        int s = 0;
        for (int f : faces) s ^= int(m >> f & 1);
        den += w;
        num += s ? -w : w;
    }
    return num / den;
}

// Brute force over all edge subsets: sum of (-1)^{|omega & gamma|} x(omega)
// over subsets with odd degree exactly at odd_vertices, divided by Z.
inline double parity_correlator_direct(const WeightedPlanarGraph& g, const std::vector<int>& odd_vertices,
                                       const std::vector<int>& gamma = {}) {
    int ne = g.n_edges();
    std::vector<char> want(g.n_vertices(), 0);
    for (int v : odd_vertices) want[v] ^= 1;
    std::vector<char> gmask(ne, 0);
    for (int e : gamma) gmask[e] ^= 1;
    double num = 0.0, den = 0.0;
    for (std::uint64_t m = 0; m < (1ULL << ne); ++m) {
        std::vector<char> par(g.n_vertices(), 0);
        double w = 1.0;
        int sgn = 0;
        for (int e = 0; e < ne; ++e)
            if (m >> e & 1) {
                par[g.edge(e).v0] ^= 1;
                par[g.edge(e).v1] ^= 1;
                w *= g.edge(e).x;
                sgn ^= gmask[e];
            }
        bool even_ok = true, odd_ok = true;
        for (int v = 0; v < g.n_vertices(); ++v) {
            if (par[v]) even_ok = false;
            if (par[v] != want[v]) odd_ok = false;
        }
        if (even_ok) den += w;
        if (odd_ok) num += sgn ? -w : w;
    }
    return num / den;
}

}  // namespace semb::testing

#endif

// Kernel-space sampler for the propagation relations; separate include guard
// so translation units without an embedding dependency skip Eigen.
#ifdef SEMB_TEST_HELPERS_WANT_SOLUTIONS
#ifndef SEMB_TEST_HELPERS_SOLUTIONS
#define SEMB_TEST_HELPERS_SOLUTIONS

#include <Eigen/Dense>

#include "semb/embedding.hpp"

namespace semb::testing {

// Orthonormal basis of real solutions of the propagation relations on the
// corners of s, via full-pivot LU kernel extraction.
inline std::vector<Spinor> solution_basis(const SEmbedding& s) {
    int nc = int(s.corners.size());
    Eigen::MatrixXd A(4 * int(s.quads.size()), nc);
    A.setZero();
    int row = 0;
    for (const EmbQuad& z : s.quads) {
        int c00 = z.corner[0], c01 = z.corner[1], c11 = z.corner[2], c10 = z.corner[3];
        double co = std::cos(z.theta), si = std::sin(z.theta);
        auto e = [&](int a, int b) { return double(s.eps(a, b)); };
        auto rel = [&](int a, int b, int c) {
            A(row, a) = 1.0;
            A(row, b) -= e(a, b) * co;
            A(row, c) -= e(a, c) * si;
            ++row;
        };
        rel(c00, c01, c10);
        rel(c01, c00, c11);
        rel(c11, c10, c01);
        rel(c10, c11, c00);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-9);
    Eigen::MatrixXd K = lu.kernel();
    std::vector<Spinor> basis;
    for (int k = 0; k < K.cols(); ++k) {
        Spinor x;
        x.val.resize(nc);
        double norm = K.col(k).norm();
        for (int c = 0; c < nc; ++c) x.val[c] = K(c, k) / norm;
        basis.push_back(x);
    }
    return basis;
}

// Random real kernel element with unit-scale coefficients.
inline Spinor random_solution(const SEmbedding& s, unsigned seed) {
    std::vector<Spinor> basis = solution_basis(s);
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Spinor x;
    x.val.assign(s.corners.size(), 0.0);
    for (const Spinor& b : basis) {
        double a = gauss(rng);
        for (size_t c = 0; c < x.val.size(); ++c) x.val[c] += a * b.val[c];
    }
    return x;
}

}  // namespace semb::testing

#endif
#endif
