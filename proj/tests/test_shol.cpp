#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#define SEMB_TEST_HELPERS_WANT_SOLUTIONS
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "semb/constructions.hpp"
#include "semb/ising.hpp"
#include "semb/shol.hpp"

using namespace semb;
using namespace semb::testing;

namespace {

const double kPi = std::acos(-1.0);

SEmbedding varied_patch(int n) {
    LayerSpec spec;
    for (int k = 0; k < n; ++k) spec.theta.push_back(0.5 + 0.11 * k);
    spec.rows = n;
    return zigzag_layered(spec).c.emb;
}

double sup_abs(const std::vector<cpx>& v) {
    double m = 0.0;
    for (cpx z : v) m = std::max(m, std::abs(z));
    return m;
}

}  // namespace

TEST_CASE("critical grid spinor gives a constant F") {
    SEmbedding s = square_lattice(4, kPi / 4).emb;
    Spinor x = embedding_spinor(s);
    for (cpx& v : x.val) v = v.real();  // the real part is a real solution
    SHolFunction f = x_to_f(s, x);
    CHECK(f.pair_spread < 1e-12);
    CHECK(shol_residual(s, f) < 1e-12);
    for (cpx v : f.val) CHECK(std::abs(v - std::polar(1.0, kPi / 4)) < 1e-12);
}

TEST_CASE("zero spinor maps to zero F and back") {
    SEmbedding s = varied_patch(3);
    Spinor zero;
    zero.val.assign(s.corners.size(), 0.0);
    SHolFunction f = x_to_f(s, zero);
    for (cpx v : f.val) CHECK(std::abs(v) == 0.0);
    Spinor back = f_to_x(s, f);
    for (cpx v : back.val) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("pair independence and round trips on random solutions") {
    SEmbedding s = varied_patch(5);
    for (unsigned seed : {3u, 7u, 19u}) {
        Spinor x = random_solution(s, seed);
        REQUIRE(verify_spinor(s, x).max_residual < 1e-9);
        double sup = sup_abs(x.val);
        SHolFunction f = x_to_f(s, x);
        CHECK(f.pair_spread < 1e-10 * sup);
        CHECK(shol_residual(s, f) < 1e-10 * sup);
        double mism = 0.0;
        Spinor back = f_to_x(s, f, 1e-6, &mism);
        CHECK(mism < 1e-10 * sup);
        for (size_t c = 0; c < x.val.size(); ++c) CHECK(std::abs(back.val[c] - x.val[c]) < 1e-10 * sup);
        CHECK(verify_spinor(s, back).max_residual < 1e-9 * sup);
        // F -> X -> F closes as well.
        SHolFunction f2 = x_to_f(s, back);
        for (size_t qi = 0; qi < f.val.size(); ++qi)
            CHECK(std::abs(f2.val[qi] - f.val[qi]) < 1e-9 * sup);
    }
}

TEST_CASE("constant F instantiates the projection formula") {
    SEmbedding s = square_lattice(3, 0.6).emb;
    SHolFunction f;
    f.val.assign(s.quads.size(), cpx(1.0, 0.0));
    Spinor x = f_to_x(s, f);
    for (size_t c = 0; c < s.corners.size(); ++c) {
        double expect = std::sqrt(std::abs(s.corner_dir(int(c)))) * dot(s.eta_hat(int(c)), cpx(1.0, 0.0));
        CHECK(x.val[c].real() == doctest::Approx(expect));
    }
    CHECK_THROWS_AS(x_to_f(s, embedding_spinor(s)), SembError);  // complex input rejected
}

TEST_CASE("H from a spinor: closure, positivity, constant case") {
    SEmbedding s = varied_patch(4);
    Spinor zero;
    zero.val.assign(s.corners.size(), 0.0);
    HFunction h0 = build_H(s, zero, 0);
    for (double v : h0.at_vertex) CHECK(v == 0.0);
    Spinor x = random_solution(s, 11);
    double sup2 = sup_abs(x.val) * sup_abs(x.val);
    HFunction h = build_H(s, x, 0);
    CHECK(h.max_closure < 1e-9 * sup2);
    for (size_t c = 0; c < s.corners.size(); ++c) {
        double jump = h.at_vertex[s.corners[c].black] - h.at_vertex[s.corners[c].white];
        CHECK(jump >= -1e-9 * sup2);
        CHECK(jump == doctest::Approx(std::norm(x.val[c])).epsilon(1e-6).scale(sup2));
    }
}

TEST_CASE("the line-integral form of H matches the product form") {
    SEmbedding s = varied_patch(5);
    Spinor x = random_solution(s, 23);
    double sup2 = sup_abs(x.val) * sup_abs(x.val);
    SHolFunction f = x_to_f(s, x);
    HFunction hx = build_H(s, x, 2);
    HFunction hf = h_from_f(s, f, 2);
    CHECK(hf.max_closure < 1e-9 * sup2);
    for (int v = 0; v < s.n_vertices(); ++v)
        CHECK(std::abs(hf.at_vertex[v] - hx.at_vertex[v]) < 1e-9 * sup2);
}

TEST_CASE("critical grid H is affine in S and Q") {
    SEmbedding s = square_lattice(4, kPi / 4).emb;
    Spinor x = embedding_spinor(s);
    for (cpx& v : x.val) v = v.real();
    HFunction h = build_H(s, x, 0);
    for (int v = 0; v < s.n_vertices(); ++v) {
        double expect = 0.5 * (s.pos[v].real() + s.q[v]) - 0.5 * (s.pos[0].real() + s.q[0]);
        CHECK(h.at_vertex[v] == doctest::Approx(expect));
    }
}

TEST_CASE("isoradial H increments along one color reduce to Im(F^2 dS)") {
    SEmbedding s = isoradial_from_rhombi(square_rhombi(4, 0.8), 0.8).emb;
    Spinor x = random_solution(s, 5);
    SHolFunction f = x_to_f(s, x);
    HFunction h = h_from_f(s, f, 0);
    for (size_t qi = 0; qi < s.quads.size(); ++qi) {
        const EmbQuad& z = s.quads[qi];
        cpx F = f.val[qi];
        // Q is constant per color, so the white-to-white step has no dQ part.
        double lhs = h.at_vertex[z.v[2]] - h.at_vertex[z.v[0]];
        double rhs = 0.5 * (F * F * (s.pos[z.v[2]] - s.pos[z.v[0]])).imag();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8).scale(1.0 + std::norm(F)));
    }
}

TEST_CASE("I_C is path independent and affine for constant F") {
    SEmbedding s = square_lattice(4, kPi / 4).emb;
    SHolFunction f;
    f.val.assign(s.quads.size(), cpx(0.7, -0.4));
    ICFunction ic = build_IC(s, f, 0);
    CHECK(ic.max_loop < 1e-12);
    cpx sig = std::polar(1.0, kPi / 4);
    cpx F(0.7, -0.4);
    for (int v = 0; v < s.n_vertices(); ++v) {
        cpx expect = 0.5 * (std::conj(sig) * F * (s.pos[v] - s.pos[0]) +
                            sig * std::conj(F) * (s.q[v] - s.q[0]));
        CHECK(std::abs(ic.at_vertex[v] - expect) < 1e-12);
    }
}

TEST_CASE("I_C loop residuals vanish for random solutions") {
    SEmbedding s = varied_patch(6);
    Spinor x = random_solution(s, 31);
    SHolFunction f = x_to_f(s, x);
    double sup = sup_abs(f.val);
    ICFunction ic = build_IC(s, f, 0);
    CHECK(ic.max_loop < 1e-10 * sup * s.diameter());
    SHolFunction zero;
    zero.val.assign(s.quads.size(), 0.0);
    ICFunction ic0 = build_IC(s, zero, 0);
    for (cpx v : ic0.at_vertex) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("maximum principle diagnostic") {
    SEmbedding s = varied_patch(5);
    Spinor x = random_solution(s, 41);
    Spinor zero;
    zero.val.assign(s.corners.size(), 0.0);
    HFunction hx = build_H(s, x, 0);
    HFunction h0 = build_H(s, zero, 0);
    MaxPrincipleReport rep = max_principle_check(s, hx, h0);
    CHECK(rep.pass);
    CHECK(max_principle_check(s, hx, hx).pass);  // difference identically zero
    // Bump one interior vertex to force a strict extremum.
    HFunction bad = hx;
    int interior = -1;
    std::vector<char> boundary(s.n_vertices(), 0);
    for (const EmbCorner& c : s.corners)
        if (c.quad_b < 0) boundary[c.black] = boundary[c.white] = 1;
    for (int v = 0; v < s.n_vertices() && interior < 0; ++v)
        if (!boundary[v]) interior = v;
    REQUIRE(interior >= 0);
    bad.at_vertex[interior] += 100.0 * (1.0 + sup_abs(x.val));
    rep = max_principle_check(s, bad, h0);
    CHECK(!rep.pass);
    CHECK(rep.witness == interior);
}

TEST_CASE("dobrushin boundary values from the enumeration oracle") {
    // Four singleton arcs on the critical grid's sphere graph: the source
    // corner b = (u_ab, f_bc) carries the mu/sigma insertion, the outer face
    // is the wired arc (da), and the quads containing corner b sit outside
    // the domain. H is integrated from all remaining quads.
    Construction c = square_lattice(5, kPi / 4);
    REQUIRE(c.graph_ok);
    WeightedPlanarGraph g = WeightedPlanarGraph::build(c.graph);
    IsingOracle oracle(g);
    int outer = g.outer_face();
    int e_d = -1;
    for (int e = 0; e < g.n_edges() && e_d < 0; ++e)
        if ((g.edge(e).f_right == outer || g.edge(e).f_left == outer) &&
            (g.rotations()[g.edge(e).v0].size() >= 3 || g.rotations()[g.edge(e).v1].size() >= 3))
            e_d = e;
    REQUIRE(e_d >= 0);
    // The source vertex needs spare quads away from the source face.
    bool v0_big = g.rotations()[g.edge(e_d).v0].size() >= 3;
    int u_ab = v0_big ? g.edge(e_d).v0 : g.edge(e_d).v1;
    int u_cd = v0_big ? g.edge(e_d).v1 : g.edge(e_d).v0;
    int f_da = outer;
    int f_bc = g.edge(e_d).f_left == outer ? g.edge(e_d).f_right : g.edge(e_d).f_left;

    // Per-corner observable values with the compatible dual-path recipe,
    // usable also where the helper's no-touching guard declines.
    auto corner_value = [&](int e, int vp, int fq, bool far) {
        std::vector<char> banned(g.n_edges(), 0);
        banned[e] = 1;
        DefectSet d;
        d.disorder_vertices = {vp, u_ab};
        d.spin_faces = {fq, f_bc};
        d.gamma_dual = g.dual_path(f_bc, g.edge(e).f_left, banned);
        if (far) d.gamma_dual.push_back(e);
        return oracle.correlator(d);
    };
    auto has_source_corner = [&](int e) {
        bool at_v = g.edge(e).v0 == u_ab || g.edge(e).v1 == u_ab;
        bool at_f = g.edge(e).f_left == f_bc || g.edge(e).f_right == f_bc;
        return at_v && at_f;
    };

    int nv = g.n_vertices();
    std::vector<QuadProductData> quads;
    for (int e = 0; e < g.n_edges(); ++e) {
        if (has_source_corner(e)) continue;  // outside the domain
        QuadProductData q;
        q.v = {nv + g.edge(e).f_left, g.edge(e).v0, nv + g.edge(e).f_right, g.edge(e).v1};
        q.x00 = corner_value(e, g.edge(e).v0, g.edge(e).f_left, false);
        q.x10 = corner_value(e, g.edge(e).v1, g.edge(e).f_left, false);
        q.x01 = corner_value(e, g.edge(e).v0, g.edge(e).f_right, true);
        q.x11 = corner_value(e, g.edge(e).v1, g.edge(e).f_right, true);
        q.theta = g.theta(e);
        QuadFermionValues qv;
        qv.x00 = q.x00;
        qv.x01 = q.x01;
        qv.x10 = q.x10;
        qv.x11 = q.x11;
        qv.theta = q.theta;
        REQUIRE(qv.residual() < 1e-12);  // relations hold away from the source
        quads.push_back(q);
    }
    HFunction h = build_H_products(nv + g.n_faces(), quads, nv + f_da);
    CHECK(h.max_closure < 1e-10);

    // Independent correlators for the boundary table.
    double n1 = corner_value(e_d, u_cd, f_da, f_da == g.edge(e_d).f_right);  // E[mu mu sigma sigma]
    REQUIRE(std::abs(n1) > 1e-12);
    double n2 = n1 * n1;
    DefectSet spin;
    spin.spin_faces = {f_bc, f_da};
    spin.gamma_dual = {e_d};
    double e_sigma = oracle.correlator(spin);
    DefectSet dis;
    dis.disorder_vertices = {u_ab, u_cd};
    double e_mu = oracle.correlator(dis);

    // Normalized by n2: H = 0 on (da), 1 on (cd), E[sigma sigma]^2 / n2 on
    // (ab), 1 - E[mu mu]^2 / n2 on (bc); the jump across the source corner
    // b is then exactly 1 / n2.
    CHECK(h.at_vertex[nv + f_da] == 0.0);
    CHECK(h.at_vertex[u_cd] == doctest::Approx(n2).epsilon(1e-9));
    CHECK(h.at_vertex[u_ab] == doctest::Approx(e_sigma * e_sigma).epsilon(1e-9));
    CHECK(h.at_vertex[nv + f_bc] == doctest::Approx(n2 - e_mu * e_mu).epsilon(1e-9));
    CHECK(h.at_vertex[u_ab] - h.at_vertex[nv + f_bc] == doctest::Approx(1.0).epsilon(1e-9));
    // Corner jumps stay nonnegative, matching H(black) - H(white) = X^2.
    for (const QuadProductData& q : quads) {
        CHECK(h.at_vertex[q.v[1]] - h.at_vertex[q.v[0]] >= -1e-12);
        CHECK(h.at_vertex[q.v[3]] - h.at_vertex[q.v[2]] >= -1e-12);
    }
}

TEST_CASE("csv dumps carry one row per object") {
    SEmbedding s = varied_patch(3);
    Spinor x = random_solution(s, 2);
    SHolFunction f = x_to_f(s, x);
    HFunction h = build_H(s, x, 0);
    std::string fc = f_csv(s, f), hc = h_csv(s, h);
    CHECK(std::count(fc.begin(), fc.end(), '\n') == int(s.quads.size()) + 1);
    CHECK(std::count(hc.begin(), hc.end(), '\n') == s.n_vertices() + int(s.quads.size()) + 1);
}
