#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "semb/embedding.hpp"

using namespace semb;

namespace {

const double kPi = std::acos(-1.0);

// The flat square-lattice embedding: unit squares, Q = 1 on black, 0 on
// white, theta = pi/4 everywhere.
SEmbedding square_patch(int n) {
    SEmbedding s;
    auto vid = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            s.pos.push_back({double(i), double(j)});
            bool black = (i + j) % 2 == 0;
            s.color.push_back(black ? kBlack : kWhite);
            s.q.push_back(black ? 1.0 : 0.0);
        }
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            EmbQuad z;
            std::array<int, 4> loop{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
            int start = (i + j) % 2 == 0 ? 1 : 0;  // begin at a white vertex
            for (int k = 0; k < 4; ++k) z.v[k] = loop[(start + k) % 4];
            z.center = {i + 0.5, j + 0.5};
            z.r = 0.5;
            z.theta = kPi / 4.0;
            s.quads.push_back(z);
        }
    s.index_corners();
    return s;
}

}  // namespace

TEST_CASE("transition signs of principal lifts") {
    CHECK(SEmbedding::transition_sign(0.0, kPi / 2) == 1);
    CHECK(SEmbedding::transition_sign(kPi / 2, 0.0) == 1);
    CHECK(SEmbedding::transition_sign(-kPi / 2, kPi) == -1);
    CHECK(SEmbedding::transition_sign(kPi, -kPi / 2) == -1);
    CHECK(SEmbedding::transition_sign(2.9, -2.9) == -1);
    CHECK(SEmbedding::transition_sign(0.3, 0.4) == 1);
}

TEST_CASE("corner table and principal sections") {
    SEmbedding s = square_patch(3);
    CHECK(int(s.quads.size()) == 9);
    // Interior corners are shared by two quads.
    int shared = 0;
    for (const EmbCorner& c : s.corners) {
        CHECK(s.color[c.black] == kBlack);
        CHECK(s.color[c.white] == kWhite);
        if (c.quad_b >= 0) ++shared;
    }
    CHECK(shared == 12);
    for (size_t c = 0; c < s.corners.size(); ++c) {
        cpx root = s.chi_hat(int(c));
        CHECK(std::abs(root * root - s.corner_dir(int(c))) < 1e-12);
        CHECK(std::abs(s.eta_hat(int(c)) * std::abs(root) - std::conj(root) * std::exp(cpx(0, kPi / 4))) <
              1e-12);
    }
}

TEST_CASE("the embedding's own spinor satisfies propagation") {
    SEmbedding s = square_patch(4);
    Spinor x = embedding_spinor(s);
    SpinorReport rep = verify_spinor(s, x);
    CHECK(rep.max_residual < 1e-12);
    // Breaking one value must be detected at its quads.
    int c = s.quads[5].corner[2];
    x.val[c] *= 1.01;
    rep = verify_spinor(s, x);
    CHECK(rep.max_residual > 1e-3);
    CHECK((rep.worst_quad == s.corners[c].quad_a || rep.worst_quad == s.corners[c].quad_b));
}

TEST_CASE("quad geometry and angle recovery") {
    SEmbedding s = square_patch(3);
    for (int qi = 0; qi < int(s.quads.size()); ++qi) {
        TangentialQuad t = quad_geometry(s, qi);
        CHECK(t.support_residual < 1e-12);
        CHECK(std::abs(t.pitot) < 1e-12);
        CHECK(t.r == doctest::Approx(0.5));
        CHECK(recover_theta(t) == doctest::Approx(kPi / 4));
    }
}

TEST_CASE("properness checks") {
    SEmbedding s = square_patch(3);
    PropernessReport rep = check_properness(s);
    CHECK(rep.proper());
    // Slide one quad so it overlaps a neighbor without sharing its boundary.
    SEmbedding bad = s;
    EmbQuad extra = bad.quads[0];
    int base = bad.n_vertices();
    for (int k = 0; k < 4; ++k) {
        bad.pos.push_back(bad.pos[extra.v[k]] + cpx(0.5, 0.25));
        bad.q.push_back(bad.q[extra.v[k]]);
        bad.color.push_back(bad.color[extra.v[k]]);
        extra.v[k] = base + k;
    }
    extra.center += cpx(0.5, 0.25);
    bad.quads.push_back(extra);
    bad.index_corners();
    rep = check_properness(bad);
    CHECK(!rep.overlaps.empty());
}

TEST_CASE("lipschitz scale scan") {
    SEmbedding s = square_patch(4);
    LipScaleResult loose = lip_scale(s, 1.5);
    CHECK(loose.delta == 0.0);
    CHECK(!loose.fails_at_diameter);
    LipScaleResult tight = lip_scale(s, 0.5);
    CHECK(tight.delta > 0.0);
    CHECK(s.color[tight.v0] != s.color[tight.v1]);
    // The diameter pair joins two black corners, so Q agrees there.
    CHECK(!tight.fails_at_diameter);
}

TEST_CASE("exponential fatness check") {
    SEmbedding s = square_patch(4);
    ExpFatReport rep = exp_fat_check(s, 0.5, 2.0);
    CHECK(rep.pass);
    CHECK(rep.n_thin == 0);
    // With an absurd threshold every quad is thin and the patch itself is the
    // single component, which is wider than rho.
    ExpFatReport all = exp_fat_check(s, 50.0, 1.0);
    CHECK(all.n_thin == 16);
    CHECK(all.n_components == 1);
    CHECK(!all.pass);
}

TEST_CASE("boost preserves tangentiality and theta") {
    SEmbedding s = square_patch(3);
    SEmbedding b = boost(s, 0.4);
    for (int qi = 0; qi < int(s.quads.size()); ++qi) {
        TangentialQuad t = quad_geometry(b, qi);
        CHECK(t.support_residual < 1e-9);
        CHECK(std::abs(t.pitot) < 1e-9);
        CHECK(recover_theta(t) == doctest::Approx(kPi / 4));
        CHECK(std::abs(t.center - b.quads[qi].center) < 1e-9);
    }
    SEmbedding back = boost(b, -0.4);
    for (int v = 0; v < s.n_vertices(); ++v) {
        CHECK(std::abs(back.pos[v] - s.pos[v]) < 1e-9);
        CHECK(back.q[v] == doctest::Approx(s.q[v]));
    }
    CHECK_THROWS_AS(boost(s, 1.0), SembError);
}

TEST_CASE("rebuilding from the spinor reproduces the embedding") {
    SEmbedding s = square_patch(4);
    Spinor x = embedding_spinor(s);
    int anchor = -1;
    for (int v = 0; v < s.n_vertices(); ++v)
        if (s.color[v] == kWhite) {
            anchor = v;
            break;
        }
    REQUIRE(anchor >= 0);
    BuildReport rep;
    SEmbedding s2 = build_embedding(s, x, s.pos[anchor], anchor, &rep);
    CHECK(rep.max_closure < 1e-12);
    CHECK(rep.max_center_spread < 1e-12);
    CHECK(rep.degenerate.empty());
    for (int v = 0; v < s.n_vertices(); ++v) {
        CHECK(std::abs(s2.pos[v] - s.pos[v]) < 1e-12);
        CHECK(s2.q[v] == doctest::Approx(s.q[v] - s.q[anchor]));
    }
    for (size_t qi = 0; qi < s.quads.size(); ++qi) {
        CHECK(std::abs(s2.quads[qi].center - s.quads[qi].center) < 1e-12);
        CHECK(s2.quads[qi].r == doctest::Approx(0.5));
    }
}
