#ifndef SEMB_SURGERY_HPP
#define SEMB_SURGERY_HPP

// Alignment surgery: solving along the tangential-completion conic, the
// triangle-to-quad completion, horizontal alignment of a tangential quad at
// a level line, bad-level diagnostics, and welding an embedding onto a
// square-grid district through a strip-and-kite construction.

#include <array>
#include <string>
#include <vector>

#include "semb/embedding.hpp"

namespace semb {

// Geometry record of a standalone quad contour (no embedding attached):
// incircle fit, half-angles, support and Pitot residuals.
TangentialQuad tangential_quad(const std::array<cpx, 4>& v);

// Point v at height y on the conic branch
//   |v - w0| - |v - w1| = |b0 - w0| - |b0 - w1|
// through b0, so that (w0 b0 w1 v) is again tangential. The branch can
// degenerate to the perpendicular bisector of (w0, w1). Throws when the
// level line misses the branch.
cpx hyperbola_point(cpx w0, cpx b0, cpx w1, double y);

// Completion of a triangle (j k l) into a tangential quad sharing its
// incircle: the tangency point on the selected side (0: [j k], 1: [k l],
// 2: [l j]) is inserted as a fourth vertex, creating a straight angle.
TangentialQuad triangle_to_quad(cpx j, cpx k, cpx l, int side);

enum class ClipSide { above, below };

// Replacement of the part of a tangential quad on one side of a horizontal
// level by at most three tangential quads whose union is exactly that clip,
// with every newly created vertex sitting on the level line.
struct HalfPlaneClip {
    std::array<cpx, 4> source;
    double y = 0.0;
    ClipSide side = ClipSide::above;
    std::string case_label;  // "1", "2a", "2b" or "3"
    std::vector<TangentialQuad> quads;  // 1..3 pieces, contours ccw, white-first
    std::vector<cpx> new_vertices;      // created points, all at height y
    double area_residual = 0.0;         // |union - clip| relative to area(source)
};

// The quad is read in contour order [w0, b0, w1, b1]; the level must cross
// its interior away from vertex ordinates.
HalfPlaneClip horizontal_align(const TangentialQuad& z, double y, ClipSide side);

// Sweep of candidate levels (uniform plus geometrically refined clusters
// near every vertex ordinate); a level is bad when some quad produced by
// the alignment at that level has incircle radius below beta.
struct BadLevelReport {
    double measure = 0.0;  // one dimensional measure of the bad levels
    double span = 0.0;     // vertical extent of the quad
    std::vector<double> level;       // scanned levels, increasing
    std::vector<double> min_radius;  // min output radius per level
    std::vector<char> bad;
};

BadLevelReport bad_level_measure(const TangentialQuad& z, double beta, int base_samples = 2000);

struct WeldParams {
    double kappa = 0.5;     // Lipschitz constant for the final check
    int strip_layers = 4;   // strip copies pasted below the alignment level (even)
    int district_cols = 3;  // welded square columns, mesh sqrt(2) * strip height
    int n_levels = 10000;   // good-level scan resolution
    double window_lo = 0.25, window_hi = 0.5;  // search window, bbox fractions
};

struct WeldReport {
    double y_b = 0.0, y_r = 0.0;  // alignment and symmetrization levels
    double strip_height = 0.0;    // realized distance y_r - y_b
    // The source text gives two inconsistent constants for the level shift;
    // both are recorded here while the realized strip height is used.
    double shift_constant_a = 0.0;  // 10 exp(-160 / delta)
    double shift_constant_b = 0.0;  // 10 exp(-1600 / delta)
    double delta = 0.0;             // max edge length of the input
    double good_level_radius = 0.0;
    double min_kite_radius = 0.0;
    double kite_radius_floor = 0.0;  // strip_height^4
    double district_ordinate_spread = 0.0;  // bottom white arc alignment defect
    double max_q_defect = 0.0;              // origami closure over welded edges
    double max_tangency_residual = 0.0;     // over created quads
    double interior_theta_drift = 0.0;      // untouched quads, before vs after
    double lip_delta = 0.0;                 // lip_scale at kappa
    bool lip_ok = false;                    // lip_delta <= 5 delta
    bool proper = false;
    int n_interior = 0, n_aligned = 0, n_strip = 0, n_kites = 0, n_district = 0;
    std::vector<int> interior_quads;  // output quad ids copied over unchanged
};

// Horizontal alignment of the embedding at a good level, alternating
// strip/reflected-strip tiling below it, one kite layer on the right
// boundary of the band and a square-grid district attached to it.
SEmbedding weld_square_district(const SEmbedding& s, const WeldParams& p, WeldReport* report = nullptr);

}  // namespace semb

#endif
