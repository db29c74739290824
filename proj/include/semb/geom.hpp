#ifndef SEMB_GEOM_HPP
#define SEMB_GEOM_HPP

// Planar geometry kit: tangential quadrilaterals, incircle fitting,
// half-plane clipping, and the conic solver used by the alignment surgery.

#include <array>
#include <complex>
#include <optional>
#include <vector>

namespace semb {

using cpx = std::complex<double>;

inline double cross(cpx a, cpx b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(cpx a, cpx b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Signed distance from p to the oriented line through a->b, positive on the left.
double line_side(cpx p, cpx a, cpx b);

// Shoelace signed area, ccw positive.
double polygon_area(const std::vector<cpx>& poly);

// Sutherland-Hodgman clip against the half plane { side*(Im z - y) >= 0 }.
// side = +1 keeps the part above the level, -1 the part below.
std::vector<cpx> clip_halfplane_y(const std::vector<cpx>& poly, double y, int side);

// True if p lies strictly inside poly (winding test), with margin eps:
// points within eps of the boundary are treated as outside.
bool point_strictly_inside(const std::vector<cpx>& poly, cpx p, double eps);

// True if the interiors of two simple polygons intersect (shared boundary
// edges/vertices do not count). eps controls the boundary tolerance.
bool interiors_overlap(const std::vector<cpx>& a, const std::vector<cpx>& b, double eps);

struct IncircleFit {
    cpx center{0.0, 0.0};
    double r = 0.0;
    // Max deviation |signed support distance - r| over the four edges.
    double residual = 0.0;
    // Polygon orientation sign used for the inward normals (+1 ccw, -1 cw).
    double orient = 1.0;
};

// Least-squares circle equidistant from the four edge support lines of the
// quad, using signed distances so non-convex quads are handled.
IncircleFit fit_incircle(const std::array<cpx, 4>& quad);

// Interior half-angle at quad vertex i (half the interior angle of the
// polygon at that vertex, using the fit orientation; reflex vertices give
// half-angles above pi/2).
double half_angle(const std::array<cpx, 4>& quad, int i, double orient);

// |e0| - |e1| + |e2| - |e3| around the quad; zero iff tangential (Pitot).
double pitot_residual(const std::array<cpx, 4>& quad);

// Incircle of a triangle: center and radius.
void triangle_incircle(cpx a, cpx b, cpx c, cpx& center, double& r);

// Fourth-vertex locus solver. Given three consecutive vertices (w0, b0, w1)
// of a tangential quad (w0 b0 w1 v), the locus of valid v is the conic branch
//   |v - w0| - |v - w1| = |b0 - w0| - |b0 - w1|.
// Returns the points of that branch at height y (0, 1 or 2 solutions),
// found by bisection along the branch parameter; handles the degenerate
// perpendicular-bisector case.
std::vector<cpx> hyperbola_points_at_level(cpx w0, cpx b0, cpx w1, double y);

}  // namespace semb

#endif
