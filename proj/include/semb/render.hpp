#ifndef SEMB_RENDER_HPP
#define SEMB_RENDER_HPP

// SVG 1.1 rendering of embeddings: quad contours, dashed incircles, filled
// black and open white vertex dots, an optional origami heat overlay, edge
// overlays (e.g. open FK edges), and per-quad highlights for surgery diffs.

#include <array>
#include <string>
#include <vector>

#include "semb/embedding.hpp"

namespace semb {

struct RenderOptions {
    double width = 800.0;  // pixel width; height follows the aspect ratio
    bool incircles = true;
    bool vertex_dots = true;
    bool q_heat = false;                 // fill quads by the center origami value
    std::vector<int> highlight;          // quad ids stroked in accent color
    std::vector<std::array<cpx, 2>> overlay_segments;
    std::string title;
};

std::string render_svg(const SEmbedding& s, const RenderOptions& opt = {});

}  // namespace semb

#endif
