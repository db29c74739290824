#include "semb/render.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "semb/error.hpp"

namespace semb {

namespace {

struct Frame {
    double xmin, ymax, scale, w, h;
    // SVG y grows downward, so the vertical axis is flipped.
    double x(cpx p) const { return (p.real() - xmin) * scale; }
    double y(cpx p) const { return (ymax - p.imag()) * scale; }
};

std::string num(double v) {
    std::ostringstream o;
    o.precision(3);
    o << std::fixed << v;
    return o.str();
}

// Blue-to-red ramp for the heat overlay, t in [0, 1].
std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    int r = int(std::lround(40 + 215 * t));
    int b = int(std::lround(255 - 215 * t));
    std::ostringstream o;
    o << "rgb(" << r << ",80," << b << ")";
    return o.str();
}

}  // namespace

std::string render_svg(const SEmbedding& s, const RenderOptions& opt) {
    if (s.pos.empty()) throw SembError(ErrorCode::invalid_argument, "render: empty embedding");
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (cpx p : s.pos) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    }
    double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    double margin = 0.04 * span;
    xmin -= margin;
    xmax += margin;
    ymin -= margin;
    ymax += margin;
    Frame fr;
    fr.xmin = xmin;
    fr.ymax = ymax;
    fr.scale = opt.width / (xmax - xmin);
    fr.w = opt.width;
    fr.h = (ymax - ymin) * fr.scale;
    double dot = std::max(1.5, 0.006 * opt.width);

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(fr.w)
      << "\" height=\"" << num(fr.h) << "\" viewBox=\"0 0 " << num(fr.w) << " " << num(fr.h)
      << "\">\n";
    if (!opt.title.empty()) o << "  <title>" << opt.title << "</title>\n";

    double qlo = 0.0, qhi = 1.0;
    if (opt.q_heat && !s.qc.empty()) {
        qlo = *std::min_element(s.qc.begin(), s.qc.end());
        qhi = *std::max_element(s.qc.begin(), s.qc.end());
        if (qhi - qlo < 1e-300) qhi = qlo + 1.0;
    }
    std::set<int> accent(opt.highlight.begin(), opt.highlight.end());

    o << "  <g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">\n";
    for (size_t qi = 0; qi < s.quads.size(); ++qi) {
        const EmbQuad& z = s.quads[qi];
        o << "    <polygon points=\"";
        for (int k = 0; k < 4; ++k) {
            cpx p = s.pos[z.v[k]];
            o << (k ? " " : "") << num(fr.x(p)) << "," << num(fr.y(p));
        }
        o << "\"";
        if (opt.q_heat && qi < s.qc.size())
            o << " fill=\"" << heat_color((s.qc[qi] - qlo) / (qhi - qlo)) << "\" fill-opacity=\"0.55\"";
        if (accent.count(int(qi))) o << " stroke=\"#d40\" stroke-width=\"2\"";
        o << "/>\n";
    }
    o << "  </g>\n";

    if (opt.incircles) {
        o << "  <g stroke=\"#888\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\" fill=\"none\">\n";
        for (const EmbQuad& z : s.quads)
            if (z.r > 0.0)
                o << "    <circle cx=\"" << num(fr.x(z.center)) << "\" cy=\"" << num(fr.y(z.center))
                  << "\" r=\"" << num(z.r * fr.scale) << "\"/>\n";
        o << "  </g>\n";
    }

    if (!opt.overlay_segments.empty()) {
        o << "  <g stroke=\"#0a0\" stroke-width=\"2.5\" stroke-linecap=\"round\">\n";
        for (const auto& seg : opt.overlay_segments)
            o << "    <line x1=\"" << num(fr.x(seg[0])) << "\" y1=\"" << num(fr.y(seg[0]))
              << "\" x2=\"" << num(fr.x(seg[1])) << "\" y2=\"" << num(fr.y(seg[1])) << "\"/>\n";
        o << "  </g>\n";
    }

    if (opt.vertex_dots) {
        o << "  <g stroke=\"#000\" stroke-width=\"0.8\">\n";
        for (int v = 0; v < s.n_vertices(); ++v)
            o << "    <circle cx=\"" << num(fr.x(s.pos[v])) << "\" cy=\"" << num(fr.y(s.pos[v]))
              << "\" r=\"" << num(dot) << "\" fill=\""
              << (s.color[v] == kBlack ? "#000" : "#fff") << "\"/>\n";
        o << "  </g>\n";
    }

    o << "</svg>\n";
    return o.str();
}

}  // namespace semb
