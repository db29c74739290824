#include "semb/jsonio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "semb/error.hpp"

namespace semb {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& why) {
    throw SembError(ErrorCode::schema, path + ": " + why);
}

json parse(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw SembError(ErrorCode::schema, "$: not valid JSON");
    return j;
}

const json& field(const json& j, const std::string& path, const char* name) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    auto it = j.find(name);
    if (it == j.end()) schema_fail(path + "." + name, "missing field");
    return *it;
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) schema_fail(path, "expected an integer");
    return j.get<int>();
}

double get_real(const json& j, const std::string& path) {
    if (!j.is_number()) schema_fail(path, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) schema_fail(path, "non-finite number");
    return v;
}

int get_id(const json& j, const std::string& path, int limit) {
    int v = get_int(j, path);
    if (v < 0 || v >= limit) schema_fail(path, "id out of range");
    return v;
}

cpx get_xy(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) schema_fail(path, "expected [x, y]");
    return {get_real(j[0], path + "[0]"), get_real(j[1], path + "[1]")};
}

}  // namespace

std::string graph_to_json(const GraphDesc& d) {
    ordered_json j;
    j["vertices"] = d.n_vertices;
    j["faces"] = d.n_faces;
    j["outer_face"] = d.outer_face;
    j["edges"] = ordered_json::array();
    for (const EdgeDesc& e : d.edges)
        j["edges"].push_back(ordered_json{
            {"v0", e.v0}, {"v1", e.v1}, {"f_left", e.f_left}, {"f_right", e.f_right}, {"x", e.x}});
    j["rotations"] = d.rotations;
    return j.dump(2) + "\n";
}

GraphDesc graph_from_json(const std::string& text) {
    json j = parse(text);
    GraphDesc d;
    d.n_vertices = get_int(field(j, "$", "vertices"), "$.vertices");
    d.n_faces = get_int(field(j, "$", "faces"), "$.faces");
    if (d.n_vertices < 1 || d.n_faces < 1) schema_fail("$.vertices", "graph must be nonempty");
    d.outer_face = get_id(field(j, "$", "outer_face"), "$.outer_face", d.n_faces);
    const json& edges = field(j, "$", "edges");
    if (!edges.is_array()) schema_fail("$.edges", "expected an array");
    for (size_t i = 0; i < edges.size(); ++i) {
        std::string p = "$.edges[" + std::to_string(i) + "]";
        EdgeDesc e;
        e.v0 = get_id(field(edges[i], p, "v0"), p + ".v0", d.n_vertices);
        e.v1 = get_id(field(edges[i], p, "v1"), p + ".v1", d.n_vertices);
        e.f_left = get_id(field(edges[i], p, "f_left"), p + ".f_left", d.n_faces);
        e.f_right = get_id(field(edges[i], p, "f_right"), p + ".f_right", d.n_faces);
        e.x = get_real(field(edges[i], p, "x"), p + ".x");
        if (!(e.x > 0.0)) schema_fail(p + ".x", "weight must be positive");
        d.edges.push_back(e);
    }
    const json& rot = field(j, "$", "rotations");
    if (!rot.is_array() || int(rot.size()) != d.n_vertices)
        schema_fail("$.rotations", "expected one entry per vertex");
    for (size_t v = 0; v < rot.size(); ++v) {
        std::string p = "$.rotations[" + std::to_string(v) + "]";
        if (!rot[v].is_array()) schema_fail(p, "expected an array of edge ids");
        std::vector<int> r;
        for (size_t k = 0; k < rot[v].size(); ++k)
            r.push_back(get_id(rot[v][k], p + "[" + std::to_string(k) + "]", int(d.edges.size())));
        d.rotations.push_back(std::move(r));
    }
    return d;
}

std::string embedding_to_json(const SEmbedding& s) {
    ordered_json j;
    j["S"] = ordered_json::array();
    for (cpx p : s.pos) j["S"].push_back(ordered_json::array({p.real(), p.imag()}));
    j["Q"] = s.q;
    j["color"] = s.color;
    j["quads"] = ordered_json::array();
    for (const EmbQuad& z : s.quads)
        j["quads"].push_back(ordered_json{{"v", z.v},
                                          {"center", ordered_json::array({z.center.real(), z.center.imag()})},
                                          {"r", z.r},
                                          {"theta", z.theta}});
    if (s.qc.size() == s.quads.size()) j["Qc"] = s.qc;
    return j.dump(2) + "\n";
}

SEmbedding embedding_from_json(const std::string& text) {
    json j = parse(text);
    SEmbedding s;
    const json& pos = field(j, "$", "S");
    if (!pos.is_array() || pos.empty()) schema_fail("$.S", "expected a nonempty array");
    for (size_t i = 0; i < pos.size(); ++i)
        s.pos.push_back(get_xy(pos[i], "$.S[" + std::to_string(i) + "]"));
    int nv = int(s.pos.size());
    const json& q = field(j, "$", "Q");
    if (!q.is_array() || int(q.size()) != nv) schema_fail("$.Q", "expected one value per vertex");
    for (size_t i = 0; i < q.size(); ++i)
        s.q.push_back(get_real(q[i], "$.Q[" + std::to_string(i) + "]"));
    const json& col = field(j, "$", "color");
    if (!col.is_array() || int(col.size()) != nv)
        schema_fail("$.color", "expected one value per vertex");
    for (size_t i = 0; i < col.size(); ++i) {
        int c = get_int(col[i], "$.color[" + std::to_string(i) + "]");
        if (c != kBlack && c != kWhite)
            schema_fail("$.color[" + std::to_string(i) + "]", "color must be 0 or 1");
        s.color.push_back(c);
    }
    const json& quads = field(j, "$", "quads");
    if (!quads.is_array()) schema_fail("$.quads", "expected an array");
    for (size_t i = 0; i < quads.size(); ++i) {
        std::string p = "$.quads[" + std::to_string(i) + "]";
        EmbQuad z;
        const json& v = field(quads[i], p, "v");
        if (!v.is_array() || v.size() != 4) schema_fail(p + ".v", "expected four vertex ids");
        for (int k = 0; k < 4; ++k)
            z.v[k] = get_id(v[k], p + ".v[" + std::to_string(k) + "]", nv);
        for (int k = 0; k < 4; ++k)
            if (s.color[z.v[k]] != (k % 2 == 0 ? kWhite : kBlack))
                schema_fail(p + ".v", "contour must alternate white-first");
        z.center = get_xy(field(quads[i], p, "center"), p + ".center");
        z.r = get_real(field(quads[i], p, "r"), p + ".r");
        z.theta = get_real(field(quads[i], p, "theta"), p + ".theta");
        if (!(z.r >= 0.0)) schema_fail(p + ".r", "radius must be nonnegative");
        s.quads.push_back(z);
    }
    if (auto it = j.find("Qc"); it != j.end() && !(it->is_array() && it->empty())) {
        if (!it->is_array() || it->size() != s.quads.size())
            schema_fail("$.Qc", "expected one value per quad");
        for (size_t i = 0; i < it->size(); ++i)
            s.qc.push_back(get_real((*it)[i], "$.Qc[" + std::to_string(i) + "]"));
    }
    s.index_corners();
    return s;
}

bool graphs_equal(const GraphDesc& a, const GraphDesc& b) {
    if (a.n_vertices != b.n_vertices || a.n_faces != b.n_faces || a.outer_face != b.outer_face)
        return false;
    if (a.edges.size() != b.edges.size() || a.rotations != b.rotations) return false;
    for (size_t i = 0; i < a.edges.size(); ++i) {
        const EdgeDesc &x = a.edges[i], &y = b.edges[i];
        if (x.v0 != y.v0 || x.v1 != y.v1 || x.f_left != y.f_left || x.f_right != y.f_right ||
            x.x != y.x)
            return false;
    }
    return true;
}

bool embeddings_equal(const SEmbedding& a, const SEmbedding& b) {
    if (a.pos != b.pos || a.q != b.q || a.color != b.color || a.qc != b.qc) return false;
    if (a.quads.size() != b.quads.size()) return false;
    for (size_t i = 0; i < a.quads.size(); ++i) {
        const EmbQuad &x = a.quads[i], &y = b.quads[i];
        if (x.v != y.v || x.center != y.center || x.r != y.r || x.theta != y.theta) return false;
    }
    return true;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SembError(ErrorCode::io, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw SembError(ErrorCode::io, "read failure on " + path);
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SembError(ErrorCode::io, "cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw SembError(ErrorCode::io, "write failure on " + path);
}

}  // namespace semb
