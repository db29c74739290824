#include "semb.h"

#include <cmath>
#include <cstring>
#include <string>

#include "json.hpp"
#include "semb/constructions.hpp"
#include "semb/embedding.hpp"
#include "semb/error.hpp"
#include "semb/fkmc.hpp"
#include "semb/jsonio.hpp"
#include "semb/render.hpp"
#include "semb/surgery.hpp"

struct semb_embedding {
    semb::SEmbedding impl;
};

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int fail(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Runs the body, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const semb::SembError& e) {
        return fail(int(e.code()), e.what());
    } catch (const std::exception& e) {
        return fail(SEMB_INVALID_ARGUMENT, e.what());
    }
}

json parse_options(const char* text, const char* what) {
    if (text == nullptr || *text == '\0') return json::object();
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw semb::SembError(semb::ErrorCode::schema,
                              std::string(what) + ": expected a JSON object");
    return j;
}

template <typename T>
T opt_field(const json& j, const char* name, T fallback) {
    auto it = j.find(name);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw semb::SembError(semb::ErrorCode::schema, std::string("$.") + name + ": wrong type");
    }
}

template <typename T>
T req_field(const json& j, const char* name) {
    auto it = j.find(name);
    if (it == j.end())
        throw semb::SembError(semb::ErrorCode::schema, std::string("$.") + name + ": missing field");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw semb::SembError(semb::ErrorCode::schema, std::string("$.") + name + ": wrong type");
    }
}

}  // namespace

extern "C" {

const char* semb_last_error(void) { return g_last_error.c_str(); }

void semb_string_free(char* s) { std::free(s); }

void semb_embedding_free(semb_embedding* e) { delete e; }

int semb_embedding_from_json(const char* text, semb_embedding** out) {
    return guarded([&] {
        if (text == nullptr || out == nullptr)
            return fail(SEMB_INVALID_ARGUMENT, "null argument");
        auto* h = new semb_embedding{semb::embedding_from_json(text)};
        *out = h;
        return SEMB_OK;
    });
}

int semb_embedding_to_json(const semb_embedding* e, char** out) {
    return guarded([&] {
        if (e == nullptr || out == nullptr) return fail(SEMB_INVALID_ARGUMENT, "null argument");
        *out = dup_string(semb::embedding_to_json(e->impl));
        return SEMB_OK;
    });
}

int semb_graph_normalize(const char* text, char** out) {
    return guarded([&] {
        if (text == nullptr || out == nullptr) return fail(SEMB_INVALID_ARGUMENT, "null argument");
        semb::GraphDesc d = semb::graph_from_json(text);
        semb::WeightedPlanarGraph::build(d);  // structural validation
        *out = dup_string(semb::graph_to_json(d));
        return SEMB_OK;
    });
}

int semb_build(const char* spec_json, semb_embedding** out, char** meta_json) {
    return guarded([&] {
        if (out == nullptr) return fail(SEMB_INVALID_ARGUMENT, "null argument");
        json spec = parse_options(spec_json, "build spec");
        std::string kind = req_field<std::string>(spec, "kind");
        semb::SEmbedding emb;
        ordered_json meta;
        meta["kind"] = kind;
        if (kind == "square_lattice") {
            emb = semb::square_lattice(req_field<int>(spec, "n"),
                                       opt_field<double>(spec, "theta", std::acos(-1.0) / 4))
                      .emb;
        } else if (kind == "zigzag") {
            semb::LayerSpec ls;
            ls.theta = req_field<std::vector<double>>(spec, "theta");
            ls.rows = opt_field<int>(spec, "rows", 4);
            ls.scale = opt_field<double>(spec, "scale", 1.0);
            semb::ZigzagResult r = semb::zigzag_layered(ls);
            meta["max_formula_mismatch"] = r.max_formula_mismatch;
            emb = std::move(r.c.emb);
        } else if (kind == "zigzag_iid") {
            std::vector<double> z;
            semb::LayerSpec ls = semb::iid_layers(
                req_field<int>(spec, "columns"), req_field<int>(spec, "rows"),
                opt_field<double>(spec, "alpha", 0.75), req_field<int>(spec, "n"),
                opt_field<std::uint64_t>(spec, "seed", 1), &z);
            meta["z"] = z;
            meta["seed"] = opt_field<std::uint64_t>(spec, "seed", 1);
            emb = semb::zigzag_layered(ls).c.emb;
        } else if (kind == "massive") {
            semb::LayerSpec ls =
                semb::massive_layers(req_field<int>(spec, "columns"), req_field<int>(spec, "rows"),
                                     req_field<double>(spec, "mass"), req_field<int>(spec, "n"));
            emb = semb::zigzag_layered(ls).c.emb;
        } else if (kind == "isoradial_square" || kind == "isoradial_tri") {
            double delta = opt_field<double>(spec, "delta", 1.0);
            int n = req_field<int>(spec, "n");
            semb::RhombicTiling t =
                kind == "isoradial_square" ? semb::square_rhombi(n, delta) : semb::tri_rhombi(n, delta);
            emb = semb::isoradial_from_rhombi(t, delta).emb;
        } else if (kind == "penrose") {
            double delta = opt_field<double>(spec, "delta", 1.0);
            semb::RhombicTiling t = semb::penrose_rhombi(req_field<int>(spec, "range"), delta,
                                                         opt_field<std::uint64_t>(spec, "seed", 1));
            emb = semb::isoradial_from_rhombi(t, delta).emb;
        } else if (kind == "circle_pattern") {
            std::string base = opt_field<std::string>(spec, "base", "hex");
            int k = req_field<int>(spec, "k");
            semb::Triangulation tri =
                base == "fan" ? semb::fan_triangulation(k) : semb::hex_triangulation(k);
            semb::CirclePattern cp = semb::circle_pattern_from_triangulation(tri);
            meta["packing_residual"] = cp.packing_residual;
            meta["iterations"] = cp.iterations;
            emb = std::move(cp.c.emb);
        } else {
            throw semb::SembError(semb::ErrorCode::schema, "$.kind: unknown construction");
        }
        meta["vertices"] = emb.n_vertices();
        meta["quads"] = int(emb.quads.size());
        *out = new semb_embedding{std::move(emb)};
        if (meta_json) *meta_json = dup_string(meta.dump(2) + "\n");
        return SEMB_OK;
    });
}

int semb_check(const semb_embedding* e, const char* options_json, char** report_json) {
    return guarded([&] {
        if (e == nullptr) return fail(SEMB_INVALID_ARGUMENT, "null argument");
        json opt = parse_options(options_json, "check options");
        const semb::SEmbedding& s = e->impl;
        double diam = s.diameter();
        ordered_json rep;
        bool pass = true;

        semb::PropernessReport pr = semb::check_properness(s);
        rep["proper"] = pr.proper();
        rep["overlap_pairs"] = int(pr.overlaps.size());
        rep["degenerate_quads"] = int(pr.degenerate.size());
        if (!pr.proper()) pass = false;

        double tangency = 0.0, theta_rt = 0.0;
        for (size_t qi = 0; qi < s.quads.size(); ++qi) {
            semb::TangentialQuad t = semb::quad_geometry(s, int(qi));
            tangency = std::max(tangency, t.support_residual);
            theta_rt = std::max(theta_rt, std::abs(semb::recover_theta(t) - s.quads[qi].theta));
        }
        rep["max_tangency_residual"] = tangency;
        rep["max_theta_roundtrip"] = theta_rt;
        if (tangency > 1e-9 * diam || theta_rt > 1e-10) pass = false;

        if (auto it = opt.find("lip_kappa"); it != opt.end()) {
            double kappa = it->get<double>();
            semb::LipScaleResult lip = semb::lip_scale(s, kappa);
            rep["lip_kappa"] = kappa;
            rep["lip_delta"] = lip.delta;
            rep["lip_fails_at_diameter"] = lip.fails_at_diameter;
            rep["lip_pair"] = ordered_json::array({lip.v0, lip.v1});
            if (lip.fails_at_diameter) pass = false;
        }
        if (opt.contains("exp_fat_delta")) {
            double d = req_field<double>(opt, "exp_fat_delta");
            double rho = opt_field<double>(opt, "exp_fat_rho", 1.0);
            semb::ExpFatReport ef = semb::exp_fat_check(s, d, rho);
            rep["exp_fat_pass"] = ef.pass;
            rep["exp_fat_thin"] = ef.n_thin;
            rep["exp_fat_max_component_diameter"] = ef.max_component_diameter;
            if (!ef.pass) pass = false;
        }
        if (auto it = opt.find("boost_t"); it != opt.end()) {
            double t = it->get<double>();
            semb::SEmbedding b = semb::boost(s, t);
            double drift = 0.0;
            for (size_t qi = 0; qi < s.quads.size(); ++qi)
                drift = std::max(drift, std::abs(semb::recover_theta(semb::quad_geometry(b, int(qi))) -
                                                 semb::recover_theta(semb::quad_geometry(s, int(qi)))));
            rep["boost_t"] = t;
            rep["boost_theta_drift"] = drift;
            if (drift > 1e-10) pass = false;
        }
        rep["pass"] = pass;
        if (report_json) *report_json = dup_string(rep.dump(2) + "\n");
        if (!pass) return fail(SEMB_VALIDATION, "validation failed; see report");
        return SEMB_OK;
    });
}

int semb_boost(const semb_embedding* e, double t, semb_embedding** out) {
    return guarded([&] {
        if (e == nullptr || out == nullptr) return fail(SEMB_INVALID_ARGUMENT, "null argument");
        *out = new semb_embedding{semb::boost(e->impl, t)};
        return SEMB_OK;
    });
}

int semb_weld(const semb_embedding* e, const char* params_json, semb_embedding** out,
              char** report_json) {
    return guarded([&] {
        if (e == nullptr || out == nullptr) return fail(SEMB_INVALID_ARGUMENT, "null argument");
        json opt = parse_options(params_json, "weld params");
        semb::WeldParams p;
        p.kappa = opt_field<double>(opt, "kappa", p.kappa);
        p.strip_layers = opt_field<int>(opt, "strip_layers", p.strip_layers);
        p.district_cols = opt_field<int>(opt, "district_cols", p.district_cols);
        p.n_levels = opt_field<int>(opt, "n_levels", p.n_levels);
        p.window_lo = opt_field<double>(opt, "window_lo", p.window_lo);
        p.window_hi = opt_field<double>(opt, "window_hi", p.window_hi);
        semb::WeldReport rep;
        semb::SEmbedding w = semb::weld_square_district(e->impl, p, &rep);
        *out = new semb_embedding{std::move(w)};
        if (report_json) {
            ordered_json j;
            j["y_b"] = rep.y_b;
            j["y_r"] = rep.y_r;
            j["strip_height"] = rep.strip_height;
            j["shift_constant_a"] = rep.shift_constant_a;
            j["shift_constant_b"] = rep.shift_constant_b;
            j["delta"] = rep.delta;
            j["good_level_radius"] = rep.good_level_radius;
            j["min_kite_radius"] = rep.min_kite_radius;
            j["kite_radius_floor"] = rep.kite_radius_floor;
            j["district_ordinate_spread"] = rep.district_ordinate_spread;
            j["max_q_defect"] = rep.max_q_defect;
            j["max_tangency_residual"] = rep.max_tangency_residual;
            j["interior_theta_drift"] = rep.interior_theta_drift;
            j["lip_delta"] = rep.lip_delta;
            j["lip_ok"] = rep.lip_ok;
            j["proper"] = rep.proper;
            j["n_interior"] = rep.n_interior;
            j["n_aligned"] = rep.n_aligned;
            j["n_strip"] = rep.n_strip;
            j["n_kites"] = rep.n_kites;
            j["n_district"] = rep.n_district;
            j["interior_quads"] = rep.interior_quads;
            *report_json = dup_string(j.dump(2) + "\n");
        }
        return SEMB_OK;
    });
}

int semb_render(const semb_embedding* e, const char* options_json, char** svg) {
    return guarded([&] {
        if (e == nullptr || svg == nullptr) return fail(SEMB_INVALID_ARGUMENT, "null argument");
        json opt = parse_options(options_json, "render options");
        semb::RenderOptions ro;
        ro.width = opt_field<double>(opt, "width", ro.width);
        ro.incircles = opt_field<bool>(opt, "incircles", ro.incircles);
        ro.vertex_dots = opt_field<bool>(opt, "vertex_dots", ro.vertex_dots);
        ro.q_heat = opt_field<bool>(opt, "q_heat", ro.q_heat);
        ro.highlight = opt_field<std::vector<int>>(opt, "highlight", {});
        ro.title = opt_field<std::string>(opt, "title", "");
        *svg = dup_string(semb::render_svg(e->impl, ro));
        return SEMB_OK;
    });
}

int semb_mc(const char* experiment_json, char** report_json, char** batches_csv_out) {
    return guarded([&] {
        json spec = parse_options(experiment_json, "experiment");
        json dom = req_field<json>(spec, "domain");
        if (!dom.is_object())
            throw semb::SembError(semb::ErrorCode::schema, "$.domain: expected an object");
        std::string kind = req_field<std::string>(dom, "kind");
        semb::CrossingExperiment ex;
        bool selfdual = opt_field<bool>(spec, "selfdual", false);
        if (kind == "grid") {
            std::string rule = opt_field<std::string>(dom, "rule", "separate");
            if (rule != "separate" && rule != "identified")
                throw semb::SembError(semb::ErrorCode::schema, "$.domain.rule: unknown rule");
            ex.domain = semb::grid_crossing_domain(
                req_field<int>(dom, "w"), req_field<int>(dom, "h"), req_field<double>(dom, "x"),
                rule == "separate" ? semb::ArcRule::separate : semb::ArcRule::identified);
        } else if (kind == "annulus") {
            ex.domain = semb::annulus_domain(req_field<int>(dom, "l"), req_field<double>(dom, "x")).d;
        } else {
            throw semb::SembError(semb::ErrorCode::schema, "$.domain.kind: unknown domain");
        }
        std::string event = opt_field<std::string>(spec, "event", "crossing");
        if (event == "crossing")
            ex.event = semb::FKEvent::crossing;
        else if (event == "circuit")
            ex.event = semb::FKEvent::circuit;
        else
            throw semb::SembError(semb::ErrorCode::schema, "$.event: unknown event");
        ex.seed = opt_field<std::uint64_t>(spec, "seed", ex.seed);
        ex.n_samples = opt_field<int>(spec, "n_samples", ex.n_samples);
        ex.burnin = opt_field<int>(spec, "burnin", ex.burnin);
        ex.thin = opt_field<int>(spec, "thin", ex.thin);
        ex.n_batches = opt_field<int>(spec, "n_batches", ex.n_batches);
        ex.heatbath = opt_field<bool>(spec, "heatbath", ex.heatbath);
        ex.n_chains = opt_field<int>(spec, "n_chains", ex.n_chains);
        semb::CrossingReport rep =
            selfdual ? semb::estimate_crossing_selfdual(ex) : semb::estimate_crossing(ex);
        if (report_json) *report_json = dup_string(semb::crossing_report_json(rep));
        if (batches_csv_out) *batches_csv_out = dup_string(semb::batches_csv(rep));
        return SEMB_OK;
    });
}

}  // extern "C"
