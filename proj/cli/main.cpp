// Command-line front end over the C API: build constructions, validate
// embeddings, run the weld surgery, execute FK crossing experiments, render
// SVG, and round-trip interchange files.
//
// Exit codes: 0 success, 2 validation failure, 3 schema error, 4 I/O error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "semb.h"

namespace {

using nlohmann::json;

constexpr int kExitIo = SEMB_IO;

int read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << path << "\n";
        return kExitIo;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return 0;
}

int write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open " << path << " for writing\n";
        return kExitIo;
    }
    out << content;
    out.flush();
    if (!out) {
        std::cerr << "error: write failure on " << path << "\n";
        return kExitIo;
    }
    return 0;
}

int report_api_error(int status) {
    std::cerr << "error: " << semb_last_error() << "\n";
    return status;
}

// Takes ownership of an API string and emits it to a path or stdout.
int emit(char* text, const std::string& path) {
    std::string s = text ? text : "";
    semb_string_free(text);
    if (path.empty()) {
        std::cout << s;
        return 0;
    }
    return write_file(path, s);
}

int load_embedding(const std::string& path, semb_embedding** out) {
    std::string text;
    if (int rc = read_file(path, text)) return rc;
    if (int rc = semb_embedding_from_json(text.c_str(), out)) return report_api_error(rc);
    return 0;
}

// Spec comes either inline (--spec) or from a file (--spec-file).
int resolve_spec(const std::string& inline_spec, const std::string& spec_file, std::string& out) {
    if (!spec_file.empty()) return read_file(spec_file, out);
    out = inline_spec;
    return 0;
}

struct CheckFlags {
    std::optional<double> kappa, exp_fat_delta, exp_fat_rho, boost_t;
    std::string options_json() const {
        json j = json::object();
        if (kappa) j["lip_kappa"] = *kappa;
        if (exp_fat_delta) j["exp_fat_delta"] = *exp_fat_delta;
        if (exp_fat_rho) j["exp_fat_rho"] = *exp_fat_rho;
        if (boost_t) j["boost_t"] = *boost_t;
        return j.dump();
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"s-embedding toolkit: constructions, validation, surgery, FK experiments"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap worker threads (0 = library default)");

    // build
    auto* build = app.add_subcommand("build", "build a construction from a JSON spec");
    std::string b_spec, b_spec_file, b_out, b_meta;
    build->add_option("--spec", b_spec, "inline JSON construction spec");
    build->add_option("--spec-file", b_spec_file, "path to a JSON construction spec");
    build->add_option("-o,--out", b_out, "output embedding JSON path")->required();
    build->add_option("--meta", b_meta, "write construction metadata JSON here");

    // check
    auto* check = app.add_subcommand("check", "validate an embedding");
    std::string c_in, c_report;
    CheckFlags cf;
    double c_kappa = 0.0, c_efd = 0.0, c_efr = 1.0, c_bt = 0.0;
    check->add_option("input", c_in, "embedding JSON path")->required();
    auto* o_kappa = check->add_option("--kappa", c_kappa, "Lipschitz constant for the lip check");
    auto* o_efd = check->add_option("--exp-fat-delta", c_efd, "mesh size for the exp-fat check");
    auto* o_efr = check->add_option("--exp-fat-rho", c_efr, "rho for the exp-fat check");
    auto* o_bt = check->add_option("--boost-t", c_bt, "verify weight invariance under this boost");
    check->add_option("--report", c_report, "write the report JSON here (default stdout)");

    // surgery
    auto* surgery = app.add_subcommand("surgery", "weld an embedding onto a square district");
    std::string s_in, s_out, s_report, s_diff;
    double s_kappa = 0.5, s_wlo = 0.25, s_whi = 0.5;
    int s_layers = 4, s_cols = 3, s_levels = 10000;
    surgery->add_option("input", s_in, "embedding JSON path")->required();
    surgery->add_option("-o,--out", s_out, "welded embedding JSON path")->required();
    surgery->add_option("--report", s_report, "write the weld report JSON here");
    surgery->add_option("--diff-svg", s_diff, "render the welded domain with new quads highlighted");
    surgery->add_option("--kappa", s_kappa, "Lipschitz constant checked on the output");
    surgery->add_option("--strip-layers", s_layers, "strip copies pasted below the level (even)");
    surgery->add_option("--district-cols", s_cols, "columns of the square district");
    surgery->add_option("--n-levels", s_levels, "good-level scan resolution");
    surgery->add_option("--window-lo", s_wlo, "scan window lower bound (bbox fraction)");
    surgery->add_option("--window-hi", s_whi, "scan window upper bound (bbox fraction)");

    // mc
    auto* mc = app.add_subcommand("mc", "run an FK crossing/circuit experiment");
    std::string m_spec, m_spec_file, m_report, m_csv;
    mc->add_option("--spec", m_spec, "inline JSON experiment spec");
    mc->add_option("--spec-file", m_spec_file, "path to a JSON experiment spec");
    mc->add_option("--report", m_report, "write the CrossingReport JSON here (default stdout)");
    mc->add_option("--csv", m_csv, "write per-batch frequencies CSV here");

    // render
    auto* render = app.add_subcommand("render", "render an embedding as SVG 1.1");
    std::string r_in, r_out, r_title;
    double r_width = 800.0;
    bool r_no_circles = false, r_no_dots = false, r_heat = false;
    render->add_option("input", r_in, "embedding JSON path")->required();
    render->add_option("-o,--out", r_out, "output SVG path (default stdout)");
    render->add_option("--width", r_width, "pixel width");
    render->add_flag("--no-incircles", r_no_circles, "omit the dashed incircles");
    render->add_flag("--no-dots", r_no_dots, "omit the vertex dots");
    render->add_flag("--heat", r_heat, "fill quads by the center origami value");
    render->add_option("--title", r_title, "SVG title element");

    // roundtrip
    auto* roundtrip = app.add_subcommand("roundtrip", "load, save, reload and compare");
    std::string t_in, t_type = "embedding";
    roundtrip->add_option("input", t_in, "interchange JSON path")->required();
    roundtrip->add_option("--type", t_type, "graph or embedding")
        ->check(CLI::IsMember({"graph", "embedding"}));

    CLI11_PARSE(app, argc, argv);
    (void)threads;  // parallelism lives inside the library modules

    if (*build) {
        std::string spec;
        if (int rc = resolve_spec(b_spec, b_spec_file, spec)) return rc;
        semb_embedding* e = nullptr;
        char* meta = nullptr;
        if (int rc = semb_build(spec.c_str(), &e, b_meta.empty() ? nullptr : &meta))
            return report_api_error(rc);
        char* text = nullptr;
        int rc = semb_embedding_to_json(e, &text);
        semb_embedding_free(e);
        if (rc) return report_api_error(rc);
        if (int w = emit(text, b_out)) return w;
        if (meta)
            if (int w = emit(meta, b_meta)) return w;
        return 0;
    }

    if (*check) {
        if (o_kappa->count()) cf.kappa = c_kappa;
        if (o_efd->count()) cf.exp_fat_delta = c_efd;
        if (o_efr->count()) cf.exp_fat_rho = c_efr;
        if (o_bt->count()) cf.boost_t = c_bt;
        semb_embedding* e = nullptr;
        if (int rc = load_embedding(c_in, &e)) return rc;
        char* rep = nullptr;
        int rc = semb_check(e, cf.options_json().c_str(), &rep);
        semb_embedding_free(e);
        if (rc != 0 && rc != SEMB_VALIDATION) return report_api_error(rc);
        if (int w = emit(rep, c_report)) return w;
        if (rc == SEMB_VALIDATION) std::cerr << "validation failed\n";
        return rc;
    }

    if (*surgery) {
        semb_embedding* e = nullptr;
        if (int rc = load_embedding(s_in, &e)) return rc;
        json params{{"kappa", s_kappa},       {"strip_layers", s_layers}, {"district_cols", s_cols},
                    {"n_levels", s_levels},   {"window_lo", s_wlo},       {"window_hi", s_whi}};
        semb_embedding* w = nullptr;
        char* rep = nullptr;
        int rc = semb_weld(e, params.dump().c_str(), &w, &rep);
        semb_embedding_free(e);
        if (rc) return report_api_error(rc);
        char* text = nullptr;
        rc = semb_embedding_to_json(w, &text);
        if (rc == 0) rc = emit(text, s_out);
        std::string rep_text = rep ? rep : "{}";
        if (rc == 0 && !s_diff.empty()) {
            // Highlight everything the weld created: all quads not carried
            // over unchanged from the input.
            json jr = json::parse(rep_text);
            std::vector<char> interior;
            int total = jr["n_interior"].get<int>() + jr["n_aligned"].get<int>() +
                        jr["n_strip"].get<int>() + jr["n_kites"].get<int>() +
                        jr["n_district"].get<int>();
            interior.assign(total, 0);
            for (int qi : jr["interior_quads"].get<std::vector<int>>()) interior[qi] = 1;
            json hl = json::array();
            for (int qi = 0; qi < total; ++qi)
                if (!interior[qi]) hl.push_back(qi);
            json opts{{"highlight", hl}, {"title", "welded domain"}};
            char* svg = nullptr;
            rc = semb_render(w, opts.dump().c_str(), &svg);
            if (rc == 0)
                rc = emit(svg, s_diff);
            else
                report_api_error(rc);
        }
        semb_embedding_free(w);
        if (rc == 0 && !s_report.empty()) rc = write_file(s_report, rep_text);
        semb_string_free(rep);
        return rc;
    }

    if (*mc) {
        std::string spec;
        if (int rc = resolve_spec(m_spec, m_spec_file, spec)) return rc;
        auto t0 = std::chrono::steady_clock::now();
        char* rep = nullptr;
        char* csv = nullptr;
        int rc = semb_mc(spec.c_str(), &rep, m_csv.empty() ? nullptr : &csv);
        if (rc) return report_api_error(rc);
        std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        std::fprintf(stderr, "mc wall time: %.3f s\n", dt.count());
        if (int w = emit(rep, m_report)) return w;
        if (csv)
            if (int w = emit(csv, m_csv)) return w;
        return 0;
    }

    if (*render) {
        semb_embedding* e = nullptr;
        if (int rc = load_embedding(r_in, &e)) return rc;
        json opts{{"width", r_width},
                  {"incircles", !r_no_circles},
                  {"vertex_dots", !r_no_dots},
                  {"q_heat", r_heat}};
        if (!r_title.empty()) opts["title"] = r_title;
        char* svg = nullptr;
        int rc = semb_render(e, opts.dump().c_str(), &svg);
        semb_embedding_free(e);
        if (rc) return report_api_error(rc);
        return emit(svg, r_out);
    }

    if (*roundtrip) {
        std::string text;
        if (int rc = read_file(t_in, text)) return rc;
        if (t_type == "graph") {
            char* once = nullptr;
            if (int rc = semb_graph_normalize(text.c_str(), &once)) return report_api_error(rc);
            char* twice = nullptr;
            int rc = semb_graph_normalize(once, &twice);
            bool same = rc == 0 && std::string(once) == twice;
            semb_string_free(once);
            semb_string_free(twice);
            if (rc) return report_api_error(rc);
            if (!same) {
                std::cerr << "round trip drifted\n";
                return SEMB_SCHEMA;
            }
        } else {
            semb_embedding* e = nullptr;
            if (int rc = semb_embedding_from_json(text.c_str(), &e)) return report_api_error(rc);
            char* once = nullptr;
            int rc = semb_embedding_to_json(e, &once);
            semb_embedding_free(e);
            if (rc) return report_api_error(rc);
            semb_embedding* e2 = nullptr;
            rc = semb_embedding_from_json(once, &e2);
            char* twice = nullptr;
            if (rc == 0) rc = semb_embedding_to_json(e2, &twice);
            bool same = rc == 0 && std::string(once) == twice;
            semb_string_free(once);
            semb_string_free(twice);
            semb_embedding_free(e2);
            if (rc) return report_api_error(rc);
            if (!same) {
                std::cerr << "round trip drifted\n";
                return SEMB_SCHEMA;
            }
        }
        std::cout << "round trip ok\n";
        return 0;
    }

    return 0;
}
