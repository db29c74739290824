#include "semb/fkmc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "semb/error.hpp"

namespace semb {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
    bool same(int a, int b) { return find(a) == find(b); }
};

// Clusters of the open set under the domain's arc rule.
UnionFind clusters_of(const FKDomain& d, const std::vector<char>& open) {
    UnionFind uf(d.n_sites);
    if (d.rule == ArcRule::identified && d.arc_a >= 0) uf.unite(d.arc_a, d.arc_b);
    for (size_t e = 0; e < d.ends.size(); ++e)
        if (open[e]) uf.unite(d.ends[e].first, d.ends[e].second);
    return uf;
}

int count_roots(UnionFind& uf) {
    int k = 0;
    for (int v = 0; v < int(uf.parent.size()); ++v)
        if (uf.find(v) == v) ++k;
    return k;
}

void check_domain(const FKDomain& d) {
    if (d.n_sites <= 0) throw SembError(ErrorCode::validation, "empty FK domain");
    if (d.ends.size() != d.p.size())
        throw SembError(ErrorCode::validation, "FK edge/probability size mismatch");
    for (auto [a, b] : d.ends)
        if (a < 0 || b < 0 || a >= d.n_sites || b >= d.n_sites || a == b)
            throw SembError(ErrorCode::validation, "bad FK edge endpoints");
    for (double p : d.p)
        if (!(p >= 0.0 && p <= 1.0))
            throw SembError(ErrorCode::validation, "open probability outside [0,1]");
    // Connectivity of the site graph (plus the wired pair, which is one
    // boundary component even when the edge set cannot join it).
    UnionFind uf(d.n_sites);
    if (d.arc_a >= 0) uf.unite(d.arc_a, d.arc_b);
    for (auto [a, b] : d.ends) uf.unite(a, b);
    if (count_roots(uf) != 1) throw SembError(ErrorCode::validation, "disconnected FK domain");
}

}  // namespace

double dual_fk_weight(double x) { return (1.0 - x) / (1.0 + x); }

FKWeights derive_fk_weights(const WeightedPlanarGraph& g) {
    FKWeights w;
    for (int e = 0; e < g.n_edges(); ++e) {
        double x = g.edge(e).x;
        if (!(x > 0.0 && x <= 1.0))
            throw SembError(ErrorCode::invalid_argument, "edge weight outside (0,1]");
        w.p.push_back(1.0 - x);
        w.x_dual.push_back(dual_fk_weight(x));
    }
    return w;
}

FKDomain four_arc_domain(const WeightedPlanarGraph& g, const std::vector<int>& wired_a,
                         const std::vector<int>& wired_b, const std::vector<int>& free_a,
                         const std::vector<int>& free_b, ArcRule rule) {
    FKWeights w = derive_fk_weights(g);
    int nf = g.n_faces();
    if (wired_a.empty() != wired_b.empty())
        throw SembError(ErrorCode::invalid_argument, "need both wired arcs or neither");
    std::vector<int> site_of(nf, -1);
    auto mark = [&](const std::vector<int>& arc, int label) {
        for (int f : arc) {
            if (f < 0 || f >= nf) throw SembError(ErrorCode::invalid_argument, "arc face out of range");
            if (site_of[f] != -1)
                throw SembError(ErrorCode::invalid_argument, "wired arcs must be disjoint");
            site_of[f] = label;
        }
    };
    FKDomain d;
    d.rule = rule;
    int next = 0;
    if (!wired_a.empty()) {
        mark(wired_a, -2);
        mark(wired_b, -3);
        d.arc_a = next++;
        d.arc_b = next++;
    }
    for (int f = 0; f < nf; ++f) {
        if (site_of[f] == -2)
            site_of[f] = d.arc_a;
        else if (site_of[f] == -3)
            site_of[f] = d.arc_b;
        else
            site_of[f] = next++;
    }
    d.n_sites = next;

    std::vector<int> node_of(g.n_vertices(), -1);
    int dnext = 0;
    if (!free_a.empty() || !free_b.empty()) {
        d.dual_a = dnext++;
        d.dual_b = dnext++;
        for (int v : free_a) node_of.at(v) = d.dual_a;
        for (int v : free_b) {
            if (node_of.at(v) != -1)
                throw SembError(ErrorCode::invalid_argument, "free arcs must be disjoint");
            node_of[v] = d.dual_b;
        }
    }
    for (int v = 0; v < g.n_vertices(); ++v)
        if (node_of[v] == -1) node_of[v] = dnext++;
    d.n_dual = dnext;

    for (int e = 0; e < g.n_edges(); ++e) {
        int a = site_of[g.edge(e).f_left], b = site_of[g.edge(e).f_right];
        if (a == b) continue;  // interior to a wired arc: constant factor
        d.ends.push_back({a, b});
        d.p.push_back(w.p[e]);
        d.dual_ends.push_back({node_of[g.edge(e).v0], node_of[g.edge(e).v1]});
        d.src_edge.push_back(e);
    }
    check_domain(d);
    return d;
}

FKDomain grid_crossing_domain(int w, int h, double x, ArcRule rule) {
    if (w < 2 || h < 1) throw SembError(ErrorCode::invalid_argument, "grid needs w >= 2, h >= 1");
    if (!(x > 0.0 && x <= 1.0)) throw SembError(ErrorCode::invalid_argument, "x outside (0,1]");
    FKDomain d;
    d.rule = rule;
    d.arc_a = 0;
    d.arc_b = 1;
    d.n_sites = 2 + (w - 2) * h;
    auto site = [&](int i, int j) {
        return i == 0 ? 0 : (i == w - 1 ? 1 : 2 + (i - 1) + j * (w - 2));
    };
    // Dual nodes: the region past the top free arc, past the bottom one,
    // then the inner plaquettes.
    d.dual_a = 0;
    d.dual_b = 1;
    d.n_dual = 2 + (w - 1) * (h - 1);
    auto cell = [&](int i, int j) {
        if (j >= h - 1) return 0;  // above the top row
        if (j < 0) return 1;       // below the bottom row
        return 2 + i + j * (w - 1);
    };
    double p = 1.0 - x;
    for (int j = 0; j < h; ++j)
        for (int i = 0; i + 1 < w; ++i) {
            d.ends.push_back({site(i, j), site(i + 1, j)});
            d.p.push_back(p);
            d.dual_ends.push_back({cell(i, j), cell(i, j - 1)});
        }
    for (int j = 0; j + 1 < h; ++j)
        for (int i = 1; i + 1 < w; ++i) {
            d.ends.push_back({site(i, j), site(i, j + 1)});
            d.p.push_back(p);
            d.dual_ends.push_back({cell(i - 1, j), cell(i, j)});
        }
    check_domain(d);
    return d;
}

AnnulusDomain annulus_domain(int l, double x) {
    if (l < 1) throw SembError(ErrorCode::invalid_argument, "annulus needs l >= 1");
    if (!(x > 0.0 && x <= 1.0)) throw SembError(ErrorCode::invalid_argument, "x outside (0,1]");
    AnnulusDomain a;
    a.l = l;
    int n = 6 * l + 1;
    auto in_domain = [&](int i, int j) {
        return std::abs(i) <= 3 * l && std::abs(j) <= 3 * l &&
               std::max(std::abs(i), std::abs(j)) >= l;
    };
    std::vector<int> id(n * n, -1);
    auto idx = [&](int i, int j) { return (i + 3 * l) * n + (j + 3 * l); };
    for (int i = -3 * l; i <= 3 * l; ++i)
        for (int j = -3 * l; j <= 3 * l; ++j)
            if (in_domain(i, j)) {
                id[idx(i, j)] = a.d.n_sites++;
                a.site_xy.push_back({i, j});
            }
    // Dual nodes: 0 = the hole, 1 = the outer plane, then one per unit cell
    // [i,i+1] x [j,j+1] lying inside the annulus.
    a.d.dual_a = 0;
    a.d.dual_b = 1;
    int dnext = 2;
    std::vector<int> cell_id((n - 1) * (n - 1), -1);
    auto cell = [&](int i, int j) -> int {
        if (i >= -l && i < l && j >= -l && j < l) return 0;  // overlaps the hole
        if (std::abs(i) > 3 * l || i == 3 * l || std::abs(j) > 3 * l || j == 3 * l) return 1;
        int c = (i + 3 * l) * (n - 1) + (j + 3 * l);
        if (cell_id[c] == -1) cell_id[c] = dnext++;
        return cell_id[c];
    };
    double p = 1.0 - x;
    for (auto [i, j] : a.site_xy) {
        if (in_domain(i + 1, j)) {
            a.d.ends.push_back({id[idx(i, j)], id[idx(i + 1, j)]});
            a.d.p.push_back(p);
            a.d.dual_ends.push_back({cell(i, j), cell(i, j - 1)});
        }
        if (in_domain(i, j + 1)) {
            a.d.ends.push_back({id[idx(i, j)], id[idx(i, j + 1)]});
            a.d.p.push_back(p);
            a.d.dual_ends.push_back({cell(i - 1, j), cell(i, j)});
        }
    }
    a.d.n_dual = dnext;
    check_domain(a.d);
    return a;
}

FKSampler::FKSampler(const FKDomain& d, std::uint64_t seed) : d_(d), rng_(seed), seed_(seed) {
    check_domain(d);
    open_.assign(d.ends.size(), 0);
}

void FKSampler::sweep_sw() {
    UnionFind uf = clusters_of(d_, open_);
    // One spin bit per site, read at the root so every site consumes RNG in
    // a fixed order regardless of the cluster shapes.
    std::vector<char> bit(d_.n_sites);
    for (int v = 0; v < d_.n_sites; ++v) bit[v] = char(rng_() & 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (size_t e = 0; e < d_.ends.size(); ++e) {
        double u = unif(rng_);
        bool agree = bit[uf.find(d_.ends[e].first)] == bit[uf.find(d_.ends[e].second)];
        open_[e] = char(agree && u < d_.p[e]);
    }
    ++sweep_;
}

void FKSampler::sweep_heatbath() {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (size_t e = 0; e < d_.ends.size(); ++e) {
        double u = unif(rng_);
        open_[e] = 0;
        UnionFind uf = clusters_of(d_, open_);
        double p = d_.p[e];
        bool joined = uf.same(d_.ends[e].first, d_.ends[e].second);
        double po = joined ? p : p / (p + 2.0 * (1.0 - p));
        open_[e] = char(u < po);
    }
    ++sweep_;
}

void FKSampler::run(int sweeps, bool heatbath) {
    for (int s = 0; s < sweeps; ++s) heatbath ? sweep_heatbath() : sweep_sw();
}

FKSample FKSampler::sample() const {
    FKSample s;
    s.open = open_;
    s.seed = seed_;
    s.sweep = sweep_;
    UnionFind uf = clusters_of(d_, open_);
    s.cluster.resize(d_.n_sites);
    for (int v = 0; v < d_.n_sites; ++v) s.cluster[v] = uf.find(v);
    return s;
}

bool FKSampler::crossing() const {
    if (d_.arc_a < 0) throw SembError(ErrorCode::invalid_argument, "domain has no wired arcs");
    UnionFind uf(d_.n_sites);
    for (size_t e = 0; e < d_.ends.size(); ++e)
        if (open_[e]) uf.unite(d_.ends[e].first, d_.ends[e].second);
    return uf.same(d_.arc_a, d_.arc_b);
}

bool FKSampler::dual_crossing() const {
    if (d_.dual_a < 0) throw SembError(ErrorCode::invalid_argument, "domain has no dual terminals");
    UnionFind uf(d_.n_dual);
    for (size_t e = 0; e < d_.ends.size(); ++e)
        if (!open_[e]) uf.unite(d_.dual_ends[e].first, d_.dual_ends[e].second);
    return uf.same(d_.dual_a, d_.dual_b);
}

int FKSampler::n_clusters() const {
    UnionFind uf = clusters_of(d_, open_);
    return count_roots(uf);
}

double exact_event_probability(const FKDomain& d,
                               const std::function<bool(const std::vector<char>&)>& event) {
    check_domain(d);
    int m = int(d.ends.size());
    if (m > 20) throw SembError(ErrorCode::invalid_argument, "exact measure limited to 20 edges");
    double z = 0.0, hit = 0.0;
    std::vector<char> open(m);
    for (std::uint64_t cfg = 0; cfg < (1ULL << m); ++cfg) {
        double w = 1.0;
        for (int e = 0; e < m; ++e) {
            open[e] = char(cfg >> e & 1);
            w *= open[e] ? d.p[e] : 1.0 - d.p[e];
        }
        UnionFind uf = clusters_of(d, open);
        w *= std::pow(2.0, count_roots(uf));
        z += w;
        if (event(open)) hit += w;
    }
    return hit / z;
}

double exact_crossing_probability(const FKDomain& d) {
    if (d.arc_a < 0) throw SembError(ErrorCode::invalid_argument, "domain has no wired arcs");
    return exact_event_probability(d, [&](const std::vector<char>& open) {
        UnionFind uf(d.n_sites);
        for (size_t e = 0; e < d.ends.size(); ++e)
            if (open[e]) uf.unite(d.ends[e].first, d.ends[e].second);
        return uf.same(d.arc_a, d.arc_b);
    });
}

bool detect_wired_circuit(const FKDomain& d, const std::vector<char>& open) {
    if (d.dual_a < 0 || d.dual_ends.size() != d.ends.size())
        throw SembError(ErrorCode::validation, "annulus lacks dual structure");
    if (open.size() != d.ends.size())
        throw SembError(ErrorCode::invalid_argument, "configuration size mismatch");
    UnionFind uf(d.n_dual);
    for (size_t e = 0; e < d.ends.size(); ++e)
        if (!open[e]) uf.unite(d.dual_ends[e].first, d.dual_ends[e].second);
    return !uf.same(d.dual_a, d.dual_b);
}

namespace {

std::vector<char> run_chain(const FKDomain& d, const CrossingExperiment& e, std::uint64_t seed,
                            int n_samples) {
    FKSampler s(d, seed);
    s.run(e.burnin, e.heatbath);
    std::vector<char> hits(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        s.run(e.thin, e.heatbath);
        hits[i] = e.event == FKEvent::crossing ? char(s.crossing())
                                               : char(detect_wired_circuit(d, s.open()));
    }
    return hits;
}

CrossingReport report_from_hits(const CrossingExperiment& e, const std::vector<char>& hits) {
    CrossingReport r;
    r.n_samples = int(hits.size());
    r.n_batches = e.n_batches;
    r.seed = e.seed;
    double total = 0.0;
    for (char h : hits) total += h;
    r.p_hat = total / double(hits.size());
    int nb = e.n_batches;
    for (int b = 0; b < nb; ++b) {
        size_t lo = size_t(b) * hits.size() / nb, hi = size_t(b + 1) * hits.size() / nb;
        double s = 0.0;
        for (size_t i = lo; i < hi; ++i) s += hits[i];
        r.batches.push_back(s / double(hi - lo));
    }
    double mean = std::accumulate(r.batches.begin(), r.batches.end(), 0.0) / nb;
    double var = 0.0;
    for (double b : r.batches) var += (b - mean) * (b - mean);
    var /= nb - 1;
    r.ci_half = 1.96 * std::sqrt(var / nb);
    return r;
}

std::string rule_name(ArcRule rule) {
    return rule == ArcRule::separate ? "separate" : "identified";
}

}  // namespace

CrossingReport estimate_crossing(const CrossingExperiment& e) {
    auto t0 = std::chrono::steady_clock::now();
    if (e.n_batches < 20) throw SembError(ErrorCode::invalid_argument, "need >= 20 batches");
    if (e.n_samples < 2 * e.n_batches)
        throw SembError(ErrorCode::invalid_argument, "too few samples for the batch count");
    if (e.n_chains < 1 || e.thin < 1 || e.burnin < 0)
        throw SembError(ErrorCode::invalid_argument, "bad experiment parameters");
    check_domain(e.domain);

    std::vector<std::vector<char>> per_chain(e.n_chains);
    auto work = [&](int c) {
        int n = e.n_samples / e.n_chains + (c < e.n_samples % e.n_chains ? 1 : 0);
        per_chain[c] = run_chain(e.domain, e, e.seed + std::uint64_t(c), n);
    };
    if (e.n_chains == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int c = 0; c < e.n_chains; ++c) pool.emplace_back(work, c);
        for (auto& t : pool) t.join();
    }
    std::vector<char> hits;
    for (const auto& h : per_chain) hits.insert(hits.end(), h.begin(), h.end());

    CrossingReport r = report_from_hits(e, hits);
    bool spin_ok = e.event == FKEvent::crossing && e.domain.rule == ArcRule::separate;
    r.spin_estimate = spin_ok ? r.p_hat : 0.0;
    r.convention = "p=1-x;q=2;arc_rule=" + rule_name(e.domain.rule) +
                   (e.event == FKEvent::crossing ? ";event=crossing" : ";event=circuit");
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

CrossingReport estimate_crossing_selfdual(const CrossingExperiment& e) {
    auto t0 = std::chrono::steady_clock::now();
    CrossingExperiment a = e, b = e;
    a.domain.rule = ArcRule::separate;
    b.domain.rule = ArcRule::identified;
    a.n_samples = e.n_samples / 2;
    b.n_samples = e.n_samples - a.n_samples;
    b.seed = e.seed ^ 0x9e3779b97f4a7c15ULL;
    CrossingReport ra = estimate_crossing(a), rb = estimate_crossing(b);

    CrossingReport r;
    r.n_samples = ra.n_samples + rb.n_samples;
    r.n_batches = ra.n_batches + rb.n_batches;
    r.seed = e.seed;
    r.p_hat = (ra.p_hat * ra.n_samples + rb.p_hat * rb.n_samples) / r.n_samples;
    r.spin_estimate = ra.spin_estimate;
    for (int i = 0; i < ra.n_batches; ++i) {
        r.batches.push_back(ra.batches[i]);
        r.batches.push_back(rb.batches[i]);
    }
    double mean = std::accumulate(r.batches.begin(), r.batches.end(), 0.0) / r.n_batches;
    double var = 0.0;
    for (double x : r.batches) var += (x - mean) * (x - mean);
    var /= r.n_batches - 1;
    r.ci_half = 1.96 * std::sqrt(var / r.n_batches);
    r.convention = "p=1-x;q=2;arc_rule=pooled-self-dual;event=crossing";
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string crossing_report_json(const CrossingReport& r) {
    nlohmann::ordered_json j;
    j["p_hat"] = r.p_hat;
    j["ci_half"] = r.ci_half;
    j["spin_estimate"] = r.spin_estimate;
    j["n_samples"] = r.n_samples;
    j["n_batches"] = r.n_batches;
    j["seed"] = r.seed;
    j["convention"] = r.convention;
    j["batches"] = r.batches;
    return j.dump(2) + "\n";
}

std::string batches_csv(const CrossingReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "batch,frequency\n";
    for (size_t i = 0; i < r.batches.size(); ++i) out << i << "," << r.batches[i] << "\n";
    return out.str();
}

}  // namespace semb
