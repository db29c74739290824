#include "semb/ising.hpp"

#include <bit>
#include <cmath>
#include <deque>

namespace semb {

IsingOracle::IsingOracle(const WeightedPlanarGraph& g, int max_cotree) : g_(&g), cap_(max_cotree) {
    class_of_.resize(g.n_vertices());
    for (int v = 0; v < g.n_vertices(); ++v) class_of_[v] = v;
    n_class_ = g.n_vertices();
    rebuild_basis();
}

void IsingOracle::merge_vertices(const std::vector<std::vector<int>>& groups) {
    std::vector<int> root(g_->n_vertices());
    for (int v = 0; v < g_->n_vertices(); ++v) root[v] = v;
    for (const auto& grp : groups)
        for (size_t i = 1; i < grp.size(); ++i) {
            int a = grp[0], b = grp[i];
            while (root[a] != a) a = root[a];
            while (root[b] != b) b = root[b];
            if (a != b) root[b] = a;
        }
    // Flatten and renumber.
    std::vector<int> id(g_->n_vertices(), -1);
    n_class_ = 0;
    for (int v = 0; v < g_->n_vertices(); ++v) {
        int r = v;
        while (root[r] != r) r = root[r];
        if (id[r] < 0) id[r] = n_class_++;
        class_of_[v] = id[r];
    }
    rebuild_basis();
}

void IsingOracle::rebuild_basis() {
    int ne = g_->n_edges();
    if (ne > 64) throw SembError(ErrorCode::validation, "enumeration limited to 64 edges");
    tree_parent_edge_.assign(n_class_, -1);
    tree_parent_.assign(n_class_, -1);
    tree_order_.clear();
    std::vector<std::vector<std::pair<int, int>>> adj(n_class_);
    for (int e = 0; e < ne; ++e) {
        int a = class_of_[g_->edge(e).v0], b = class_of_[g_->edge(e).v1];
        adj[a].push_back({e, b});
        adj[b].push_back({e, a});
    }
    std::vector<char> seen(n_class_, 0);
    std::deque<int> bfs{0};
    seen[0] = 1;
    std::vector<char> in_tree(ne, 0);
    while (!bfs.empty()) {
        int c = bfs.front();
        bfs.pop_front();
        tree_order_.push_back(c);
        for (auto [e, c2] : adj[c]) {
            if (seen[c2]) continue;
            seen[c2] = 1;
            tree_parent_edge_[c2] = e;
            tree_parent_[c2] = c;
            in_tree[e] = 1;
            bfs.push_back(c2);
        }
    }
    for (char s : seen)
        if (!s) throw SembError(ErrorCode::validation, "graph is disconnected");
    tree_path_to_root_.assign(n_class_, 0);
    for (int c : tree_order_)
        if (tree_parent_[c] >= 0)
            tree_path_to_root_[c] = tree_path_to_root_[tree_parent_[c]] ^ (1ULL << tree_parent_edge_[c]);
    cotree_.clear();
    fundamental_.clear();
    for (int e = 0; e < ne; ++e) {
        if (in_tree[e]) continue;
        int a = class_of_[g_->edge(e).v0], b = class_of_[g_->edge(e).v1];
        cotree_.push_back(e);
        fundamental_.push_back((1ULL << e) ^ tree_path_to_root_[a] ^ tree_path_to_root_[b]);
    }
    if (int(cotree_.size()) > cap_)
        throw SembError(ErrorCode::validation, "co-tree dimension exceeds enumeration cap");
}

void IsingOracle::signed_sum(const std::vector<int>& odd_parity, const std::vector<char>& gamma_mask,
                             bool& ok, double& sum, double& log_scale) const {
    int ne = g_->n_edges();
    std::vector<char> want(n_class_, 0);
    for (int c : odd_parity) want[c] ^= 1;
    std::uint64_t base = 0;
    for (int c = 0; c < n_class_; ++c)
        if (want[c]) base ^= tree_path_to_root_[c];
    // Verify the base T-join parity (fails exactly when the total is odd).
    std::vector<char> par(n_class_, 0);
    for (int e = 0; e < ne; ++e)
        if (base >> e & 1) {
            par[class_of_[g_->edge(e).v0]] ^= 1;
            par[class_of_[g_->edge(e).v1]] ^= 1;
        }
    for (int c = 0; c < n_class_; ++c)
        if (par[c] != want[c]) {
            ok = false;
            sum = 0.0;
            log_scale = 0.0;
            return;
        }
    ok = true;

    std::vector<double> logx(ne);
    for (int e = 0; e < ne; ++e) logx[e] = std::log(g_->edge(e).x);
    std::uint64_t omega = base;
    double logw = 0.0;
    int sign_par = 0;
    for (int e = 0; e < ne; ++e)
        if (omega >> e & 1) {
            logw += logx[e];
            if (!gamma_mask.empty() && gamma_mask[e]) sign_par ^= 1;
        }
    long double acc = 0.0L;
    double offset = logw;
    acc += (sign_par ? -1.0L : 1.0L) * std::exp((long double)(logw - offset));
    int k = int(cotree_.size());
    std::uint64_t n_states = 1ULL << k;
    for (std::uint64_t m = 1; m < n_states; ++m) {
        int i = std::countr_zero(m);  // gray code: toggle fundamental cycle i
        std::uint64_t f = fundamental_[i];
        while (f) {
            int e = std::countr_zero(f);
            f &= f - 1;
            if (omega >> e & 1)
                logw -= logx[e];
            else
                logw += logx[e];
            omega ^= 1ULL << e;
            if (!gamma_mask.empty() && gamma_mask[e]) sign_par ^= 1;
        }
        double d = logw - offset;
        if (d > 200.0 || d < -200.0) {
            acc *= std::exp((long double)(offset - logw));
            offset = logw;
            d = 0.0;
        }
        acc += (sign_par ? -1.0L : 1.0L) * std::exp((long double)d);
    }
    sum = double(acc);
    log_scale = offset;
}

double IsingOracle::correlator(const DefectSet& d) const {
    int ne = g_->n_edges();
    std::vector<char> gamma(ne, 0);
    for (int e : d.gamma_dual) {
        if (e < 0 || e >= ne) throw SembError(ErrorCode::invalid_argument, "gamma edge out of range");
        gamma[e] ^= 1;
    }
    // The dual line must have odd dual degree exactly at the spin faces.
    std::vector<char> fpar(g_->n_faces(), 0);
    for (int e = 0; e < ne; ++e)
        if (gamma[e]) {
            fpar[g_->edge(e).f_left] ^= 1;
            fpar[g_->edge(e).f_right] ^= 1;
        }
    std::vector<char> fwant(g_->n_faces(), 0);
    for (int f : d.spin_faces) {
        if (f < 0 || f >= g_->n_faces()) throw SembError(ErrorCode::invalid_argument, "spin face out of range");
        fwant[f] ^= 1;
    }
    for (int f = 0; f < g_->n_faces(); ++f)
        if (fpar[f] != fwant[f])
            throw SembError(ErrorCode::invalid_argument, "gamma_dual parity does not match spin faces");

    std::vector<char> vwant(n_class_, 0);
    for (int v : d.disorder_vertices) {
        if (v < 0 || v >= g_->n_vertices()) throw SembError(ErrorCode::invalid_argument, "disorder vertex out of range");
        vwant[class_of_[v]] ^= 1;
    }
    std::vector<int> odd;
    for (int c = 0; c < n_class_; ++c)
        if (vwant[c]) odd.push_back(c);

    bool ok = false;
    double num, lnum, z, lz;
    signed_sum(odd, gamma, ok, num, lnum);
    if (!ok) return 0.0;  // unpairable defect set
    bool okz = false;
    signed_sum({}, {}, okz, z, lz);
    double val = num / z * std::exp(lnum - lz);
    return d.sheet ? -val : val;
}

std::vector<std::uint64_t> IsingOracle::even_subgraphs(const std::vector<int>& odd_vertices) const {
    if (cotree_.size() > 20) throw SembError(ErrorCode::invalid_argument, "subgraph listing limited to 20 co-tree edges");
    std::vector<char> want(n_class_, 0);
    for (int v : odd_vertices) want[class_of_[v]] ^= 1;
    std::uint64_t base = 0;
    for (int c = 0; c < n_class_; ++c)
        if (want[c]) base ^= tree_path_to_root_[c];
    std::vector<char> par(n_class_, 0);
    for (int e = 0; e < g_->n_edges(); ++e)
        if (base >> e & 1) {
            par[class_of_[g_->edge(e).v0]] ^= 1;
            par[class_of_[g_->edge(e).v1]] ^= 1;
        }
    for (int c = 0; c < n_class_; ++c)
        if (par[c] != want[c]) return {};
    std::vector<std::uint64_t> out;
    std::uint64_t k = cotree_.size();
    for (std::uint64_t m = 0; m < (1ULL << k); ++m) {
        std::uint64_t w = base;
        for (std::uint64_t i = 0; i < k; ++i)
            if (m >> i & 1) w ^= fundamental_[i];
        out.push_back(w);
    }
    return out;
}

std::uint64_t IsingOracle::count_even_subgraphs(const std::vector<int>& odd_vertices) const {
    std::vector<char> want(n_class_, 0);
    for (int v : odd_vertices) want[class_of_[v]] ^= 1;
    int n_odd = 0;
    for (char w : want) n_odd += w;
    if (n_odd % 2) return 0;
    return 1ULL << cotree_.size();
}

double QuadFermionValues::residual() const {
    double c = std::cos(theta), s = std::sin(theta);
    double r = std::abs(x00 - x01 * c - x10 * s);
    r = std::max(r, std::abs(x10 - x11 * c - x00 * s));
    r = std::max(r, std::abs(x11 - x10 * c + x01 * s));
    r = std::max(r, std::abs(x01 - x00 * c + x11 * s));
    return r;
}

QuadFermionValues quad_fermion_values(const IsingOracle& oracle, int e, int src_vertex, int src_face) {
    const WeightedPlanarGraph& g = oracle.graph();
    const EdgeDesc& ed = g.edge(e);
    if (src_vertex == ed.v0 || src_vertex == ed.v1 || src_face == ed.f_left || src_face == ed.f_right)
        throw SembError(ErrorCode::invalid_argument, "source corner must not touch the quad");
    std::vector<char> banned(g.n_edges(), 0);
    banned[e] = 1;
    std::vector<int> path = g.dual_path(src_face, ed.f_left, banned);
    QuadFermionValues out;
    out.theta = g.theta(e);
    auto value = [&](int vp, int fq, bool far_face) {
        DefectSet d;
        d.disorder_vertices = {vp, src_vertex};
        d.spin_faces = {fq, src_face};
        d.gamma_dual = path;
        if (far_face) d.gamma_dual.push_back(e);
        return oracle.correlator(d);
    };
    out.x00 = value(ed.v0, ed.f_left, false);
    out.x10 = value(ed.v1, ed.f_left, false);
    out.x01 = value(ed.v0, ed.f_right, true);
    out.x11 = value(ed.v1, ed.f_right, true);
    return out;
}

}  // namespace semb
