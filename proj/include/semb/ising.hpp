#ifndef SEMB_ISING_HPP
#define SEMB_ISING_HPP

// Exact Ising/Kadanoff-Ceva oracle by even-subgraph enumeration over the
// cycle space (spanning-tree co-tree basis), with disorder/spin defects and
// explicit dual disorder lines carrying the signs.

#include <cstdint>
#include <vector>

#include "semb/graph.hpp"

namespace semb {

struct DefectSet {
    std::vector<int> disorder_vertices;  // mu insertions (vertices of G)
    std::vector<int> spin_faces;         // sigma insertions (faces of G)
    std::vector<int> gamma_dual;         // primal edge ids crossed by the dual defect line
    std::vector<int> gamma_black;        // optional disorder line (bookkeeping only; not in the sums)
    int sheet = 0;                       // 1 selects the opposite lift: global sign flip
};

class IsingOracle {
  public:
    explicit IsingOracle(const WeightedPlanarGraph& g, int max_cotree = 24);

    // Merge vertices for wired-disorder boundary arcs: degree parities are
    // taken per merged class.
    void merge_vertices(const std::vector<std::vector<int>>& groups);

    // Signed correlator  sum_{omega} (-1)^{|omega ^ gamma|} x(omega) / Z
    // over subgraphs with odd degree exactly at the disorder parity classes;
    // gamma_dual must have odd dual degree exactly at spin_faces.
    // Unpairable defect sets return exact 0.
    double correlator(const DefectSet& d) const;

    // All subgraphs with the requested odd-degree set, as edge bitmasks
    // (testing aid; requires <= 20 co-tree edges).
    std::vector<std::uint64_t> even_subgraphs(const std::vector<int>& odd_vertices) const;

    std::uint64_t count_even_subgraphs(const std::vector<int>& odd_vertices) const;

    const WeightedPlanarGraph& graph() const { return *g_; }

  private:
    // Signed weighted sum with running log rescale; `ok` false if no subgraph
    // has the requested parity. Returns (sum, log_scale).
    void signed_sum(const std::vector<int>& odd_parity, const std::vector<char>& gamma_mask,
                    bool& ok, double& sum, double& log_scale) const;
    std::vector<int> class_of_;          // vertex -> parity class
    int n_class_ = 0;
    const WeightedPlanarGraph* g_;
    int cap_;
    void rebuild_basis();
    std::vector<int> tree_parent_edge_;  // per class, edge to parent in spanning tree (-1 root)
    std::vector<int> tree_parent_;       // per class, parent class
    std::vector<int> tree_order_;        // classes in BFS order
    std::vector<int> cotree_;            // co-tree edge ids
    std::vector<std::uint64_t> fundamental_;  // cycle mask per co-tree edge
    std::vector<std::uint64_t> tree_path_to_root_;  // per class, edge mask of tree path to root
};

// Observable values X(c_pq) = E[chi_{c_pq} chi_{c0}] at the four corners of
// the quad of edge e, computed with mutually compatible dual-path choices
// (path to f_left avoiding e; plus e for the f_right corners). With these
// choices the propagation relations hold in the fixed sign pattern
//   X(c00) = X(c01) cos + X(c10) sin        X(c10) = X(c11) cos + X(c00) sin
//   X(c11) = X(c10) cos - X(c01) sin        X(c01) = X(c00) cos - X(c11) sin.
struct QuadFermionValues {
    double x00 = 0, x01 = 0, x10 = 0, x11 = 0;
    double theta = 0;
    // Max absolute residual of the four relations above.
    double residual() const;
};

QuadFermionValues quad_fermion_values(const IsingOracle& oracle, int e, int src_vertex, int src_face);

}  // namespace semb

#endif
