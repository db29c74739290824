#ifndef SEMB_FKMC_HPP
#define SEMB_FKMC_HPP

// FK (q = 2 random-cluster) sampling on the faces of a weighted planar
// graph, with Dobrushin-style wired arcs, the Kramers-Wannier dual map,
// and the crossing / circuit experiments.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "semb/graph.hpp"

namespace semb {

// Cluster-count convention for the two wired arcs: counted as two separate
// clusters, or identified into one (same boundary spin on both arcs).
// Planar duality exchanges the two conventions, and on any single domain
// P_identified = 2 P_separate / (1 + P_separate).
enum class ArcRule { separate, identified };

// An FK model after wired-arc contraction. The dual side carries one node
// per face of the FK graph (with the two free arcs merged to the terminals
// dual_a / dual_b) so that crossing and circuit events can be decided by
// closed-edge connectivity; terminals are -1 when not applicable.
struct FKDomain {
    int n_sites = 0;
    std::vector<std::pair<int, int>> ends;  // per FK edge
    std::vector<double> p;                  // open probability per edge
    int arc_a = -1, arc_b = -1;             // wired terminal sites
    ArcRule rule = ArcRule::separate;

    int n_dual = 0;
    std::vector<std::pair<int, int>> dual_ends;
    int dual_a = -1, dual_b = -1;

    std::vector<int> src_edge;  // originating graph edge, when derived
};

// Kramers-Wannier image of a single weight: x* = (1 - x) / (1 + x),
// equivalently theta* = pi/2 - theta. Fixed point x = tan(pi/8).
double dual_fk_weight(double x);

// Edwards-Sokal coupling for face spins with disagreement weight x:
// p = 1 - x on every edge. Requires x in (0, 1]; x = 1 gives p = 0.
struct FKWeights {
    std::vector<double> p;
    std::vector<double> x_dual;
};
FKWeights derive_fk_weights(const WeightedPlanarGraph& g);

// Four-arc domain on the faces of g. The wired arcs are disjoint nonempty
// face sets, each contracted to one terminal; edges interior to an arc drop
// out (they only scale the partition function). The free arcs are vertex
// sets merged into the dual terminals; pass empty sets to leave the dual
// side without terminals.
FKDomain four_arc_domain(const WeightedPlanarGraph& g, const std::vector<int>& wired_a,
                         const std::vector<int>& wired_b, const std::vector<int>& free_a = {},
                         const std::vector<int>& free_b = {}, ArcRule rule = ArcRule::separate);

// W x H site rectangle with uniform weight x; the left and right columns are
// the wired arcs, top and bottom rows the free ones. H = W - 1 is the
// self-matching aspect: the planar dual is the domain rotated a quarter turn
// under the opposite arc rule, which pins the separate-rule crossing
// probability to exactly sqrt(2) - 1 at the self-dual weight.
FKDomain grid_crossing_domain(int w, int h, double x, ArcRule rule = ArcRule::separate);

// Free-boundary annulus: sites at integer points of [-3l,3l]^2 minus the
// open square (-l,l)^2, nearest-neighbour edges, uniform weight x. The dual
// terminals are the hole and the outer plane.
struct AnnulusDomain {
    FKDomain d;
    int l = 0;
    std::vector<std::pair<int, int>> site_xy;
};
AnnulusDomain annulus_domain(int l, double x);

struct FKSample {
    std::vector<char> open;
    std::vector<int> cluster;  // root label per site, under the arc rule
    std::uint64_t seed = 0;
    std::uint64_t sweep = 0;
};

class FKSampler {
  public:
    FKSampler(const FKDomain& d, std::uint64_t seed);

    void sweep_sw();        // Swendsen-Wang via the Edwards-Sokal coupling
    void sweep_heatbath();  // single-edge Glauber, same stationary law
    void run(int sweeps, bool heatbath = false);

    const std::vector<char>& open() const { return open_; }
    FKSample sample() const;

    bool crossing() const;       // arc_a <-> arc_b through open edges
    bool dual_crossing() const;  // dual_a <-> dual_b through closed edges
    int n_clusters() const;
    std::uint64_t sweeps_done() const { return sweep_; }

  private:
    const FKDomain& d_;
    std::vector<char> open_;
    std::mt19937_64 rng_;
    std::uint64_t seed_ = 0, sweep_ = 0;
};

// Exhaustive-measure probability of an event of the open set (<= 20 edges).
double exact_event_probability(const FKDomain& d,
                               const std::function<bool(const std::vector<char>&)>& event);
double exact_crossing_probability(const FKDomain& d);

// True iff an open circuit separates the hole from the outer boundary:
// by planar duality, iff the closed edges do not connect dual_a to dual_b.
bool detect_wired_circuit(const FKDomain& d, const std::vector<char>& open);

enum class FKEvent { crossing, circuit };

struct CrossingExperiment {
    FKDomain domain;
    FKEvent event = FKEvent::crossing;
    std::uint64_t seed = 1;
    int n_samples = 20000;
    int burnin = 200;
    int thin = 2;  // sweeps between recorded samples
    int n_batches = 20;
    bool heatbath = false;
    int n_chains = 1;  // independent chains, merged in fixed order
};

struct CrossingReport {
    double p_hat = 0.0;
    double ci_half = 0.0;       // 95% half-width by batch means
    double spin_estimate = 0.0; // E[sigma_A sigma_B] via the FK identity
    int n_samples = 0;
    int n_batches = 0;
    std::uint64_t seed = 0;
    std::vector<double> batches;
    double wall_seconds = 0.0;  // not serialized, for determinism
    std::string convention;
};

CrossingReport estimate_crossing(const CrossingExperiment& e);

// Pool the experiment with its planar dual, realized as the same domain
// under the opposite arc rule. On a self-matching domain the two laws are
// exchangeable under crossing <-> no crossing, so the pooled frequency has
// expectation exactly 1/2.
CrossingReport estimate_crossing_selfdual(const CrossingExperiment& e);

std::string crossing_report_json(const CrossingReport& r);
std::string batches_csv(const CrossingReport& r);

}  // namespace semb

#endif
