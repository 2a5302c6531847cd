#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "uncross/mds.hpp"
#include "uncross/separation.hpp"
#include "uncross/types.hpp"

namespace uncross {

struct PenaltyParams {
    double epsilon = 1e-3;              // inner loop movement threshold
    double tau = 1e-6;                  // detection and outer convergence threshold
    double rho_increase = 1.1;          // penalty escalation factor
    double rho_max = 1e6;
    std::optional<double> rho_min;      // default: initial stress / 4
    int max_outer = 200;
    int max_inner = 50;
};

// One edge pair under penalty: the separating plane from the last U-phase
// and the current penalty weight.
struct PenaltyEntry {
    int edge_a = 0;  // indices into GraphInstance::edges, edge_a < edge_b
    int edge_b = 0;
    Hyperplane plane;
    double rho = 0.0;
    bool crossing = true;  // whether the pair crossed at the last detection pass
    int relapses = 0;      // resolved-then-crossed-again transitions seen
    int hold = 0;          // passes the wall stays at full strength after resolving
};

// The active pair set C. Pairs are only ever added or re-solved, never
// dropped, so resolved crossings keep a (satisfied) penalty term.
struct PenaltyState {
    std::map<std::pair<int, int>, PenaltyEntry> entries;
    double rho_floor = 0.0;  // insertion weight, also the decay floor
    double rho_peak = 0.0;   // highest weight any pair has reached so far

    // Escalation level of the run: the peak weight. Individual pairs may sit
    // below it (resolved pairs decay back toward the floor), but the peak
    // itself only ratchets upward, so it is monotone along a trace.
    double max_rho() const { return rho_peak; }
};

// Eq-style penalized surrogate: fstress(X) plus, per active pair,
// rho/2 times the squared hinge residual of its separation system under the
// stored plane. Fills the gradient when the pointer is non-null.
double penalized_objective(const Layout& layout, const GraphInstance& graph,
                           const MajorizationContext& ctx, const PenaltyState& state,
                           Layout* grad = nullptr);

// U-phase: re-solves the plane of every active pair (warm started) and of
// every non-member pair whose bounding boxes overlap (cold started); pairs
// whose residual stays at or above tau join the active set with weight
// rho_init. Pairs sharing an endpoint are never considered.
void detect_and_update(const Layout& layout, const GraphInstance& graph, PenaltyState& state,
                       double tau, double rho_init);

void escalate(PenaltyState& state, double rho_increase, double rho_max, const Layout& layout,
              const GraphInstance& graph);

enum class StopReason {
    no_crossings,
    movement_below_tolerance,
    iteration_cap,
};

struct TraceEntry {
    double stress = 0.0;
    int crossings = 0;
    int penalty_count = 0;
    double max_rho = 0.0;
};

struct RunReport {
    Layout layout;
    double final_stress = 0.0;
    int final_crossings = 0;
    StopReason reason = StopReason::iteration_cap;
    std::vector<TraceEntry> trace;    // entry 0 is the initial state, one entry per outer iteration
    std::vector<Layout> layouts;      // layout snapshot per trace entry
    int outer_iterations = 0;
    int inner_iterations = 0;
    double runtime_seconds = 0.0;
    bool optimizer_warning = false;   // an X-phase line search failed; best layout kept
};

// Crossing reduction with stress majorization. Starts from init when given,
// otherwise from a stress-majorization embedding seeded by seed. Alternates
// plane detection (U-phase) with minimization of the penalized surrogate
// (X-phase), escalating penalty weights, until no crossings remain or
// movement stalls.
RunReport crsm_run(const GraphInstance& graph, const PenaltyParams& params = {},
                   const Layout* init = nullptr, std::uint64_t seed = 0, double alpha = 2.0);

}  // namespace uncross
