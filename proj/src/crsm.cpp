#include "uncross/crsm.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <vector>

#include "uncross/geometry.hpp"
#include "uncross/optim.hpp"
#include "uncross/rng.hpp"

namespace uncross {

namespace {

PolyhedronPoints segment_points(const Layout& layout, const Edge& e) {
    PolyhedronPoints p(2, 2);
    p.row(0) = layout.row(e.a);
    p.row(1) = layout.row(e.b);
    return p;
}

// bound the clearance a stored plane may demand to a fraction of the pair's
// shorter edge; a deep crossing's certificate otherwise asks for a corridor
// wider than the drawing
void cap_demand(SeparationResult& res, const Layout& layout, const Edge& ea, const Edge& eb,
                double frac) {
    if (frac <= 0.0) return;
    const double len_a = (layout.row(ea.a) - layout.row(ea.b)).norm();
    const double len_b = (layout.row(eb.a) - layout.row(eb.b)).norm();
    const double cap = frac * std::min(len_a, len_b);
    const double norm_u = res.plane.u.norm();
    if (cap > 0.0 && norm_u * cap < 1.0) {
        const double s = 1.0 / (norm_u * cap);
        res.plane.u *= s;
        res.plane.gamma *= s;
    }
}

}  // namespace

double penalized_objective(const Layout& layout, const GraphInstance& graph,
                           const MajorizationContext& ctx, const PenaltyState& state,
                           Layout* grad) {
    double value = fstress(layout, ctx);
    if (grad) *grad = fstress_gradient(layout, ctx);
    for (const auto& [key, entry] : state.entries) {
        const Edge& ea = graph.edges[entry.edge_a];
        const Edge& eb = graph.edges[entry.edge_b];
        const Eigen::Vector2d u = entry.plane.u;
        const double gamma = entry.plane.gamma;
        double residual = 0.0;
        for (int node : {ea.a, ea.b}) {
            const double slack = std::max(0.0, -layout.row(node).dot(u) + gamma + 1.0);
            residual += slack * slack;
            if (grad && slack > 0.0) grad->row(node) -= entry.rho * slack * u;
        }
        for (int node : {eb.a, eb.b}) {
            const double slack = std::max(0.0, layout.row(node).dot(u) - gamma + 1.0);
            residual += slack * slack;
            if (grad && slack > 0.0) grad->row(node) += entry.rho * slack * u;
        }
        value += 0.5 * entry.rho * residual;
    }
    return value;
}

void detect_and_update(const Layout& layout, const GraphInstance& graph, PenaltyState& state,
                       double tau, double rho_init) {
    static const int kReplanPeriod = [] {
        const char* e = std::getenv("UNCROSS_REPLAN_PERIOD");
        return e ? std::atoi(e) : 1;
    }();
    static int pass_counter = 0;
    ++pass_counter;
    const bool replan_members = (pass_counter % std::max(1, kReplanPeriod)) == 0;
    const int m = static_cast<int>(graph.edges.size());
    for (int i = 0; i < m; ++i) {
        const Edge& ea = graph.edges[i];
        const EdgeSegment si = edge_segment(layout, ea);
        for (int j = i + 1; j < m; ++j) {
            const Edge& eb = graph.edges[j];
            if (ea.a == eb.a || ea.a == eb.b || ea.b == eb.a || ea.b == eb.b) continue;
            const auto it = state.entries.find({i, j});
            const bool member = it != state.entries.end();
            if (!member && !boxes_overlap(si, edge_segment(layout, eb))) continue;
            static const bool kFreezeResolved = [] {
                const char* e = std::getenv("UNCROSS_FREEZE_RESOLVED");
                return e && std::atoi(e) != 0;
            }();
            if (kFreezeResolved) {
                // refresh planes only for pairs presently crossing; a resolved
                // member keeps its last crossing-time plane, which stays active
                // and keeps pushing the pair apart
                if (!segments_intersect(si, edge_segment(layout, eb))) {
                    if (member && it->second.crossing) {
                        it->second.crossing = false;
                        static const int kHold = [] {
                            const char* e = std::getenv("UNCROSS_HOLD");
                            return e ? std::atoi(e) : 0;
                        }();
                        it->second.hold = kHold;
                    }
                    continue;
                }
                if (member) {
                    if (!it->second.crossing) ++it->second.relapses;
                    it->second.crossing = true;
                    // keep the stored plane for a few passes: re-centering the
                    // wall on current geometry every pass removes the overshoot
                    // that pushes a pair through tangency
                    if (!replan_members) continue;
                }
                const PolyhedronPoints pa = segment_points(layout, ea);
                const PolyhedronPoints pb = segment_points(layout, eb);
                const auto warm =
                    member ? std::optional<Hyperplane>(it->second.plane) : std::nullopt;
                SeparationResult res = solve_separation(pa, pb, warm);
                static const double kDemandCap = [] {
                    const char* e = std::getenv("UNCROSS_DEMAND_CAP");
                    return e ? std::atof(e) : 0.0;
                }();
                static const bool kCapGrowth = [] {
                    const char* e = std::getenv("UNCROSS_CAP_GROWTH");
                    return e && std::atoi(e) != 0;
                }();
                double mult = 1.0;
                if (kCapGrowth && member)
                    mult = std::exp2(static_cast<double>(std::min(it->second.relapses, 3)));
                cap_demand(res, layout, ea, eb, kDemandCap * mult);
                if (member) {
                    it->second.plane = res.plane;
                } else if (res.violation >= tau) {
                    PenaltyEntry entry;
                    entry.edge_a = i;
                    entry.edge_b = j;
                    entry.plane = res.plane;
                    entry.rho = rho_init;
                    state.entries.emplace(std::make_pair(i, j), entry);
                }
                continue;
            }
            const PolyhedronPoints pa = segment_points(layout, ea);
            const PolyhedronPoints pb = segment_points(layout, eb);
            const auto warm = member ? std::optional<Hyperplane>(it->second.plane) : std::nullopt;
            const SeparationResult res = solve_separation(pa, pb, warm);
            if (member) {
                it->second.plane = res.plane;
            } else if (res.violation >= tau) {
                PenaltyEntry entry;
                entry.edge_a = i;
                entry.edge_b = j;
                entry.plane = res.plane;
                entry.rho = rho_init;
                state.entries.emplace(std::make_pair(i, j), entry);
            }
        }
    }
    for (const auto& [key, entry] : state.entries)
        state.rho_peak = std::max(state.rho_peak, entry.rho);
}

namespace {

// a stored wall is in contact when any endpoint of its pair sits inside the
// demanded margin, i.e. the hinge exerts force at this layout
bool wall_contact(const PenaltyEntry& entry, const Layout& layout, const GraphInstance& graph) {
    const Edge& ea = graph.edges[entry.edge_a];
    const Edge& eb = graph.edges[entry.edge_b];
    const Eigen::Vector2d u = entry.plane.u;
    const double gamma = entry.plane.gamma;
    for (int node : {ea.a, ea.b})
        if (-layout.row(node).dot(u) + gamma + 1.0 > 0.0) return true;
    for (int node : {eb.a, eb.b})
        if (layout.row(node).dot(u) - gamma + 1.0 > 0.0) return true;
    return false;
}

}  // namespace

void escalate(PenaltyState& state, double rho_increase, double rho_max, const Layout& layout,
              const GraphInstance& graph) {
    static const bool kEscalateCrossedOnly = [] {
        const char* e = std::getenv("UNCROSS_ESCALATE_CROSSED_ONLY");
        return e && std::atoi(e) != 0;
    }();
    static const bool kCycleRho = [] {
        const char* e = std::getenv("UNCROSS_CYCLE_RHO");
        return e && std::atoi(e) != 0;
    }();
    static const double kResolvedDecay = [] {
        const char* e = std::getenv("UNCROSS_RESOLVED_DECAY");
        return e ? std::atof(e) : 1.0;
    }();
    for (auto& [key, entry] : state.entries) {
        if (!entry.crossing) {
            // a resolved pair's wall consolidates the separation right after
            // it happens; letting it fade to the floor afterwards frees the
            // layout for the rearrangements the remaining crossings need. The
            // floor ratchets up with each relapse so chronic offenders keep
            // progressively sticky walls instead of chattering forever.
            static const int kRatchetAfter = [] {
                const char* e = std::getenv("UNCROSS_RATCHET_AFTER");
                return e ? std::atoi(e) : -1;
            }();
            static const bool kContactDecay = [] {
                const char* e = std::getenv("UNCROSS_CONTACT_DECAY");
                return e && std::atoi(e) != 0;
            }();
            if (kContactDecay && kResolvedDecay < 1.0) {
                // a slack wall exerts nothing, so it fades; a pressed wall is
                // load-bearing and stands firm, growing until it holds
                if (wall_contact(entry, layout, graph))
                    entry.rho = std::min(entry.rho * rho_increase, rho_max);
                else
                    entry.rho = std::max(entry.rho * kResolvedDecay, state.rho_floor);
                continue;
            }
            if (entry.hold > 0) {
                --entry.hold;
            } else if (kResolvedDecay < 1.0) {
                double floor_i = state.rho_floor;
                if (kRatchetAfter >= 0 && entry.relapses > kRatchetAfter)
                    floor_i = std::min(
                        floor_i * std::exp2(static_cast<double>(entry.relapses - kRatchetAfter)),
                        rho_max);
                entry.rho = std::max(entry.rho * kResolvedDecay, floor_i);
            } else if (!kEscalateCrossedOnly) {
                entry.rho = std::min(entry.rho * rho_increase, rho_max);
            }
            continue;
        }
        if (kCycleRho && entry.rho >= rho_max && state.rho_floor > 0.0) {
            entry.rho = state.rho_floor;
            continue;
        }
        entry.rho = std::min(entry.rho * rho_increase, rho_max);
    }
    for (const auto& [key, entry] : state.entries)
        state.rho_peak = std::max(state.rho_peak, entry.rho);
}

// reflect p across the supporting line of segment s and push it `over`
// beyond the line
Eigen::RowVector2d reflect_over(const Eigen::RowVector2d& p, const EdgeSegment& s, double over) {
    const Eigen::RowVector2d a = s.row(0);
    Eigen::RowVector2d dir = s.row(1) - a;
    const double len = dir.norm();
    if (len < 1e-12) return p;
    dir /= len;
    const Eigen::RowVector2d n(-dir.y(), dir.x());
    const double dist = (p - a).dot(n);
    return p - (2.0 * dist + (dist >= 0 ? over : -over)) * n;
}

// crossings involving any edge incident to `node`, against all non-adjacent
// edges; the only counts a single-node move can change
int node_crossings(const Layout& layout, const GraphInstance& graph, int node) {
    const int m = static_cast<int>(graph.edges.size());
    int count = 0;
    for (int i = 0; i < m; ++i) {
        const Edge& ea = graph.edges[i];
        if (ea.a != node && ea.b != node) continue;
        const EdgeSegment si = edge_segment(layout, ea);
        for (int j = 0; j < m; ++j) {
            const Edge& eb = graph.edges[j];
            if (ea.a == eb.a || ea.a == eb.b || ea.b == eb.a || ea.b == eb.b) continue;
            if (segments_intersect(si, edge_segment(layout, eb))) ++count;
        }
    }
    return count;
}

// crossing depth of a pair: the smallest endpoint displacement that would
// uncross it, approximated by the nearest endpoint-to-other-segment distance
double escape_depth(const Layout& layout, const GraphInstance& graph, const PenaltyEntry& entry) {
    const EdgeSegment sa = edge_segment(layout, graph.edges[entry.edge_a]);
    const EdgeSegment sb = edge_segment(layout, graph.edges[entry.edge_b]);
    double depth = std::numeric_limits<double>::infinity();
    for (int r = 0; r < 2; ++r) {
        depth = std::min(depth, point_segment_distance(sa.row(r).transpose(), sb));
        depth = std::min(depth, point_segment_distance(sb.row(r).transpose(), sa));
    }
    return depth;
}

// stalled endgames are bundles of mutually contradictory corridor demands; a
// least-squares compromise holds every pair at tangency. Resolve them one at
// a time: give the shallowest crossing full weight and damp the rest so the
// layout is free to move for it.
void pop_shallowest(const Layout& layout, const GraphInstance& graph, PenaltyState& state,
                    double rho_max, double damp) {
    const std::pair<int, int>* target = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (auto& [key, entry] : state.entries) {
        if (!entry.crossing) continue;
        const double depth = escape_depth(layout, graph, entry);
        if (depth < best) {
            best = depth;
            target = &key;
        }
    }
    if (!target) return;
    for (auto& [key, entry] : state.entries) {
        if (!entry.crossing) continue;
        if (key == *target)
            entry.rho = rho_max;
        else
            entry.rho = std::max(state.rho_floor, entry.rho / damp);
        state.rho_peak = std::max(state.rho_peak, entry.rho);
    }
}

// stall escape for entrapped endgames: relocate one endpoint of a crossing
// pair across its partner segment when doing so strictly lowers the global
// crossing count, then re-solve the stored planes whose geometry the move
// changed so they hold the new arrangement instead of fighting it. Gradient
// steps cannot perform these relocations: the majorization pins every node
// near its previous position, so a trapped endpoint can never cross a fan of
// edges in one take.
int hop_round(Layout& layout, const GraphInstance& graph, PenaltyState& state, double tau,
              int budget) {
    const int m = static_cast<int>(graph.edges.size());
    int hops = 0;
    while (hops < budget) {
        int active = 0;
        for (const auto& [key, entry] : state.entries)
            if (entry.crossing) ++active;
        // with only a handful of crossings left the cheap single-node set
        // tends to run dry (parity traps: every one-node move nets >= 0), so
        // fan out ring landings and try two-node moves as well
        const bool endgame = active <= 8;
        using Move = std::vector<std::pair<int, Eigen::RowVector2d>>;
        int best_delta = 0;
        double best_disp = 0.0;
        Move best_move;
        const auto consider = [&](const Move& move, int delta) {
            double disp = 0.0;
            for (const auto& [node, pos] : move)
                disp += (pos - layout.row(node)).squaredNorm();
            if (delta < best_delta ||
                (delta == best_delta && delta < 0 && disp < best_disp)) {
                best_delta = delta;
                best_disp = disp;
                best_move = move;
            }
        };
        const int total = endgame ? count_crossings(layout, graph) : 0;
        const auto try_pair_move = [&](const Move& move) {
            Layout trial = layout;
            for (const auto& [node, pos] : move) trial.row(node) = pos;
            consider(move, count_crossings(trial, graph) - total);
        };
        for (const auto& [key, entry] : state.entries) {
            if (!entry.crossing) continue;
            const Edge& ea = graph.edges[entry.edge_a];
            const Edge& eb = graph.edges[entry.edge_b];
            for (int k = 0; k < 4; ++k) {
                const int node = k < 2 ? (k == 0 ? ea.a : ea.b) : (k == 2 ? eb.a : eb.b);
                const EdgeSegment other =
                    edge_segment(layout, k < 2 ? eb : ea);
                const double len = (other.row(1) - other.row(0)).norm();
                const Eigen::RowVector2d mid = 0.5 * (other.row(0) + other.row(1));
                const Eigen::RowVector2d p = layout.row(node);
                std::vector<Eigen::RowVector2d> candidates = {
                    reflect_over(p, other, 0.1 * len),
                    reflect_over(p, other, 0.4 * len),
                    2.0 * mid - p,
                    mid + (mid - p) * 0.35,
                };
                if (endgame) {
                    const double radius = std::max((p - mid).norm(), 0.5 * len);
                    for (int a = 0; a < 8; ++a) {
                        const double ang = a * (std::numbers::pi / 4.0);
                        const Eigen::RowVector2d dir(std::cos(ang), std::sin(ang));
                        candidates.push_back(mid + dir * (0.7 * radius));
                        candidates.push_back(mid + dir * (1.3 * radius));
                    }
                }
                const int before = node_crossings(layout, graph, node);
                for (const auto& c : candidates) {
                    layout.row(node) = c;
                    const int delta = node_crossings(layout, graph, node) - before;
                    layout.row(node) = p;
                    consider({{node, c}}, delta);
                }
            }
            if (endgame) {
                const EdgeSegment sa = edge_segment(layout, ea);
                const EdgeSegment sb = edge_segment(layout, eb);
                const Eigen::RowVector2d mids[2] = {0.5 * (sa.row(0) + sa.row(1)),
                                                    0.5 * (sb.row(0) + sb.row(1))};
                const Edge* edges[2] = {&ea, &eb};
                for (int e = 0; e < 2; ++e) {
                    const Eigen::RowVector2d t = mids[1 - e] - mids[e];
                    for (const double f : {1.4, 2.2}) {
                        const Eigen::RowVector2d pa = layout.row(edges[e]->a);
                        const Eigen::RowVector2d pb = layout.row(edges[e]->b);
                        try_pair_move({{edges[e]->a, pa + f * t}, {edges[e]->b, pb + f * t}});
                    }
                }
                for (const int na : {ea.a, ea.b})
                    for (const int nb : {eb.a, eb.b}) {
                        const Eigen::RowVector2d pa = layout.row(na);
                        const Eigen::RowVector2d pb = layout.row(nb);
                        try_pair_move({{na, pb}, {nb, pa}});
                    }
            }
        }
        if (best_move.empty()) break;
        for (const auto& [node, pos] : best_move) layout.row(node) = pos;
        ++hops;
        const auto touches = [&](const Edge& e) {
            for (const auto& [node, pos] : best_move)
                if (e.a == node || e.b == node) return true;
            return false;
        };
        // refresh membership flags and planes around the moved nodes
        for (auto& [key, entry] : state.entries) {
            const Edge& ea = graph.edges[entry.edge_a];
            const Edge& eb = graph.edges[entry.edge_b];
            if (!touches(ea) && !touches(eb)) continue;
            const bool crossing_now = segments_intersect(edge_segment(layout, ea),
                                                         edge_segment(layout, eb));
            if (!crossing_now && !entry.crossing) continue;
            entry.crossing = crossing_now;
            SeparationResult res =
                solve_separation(segment_points(layout, ea), segment_points(layout, eb),
                                 std::optional<Hyperplane>(entry.plane));
            static const double kDemandCap = [] {
                const char* e = std::getenv("UNCROSS_DEMAND_CAP");
                return e ? std::atof(e) : 0.0;
            }();
            cap_demand(res, layout, ea, eb, kDemandCap);
            entry.plane = res.plane;
            (void)tau;
        }
    }
    return hops;
}

// basin-hopping kick: when no local move improves, jitter every node incident
// to a crossing pair at the local edge scale, so the next settle descends
// into a different basin
void kick_knot(Layout& layout, const GraphInstance& graph, Rng& rng, double scale, bool spread) {
    const int m = static_cast<int>(graph.edges.size());
    double mean_len = 0.0;
    for (const Edge& e : graph.edges)
        mean_len += (layout.row(e.a) - layout.row(e.b)).norm();
    mean_len /= std::max(1, m);
    mean_len *= scale * rng.uniform(0.75, 1.25);
    std::vector<char> hit(graph.node_count, 0);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const Edge& a = graph.edges[i];
            const Edge& b = graph.edges[j];
            if (a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b) continue;
            if (!segments_intersect(edge_segment(layout, a), edge_segment(layout, b))) continue;
            hit[a.a] = hit[a.b] = hit[b.a] = hit[b.b] = 1;
        }
    if (spread) {
        // the knot may be tied through the surrounding fabric; shake that too
        std::vector<char> wide = hit;
        for (const Edge& e : graph.edges)
            if (hit[e.a] || hit[e.b]) wide[e.a] = wide[e.b] = 1;
        hit.swap(wide);
    }
    for (int v = 0; v < graph.node_count; ++v)
        if (hit[v])
            layout.row(v) += Eigen::RowVector2d(rng.uniform(-mean_len, mean_len),
                                                rng.uniform(-mean_len, mean_len));
}

// forget the accumulated pressure without forgetting the members: every wall
// drops back to the floor weight and is re-solved against the current
// geometry, so separated pairs end up with slack planes (zero penalty, zero
// gradient) and the next settle behaves like a fresh start
void soft_reset(PenaltyState& state, const Layout& layout, const GraphInstance& graph) {
    static const double kDemandCap = [] {
        const char* e = std::getenv("UNCROSS_DEMAND_CAP");
        return e ? std::atof(e) : 0.0;
    }();
    for (auto& [key, entry] : state.entries) {
        const Edge& ea = graph.edges[entry.edge_a];
        const Edge& eb = graph.edges[entry.edge_b];
        entry.crossing =
            segments_intersect(edge_segment(layout, ea), edge_segment(layout, eb));
        SeparationResult res =
            solve_separation(segment_points(layout, ea), segment_points(layout, eb),
                             std::optional<Hyperplane>(entry.plane));
        cap_demand(res, layout, ea, eb, kDemandCap);
        entry.plane = res.plane;
        entry.rho = state.rho_floor;
        entry.hold = 0;
    }
}

RunReport crsm_run(const GraphInstance& graph, const PenaltyParams& params, const Layout* init,
                   std::uint64_t seed, double alpha) {
    const auto t0 = std::chrono::steady_clock::now();
    const WeightMatrix weights = build_weights(graph, alpha);
    Layout x = init ? Layout(*init) : smacof_embed(graph, weights, nullptr, 500, 1e-6, seed).layout;
    if (x.rows() != graph.node_count)
        throw std::invalid_argument("initial layout has the wrong number of rows");

    RunReport report;
    double current_stress = stress(x, graph, weights);
    int crossings = count_crossings(x, graph);
    static const double kRhoScale = [] {
        const char* e = std::getenv("UNCROSS_RHO_SCALE");
        return e ? std::atof(e) : 1.0;
    }();
    const double rho_init =
        (params.rho_min ? *params.rho_min : (current_stress > 0.0 ? current_stress / 4.0 : 1.0)) *
        kRhoScale;

    PenaltyState state;
    state.rho_floor = rho_init;
    auto push_trace = [&] {
        report.trace.push_back({current_stress, crossings,
                                static_cast<int>(state.entries.size()), state.max_rho()});
        report.layouts.push_back(x);
    };
    push_trace();

    if (crossings == 0) {
        report.reason = StopReason::no_crossings;
    } else {
        static const int kStallPop = [] {
            const char* e = std::getenv("UNCROSS_STALL_POP");
            return e ? std::atoi(e) : 0;
        }();
        static const double kPopDamp = [] {
            const char* e = std::getenv("UNCROSS_POP_DAMP");
            return e ? std::atof(e) : 10.0;
        }();
        int best_cross = crossings;
        double best_stress = current_stress;
        Layout x_best = x;
        int stall = 0;
        int prev_cross = crossings;
        int kick_fails = 0;
        Rng kick_rng(derive_seed(seed, 2));
        for (int outer = 1; outer <= params.max_outer; ++outer) {
            double movement = 0.0;
            double gradient_inf = 0.0;
            bool empty_detection = false;
            bool line_search_failed = false;
            for (int inner = 1; inner <= params.max_inner; ++inner) {
                ++report.inner_iterations;
                detect_and_update(x, graph, state, params.tau, rho_init);
                if (state.entries.empty()) {
                    empty_detection = true;
                    break;
                }
                const MajorizationContext ctx = build_majorization(graph, weights, x);
                const int n = graph.node_count;
                static const bool kTrueStress = [] {
                    const char* e = std::getenv("UNCROSS_TRUE_STRESS");
                    return e && std::atoi(e) != 0;
                }();
                const Objective objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
                    const Layout xz = Eigen::Map<const Layout>(z.data(), n, 2);
                    if (!kTrueStress) {
                        if (!grad) return penalized_objective(xz, graph, ctx, state, nullptr);
                        Layout g(n, 2);
                        const double value = penalized_objective(xz, graph, ctx, state, &g);
                        *grad = Eigen::Map<Eigen::VectorXd>(g.data(), 2 * n);
                        return value;
                    }
                    // experimental: true stress + hinges instead of the majorization
                    Layout g(n, 2);
                    double value = penalized_objective(xz, graph, ctx, state, grad ? &g : nullptr);
                    value -= fstress(xz, ctx);
                    if (grad) g -= fstress_gradient(xz, ctx);
                    double st = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = i + 1; j < n; ++j) {
                            const Eigen::RowVector2d d = xz.row(i) - xz.row(j);
                            const double dist = d.norm();
                            const double target = graph.distances(i, j);
                            const double wij = weights.values(i, j);
                            const double diff = dist - target;
                            st += wij * diff * diff;
                            if (grad && dist > 1e-300) {
                                const Eigen::RowVector2d dg = 2.0 * wij * diff / dist * d;
                                g.row(i) += dg;
                                g.row(j) -= dg;
                            }
                        }
                    value += st;
                    if (grad) *grad = Eigen::Map<Eigen::VectorXd>(g.data(), 2 * n);
                    return value;
                };
                const Eigen::VectorXd z0 = Eigen::Map<const Eigen::VectorXd>(x.data(), 2 * n);
                MinimizeOptions options;
                static const int kXIters = [] {
                    const char* e = std::getenv("UNCROSS_XPHASE_ITERS");
                    return e ? std::atoi(e) : 1200;
                }();
                static const int kXMemory = [] {
                    const char* e = std::getenv("UNCROSS_XPHASE_MEMORY");
                    return e ? std::atoi(e) : 10;
                }();
                options.max_iterations = kXIters;
                options.memory = kXMemory;
                options.gradient_tolerance = 1e-6;
                options.step_tolerance = 1e-9;
                const MinimizeResult res = minimize(objective, z0, options);
                const Layout x_next = Eigen::Map<const Layout>(res.x.data(), n, 2);
                movement = (x_next - x).norm();
                gradient_inf = res.gradient_inf_norm;
                x = x_next;
                static const bool kEscalatePerOuter = [] {
                    const char* e = std::getenv("UNCROSS_ESCALATE_PER_OUTER");
                    return e && std::atoi(e) != 0;
                }();
                if (!kEscalatePerOuter) escalate(state, params.rho_increase, params.rho_max, x, graph);
                if (res.status == MinimizeStatus::line_search_failed) {
                    report.optimizer_warning = true;
                    line_search_failed = true;
                    break;
                }
                crossings = count_crossings(x, graph);
                if (crossings == 0) break;
                if (movement < params.epsilon) break;
            }
            {
                static const bool kEscalatePerOuter = [] {
                    const char* e = std::getenv("UNCROSS_ESCALATE_PER_OUTER");
                    return e && std::atoi(e) != 0;
                }();
                if (kEscalatePerOuter) escalate(state, params.rho_increase, params.rho_max, x, graph);
            }
            current_stress = stress(x, graph, weights);
            crossings = count_crossings(x, graph);
            push_trace();
            report.outer_iterations = outer;
            if (empty_detection) {
                report.reason =
                    crossings == 0 ? StopReason::no_crossings : StopReason::iteration_cap;
                if (crossings != 0) report.optimizer_warning = true;
                break;
            }
            if (line_search_failed) {
                report.reason = StopReason::iteration_cap;
                break;
            }
            if (crossings == 0) {
                report.reason = StopReason::no_crossings;
                break;
            }
            static const int kStallHop = [] {
                const char* e = std::getenv("UNCROSS_STALL_HOP");
                return e ? std::atoi(e) : 0;
            }();
            static const int kRescale = [] {
                const char* e = std::getenv("UNCROSS_RESCALE");
                return e ? std::atoi(e) : 0;
            }();
            // wall pressure slowly compacts the drawing (every hinge event
            // pushes endpoints inward); a global similarity back to the
            // stress-optimal size keeps the crossing topology, and scaling the
            // stored walls along (u / c) keeps every hinge value bit-exact, so
            // the move is free from the penalty's point of view
            const auto rescale = [&] {
                double num = 0.0, den = 0.0;
                const int n = graph.node_count;
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j) {
                        const double dist = (x.row(i) - x.row(j)).norm();
                        const double wij = weights.values(i, j);
                        num += wij * graph.distances(i, j) * dist;
                        den += wij * dist * dist;
                    }
                if (num <= 0.0 || den <= 0.0) return;
                const double c = num / den;
                x *= c;
                for (auto& item : state.entries) item.second.plane.u /= c;
                current_stress = stress(x, graph, weights);
            };
            if (kRescale == 2) rescale();
            const bool improved = crossings < best_cross ||
                                  (crossings == best_cross && current_stress < best_stress);
            if (improved) {
                if (crossings < best_cross) kick_fails = 0;
                best_cross = crossings;
                best_stress = current_stress;
                x_best = x;
            }
            const bool descending = crossings < prev_cross;
            prev_cross = crossings;
            if (kStallPop > 0 || kStallHop > 0) {
                if (improved || descending) {
                    stall = 0;
                } else if (++stall >= std::max(kStallPop, kStallHop)) {
                    if (kRescale == 1) rescale();
                    if (kStallHop > 0) {
                        const int hops = hop_round(x, graph, state, params.tau, 25);
                        crossings = count_crossings(x, graph);
                        current_stress = stress(x, graph, weights);
                        if (crossings < best_cross ||
                            (crossings == best_cross && current_stress < best_stress)) {
                            best_cross = crossings;
                            best_stress = current_stress;
                            x_best = x;
                        }
                        static const bool kKick = [] {
                            const char* e = std::getenv("UNCROSS_KICK");
                            return e && std::atoi(e) != 0;
                        }();
                        if (hops == 0 && kKick) {
                            // frozen fixed point: restart the search from the
                            // best layout and shake the knot loose, harder
                            // with every failed attempt
                            if (best_cross < crossings ||
                                (best_cross == crossings && best_stress < current_stress)) {
                                x = x_best;
                            }
                            const double scale = std::min(0.5 + 0.25 * kick_fails, 3.0);
                            kick_knot(x, graph, kick_rng, scale, kick_fails >= 8);
                            ++kick_fails;
                            crossings = count_crossings(x, graph);
                            current_stress = stress(x, graph, weights);
                        }
                    }
                    if (kStallPop > 0) pop_shallowest(x, graph, state, params.rho_max, kPopDamp);
                    static const bool kSoftReset = [] {
                        const char* e = std::getenv("UNCROSS_SOFT_RESET");
                        return e && std::atoi(e) != 0;
                    }();
                    if (kSoftReset) soft_reset(state, x, graph);
                    stall = 0;
                    prev_cross = crossings;
                }
            }
            if (movement < params.tau && gradient_inf < params.tau) {
                report.reason = StopReason::movement_below_tolerance;
                break;
            }
            report.reason = StopReason::iteration_cap;
        }
        // hand back the best iterate seen, not whatever the schedule happened
        // to end on; the restoration gets its own trace entry
        if (best_cross < crossings ||
            (best_cross == crossings && best_stress < current_stress)) {
            x = x_best;
            crossings = best_cross;
            current_stress = best_stress;
            push_trace();
        }
    }

    report.layout = x;
    report.final_stress = current_stress;
    report.final_crossings = crossings;
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace uncross
