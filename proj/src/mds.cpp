#include "uncross/mds.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "uncross/rng.hpp"

namespace uncross {

namespace {

// L_z of the majorizer, rebuilt from the current reference layout.
Eigen::MatrixXd build_l_z(const GraphInstance& graph, const WeightMatrix& weights,
                          const Layout& z) {
    const int n = graph.node_count;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dist = (z.row(i) - z.row(j)).norm();
            const double off = dist > 0.0 ? -weights.values(i, j) * graph.distances(i, j) / dist : 0.0;
            l(i, j) = off;
            diag -= off;
        }
        l(i, i) = diag;
    }
    return l;
}

bool fully_collapsed(const Layout& layout) {
    if (layout.rows() < 2) return false;
    const Eigen::RowVector2d center = layout.colwise().mean();
    const double spread = (layout.rowwise() - center).cwiseAbs().maxCoeff();
    return spread <= 1e-14 * (1.0 + center.cwiseAbs().maxCoeff());
}

// Displaces every node by a tiny fraction of the smallest target distance.
// From a collapsed layout every pair lands at a distance inside (0, 2 d_ij),
// so the stress strictly decreases.
void jitter(Layout& layout, const GraphInstance& graph, std::uint64_t seed) {
    const int n = graph.node_count;
    double d_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) d_min = std::min(d_min, graph.distances(i, j));
    const double magnitude = 1e-4 * d_min;
    Rng rng(seed ^ 0x5eedf00du);
    for (int i = 0; i < n; ++i) {
        layout(i, 0) += magnitude * (rng.uniform01() - 0.5);
        layout(i, 1) += magnitude * (rng.uniform01() - 0.5);
    }
}

}  // namespace

double stress(const Layout& layout, const GraphInstance& graph, const WeightMatrix& weights) {
    const int n = graph.node_count;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double gap = (layout.row(i) - layout.row(j)).norm() - graph.distances(i, j);
            total += weights.values(i, j) * gap * gap;
        }
    }
    return total;
}

MajorizationContext build_majorization(const GraphInstance& graph, const WeightMatrix& weights,
                                       const Layout& z) {
    const int n = graph.node_count;
    MajorizationContext ctx;
    ctx.l_w = -weights.values;
    for (int i = 0; i < n; ++i) ctx.l_w(i, i) = weights.values.row(i).sum();
    ctx.l_z = build_l_z(graph, weights, z);
    ctx.z = z;
    ctx.l_z_z = ctx.l_z * z;
    ctx.constant = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            ctx.constant += weights.values(i, j) * graph.distances(i, j) * graph.distances(i, j);
    return ctx;
}

double fstress(const Layout& layout, const MajorizationContext& ctx) {
    const double quad = (ctx.l_w * layout).cwiseProduct(layout).sum();
    const double cross = ctx.l_z_z.cwiseProduct(layout).sum();
    return ctx.constant + quad - 2.0 * cross;
}

Layout fstress_gradient(const Layout& layout, const MajorizationContext& ctx) {
    return 2.0 * (ctx.l_w * layout - ctx.l_z_z);
}

Layout random_layout(int node_count, std::uint64_t seed) {
    Rng rng(seed);
    Layout layout(node_count, 2);
    for (int i = 0; i < node_count; ++i) {
        layout(i, 0) = rng.uniform01();
        layout(i, 1) = rng.uniform01();
    }
    return layout;
}

SmacofResult smacof_embed(const GraphInstance& graph, const WeightMatrix& weights,
                          const Layout* init, int max_iterations, double tolerance,
                          std::uint64_t seed) {
    const int n = graph.node_count;
    if (n < 1) throw std::invalid_argument("smacof_embed needs at least one node");
    Layout x = init ? *init : random_layout(n, seed);
    if (x.rows() != n) throw std::invalid_argument("initial layout has the wrong number of rows");

    SmacofResult result;
    double current = stress(x, graph, weights);
    result.stress_trace.push_back(current);
    if (n == 1) {
        result.layout = x;
        result.converged = true;
        return result;
    }

    Eigen::MatrixXd l_w = -weights.values;
    for (int i = 0; i < n; ++i) l_w(i, i) = weights.values.row(i).sum();
    // L_w is singular with kernel e; shifting by (1/n) ee' makes the system
    // definite without changing solutions orthogonal to e, and the right-hand
    // side L_z x always is.
    const Eigen::LDLT<Eigen::MatrixXd> solver(
        l_w + Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n)));

    for (int iter = 1; iter <= max_iterations; ++iter) {
        if (fully_collapsed(x)) {
            jitter(x, graph, seed);
            current = stress(x, graph, weights);
            result.stress_trace.push_back(current);
            result.iterations = iter;
            continue;
        }
        const Eigen::MatrixXd l_z = build_l_z(graph, weights, x);
        Layout next = solver.solve(l_z * x);
        next.rowwise() -= next.colwise().mean().eval();
        const double updated = stress(next, graph, weights);
        if (updated > current) break;  // numerical stall, keep the better layout
        x = next;
        result.stress_trace.push_back(updated);
        result.iterations = iter;
        const double drop = current - updated;
        current = updated;
        if (drop <= tolerance * std::max(current, 1e-300)) {
            result.converged = true;
            break;
        }
    }
    result.layout = x;
    return result;
}

}  // namespace uncross
