#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace uncross {

// Rows are the points generating a polyhedron (segment endpoints in the
// embedding use case, but any finite point set works).
using PolyhedronPoints = Eigen::Matrix<double, Eigen::Dynamic, 2>;

struct Hyperplane {
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    double gamma = 0.0;
};

// Residual threshold below which the polyhedra count as strictly separated.
inline constexpr double kSeparationTolerance = 1e-6;

// Squared hinge residual of the strict separation system
//   A u - gamma e >= e,  B u - gamma e <= -e:
// || max(0, -A u + (gamma + 1) e) ||^2 + || max(0, B u - (gamma - 1) e) ||^2.
double separation_objective(const PolyhedronPoints& a, const PolyhedronPoints& b,
                            const Eigen::Vector2d& u, double gamma);

struct SeparationResult {
    Hyperplane plane;
    double violation = 0.0;  // objective value at the returned plane
    bool separated = false;  // violation <= kSeparationTolerance
    bool converged = false;  // solver met one of its stopping criteria
};

// Minimizes the residual over (u, gamma). A zero optimum yields a strictly
// separating hyperplane scaled to unit margin; a positive optimum certifies
// that the polyhedra intersect (the residual is then at least 2 in theory).
// A warm start resumes from a previously returned plane.
SeparationResult solve_separation(const PolyhedronPoints& a, const PolyhedronPoints& b,
                                  std::optional<Hyperplane> warm_start = std::nullopt);

// Multipliers (delta_a, delta_b) with A' delta_a = B' delta_b, sum(delta) = 1,
// delta >= 0: a common point of the two polyhedra in barycentric form, i.e.
// a certificate that no separating hyperplane exists.
struct IntersectionWitness {
    Eigen::VectorXd delta_a;
    Eigen::VectorXd delta_b;
    double residual = 0.0;  // || A' delta_a - B' delta_b ||
};

struct CertifyReport {
    bool consistent = false;
    std::optional<IntersectionWitness> witness;
    std::string diagnostic;
};

// Cross-checks a solver verdict: a "separated" result must come with
// disjoint convex hulls, a "not separated" one with a feasible witness of
// the intersection system above.
CertifyReport certify_separation(const PolyhedronPoints& a, const PolyhedronPoints& b,
                                 const SeparationResult& result);

}  // namespace uncross
