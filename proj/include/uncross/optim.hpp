#pragma once

#include <Eigen/Dense>
#include <functional>

namespace uncross {

// Smooth objective: returns f(x) and fills grad (same size as x) when the
// pointer is non-null.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct MinimizeOptions {
    int max_iterations = 400;
    double gradient_tolerance = 1e-6;   // stop when ||grad||_inf falls below
    double step_tolerance = 1e-9;       // stop when ||x_{k+1} - x_k||_2 falls below
    double objective_target = -1.0;     // stop when f <= target (ignored when negative)
    int memory = 10;                    // L-BFGS history length
};

enum class MinimizeStatus {
    gradient_converged,
    step_converged,
    target_reached,
    iteration_cap,
    line_search_failed,
};

struct MinimizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double gradient_inf_norm = 0.0;
    int iterations = 0;
    MinimizeStatus status = MinimizeStatus::iteration_cap;
};

// L-BFGS with Armijo backtracking. Never increases the objective: the
// returned point is the best iterate seen.
MinimizeResult minimize(const Objective& objective, const Eigen::VectorXd& x0,
                        const MinimizeOptions& options = {});

// Compares the analytic gradient against central finite differences with
// per-coordinate step h = 1e-6 * (1 + |x_i|); returns the worst relative
// discrepancy.
double check_gradient(const Objective& objective, const Eigen::VectorXd& x);

}  // namespace uncross
