#include "uncross/optim.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace uncross {

namespace {

struct Correction {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
};

// Two-loop recursion; returns H * grad with H0 = gamma * I.
Eigen::VectorXd apply_inverse_hessian(const std::deque<Correction>& history,
                                      const Eigen::VectorXd& grad) {
    Eigen::VectorXd q = grad;
    std::vector<double> alpha(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
        alpha[i] = history[i].rho * history[i].s.dot(q);
        q -= alpha[i] * history[i].y;
    }
    if (!history.empty()) {
        const auto& last = history.back();
        q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double beta = history[i].rho * history[i].y.dot(q);
        q += (alpha[i] - beta) * history[i].s;
    }
    return q;
}

}  // namespace

MinimizeResult minimize(const Objective& objective, const Eigen::VectorXd& x0,
                        const MinimizeOptions& options) {
    constexpr double kArmijoC1 = 1e-4;
    constexpr int kMaxBacktracks = 60;

    Eigen::VectorXd x = x0;
    Eigen::VectorXd grad(x.size());
    double f = objective(x, &grad);
    if (!std::isfinite(f) || !grad.allFinite())
        throw std::invalid_argument("objective is not finite at the start point");

    MinimizeResult best;
    best.x = x;
    best.value = f;
    best.gradient_inf_norm = grad.lpNorm<Eigen::Infinity>();

    std::deque<Correction> history;
    auto finish = [&](MinimizeStatus status, int iterations) {
        best.status = status;
        best.iterations = iterations;
        return best;
    };

    if (best.gradient_inf_norm <= options.gradient_tolerance)
        return finish(MinimizeStatus::gradient_converged, 0);
    if (options.objective_target >= 0.0 && f <= options.objective_target)
        return finish(MinimizeStatus::target_reached, 0);

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        Eigen::VectorXd direction = -apply_inverse_hessian(history, grad);
        double slope = direction.dot(grad);
        if (!(slope < 0.0) || !direction.allFinite()) {
            history.clear();
            direction = -grad;
            slope = -grad.squaredNorm();
        }

        double step = 1.0;
        if (history.empty()) {
            const double gnorm = grad.norm();
            if (gnorm > 1.0) step = 1.0 / gnorm;
        }

        Eigen::VectorXd x_new, grad_new(x.size());
        double f_new = f;
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt) {
            x_new = x + step * direction;
            f_new = objective(x_new, &grad_new);
            if (std::isfinite(f_new) && grad_new.allFinite() &&
                f_new <= f + kArmijoC1 * step * slope) {
                accepted = true;
                break;
            }
            // minimizer of the quadratic through f, slope and the failed trial,
            // kept within a safeguarded fraction of the current step
            double next = step * 0.5;
            if (std::isfinite(f_new)) {
                const double denom = 2.0 * (f_new - f - slope * step);
                if (denom > 0.0) next = std::clamp(-slope * step * step / denom, 0.1 * step, 0.5 * step);
            }
            step = next;
        }
        if (!accepted) {
            if (history.empty()) return finish(MinimizeStatus::line_search_failed, iter);
            history.clear();  // retry from steepest descent before giving up
            continue;
        }

        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = grad_new - grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            history.push_back({s, y, 1.0 / sy});
            if (static_cast<int>(history.size()) > options.memory) history.pop_front();
        }

        x = x_new;
        grad = grad_new;
        f = f_new;
        if (f < best.value) {
            best.x = x;
            best.value = f;
            best.gradient_inf_norm = grad.lpNorm<Eigen::Infinity>();
        }

        if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance)
            return finish(MinimizeStatus::gradient_converged, iter);
        if (options.objective_target >= 0.0 && f <= options.objective_target)
            return finish(MinimizeStatus::target_reached, iter);
        if (s.norm() <= options.step_tolerance)
            return finish(MinimizeStatus::step_converged, iter);
    }
    return finish(MinimizeStatus::iteration_cap, options.max_iterations);
}

double check_gradient(const Objective& objective, const Eigen::VectorXd& x) {
    Eigen::VectorXd analytic(x.size());
    objective(x, &analytic);
    double worst = 0.0;
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        probe[i] = x[i] + h;
        const double f_plus = objective(probe, nullptr);
        probe[i] = x[i] - h;
        const double f_minus = objective(probe, nullptr);
        probe[i] = x[i];
        const double numeric = (f_plus - f_minus) / (2.0 * h);
        const double scale = std::max({1.0, std::abs(numeric), std::abs(analytic[i])});
        worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
    }
    return worst;
}

}  // namespace uncross
