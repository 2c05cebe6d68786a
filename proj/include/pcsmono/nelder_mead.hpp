#pragma once

// Derivative-free downhill simplex minimizer.

#include <functional>
#include <span>
#include <vector>

namespace pcsmono {

struct SimplexOptions {
    double initial_step = 0.5;
    /// Converged once the objective spread over the simplex is at most this.
    double ftol = 1e-7;
    int max_evaluations = 2000;
    /// Fresh simplices built around the incumbent after convergence.
    int restarts = 1;
};

struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

SimplexResult minimize_simplex(const Objective& f, std::vector<double> x0, const SimplexOptions& opts);

}  // namespace pcsmono
