#ifndef MINAR_OPTIM_HPP
#define MINAR_OPTIM_HPP

#include <functional>

#include "minar/linalg.hpp"

namespace minar {

struct OptimOptions {
    int max_iterations = 2000;
    double rel_obj_tol = 1e-8;    // relative objective change
    double grad_tol = 1e-5;       // gradient max-norm, immediate stop
    double soft_grad_tol = 1e-3;  // required before an objective-change stop counts
    double fd_step = 1e-6;        // finite-difference step scale
};

struct OptimResult {
    Vec x;
    double fmin = 0.0;
    int iterations = 0;
    bool converged = false;
    double grad_maxnorm = 0.0;
};

using Objective = std::function<double(const Vec&)>;

// Central finite-difference gradient with per-coordinate step
// h = fd_step * max(1, |x_k|).
Vec fd_gradient(const Objective& f, const Vec& x, double fd_step);

// BFGS with Armijo backtracking. Fully deterministic: identical inputs give
// bitwise identical iterates.
OptimResult bfgs_minimize(const Objective& f, Vec x0, const OptimOptions& opts = {});

} // namespace minar

#endif
