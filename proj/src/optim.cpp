#include "minar/optim.hpp"

#include <cmath>

namespace minar {

Vec fd_gradient(const Objective& f, const Vec& x, double fd_step) {
    const size_t n = x.size();
    Vec g(n);
    Vec xp = x;
    for (size_t k = 0; k < n; ++k) {
        const double h = fd_step * std::max(1.0, std::abs(x[k]));
        const double xk = x[k];
        xp[k] = xk + h;
        const double fp = f(xp);
        xp[k] = xk - h;
        const double fm = f(xp);
        xp[k] = xk;
        g[k] = (fp - fm) / (2.0 * h);
    }
    return g;
}

OptimResult bfgs_minimize(const Objective& f, Vec x0, const OptimOptions& opts) {
    const int n = static_cast<int>(x0.size());
    OptimResult res;
    res.x = std::move(x0);

    Matrix hinv = Matrix::identity(n); // inverse Hessian approximation
    double fx = f(res.x);
    Vec grad = fd_gradient(f, res.x, opts.fd_step);

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter + 1;
        res.grad_maxnorm = max_abs(grad);
        if (res.grad_maxnorm < opts.grad_tol) {
            res.converged = true;
            break;
        }

        // Search direction d = -Hinv * grad.
        Vec d(n, 0.0);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += hinv(i, j) * grad[j];
            d[i] = -s;
        }
        double slope = 0.0;
        for (int i = 0; i < n; ++i) slope += d[i] * grad[i];
        if (!(slope < 0.0)) {
            // Not a descent direction; reset to steepest descent.
            hinv = Matrix::identity(n);
            for (int i = 0; i < n; ++i) d[i] = -grad[i];
            slope = 0.0;
            for (int i = 0; i < n; ++i) slope -= grad[i] * grad[i];
            if (slope == 0.0) {
                res.converged = true;
                break;
            }
        }

        // Armijo backtracking.
        double step = 1.0;
        const double c1 = 1e-4;
        Vec xnew(n);
        double fnew = fx;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < n; ++i) xnew[i] = res.x[i] + step * d[i];
            fnew = f(xnew);
            if (std::isfinite(fnew) && fnew <= fx + c1 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No progress possible along this direction at machine scale.
            res.converged = res.grad_maxnorm < opts.soft_grad_tol;
            break;
        }

        Vec gnew = fd_gradient(f, xnew, opts.fd_step);

        // BFGS update with curvature guard.
        Vec s(n), y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = xnew[i] - res.x[i];
            y[i] = gnew[i] - grad[i];
        }
        double sy = 0.0;
        for (int i = 0; i < n; ++i) sy += s[i] * y[i];
        double ss = 0.0, yy = 0.0;
        for (int i = 0; i < n; ++i) {
            ss += s[i] * s[i];
            yy += y[i] * y[i];
        }
        if (sy > 1e-12 * std::sqrt(ss * yy)) {
            // Hinv <- (I - s y'/sy) Hinv (I - y s'/sy) + s s'/sy
            Vec hy(n, 0.0);
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += hinv(i, j) * y[j];
                hy[i] = acc;
            }
            double yhy = 0.0;
            for (int i = 0; i < n; ++i) yhy += y[i] * hy[i];
            const double c = (1.0 + yhy / sy) / sy;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    hinv(i, j) += c * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
        }

        const double prev = fx;
        res.x = std::move(xnew);
        fx = fnew;
        grad = std::move(gnew);

        // A stalled objective only counts as convergence once the gradient is
        // already small; otherwise keep polishing.
        res.grad_maxnorm = max_abs(grad);
        if (std::abs(prev - fx) < opts.rel_obj_tol * (std::abs(fx) + 1e-12) &&
            res.grad_maxnorm < opts.soft_grad_tol) {
            res.converged = true;
            break;
        }
    }

    res.fmin = fx;
    res.grad_maxnorm = max_abs(grad);
    return res;
}

} // namespace minar
