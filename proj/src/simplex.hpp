#pragma once
// Thin wrapper over the GSL Nelder-Mead minimiser, plus a bracketed 1D
// root finder shared by the curve tracer and the parameter designer.

#include <functional>
#include <optional>
#include <vector>

namespace acsens::detail {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                          std::vector<double> step, std::size_t max_iter = 2000, double size_tol = 1e-10);

/// Root of f bracketed in [lo, hi] (f(lo) and f(hi) of opposite sign or zero).
double bracketed_root(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-13);

/// Root of f nearest to x0 found by expanding symmetric probes x0 +- step * 2^m
/// inside [lo, hi]; nullopt when no sign change is found.
std::optional<double> nearest_root(const std::function<double(double)>& f, double x0, double step, double lo,
                                   double hi, int max_doublings = 60);

}  // namespace acsens::detail
