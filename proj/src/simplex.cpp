#include "simplex.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <memory>

namespace acsens::detail {

namespace {

using Objective = std::function<double(const std::vector<double>&)>;

double trampoline(const gsl_vector* v, void* params) {
    const auto& f = *static_cast<const Objective*>(params);
    std::vector<double> x(v->size);
    for (std::size_t i = 0; i < v->size; ++i) x[i] = gsl_vector_get(v, i);
    const double r = f(x);
    return std::isfinite(r) ? r : GSL_POSINF;
}

struct VectorDeleter {
    void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
    void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

SimplexResult nelder_mead(const Objective& f, std::vector<double> x0, std::vector<double> step, std::size_t max_iter,
                          double size_tol) {
    const std::size_t n = x0.size();
    SimplexResult res;
    if (n == 0) {
        res.value = f(x0);
        res.converged = true;
        return res;
    }
    gsl_set_error_handler_off();
    std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n)), ss(gsl_vector_alloc(n));
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x.get(), i, x0[i]);
        gsl_vector_set(ss.get(), i, step[i]);
    }
    gsl_multimin_function fn;
    fn.n = n;
    fn.f = &trampoline;
    fn.params = const_cast<Objective*>(&f);
    std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
    gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), ss.get());
    int status = GSL_CONTINUE;
    std::size_t it = 0;
    while (status == GSL_CONTINUE && it < max_iter) {
        ++it;
        if (gsl_multimin_fminimizer_iterate(m.get())) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), size_tol);
    }
    res.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.x[i] = gsl_vector_get(m->x, i);
    res.value = m->fval;
    res.iterations = it;
    res.converged = status == GSL_SUCCESS;
    return res;
}

double bracketed_root(const std::function<double(double)>& f, double lo, double hi, double xtol) {
    const double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    auto tol = [xtol](double a, double b) { return std::abs(b - a) <= xtol * std::max(1.0, std::abs(a)); };
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
}

std::optional<double> nearest_root(const std::function<double(double)>& f, double x0, double step, double lo,
                                   double hi, int max_doublings) {
    const double f0 = f(x0);
    if (f0 == 0.0) return x0;
    if (!std::isfinite(f0)) return std::nullopt;
    double prev_up = x0, prev_dn = x0;
    for (int m = 0; m <= max_doublings; ++m) {
        const double s = step * std::ldexp(1.0, m);
        bool any = false;
        if (x0 + s <= hi) {
            any = true;
            const double fu = f(x0 + s);
            if (std::isfinite(fu) && (fu == 0.0 || (fu > 0) != (f0 > 0))) return bracketed_root(f, prev_up, x0 + s);
            prev_up = x0 + s;
        }
        if (x0 - s >= lo) {
            any = true;
            const double fd = f(x0 - s);
            if (std::isfinite(fd) && (fd == 0.0 || (fd > 0) != (f0 > 0))) return bracketed_root(f, x0 - s, prev_dn);
            prev_dn = x0 - s;
        }
        if (!any) break;
    }
    return std::nullopt;
}

}  // namespace acsens::detail
