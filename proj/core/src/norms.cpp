#include "npnslab/core/norms.hpp"

#include "npnslab/core/errors.hpp"
#include "npnslab/core/operators.hpp"

#include <algorithm>
#include <cmath>

namespace npnslab::core {

double integrate(const ScalarField& f) {
    const auto& g = f.grid();
    const double hx = g.hx(), hy = g.hy();
    double total = 0.0;
    for (int iy = 0; iy < g.ny; ++iy) {
        const double wy = (iy == 0 || iy == g.ny - 1) ? 0.5 * hy : hy;
        double rowsum = 0.0;
        const double* r = f.row(iy);
        for (int ix = 0; ix < g.nx; ++ix) rowsum += r[ix];
        total += wy * hx * rowsum;
    }
    return total;
}

double inner(const ScalarField& f, const ScalarField& g) { return integrate(hadamard(f, g)); }

double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

double l2_norm(const VelocityField& u) { return std::sqrt(std::max(0.0, inner(u.v, u.v) + inner(u.w, u.w))); }

double grad_sq(const ScalarField& f) {
    double s = inner(dy(f), dy(f));
    if (f.grid().nx > 1) {
        const ScalarField fx = dx(f);
        s += inner(fx, fx);
    }
    return s;
}

double grad_sq(const VelocityField& u) { return grad_sq(u.v) + grad_sq(u.w); }

Norms norms(const ScalarField& f) {
    if (!f.all_finite()) throw InputError("norms: non-finite field");
    Norms n;
    const double l2sq = inner(f, f);
    const double h1sq = grad_sq(f);
    const ScalarField fyy = dyy(f);
    double secsq = inner(fyy, fyy);
    if (f.grid().nx > 1) {
        const ScalarField fxx = dxx(f);
        const ScalarField fxy = dxy(f);
        secsq += inner(fxx, fxx) + 2.0 * inner(fxy, fxy);
    }
    n.l2 = std::sqrt(l2sq);
    n.h1_semi = std::sqrt(h1sq);
    n.h2 = std::sqrt(l2sq + h1sq + secsq);
    n.linf = f.max_abs();
    return n;
}

Norms norms(const VelocityField& u) {
    const Norms a = norms(u.v), b = norms(u.w);
    auto comb = [](double x, double y) { return std::sqrt(x * x + y * y); };
    return Norms{comb(a.l2, b.l2), comb(a.h1_semi, b.h1_semi), comb(a.h2, b.h2), std::max(a.linf, b.linf)};
}

double linf_time(const std::vector<double>& values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double l2_time(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size()) throw InputError("l2_time: size mismatch");
    double s = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
        s += 0.5 * (times[i] - times[i - 1]) * (values[i] * values[i] + values[i - 1] * values[i - 1]);
    return std::sqrt(s);
}

} // namespace npnslab::core
