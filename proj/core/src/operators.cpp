#include "npnslab/core/operators.hpp"

#include "npnslab/core/errors.hpp"
#include "npnslab/core/spectral.hpp"

namespace npnslab::core {

namespace {

template <typename RowOp>
ScalarField rowwise(const ScalarField& f, RowOp op) {
    const auto& g = f.grid();
    ScalarField out(g);
    if (g.nx == 1) return out;  // x'-independent: all x' derivatives vanish
    auto sp = XSpectral::get(g.nx);
    for (int iy = 0; iy < g.ny; ++iy) op(*sp, f.row(iy), out.row(iy));
    return out;
}

} // namespace

ScalarField dx(const ScalarField& f) {
    return rowwise(f, [](const XSpectral& s, const double* in, double* out) { s.dx(in, out); });
}

ScalarField dxx(const ScalarField& f) {
    return rowwise(f, [](const XSpectral& s, const double* in, double* out) { s.dxx(in, out); });
}

ScalarField dy(const ScalarField& f) {
    const auto& g = f.grid();
    const int nx = g.nx, n = g.ny - 1;
    const double h = g.hy();
    ScalarField out(g);
    for (int ix = 0; ix < nx; ++ix) {
        out(ix, 0) = (-3.0 * f(ix, 0) + 4.0 * f(ix, 1) - f(ix, 2)) / (2.0 * h);
        out(ix, n) = (3.0 * f(ix, n) - 4.0 * f(ix, n - 1) + f(ix, n - 2)) / (2.0 * h);
    }
    for (int iy = 1; iy < n; ++iy)
        for (int ix = 0; ix < nx; ++ix) out(ix, iy) = (f(ix, iy + 1) - f(ix, iy - 1)) / (2.0 * h);
    return out;
}

ScalarField dyy(const ScalarField& f) {
    const auto& g = f.grid();
    const int nx = g.nx, n = g.ny - 1;
    const double h2 = g.hy() * g.hy();
    ScalarField out(g);
    for (int ix = 0; ix < nx; ++ix) {
        out(ix, 0) = (2.0 * f(ix, 0) - 5.0 * f(ix, 1) + 4.0 * f(ix, 2) - f(ix, 3)) / h2;
        out(ix, n) = (2.0 * f(ix, n) - 5.0 * f(ix, n - 1) + 4.0 * f(ix, n - 2) - f(ix, n - 3)) / h2;
    }
    for (int iy = 1; iy < n; ++iy)
        for (int ix = 0; ix < nx; ++ix) out(ix, iy) = (f(ix, iy + 1) - 2.0 * f(ix, iy) + f(ix, iy - 1)) / h2;
    return out;
}

ScalarField dxy(const ScalarField& f) { return dy(dx(f)); }

ScalarField laplacian(const ScalarField& f) {
    ScalarField out = dyy(f);
    if (f.grid().nx > 1) out += dxx(f);
    return out;
}

VelocityField gradient(const ScalarField& f) { return VelocityField(dx(f), dy(f)); }

ScalarField divergence(const VelocityField& u) { return dx(u.v) + dy(u.w); }

ScalarField advect(const VelocityField& a, const ScalarField& f) {
    ScalarField out = hadamard(a.w, dy(f));
    if (f.grid().nx > 1) out += hadamard(a.v, dx(f));
    return out;
}

VelocityField advect(const VelocityField& a, const VelocityField& u) {
    return VelocityField(advect(a, u.v), advect(a, u.w));
}

ScalarField div_coeff_grad(const ScalarField& a, const ScalarField& f) {
    const auto& g = f.grid();
    if (!(a.grid() == g)) throw InputError("div_coeff_grad: grid mismatch");
    const int nx = g.nx, n = g.ny - 1;
    const double h2 = g.hy() * g.hy();
    ScalarField out(g);
    for (int iy = 1; iy < n; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double ap = 0.5 * (a(ix, iy + 1) + a(ix, iy));
            const double am = 0.5 * (a(ix, iy) + a(ix, iy - 1));
            out(ix, iy) = (ap * (f(ix, iy + 1) - f(ix, iy)) - am * (f(ix, iy) - f(ix, iy - 1))) / h2;
        }
    if (nx > 1) {
        ScalarField flux = hadamard(a, dx(f));
        ScalarField fx = dx(flux);
        for (int iy = 1; iy < n; ++iy)
            for (int ix = 0; ix < nx; ++ix) out(ix, iy) += fx(ix, iy);
    }
    return out;
}

ScalarField shift_x(const ScalarField& f, int k) {
    const auto& g = f.grid();
    ScalarField out(g);
    const int nx = g.nx;
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < nx; ++ix) out(((ix + k) % nx + nx) % nx, iy) = f(ix, iy);
    return out;
}

VelocityField shift_x(const VelocityField& u, int k) { return VelocityField(shift_x(u.v, k), shift_x(u.w, k)); }

void zero_walls(ScalarField& f) {
    const auto& g = f.grid();
    for (int ix = 0; ix < g.nx; ++ix) {
        f(ix, 0) = 0.0;
        f(ix, g.ny - 1) = 0.0;
    }
}

} // namespace npnslab::core
