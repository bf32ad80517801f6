#include <algorithm>
#include "npnslab/core/elliptic.hpp"

#include "npnslab/core/block_tridiagonal.hpp"
#include "npnslab/core/errors.hpp"
#include "npnslab/core/spectral.hpp"
#include "npnslab/core/tridiagonal.hpp"

#include <cmath>
#include <complex>

namespace npnslab::core {

namespace {

void check_trace(const BoundaryTrace& bc, const ChannelGrid& g) {
    if (bc.nx() != g.nx || static_cast<int>(bc.top.size()) != g.nx) throw InputError("trace size does not match grid");
    for (int i = 0; i < g.nx; ++i)
        if (!std::isfinite(bc.bottom[i]) || !std::isfinite(bc.top[i])) throw InputError("non-finite trace value");
}

template <int B>
ScalarField variable_elliptic_impl(const ScalarField& a, const ScalarField& s, const BoundaryTrace& bc) {
    const auto& g = a.grid();
    const int nx = g.nx, n = g.ny - 1;
    const double h2 = g.hy() * g.hy();
    BlockTridiagonal<B> sys(g.ny, nx);
    const std::vector<double>* D = nullptr;
    std::shared_ptr<const XSpectral> sp;
    if (nx > 1) {
        sp = XSpectral::get(nx);
        D = &sp->dx_matrix();
    }
    for (int ix = 0; ix < nx; ++ix) {
        sys.diag(0)(ix, ix) = 1.0;
        sys.rhs(0)(ix) = bc.bottom[ix];
        sys.diag(n)(ix, ix) = 1.0;
        sys.rhs(n)(ix) = bc.top[ix];
    }
    for (int k = 1; k < n; ++k) {
        auto& Lk = sys.lower(k);
        auto& Dk = sys.diag(k);
        auto& Uk = sys.upper(k);
        for (int ix = 0; ix < nx; ++ix) {
            const double ap = 0.5 * (a(ix, k + 1) + a(ix, k)) / h2;
            const double am = 0.5 * (a(ix, k) + a(ix, k - 1)) / h2;
            Lk(ix, ix) = am;
            Uk(ix, ix) = ap;
            Dk(ix, ix) = -(ap + am);
            sys.rhs(k)(ix) = s(ix, k);
        }
        if (D) {
            // D diag(a_k) D
            for (int j = 0; j < nx; ++j)
                for (int l = 0; l < nx; ++l) {
                    double acc = 0.0;
                    for (int m = 0; m < nx; ++m)
                        acc += (*D)[static_cast<std::size_t>(j) * nx + m] * a(m, k) * (*D)[static_cast<std::size_t>(m) * nx + l];
                    Dk(j, l) += acc;
                }
        }
    }
    auto x = sys.solve();
    ScalarField f(g);
    for (int k = 0; k <= n; ++k)
        for (int ix = 0; ix < nx; ++ix) f(ix, k) = x[k](ix);
    return f;
}

} // namespace

BoundaryTrace zero_trace(const ChannelGrid& grid) { return BoundaryTrace::constant(grid.nx, 0.0, 0.0); }

ScalarField solve_helmholtz(double alpha, double beta, const ScalarField& rhs, const BoundaryTrace& bc) {
    const auto& g = rhs.grid();
    if (!(beta > 0.0) || !(alpha >= 0.0)) throw ParameterError("helmholtz: require alpha >= 0 and beta > 0");
    if (!rhs.all_finite()) throw InputError("elliptic solve: non-finite right-hand side");
    check_trace(bc, g);
    const int nx = g.nx, ny = g.ny, n = ny - 1;
    auto sp = XSpectral::get(nx);
    const int nm = sp->nmodes();
    const double h2 = g.hy() * g.hy();

    std::vector<std::complex<double>> hat(static_cast<std::size_t>(ny) * nm);
    for (int iy = 1; iy < n; ++iy) sp->forward(rhs.row(iy), hat.data() + static_cast<std::size_t>(iy) * nm);
    sp->forward(bc.bottom.data(), hat.data());
    sp->forward(bc.top.data(), hat.data() + static_cast<std::size_t>(n) * nm);

    const int ni = n - 1;
    std::vector<double> lo(ni, -beta / h2), up(ni, -beta / h2), di(ni);
    std::vector<std::complex<double>> d(ni);
    for (int m = 0; m < nm; ++m) {
        const double k2 = -sp->second_symbol(m);
        std::fill(di.begin(), di.end(), alpha + 2.0 * beta / h2 + beta * k2);
        for (int i = 0; i < ni; ++i) d[i] = hat[static_cast<std::size_t>(i + 1) * nm + m];
        d[0] += beta / h2 * hat[m];
        d[ni - 1] += beta / h2 * hat[static_cast<std::size_t>(n) * nm + m];
        solve_tridiagonal(lo, di, up, d);
        for (int i = 0; i < ni; ++i) hat[static_cast<std::size_t>(i + 1) * nm + m] = d[i];
    }
    ScalarField f(g);
    for (int iy = 1; iy < n; ++iy) sp->inverse(hat.data() + static_cast<std::size_t>(iy) * nm, f.row(iy));
    f.set_trace(bc);
    return f;
}

ScalarField solve_poisson(const ScalarField& rhs, double coeff, const BoundaryTrace& bc) {
    if (!(coeff > 0.0)) throw ParameterError("poisson: coeff must be positive");
    return solve_helmholtz(0.0, coeff, rhs, bc);
}

ScalarField harmonic_extension(const BoundaryTrace& bc, const ChannelGrid& grid) {
    check_trace(bc, grid);
    // x'-independent traces: the linear profile is the exact discrete solution, evaluated
    // directly so that constant data stay bitwise constant.
    const bool flat = std::all_of(bc.bottom.begin(), bc.bottom.end(), [&](double v) { return v == bc.bottom[0]; }) &&
                      std::all_of(bc.top.begin(), bc.top.end(), [&](double v) { return v == bc.top[0]; });
    if (flat) {
        ScalarField f(grid);
        const double b = bc.bottom[0], t = bc.top[0];
        for (int iy = 0; iy < grid.ny; ++iy) {
            const double v = iy == grid.ny - 1 ? t : b + (t - b) * grid.y(iy);
            for (int ix = 0; ix < grid.nx; ++ix) f(ix, iy) = v;
        }
        return f;
    }
    return solve_helmholtz(0.0, 1.0, ScalarField(grid), bc);
}

ScalarField solve_variable_elliptic(const ScalarField& a, const ScalarField& s, const BoundaryTrace& bc) {
    const auto& g = a.grid();
    if (!(s.grid() == g)) throw InputError("variable elliptic: grid mismatch");
    if (!a.all_finite() || !s.all_finite()) throw InputError("variable elliptic: non-finite input");
    if (!(a.min() > 0.0)) throw ParameterError("variable elliptic: coefficient must be positive");
    check_trace(bc, g);
    if (g.nx == 1) return variable_elliptic_impl<1>(a, s, bc);
    return variable_elliptic_impl<Eigen::Dynamic>(a, s, bc);
}

} // namespace npnslab::core
