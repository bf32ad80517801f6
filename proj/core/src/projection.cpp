#include "npnslab/core/projection.hpp"

#include "npnslab/core/errors.hpp"
#include "npnslab/core/norms.hpp"
#include "npnslab/core/operators.hpp"
#include "npnslab/core/spectral.hpp"
#include "npnslab/core/tridiagonal.hpp"

#include <complex>

namespace npnslab::core {

namespace {
using cplx = std::complex<double>;
}

ScalarField discrete_divergence(const VelocityField& u) {
    const auto& g = u.grid();
    const int nx = g.nx, n = g.ny - 1;
    const double h = g.hy();
    ScalarField out = dx(u.v);
    zero_walls(out);
    for (int iy = 1; iy < n; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double wp = iy + 1 == n ? 0.0 : u.w(ix, iy + 1);
            const double wm = iy - 1 == 0 ? 0.0 : u.w(ix, iy - 1);
            out(ix, iy) += (wp - wm) / (2.0 * h);
        }
    return out;
}

VelocityField projection_gradient(const ScalarField& q) {
    const auto& g = q.grid();
    const int nx = g.nx, n = g.ny - 1;
    const double h = g.hy();
    VelocityField G(g);
    G.v = dx(q);
    zero_walls(G.v);
    for (int iy = 1; iy < n; ++iy)
        for (int ix = 0; ix < nx; ++ix) {
            const double qp = iy + 1 == n ? 0.0 : q(ix, iy + 1);
            const double qm = iy - 1 == 0 ? 0.0 : q(ix, iy - 1);
            G.w(ix, iy) = (qp - qm) / (2.0 * h);
        }
    return G;
}

Projected project_with_potential(const VelocityField& u) {
    if (!u.all_finite()) throw InputError("projection: non-finite velocity");
    const auto& g = u.grid();
    const int ny = g.ny, n = ny - 1, ni = n - 1;
    auto sp = XSpectral::get(g.nx);
    const int nm = sp->nmodes();
    const double h = g.hy();
    const double c4 = 1.0 / (4.0 * h * h);

    std::vector<cplx> vh(static_cast<std::size_t>(ny) * nm), wh(vh.size()), qh(vh.size(), cplx(0.0));
    for (int iy = 1; iy < n; ++iy) {
        sp->forward(u.v.row(iy), vh.data() + static_cast<std::size_t>(iy) * nm);
        sp->forward(u.w.row(iy), wh.data() + static_cast<std::size_t>(iy) * nm);
    }
    auto at = [nm](std::vector<cplx>& a, int iy, int m) -> cplx& { return a[static_cast<std::size_t>(iy) * nm + m]; };

    for (int m = 0; m < nm; ++m) {
        const double k = sp->first_symbol(m);
        if (k == 0.0) {
            for (int iy = 1; iy < n; ++iy) at(wh, iy, m) = 0.0;
            continue;
        }
        // rhs = -B u at interior rows
        std::vector<cplx> rhs(ni + 1);  // 1-based
        for (int i = 1; i < n; ++i) {
            const cplx wp = i + 1 == n ? cplx(0.0) : at(wh, i + 1, m);
            const cplx wm = i - 1 == 0 ? cplx(0.0) : at(wh, i - 1, m);
            rhs[i] = -(cplx(0.0, k) * at(vh, i, m) + (wp - wm) / (2.0 * h));
        }
        // (k^2 I + C^T C) q = rhs couples i with i +- 2: solve odd and even chains
        for (int start = 1; start <= 2; ++start) {
            std::vector<int> idx;
            for (int i = start; i < n; i += 2) idx.push_back(i);
            const std::size_t len = idx.size();
            if (len == 0) continue;
            std::vector<double> lo(len, -c4), up(len, -c4), di(len);
            std::vector<cplx> d(len);
            for (std::size_t j = 0; j < len; ++j) {
                const int i = idx[j];
                const double diag = (i == 1 || i == n - 1) ? c4 : 2.0 * c4;
                di[j] = k * k + diag;
                d[j] = rhs[i];
            }
            solve_tridiagonal(lo, di, up, d);
            for (std::size_t j = 0; j < len; ++j) at(qh, idx[j], m) = d[j];
        }
        for (int i = 1; i < n; ++i) {
            const cplx qp = i + 1 == n ? cplx(0.0) : at(qh, i + 1, m);
            const cplx qm = i - 1 == 0 ? cplx(0.0) : at(qh, i - 1, m);
            at(vh, i, m) -= cplx(0.0, k) * at(qh, i, m);
            at(wh, i, m) -= (qp - qm) / (2.0 * h);
        }
    }
    Projected out{VelocityField(g), ScalarField(g)};
    for (int iy = 1; iy < n; ++iy) {
        sp->inverse(vh.data() + static_cast<std::size_t>(iy) * nm, out.u.v.row(iy));
        sp->inverse(wh.data() + static_cast<std::size_t>(iy) * nm, out.u.w.row(iy));
        sp->inverse(qh.data() + static_cast<std::size_t>(iy) * nm, out.q.row(iy));
    }
    const double mean = integrate(out.q);
    for (auto& x : out.q.values()) x -= mean;
    return out;
}

VelocityField project_div_free(const VelocityField& u) { return project_with_potential(u).u; }

} // namespace npnslab::core
