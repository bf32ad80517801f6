#include "npnslab/layers/composite.hpp"

#include "npnslab/core/errors.hpp"

#include <cmath>

namespace npnslab::layers {

using core::ScalarField;

std::pair<BoundaryLayerProfile, BoundaryLayerProfile> boundary_layers_at(const limit::InnerTerm& order0,
                                                                         const core::BoundaryData& bdata,
                                                                         const core::Params& p) {
    const auto& g = order0.c1.grid();
    const ScalarField lap = limit::laplacian_phi0(order0);
    std::vector<double> al(g.nx), ar(g.nx);
    for (int ix = 0; ix < g.nx; ++ix) {
        al[ix] = lap(ix, 0);
        ar[ix] = lap(ix, g.ny - 1);
    }
    return {boundary_layer(Wall::left, std::move(al), bdata.gamma1.bottom, p),
            boundary_layer(Wall::right, std::move(ar), bdata.gamma1.top, p)};
}

namespace {

void require_grid(const core::ChannelGrid& g, const ScalarField& f, const char* what) {
    if (!(f.grid() == g)) throw InputError(std::string("assemble_composite: grid mismatch in ") + what);
}

} // namespace

CompositeApproximation assemble_composite(const CompositeInputs& in, const core::Params& p, CompositeVariant variant,
                                          double t) {
    if (!in.order0) throw InputError("assemble_composite: order-0 term required");
    const double eps = p.eps;
    if (!(eps > 0.0)) throw ParameterError("assemble_composite: eps must be positive");
    const auto& g = in.order0->c1.grid();
    const bool full = variant == CompositeVariant::full_S;
    const double e2 = eps * eps;
    const double tau = t / e2;
    for (const auto* ml : {in.left_ml, in.right_ml})
        if (ml && !ml->empty() && ml->size() != 1 && static_cast<int>(ml->size()) != g.nx)
            throw InputError("assemble_composite: mixed layers need one solution per x' node");

    CompositeApproximation app;
    app.t = t;
    app.variant = variant;
    app.c1 = in.order0->c1;
    app.c2 = in.order0->c2;
    app.phi = in.order0->phi;
    app.u = in.order0->u;

    if (in.order1) {
        require_grid(g, in.order1->c1, "order 1");
        app.c1.axpy(eps, in.order1->c1);
        app.c2.axpy(eps, in.order1->c2);
        if (full) {
            app.phi.axpy(eps, in.order1->phi);
            app.u.axpy(eps, in.order1->u);
        }
    }
    if (in.order2 && full) {
        require_grid(g, in.order2->c1, "order 2");
        app.c1.axpy(e2, in.order2->c1);
        app.c2.axpy(e2, in.order2->c2);
        app.phi.axpy(e2, in.order2->phi);
    }
    if (in.initial && !in.initial->empty()) {
        const auto il = initial_layer_at(*in.initial, tau);
        require_grid(g, il.rho, "initial layer");
        app.c1.axpy(e2, initial_layer_c1(il, p));
        app.c2.axpy(e2, initial_layer_c2(il, p));
        app.phi += il.phi;
    }
    if (in.initial_next && !in.initial_next->empty()) {
        const auto il = initial_layer_at(*in.initial_next, tau);
        require_grid(g, il.phi, "next-order initial layer");
        app.phi.axpy(eps, il.phi);
    }

    for (int iy = 0; iy < g.ny; ++iy) {
        const double y = g.y(iy);
        const double f = cutoff_f(y);
        const double gc = cutoff_g(y);
        if (f == 0.0 && gc == 0.0) continue;
        const auto fv = fast_variables(t, y, eps);
        for (int ix = 0; ix < g.nx; ++ix) {
            double d1 = 0.0, d2 = 0.0, dphi = 0.0;
            if (full && in.left_bl && f != 0.0) {
                d1 += f * in.left_bl->c1(ix, fv.xi);
                d2 += f * in.left_bl->c2(ix, fv.xi);
                dphi += f * in.left_bl->phi(ix, fv.xi);
            }
            if (full && in.right_bl && gc != 0.0) {
                d1 += gc * in.right_bl->c1(ix, fv.eta);
                d2 += gc * in.right_bl->c2(ix, fv.eta);
                dphi += gc * in.right_bl->phi(ix, fv.eta);
            }
            if (in.left_ml && !in.left_ml->empty() && f != 0.0) {
                const auto& ml = (*in.left_ml)[in.left_ml->size() == 1 ? 0 : ix];
                d1 += f * ml.c1_at(fv.xi, tau);
                d2 += f * ml.c2_at(fv.xi, tau);
            }
            if (in.right_ml && !in.right_ml->empty() && gc != 0.0) {
                const auto& ml = (*in.right_ml)[in.right_ml->size() == 1 ? 0 : ix];
                d1 += gc * ml.c1_at(fv.eta, tau);
                d2 += gc * ml.c2_at(fv.eta, tau);
            }
            app.c1(ix, iy) += e2 * d1;
            app.c2(ix, iy) += e2 * d2;
            app.phi(ix, iy) += e2 * dphi;
        }
    }
    return app;
}

CompositeResidual residual(const core::State& s, const CompositeApproximation& app, const ScalarField& phiW) {
    if (!(s.grid() == app.c1.grid()) || !(phiW.grid() == app.c1.grid()))
        throw InputError("residual: grid mismatch");
    return {s.c1 - app.c1, s.c2 - app.c2, (s.psi + phiW) - app.phi, s.u - app.u};
}

} // namespace npnslab::layers
