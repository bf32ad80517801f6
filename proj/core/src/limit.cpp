#include "npnslab/limit/limit.hpp"

#include "npnslab/core/elliptic.hpp"
#include "npnslab/core/errors.hpp"
#include "npnslab/core/navier_stokes.hpp"
#include "npnslab/core/operators.hpp"
#include "npnslab/core/projection.hpp"

#include <cmath>
#include <string>

namespace npnslab::limit {

using core::ScalarField;
using core::VelocityField;

double effective_diffusivity(const core::Params& p) { return (p.z1 - p.z2) * p.D1 * p.D2 / (p.z1 * p.D1 - p.z2 * p.D2); }

namespace {

ScalarField constant_like(const ScalarField& f, double v) { return ScalarField(f.grid(), v); }

double interior_max_abs(const ScalarField& f) {
    const auto& g = f.grid();
    double r = 0.0;
    for (int iy = 1; iy < g.ny - 1; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) r = std::max(r, std::abs(f(ix, iy)));
    return r;
}

} // namespace

ScalarField solve_limit_psi(const ScalarField& c1, const core::Params& p, const ScalarField& phiW) {
    if (!(c1.min() > 0.0))
        throw DomainError("solve_limit_psi: ellipticity lost, min c1 = " + std::to_string(c1.min()));
    const double K = p.kappa();
    const ScalarField a = K * c1;
    ScalarField s = core::div_coeff_grad(constant_like(c1, p.D1 - p.D2), c1);
    s += core::div_coeff_grad(a, phiW);
    s *= -1.0;
    return core::solve_variable_elliptic(a, s, core::zero_trace(c1.grid()));
}

double limit_psi_residual(const ScalarField& c1, const ScalarField& psi, const core::Params& p, const ScalarField& phiW) {
    ScalarField r = core::div_coeff_grad(constant_like(c1, p.D1 - p.D2), c1);
    r += core::div_coeff_grad(p.kappa() * c1, psi + phiW);
    return interior_max_abs(r);
}

double limit_psi_residual_two_species(const ScalarField& c1, const ScalarField& c2, const ScalarField& psi,
                                      const core::Params& p, const ScalarField& phiW) {
    const ScalarField one = constant_like(c1, 1.0);
    ScalarField r = p.z1 * p.D1 * core::div_coeff_grad(one, c1);
    r.axpy(p.z2 * p.D2, core::div_coeff_grad(one, c2));
    ScalarField a = (p.z1 * p.z1 * p.D1) * c1;
    a.axpy(p.z2 * p.z2 * p.D2, c2);
    r += core::div_coeff_grad(a, psi + phiW);
    return interior_max_abs(r);
}

LimitState limit_init(const ScalarField& c1_0, const VelocityField& u_0, const core::Params& p,
                      const core::BoundaryData& bdata) {
    const auto& g = c1_0.grid();
    if (!(u_0.grid() == g)) throw InputError("limit_init: grid mismatch");
    if (!(c1_0.min() > 0.0)) throw InputError("limit_init: c1_0 must be positive");
    const ScalarField phiW = core::harmonic_extension(bdata.W, g);
    LimitState s;
    s.t = 0.0;
    s.c1 = c1_0;
    s.c1.set_trace(bdata.gamma1);
    s.u = core::project_div_free(u_0);
    s.psi = solve_limit_psi(s.c1, p, phiW);
    s.p = ScalarField(g);
    return s;
}

LimitStepper::LimitStepper(core::Params p, core::BoundaryData bdata, const core::ChannelGrid& grid)
    : p_(p), bdata_(std::move(bdata)) {
    p_.validate();
    bdata_.validate(p_);
    bg_ = core::make_background(bdata_, grid);
}

LimitState LimitStepper::step(const LimitState& s, double dt) const {
    if (!(dt > 0.0)) throw ParameterError("step_limit: dt must be positive");
    const double Deff = effective_diffusivity(p_);
    if (!(s.c1.min() > 0.0)) {
        const ScalarField c2 = s.c2(p_);
        throw StepError("step_limit: concentration lost positivity", s.t,
                        FieldExtrema{s.c1.min(), s.c1.max(), c2.min(), c2.max()});
    }
    LimitState out;
    out.t = s.t + dt;
    ScalarField rhs = (1.0 / dt) * s.c1;
    rhs -= core::advect(s.u, s.c1);
    out.c1 = core::solve_helmholtz(1.0 / dt, Deff, rhs, bdata_.gamma1);
    auto vs = core::advance_velocity(s.u, dt, p_.nu, VelocityField(s.grid()));
    out.u = std::move(vs.u);
    out.p = std::move(vs.p);
    out.psi = solve_limit_psi(out.c1, p_, bg_.PhiW);
    return out;
}

LimitState step_limit(const LimitState& s, const core::Params& p, const core::BoundaryData& bdata, double dt) {
    return LimitStepper(p, bdata, s.grid()).step(s, dt);
}

LimitTrajectory run_limit(const LimitState& init, const core::Params& p, const core::BoundaryData& bdata, double dt,
                          double t_end, int save_every) {
    if (save_every < 1) throw InputError("run_limit: save_every must be >= 1");
    if (!(dt > 0.0)) throw ParameterError("run_limit: dt must be positive");
    const LimitStepper stepper(p, bdata, init.grid());
    LimitTrajectory tr;
    tr.snapshots.push_back(init);
    LimitState s = init;
    long step = 0;
    const double tiny = 1e-12 * std::max(1.0, t_end);
    while (s.t < t_end - tiny) {
        s = stepper.step(s, std::min(dt, t_end - s.t));
        ++step;
        if (step % save_every == 0 || !(s.t < t_end - tiny)) tr.snapshots.push_back(s);
    }
    return tr;
}

InnerSeries inner_order0(const LimitTrajectory& traj, const core::Background& bg, const core::Params& p) {
    InnerSeries out;
    out.reserve(traj.snapshots.size());
    for (const auto& s : traj.snapshots) out.push_back(InnerTerm{s.t, s.c1, s.c2(p), s.psi + bg.PhiW, s.u});
    return out;
}

ScalarField laplacian_phi0(const InnerTerm& order0) { return core::laplacian(order0.phi); }

namespace {

void check_mesh(const InnerSeries& a, const InnerSeries& b) {
    if (a.size() != b.size()) throw SequencingError("inner hierarchy: lower orders on different time meshes");
    for (std::size_t n = 0; n < a.size(); ++n)
        if (std::abs(a[n].t - b[n].t) > 1e-12 * std::max(1.0, std::abs(a[n].t)) || !(a[n].c1.grid() == b[n].c1.grid()))
            throw SequencingError("inner hierarchy: lower orders on different time/space meshes");
}

ScalarField charge_weighted(const core::Params& p, const ScalarField& c1, const ScalarField& c2) {
    // z1^2 D1 c1 + z2^2 D2 c2
    ScalarField a = (p.z1 * p.z1 * p.D1) * c1;
    a.axpy(p.z2 * p.z2 * p.D2, c2);
    return a;
}

ScalarField reconstruct_c2_order1(const core::Params& p, const ScalarField& c1) { return (-p.z1 / p.z2) * c1; }

ScalarField reconstruct_c2_order2(const core::Params& p, const ScalarField& c1, const ScalarField& lapPhi0) {
    // z1 c1 + z2 c2 = -Lap Phi^(0)
    ScalarField c2(c1.grid());
    for (std::size_t i = 0; i < c2.size(); ++i) c2[i] = (-lapPhi0[i] - p.z1 * c1[i]) / p.z2;
    return c2;
}

ScalarField order1_potential(const core::Params& p, const InnerTerm& o0, const ScalarField& c1) {
    const double K = p.kappa();
    ScalarField s = core::div_coeff_grad(constant_like(c1, p.D1 - p.D2), c1);
    s += core::div_coeff_grad(K * c1, o0.phi);
    s *= -1.0;
    return core::solve_variable_elliptic(K * o0.c1, s, core::zero_trace(c1.grid()));
}

struct Order2Sources {
    ScalarField S;         // source of the c1 transport-diffusion equation
    ScalarField dtlap;     // (d/dt + u0 . grad) Lap Phi^(0)
    VelocityField force;   // Lap Phi^(0) grad Phi^(0)
};

Order2Sources order2_sources(const core::Params& p, const InnerTerm& o0_prev, const InnerTerm& o0, double dt) {
    const double K = p.kappa();
    const ScalarField lap = laplacian_phi0(o0);
    const ScalarField lap_prev = laplacian_phi0(o0_prev);
    ScalarField dtlap = (1.0 / dt) * (lap - lap_prev);
    dtlap += core::advect(o0.u, lap);
    Order2Sources src{ScalarField(lap.grid()), dtlap, VelocityField(lap.grid())};
    src.S = (-p.D1 / K) * dtlap;
    src.S.axpy(p.D1 * p.D2 / K, core::laplacian(lap));
    src.S.axpy(p.z2 * p.D1 * p.D2 / K, core::div_coeff_grad(lap, o0.phi));
    core::zero_walls(src.S);
    src.force = VelocityField(hadamard(lap, core::dx(o0.phi)), hadamard(lap, core::dy(o0.phi)));
    return src;
}

core::BoundaryTrace order2_c1_trace(const core::Params& p, const ScalarField& lap) {
    core::BoundaryTrace bc = lap.trace();
    const double s = -1.0 / (p.z1 - p.z2);
    for (auto& v : bc.bottom) v *= s;
    for (auto& v : bc.top) v *= s;
    return bc;
}

core::BoundaryTrace order2_phi_trace(const core::Params& p, const ScalarField& lap, const core::BoundaryData& bdata) {
    core::BoundaryTrace bc = lap.trace();
    const double s = 1.0 / (p.z1 * (p.z1 - p.z2));
    for (int ix = 0; ix < bc.nx(); ++ix) {
        bc.bottom[ix] *= s / bdata.gamma1.bottom[ix];
        bc.top[ix] *= s / bdata.gamma1.top[ix];
    }
    return bc;
}

ScalarField order2_potential(const core::Params& p, const core::BoundaryData& bdata, const InnerTerm& o0,
                             const InnerTerm& o1, const ScalarField& c1, const ScalarField& c2,
                             const ScalarField& dtlap) {
    const ScalarField one = constant_like(c1, 1.0);
    ScalarField s = p.z1 * p.D1 * core::div_coeff_grad(one, c1);
    s.axpy(p.z2 * p.D2, core::div_coeff_grad(one, c2));
    s += core::div_coeff_grad(charge_weighted(p, c1, c2), o0.phi);
    s += core::div_coeff_grad(charge_weighted(p, o1.c1, o1.c2), o1.phi);
    s += dtlap;
    s *= -1.0;
    const ScalarField lap = laplacian_phi0(o0);
    return core::solve_variable_elliptic(charge_weighted(p, o0.c1, o0.c2), s, order2_phi_trace(p, lap, bdata));
}

} // namespace

InnerSeries solve_inner_hierarchy(int order, const std::vector<InnerSeries>& base, const core::Params& p,
                                  const core::BoundaryData& bdata, const InnerInitialData& init) {
    if (order == 0) throw SequencingError("inner hierarchy: order 0 comes from the limit solver (use inner_order0)");
    if (order < 0 || order > 2) throw InputError("inner hierarchy: order must be 0, 1 or 2");
    if (static_cast<int>(base.size()) < order) throw SequencingError("inner hierarchy: missing lower-order data");
    for (int k = 1; k < order; ++k) check_mesh(base[0], base[k]);
    const InnerSeries& s0 = base[0];
    if (s0.size() < 2) throw SequencingError("inner hierarchy: order-0 series needs at least two times");
    const auto& g = s0[0].c1.grid();
    const double Deff = effective_diffusivity(p);
    const core::BoundaryTrace zero = core::zero_trace(g);

    InnerSeries out;
    out.reserve(s0.size());
    InnerTerm cur;
    cur.t = s0[0].t;
    cur.c1 = init.c1.size() ? init.c1 : ScalarField(g);
    cur.u = init.u.v.size() ? init.u : VelocityField(g);
    if (order == 1) {
        cur.c1.set_trace(zero);
        cur.c2 = reconstruct_c2_order1(p, cur.c1);
        cur.phi = order1_potential(p, s0[0], cur.c1);
    } else {
        const InnerSeries& s1 = base[1];
        const ScalarField lap = laplacian_phi0(s0[0]);
        cur.c1.set_trace(order2_c1_trace(p, lap));
        cur.c2 = reconstruct_c2_order2(p, cur.c1, lap);
        // time derivative of Lap Phi^(0) at t0 by a forward difference
        const double dt0 = s0[1].t - s0[0].t;
        ScalarField dtlap0 = (1.0 / dt0) * (laplacian_phi0(s0[1]) - lap);
        dtlap0 += core::advect(s0[0].u, lap);
        cur.phi = order2_potential(p, bdata, s0[0], s1[0], cur.c1, cur.c2, dtlap0);
    }
    out.push_back(cur);

    for (std::size_t n = 0; n + 1 < s0.size(); ++n) {
        const double dt = s0[n + 1].t - s0[n].t;
        if (!(dt > 0.0)) throw SequencingError("inner hierarchy: times must increase");
        const InnerTerm& prev = out.back();
        const InnerTerm& a0 = s0[n];
        const InnerTerm& b0 = s0[n + 1];
        InnerTerm next;
        next.t = b0.t;
        ScalarField rhs = (1.0 / dt) * prev.c1;
        rhs -= core::advect(a0.u, prev.c1);
        VelocityField urhs(g);
        if (order == 1) {
            rhs -= core::advect(prev.u, a0.c1);
            urhs -= core::advect(prev.u, a0.u);
            urhs -= core::advect(a0.u, prev.u);
            next.c1 = core::solve_helmholtz(1.0 / dt, Deff, rhs, zero);
            next.c2 = reconstruct_c2_order1(p, next.c1);
            next.u = core::advance_velocity_rhs(prev.u, dt, p.nu, urhs).u;
            next.phi = order1_potential(p, b0, next.c1);
        } else {
            const InnerTerm& a1 = base[1][n];
            const InnerTerm& b1 = base[1][n + 1];
            rhs -= core::advect(a1.u, a1.c1);
            rhs -= core::advect(prev.u, a0.c1);
            const Order2Sources src = order2_sources(p, a0, b0, dt);
            rhs += src.S;
            const ScalarField lap = laplacian_phi0(b0);
            next.c1 = core::solve_helmholtz(1.0 / dt, Deff, rhs, order2_c1_trace(p, lap));
            next.c2 = reconstruct_c2_order2(p, next.c1, lap);
            urhs -= core::advect(prev.u, a0.u);
            urhs -= core::advect(a1.u, a1.u);
            urhs -= core::advect(a0.u, prev.u);
            urhs += src.force;
            next.u = core::advance_velocity_rhs(prev.u, dt, p.nu, urhs).u;
            next.phi = order2_potential(p, bdata, b0, b1, next.c1, next.c2, src.dtlap);
        }
        out.push_back(std::move(next));
    }
    return out;
}

} // namespace npnslab::limit
