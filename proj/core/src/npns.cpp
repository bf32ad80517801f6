#include "npnslab/npns/npns.hpp"

#include "npnslab/core/block_tridiagonal.hpp"
#include "npnslab/core/elliptic.hpp"
#include "npnslab/core/navier_stokes.hpp"
#include "npnslab/core/operators.hpp"
#include "npnslab/core/projection.hpp"
#include "npnslab/core/spectral.hpp"

#include <cmath>
#include <sstream>

namespace npnslab::npns {

using core::ScalarField;
using core::State;
using core::VelocityField;

std::vector<std::string> NpnsConfig::validate() const {
    params.validate();
    grid.validate();
    bdata.validate(params);
    if (bdata.gamma1.nx() != grid.nx) throw InputError("npns config: boundary trace size does not match nx");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("npns config: dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ParameterError("npns config: t_end must be >= 0");
    if (t_end > 0.0 && t_end < dt) throw ParameterError("npns config: t_end must be >= dt");
    std::vector<std::string> warnings;
    if (stiff_mode == StiffMode::implicit_diffusion_only) {
        const double bound = params.eps * params.eps / (params.z1 * params.z1 * params.D1 * params.Lambda);
        if (dt > bound) {
            std::ostringstream os;
            os << "implicit-diffusion-only mode: dt = " << dt << " exceeds eps^2/(z1^2 D1 Lambda) = " << bound;
            warnings.push_back(os.str());
        }
    }
    return warnings;
}

State well_prepared_init(const ScalarField& c1_0, const VelocityField& u_0, const NpnsConfig& cfg) {
    const auto& g = c1_0.grid();
    if (!(g == cfg.grid) || !(u_0.grid() == g)) throw InputError("well_prepared_init: grid mismatch");
    if (!c1_0.all_finite() || !u_0.all_finite()) throw InputError("well_prepared_init: non-finite data");
    if (!(c1_0.min() > 0.0)) throw InputError("well_prepared_init: c1_0 must be positive");
    const auto tr = c1_0.trace();
    for (int ix = 0; ix < g.nx; ++ix)
        if (std::abs(tr.bottom[ix] - cfg.bdata.gamma1.bottom[ix]) > 1e-10 ||
            std::abs(tr.top[ix] - cfg.bdata.gamma1.top[ix]) > 1e-10)
            throw InputError("well_prepared_init: c1_0 does not match gamma1 on the walls");
    for (int ix = 0; ix < g.nx; ++ix)
        if (u_0.v(ix, 0) != 0.0 || u_0.w(ix, 0) != 0.0 || u_0.v(ix, g.ny - 1) != 0.0 || u_0.w(ix, g.ny - 1) != 0.0)
            throw InputError("well_prepared_init: u_0 must vanish on the walls");
    State s;
    s.t = 0.0;
    s.c1 = c1_0;
    s.c2 = ScalarField(g);
    const double r = -cfg.params.z1 / cfg.params.z2;
    // built from c1 so that rho(0) vanishes bitwise
    for (std::size_t i = 0; i < s.c2.size(); ++i) s.c2[i] = r * c1_0[i];
    auto pr = core::project_with_potential(u_0);
    s.u = std::move(pr.u);
    s.psi = ScalarField(g);
    s.p = ScalarField(g);
    return s;
}

namespace {

template <int B>
void coupled_solve(const State& s, const NpnsConfig& cfg, const core::Background& bg, double dt, State& out) {
    const auto& g = s.grid();
    const auto& p = cfg.params;
    const int nx = g.nx, n = g.ny - 1, bs = 3 * nx;
    const double h2 = g.hy() * g.hy();
    const double e2 = p.eps * p.eps;
    const bool coupled = cfg.stiff_mode == StiffMode::implicit_coupled;
    const std::vector<double>* Dx = nullptr;
    const std::vector<double>* Dxx = nullptr;
    std::shared_ptr<const core::XSpectral> sp;
    if (nx > 1) {
        sp = core::XSpectral::get(nx);
        Dx = &sp->dx_matrix();
        Dxx = &sp->dxx_matrix();
    }
    auto id = [nx](int f, int ix) { return f * nx + ix; };

    const ScalarField* c[2] = {&s.c1, &s.c2};
    const double z[2] = {p.z1, p.z2};
    const double D[2] = {p.D1, p.D2};
    const core::BoundaryTrace* gam[2] = {&cfg.bdata.gamma1, &cfg.bdata.gamma2};
    // Unknowns are the increments c^{n+1} - c^n (and psi^{n+1}), so a discrete steady
    // state produces an exactly zero right side.
    ScalarField explicit_rhs[2];
    for (int i = 0; i < 2; ++i) {
        ScalarField r = -1.0 * core::advect(s.u, *c[i]);
        const ScalarField& ci = *c[i];
        for (int k = 1; k < n; ++k)
            for (int ix = 0; ix < nx; ++ix)
                r(ix, k) += D[i] * (ci(ix, k + 1) - 2.0 * ci(ix, k) + ci(ix, k - 1)) / h2;
        if (Dxx)
            for (int k = 1; k < n; ++k)
                for (int j = 0; j < nx; ++j) {
                    double acc = 0.0;
                    for (int l = 0; l < nx; ++l) acc += (*Dxx)[static_cast<std::size_t>(j) * nx + l] * ci(l, k);
                    r(j, k) += D[i] * acc;
                }
        r.axpy(z[i] * D[i], core::div_coeff_grad(*c[i], bg.PhiW));
        if (!coupled) r.axpy(z[i] * D[i], core::div_coeff_grad(*c[i], s.psi));
        explicit_rhs[i] = std::move(r);
    }

    core::BlockTridiagonal<B> sys(g.ny, bs);
    for (int k : {0, n}) {
        for (int ix = 0; ix < nx; ++ix) {
            for (int f = 0; f < 3; ++f) sys.diag(k)(id(f, ix), id(f, ix)) = 1.0;
            sys.rhs(k)(id(0, ix)) = (k == 0 ? gam[0]->bottom[ix] : gam[0]->top[ix]) - s.c1(ix, k);
            sys.rhs(k)(id(1, ix)) = (k == 0 ? gam[1]->bottom[ix] : gam[1]->top[ix]) - s.c2(ix, k);
            sys.rhs(k)(id(2, ix)) = 0.0;
        }
    }
    for (int k = 1; k < n; ++k) {
        auto& L = sys.lower(k);
        auto& M = sys.diag(k);
        auto& U = sys.upper(k);
        auto& r = sys.rhs(k);
        for (int i = 0; i < 2; ++i) {
            const ScalarField& ci = *c[i];
            for (int ix = 0; ix < nx; ++ix) {
                const int row = id(i, ix);
                M(row, row) += 1.0 / dt + 2.0 * D[i] / h2;
                L(row, row) = -D[i] / h2;
                U(row, row) = -D[i] / h2;
                if (coupled) {
                    const double ap = 0.5 * (ci(ix, k + 1) + ci(ix, k)) / h2;
                    const double am = 0.5 * (ci(ix, k) + ci(ix, k - 1)) / h2;
                    const double zd = z[i] * D[i];
                    L(row, id(2, ix)) = -zd * am;
                    U(row, id(2, ix)) = -zd * ap;
                    M(row, id(2, ix)) += zd * (ap + am);
                }
                r(row) = explicit_rhs[i](ix, k);
            }
            if (Dxx) {
                for (int j = 0; j < nx; ++j)
                    for (int l = 0; l < nx; ++l) {
                        M(id(i, j), id(i, l)) -= D[i] * (*Dxx)[static_cast<std::size_t>(j) * nx + l];
                        if (coupled) {
                            double acc = 0.0;
                            for (int m = 0; m < nx; ++m)
                                acc += (*Dx)[static_cast<std::size_t>(j) * nx + m] * ci(m, k) *
                                       (*Dx)[static_cast<std::size_t>(m) * nx + l];
                            M(id(i, j), id(2, l)) -= z[i] * D[i] * acc;
                        }
                    }
            }
        }
        for (int ix = 0; ix < nx; ++ix) {
            const int row = id(2, ix);
            M(row, row) += 2.0 * e2 / h2;
            L(row, row) = -e2 / h2;
            U(row, row) = -e2 / h2;
            M(row, id(0, ix)) = -p.z1;
            M(row, id(1, ix)) = -p.z2;
            r(row) = p.z1 * s.c1(ix, k) + p.z2 * s.c2(ix, k);
        }
        if (Dxx)
            for (int j = 0; j < nx; ++j)
                for (int l = 0; l < nx; ++l) M(id(2, j), id(2, l)) -= e2 * (*Dxx)[static_cast<std::size_t>(j) * nx + l];
    }
    const auto x = sys.solve();
    out.c1 = ScalarField(g);
    out.c2 = ScalarField(g);
    for (int k = 0; k <= n; ++k)
        for (int ix = 0; ix < nx; ++ix) {
            out.c1(ix, k) = s.c1(ix, k) + x[k](id(0, ix));
            out.c2(ix, k) = s.c2(ix, k) + x[k](id(1, ix));
        }
    out.c1.set_trace(cfg.bdata.gamma1);
    out.c2.set_trace(cfg.bdata.gamma2);
}

} // namespace

NpnsStepper::NpnsStepper(NpnsConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    bg_ = core::make_background(cfg_.bdata, cfg_.grid);
}

State NpnsStepper::step(const State& s, double dt) const {
    const auto& p = cfg_.params;
    const FieldExtrema ext = diag::extrema(s);
    if (!(ext.min_c1 > 0.0) || !(ext.min_c2 > 0.0))
        throw StepError("step_npns: concentration lost positivity; frozen coefficients indefinite", s.t, ext);
    State out;
    out.t = s.t + dt;
    try {
        if (s.grid().nx == 1)
            coupled_solve<3>(s, cfg_, bg_, dt, out);
        else
            coupled_solve<Eigen::Dynamic>(s, cfg_, bg_, dt, out);
    } catch (const std::runtime_error& e) {
        throw StepError(std::string("step_npns: linear solve breakdown: ") + e.what(), s.t, ext);
    }
    if (!out.c1.all_finite() || !out.c2.all_finite())
        throw StepError("step_npns: non-finite concentration after solve", s.t, ext);
    const ScalarField rho = out.charge(p);
    out.psi = core::solve_poisson(rho, p.eps * p.eps, core::zero_trace(s.grid()));
    const ScalarField phi = out.psi + bg_.PhiW;
    VelocityField force(-1.0 * hadamard(rho, core::dx(phi)), -1.0 * hadamard(rho, core::dy(phi)));
    auto vs = core::advance_velocity(s.u, dt, p.nu, force);
    out.u = std::move(vs.u);
    out.p = std::move(vs.p);
    return out;
}

State step_npns(const State& s, const NpnsConfig& cfg) { return NpnsStepper(cfg).step(s); }

Trajectory run_npns(const State& init, const NpnsConfig& cfg, int save_every, const RunOptions& opts) {
    if (save_every < 1) throw InputError("run_npns: save_every must be >= 1");
    Trajectory tr;
    tr.warnings = cfg.validate();
    const NpnsStepper stepper(cfg);
    const auto bounds = diag::data_bounds(init, cfg.bdata);
    auto record = [&](const State& s) {
        diag::DiagnosticsRecord r;
        r.t = s.t;
        if (opts.record_energy) r.E = diag::free_energy(s, stepper.background(), cfg.params);
        r.extrema = diag::extrema(s);
        tr.snapshots.push_back(s);
        tr.diagnostics.push_back(r);
    };
    record(init);
    State s = init;
    long step = 0;
    const double tiny = 1e-12 * std::max(1.0, cfg.t_end);
    while (s.t < cfg.t_end - tiny) {
        const double dt = std::min(cfg.dt, cfg.t_end - s.t);
        try {
            s = stepper.step(s, dt);
        } catch (const StepError& e) {
            std::ostringstream os;
            os << e.what() << " (t = " << e.time() << ")";
            throw StepError(os.str(), e.time(), e.extrema());
        }
        ++step;
        const auto mp = diag::max_principle_check(s, bounds, opts.guard_tol);
        if (!mp.pass) {
            std::ostringstream os;
            os << "run_npns: maximum principle violated by " << mp.violation << " for c" << mp.species << " at node ("
               << mp.ix << ", " << mp.iy << "), t = " << s.t;
            throw MaxPrincipleViolation(os.str(), s.t, mp.extrema);
        }
        const bool last = !(s.t < cfg.t_end - tiny);
        if (step % save_every == 0 || last) record(s);
    }
    return tr;
}

double poisson_residual(const State& s, const core::Params& p) {
    const ScalarField lap = core::laplacian(s.psi);
    const ScalarField rho = s.charge(p);
    const auto& g = s.grid();
    double r = 0.0;
    for (int iy = 1; iy < g.ny - 1; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) r = std::max(r, std::abs(-p.eps * p.eps * lap(ix, iy) - rho(ix, iy)));
    return r;
}

} // namespace npnslab::npns
