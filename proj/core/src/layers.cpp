#include "npnslab/layers/layers.hpp"

#include "npnslab/core/block_tridiagonal.hpp"
#include "npnslab/core/elliptic.hpp"
#include "npnslab/core/errors.hpp"
#include "npnslab/core/norms.hpp"
#include "npnslab/core/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace npnslab::layers {

using core::ScalarField;

FastVariables fast_variables(double t, double y, double eps) {
    if (!(eps > 0.0)) throw ParameterError("fast_variables: eps must be positive");
    return {t / (eps * eps), y / eps, (1.0 - y) / eps};
}

double cutoff_f(double y) {
    if (y <= 0.25) return 1.0;
    if (y >= 0.5) return 0.0;
    const double s = (y - 0.25) / 0.25;
    return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double cutoff_g(double y) { return cutoff_f(1.0 - y); }

// ---- boundary layers ------------------------------------------------------

double BoundaryLayerProfile::rho(int ix, double s) const { return amplitude[ix] * std::exp(-rate[ix] * s); }

double BoundaryLayerProfile::c1(int ix, double s) const { return rho(ix, s) / (z1 - z2); }

double BoundaryLayerProfile::c2(int ix, double s) const { return -rho(ix, s) / (z1 - z2); }

double BoundaryLayerProfile::phi(int ix, double s) const { return -rho(ix, s) / (z1 * (z1 - z2) * gamma1[ix]); }

BoundaryLayerProfile boundary_layer(Wall wall, std::vector<double> amplitude, std::vector<double> gamma1_trace,
                                    const core::Params& p) {
    if (amplitude.size() != gamma1_trace.size()) throw InputError("boundary_layer: amplitude/gamma1 size mismatch");
    BoundaryLayerProfile bl;
    bl.wall = wall;
    bl.z1 = p.z1;
    bl.z2 = p.z2;
    bl.rate.resize(gamma1_trace.size());
    for (std::size_t i = 0; i < gamma1_trace.size(); ++i) {
        if (!(gamma1_trace[i] > 0.0)) throw ParameterError("boundary_layer: gamma1 must be positive");
        if (!std::isfinite(amplitude[i])) throw InputError("boundary_layer: non-finite amplitude");
        bl.rate[i] = std::sqrt(p.z1 * (p.z1 - p.z2) * gamma1_trace[i]);
    }
    bl.amplitude = std::move(amplitude);
    bl.gamma1 = std::move(gamma1_trace);
    return bl;
}

// ---- initial layer --------------------------------------------------------

ScalarField initial_layer_c1(const InitialLayerState& s, const core::Params& p) {
    return (p.D1 / p.kappa()) * s.rho;
}

ScalarField initial_layer_c2(const InitialLayerState& s, const core::Params& p) {
    return (-p.D2 / p.kappa()) * s.rho;
}

std::vector<InitialLayerState> solve_initial_layer(const ScalarField& c1_base, const ScalarField& rho0,
                                                   const std::vector<double>& tau_grid, const core::Params& p,
                                                   const std::vector<ScalarField>* forcing) {
    const auto& g = c1_base.grid();
    if (!(rho0.grid() == g)) throw InputError("solve_initial_layer: grid mismatch");
    if (!(c1_base.min() > 0.0)) throw DomainError("solve_initial_layer: ellipticity lost, c1_base must be positive");
    if (!rho0.all_finite()) throw InputError("solve_initial_layer: non-finite rho0");
    if (tau_grid.empty() || tau_grid.front() != 0.0) throw InputError("solve_initial_layer: tau grid must start at 0");
    for (std::size_t n = 1; n < tau_grid.size(); ++n)
        if (!(tau_grid[n] > tau_grid[n - 1])) throw InputError("solve_initial_layer: tau grid must increase");
    if (forcing && forcing->size() != tau_grid.size())
        throw InputError("solve_initial_layer: forcing needs one field per tau node");

    const double Kp = p.z1 * p.kappa();
    const auto zero = core::zero_trace(g);
    const auto grad_c = core::gradient(c1_base);

    std::vector<InitialLayerState> out;
    out.reserve(tau_grid.size());
    out.push_back({0.0, rho0, core::solve_poisson(rho0, 1.0, zero)});

    for (std::size_t n = 1; n < tau_grid.size(); ++n) {
        const double dtau = tau_grid[n] - tau_grid[n - 1];
        const auto& prev = out.back();
        // Eliminating rho^{n+1} = -Lap Phi^{n+1} in the interior:
        // -div((1 + dtau K' c) grad Phi) = rho^n + dtau F.
        ScalarField rhs = prev.rho;
        if (forcing) rhs.axpy(dtau, (*forcing)[n]);
        ScalarField a = dtau * Kp * c1_base;
        for (auto& v : a.values()) v += 1.0;
        const ScalarField phi = core::solve_variable_elliptic(a, -1.0 * rhs, zero);

        ScalarField rho = rhs;
        rho.axpy(dtau * Kp, core::div_coeff_grad(c1_base, phi));
        // Wall rows: div(c grad Phi) = grad c . grad Phi - c rho.
        const auto grad_phi = core::gradient(phi);
        for (int iy : {0, g.ny - 1})
            for (int ix = 0; ix < g.nx; ++ix) {
                const double gg = grad_c.v(ix, iy) * grad_phi.v(ix, iy) + grad_c.w(ix, iy) * grad_phi.w(ix, iy);
                rho(ix, iy) = (rhs(ix, iy) + dtau * Kp * gg) / (1.0 + dtau * Kp * c1_base(ix, iy));
            }
        if (!rho.all_finite()) throw StepError("solve_initial_layer: non-finite charge", tau_grid[n], {});
        InitialLayerState st{tau_grid[n], rho, core::solve_poisson(rho, 1.0, zero)};
        out.push_back(std::move(st));
    }
    return out;
}

std::vector<InitialLayerState> solve_initial_layer_next_order(const ScalarField& c1_base, const ScalarField& c1_first,
                                                              const std::vector<InitialLayerState>& order2,
                                                              const ScalarField& rho0, const core::Params& p) {
    if (order2.empty()) throw SequencingError("solve_initial_layer_next_order: order-2 march missing");
    std::vector<double> taus;
    std::vector<ScalarField> forcing;
    const double Kp = p.z1 * p.kappa();
    for (const auto& s : order2) {
        taus.push_back(s.tau);
        forcing.push_back(Kp * core::div_coeff_grad(c1_first, s.phi));
    }
    return solve_initial_layer(c1_base, rho0, taus, p, &forcing);
}

InitialLayerState initial_layer_at(const std::vector<InitialLayerState>& march, double tau) {
    if (march.empty()) throw InputError("initial_layer_at: empty march");
    const auto& g = march.front().rho.grid();
    if (tau <= march.front().tau) return march.front();
    if (tau > march.back().tau) return {tau, ScalarField(g), ScalarField(g)};
    auto it = std::upper_bound(march.begin(), march.end(), tau,
                               [](double t, const InitialLayerState& s) { return t < s.tau; });
    if (it == march.end()) return march.back();
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (tau - lo.tau) / (hi.tau - lo.tau);
    InitialLayerState s{tau, (1.0 - w) * lo.rho, (1.0 - w) * lo.phi};
    s.rho.axpy(w, hi.rho);
    s.phi.axpy(w, hi.phi);
    return s;
}

// ---- mixed layer ----------------------------------------------------------

XiGrid XiGrid::clustered(double xi_max, int n, double stretch) {
    if (!(xi_max > 0.0) || n < 4 || !(stretch > 0.0)) throw ParameterError("XiGrid::clustered: bad parameters");
    XiGrid g;
    g.xi.resize(n + 1);
    const double den = std::expm1(stretch);
    for (int j = 0; j <= n; ++j) g.xi[j] = xi_max * std::expm1(stretch * j / n) / den;
    g.xi[n] = xi_max;
    return g;
}

XiGrid XiGrid::uniform(double xi_max, int n) {
    if (!(xi_max > 0.0) || n < 4) throw ParameterError("XiGrid::uniform: bad parameters");
    XiGrid g;
    g.xi.resize(n + 1);
    for (int j = 0; j <= n; ++j) g.xi[j] = xi_max * j / n;
    return g;
}

namespace {

double interp_profile(const std::vector<double>& xs, const std::vector<double>& f, double x) {
    if (x < 0.0 || x >= xs.back()) return 0.0;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return (1.0 - w) * f[j - 1] + w * f[j];
}

double trapezoid(const std::vector<double>& xs, const std::vector<double>& f, std::size_t from = 0) {
    double s = 0.0;
    for (std::size_t j = from + 1; j < xs.size(); ++j) s += 0.5 * (xs[j] - xs[j - 1]) * (f[j] + f[j - 1]);
    return s;
}

template <class Get>
double mixed_at(const MixedLayerSolution& sol, double xi, double tau, Get get) {
    const auto& st = sol.states;
    if (st.empty() || tau < st.front().tau || tau > st.back().tau) return 0.0;
    auto it = std::upper_bound(st.begin(), st.end(), tau, [](double t, const MixedLayerState& s) { return t < s.tau; });
    if (it == st.begin()) return interp_profile(sol.grid.xi, get(st.front()), xi);
    if (it == st.end()) return interp_profile(sol.grid.xi, get(st.back()), xi);
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (tau - lo.tau) / (hi.tau - lo.tau);
    return (1.0 - w) * interp_profile(sol.grid.xi, get(lo), xi) + w * interp_profile(sol.grid.xi, get(hi), xi);
}

} // namespace

double MixedLayerSolution::c1_at(double xi, double tau) const {
    return mixed_at(*this, xi, tau, [](const MixedLayerState& s) -> const std::vector<double>& { return s.c1; });
}

double MixedLayerSolution::c2_at(double xi, double tau) const {
    return mixed_at(*this, xi, tau, [](const MixedLayerState& s) -> const std::vector<double>& { return s.c2; });
}

MixedLayerSolution solve_mixed_layer(const std::vector<double>& a1, const std::vector<double>& a2, double gamma1,
                                     double gamma2, const core::Params& p, const XiGrid& xi_grid,
                                     const std::vector<double>& tau_grid, Wall wall, const MixedLayerOptions& opts) {
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw ParameterError("solve_mixed_layer: gamma_i must be positive");
    if (tau_grid.empty() || a1.size() != tau_grid.size() || a2.size() != tau_grid.size())
        throw InputError("solve_mixed_layer: traces need one value per tau node");
    for (std::size_t n = 1; n < tau_grid.size(); ++n)
        if (!(tau_grid[n] > tau_grid[n - 1])) throw InputError("solve_mixed_layer: tau grid must increase");
    const auto& xi = xi_grid.xi;
    const int m = static_cast<int>(xi.size());
    if (m < 5) throw InputError("solve_mixed_layer: xi grid too small");

    const double z[2] = {p.z1, p.z2};
    const double D[2] = {p.D1, p.D2};
    const double gam[2] = {gamma1, gamma2};

    std::vector<double> ex(m);
    for (int j = 0; j < m; ++j) ex[j] = std::exp(-xi[j]);

    MixedLayerSolution sol;
    sol.wall = wall;
    sol.grid = xi_grid;

    auto make_state = [&](double tau, std::vector<double> al1, std::vector<double> al2, double b1, double b2) {
        MixedLayerState s;
        s.tau = tau;
        s.a1 = b1;
        s.a2 = b2;
        s.c1.resize(m);
        s.c2.resize(m);
        for (int j = 0; j < m; ++j) {
            s.c1[j] = al1[j] + b1 * ex[j];
            s.c2[j] = al2[j] + b2 * ex[j];
        }
        s.alpha1 = std::move(al1);
        s.alpha2 = std::move(al2);
        return s;
    };

    std::vector<double> al1(m, 0.0), al2(m, 0.0);
    if (!opts.compatible_start) {
        // c_LM(., 0) = 0 on the open half-line; the corner node keeps alpha = 0.
        for (int j = 1; j < m; ++j) {
            al1[j] = -a1[0] * ex[j];
            al2[j] = -a2[0] * ex[j];
        }
        al1[m - 1] = al2[m - 1] = 0.0;
    }
    sol.states.push_back(make_state(tau_grid[0], al1, al2, a1[0], a2[0]));

    core::BlockTridiagonal<2> sys(m, 2);
    for (std::size_t n = 1; n < tau_grid.size(); ++n) {
        const double dtau = tau_grid[n] - tau_grid[n - 1];
        const double an[2] = {a1[n], a2[n]};
        const double ap[2] = {(a1[n] - a1[n - 1]) / dtau, (a2[n] - a2[n - 1]) / dtau};
        const double r = p.z1 * an[0] + p.z2 * an[1];
        double b[2];
        for (int i = 0; i < 2; ++i) b[i] = ap[i] - D[i] * an[i] + z[i] * D[i] * gam[i] * r;
        const auto& prev = sol.states.back();
        const std::vector<double>* pa[2] = {&prev.alpha1, &prev.alpha2};

        sys.clear();
        for (int k : {0, m - 1}) {
            sys.diag(k).setIdentity();
            sys.rhs(k).setZero();
        }
        for (int j = 1; j < m - 1; ++j) {
            const double hm = xi[j] - xi[j - 1];
            const double hp = xi[j + 1] - xi[j];
            const double cm = 2.0 / (hm * (hm + hp));
            const double cp = 2.0 / (hp * (hm + hp));
            auto& L = sys.lower(j);
            auto& A = sys.diag(j);
            auto& U = sys.upper(j);
            auto& R = sys.rhs(j);
            for (int i = 0; i < 2; ++i) {
                L(i, i) = -dtau * D[i] * cm;
                U(i, i) = -dtau * D[i] * cp;
                A(i, i) = 1.0 + dtau * D[i] * (cm + cp);
                for (int k = 0; k < 2; ++k) A(i, k) += dtau * z[i] * D[i] * gam[i] * z[k];
                R(i) = (*pa[i])[j] - dtau * b[i] * ex[j];
            }
        }
        const auto x = sys.solve();
        std::vector<double> n1(m), n2(m);
        for (int j = 0; j < m; ++j) {
            n1[j] = x[j](0);
            n2[j] = x[j](1);
        }
        sol.states.push_back(make_state(tau_grid[n], std::move(n1), std::move(n2), an[0], an[1]));
    }

    // Truncation monitor: share of the profile mass in the outer tenth of [0, xi_max].
    std::size_t outer = 0;
    while (outer < xi.size() && xi[outer] < 0.9 * xi.back()) ++outer;
    double worst = 0.0, worst_tau = 0.0;
    std::vector<double> mass(m);
    for (const auto& s : sol.states) {
        for (int j = 0; j < m; ++j) mass[j] = std::abs(s.c1[j]) + std::abs(s.c2[j]);
        const double total = trapezoid(xi, mass);
        if (total <= 0.0) continue;
        const double share = trapezoid(xi, mass, outer) / total;
        if (share > worst) {
            worst = share;
            worst_tau = s.tau;
        }
    }
    if (worst > 1e-2) {
        std::ostringstream os;
        os << "mixed layer truncation: " << worst * 100.0 << "% of the profile mass lies beyond 0.9*xi_max (xi_max = "
           << xi.back() << ", tau = " << worst_tau << ")";
        if (opts.strict) throw TruncationError(os.str());
        sol.warnings.push_back(os.str());
    }
    return sol;
}

MixedLayerEnergy mixed_layer_energy(const MixedLayerSolution& sol, const std::vector<double>& a1,
                                    const std::vector<double>& a2, double gamma1, double gamma2,
                                    const core::Params& p) {
    const auto& xi = sol.grid.xi;
    const std::size_t m = xi.size();
    if (a1.size() != sol.states.size() || a2.size() != sol.states.size())
        throw InputError("mixed_layer_energy: traces need one value per state");
    MixedLayerEnergy out;
    std::vector<double> sq1(m), sq2(m);
    double forcing = 0.0;
    for (std::size_t n = 0; n < sol.states.size(); ++n) {
        const auto& s = sol.states[n];
        for (std::size_t j = 0; j < m; ++j) {
            sq1[j] = s.alpha1[j] * s.alpha1[j];
            sq2[j] = s.alpha2[j] * s.alpha2[j];
        }
        out.energy.push_back(trapezoid(xi, sq1) / (2.0 * gamma1 * p.D1) + trapezoid(xi, sq2) / (2.0 * gamma2 * p.D2));
        if (n > 0) {
            const double dtau = s.tau - sol.states[n - 1].tau;
            const double r = p.z1 * a1[n] + p.z2 * a2[n];
            const double b1 = (a1[n] - a1[n - 1]) / dtau - p.D1 * a1[n] + p.z1 * p.D1 * gamma1 * r;
            const double b2 = (a2[n] - a2[n - 1]) / dtau - p.D2 * a2[n] + p.z2 * p.D2 * gamma2 * r;
            forcing += dtau * (b1 * b1 / (8.0 * gamma1 * p.D1 * p.D1) + b2 * b2 / (8.0 * gamma2 * p.D2 * p.D2));
        }
        out.bound.push_back(out.energy.front() + forcing);
    }
    return out;
}

} // namespace npnslab::layers
