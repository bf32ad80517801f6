#include "npnslab/diagnostics/diagnostics.hpp"

#include "npnslab/core/norms.hpp"
#include "npnslab/core/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace npnslab::diag {

using core::ScalarField;

double phi_entropy(double s) {
    if (!(s > 0.0)) throw DomainError("phi_entropy: argument must be positive, got " + std::to_string(s));
    return s * std::log(s) - s + 1.0;
}

namespace {

void require_positive(const ScalarField& c, const char* what) {
    if (!(c.min() > 0.0)) throw DomainError(std::string(what) + ": non-positive concentration");
}

// sum over nodes of a(i)*phi(b(i)/a(i)) as a field
ScalarField relative_entropy_density(const ScalarField& ref, const ScalarField& c) {
    ScalarField out(c.grid());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = ref[i] * phi_entropy(c[i] / ref[i]);
    return out;
}

double dot_grad(const core::VelocityField& a, const core::VelocityField& b, const ScalarField* weight) {
    ScalarField dens = hadamard(a.v, b.v) + hadamard(a.w, b.w);
    if (weight) dens = hadamard(*weight, dens);
    return core::integrate(dens);
}

} // namespace

double free_energy(const core::State& s, const core::Background& bg, const core::Params& p) {
    require_positive(s.c1, "free_energy");
    require_positive(s.c2, "free_energy");
    double E = core::integrate(relative_entropy_density(bg.Gamma1, s.c1)) +
               core::integrate(relative_entropy_density(bg.Gamma2, s.c2));
    E += 0.5 * p.eps * p.eps * core::grad_sq(s.psi);
    const double un = core::l2_norm(s.u);
    E += 0.5 * un * un;
    return E;
}

Potentials electrochemical_potentials(const core::State& s, const ScalarField& phiW, const core::Params& p) {
    require_positive(s.c1, "electrochemical_potentials");
    require_positive(s.c2, "electrochemical_potentials");
    Potentials out{ScalarField(s.grid()), ScalarField(s.grid())};
    for (std::size_t i = 0; i < s.c1.size(); ++i) {
        const double phi = s.psi[i] + phiW[i];
        out.mu1[i] = std::log(s.c1[i]) + p.z1 * phi;
        out.mu2[i] = std::log(s.c2[i]) + p.z2 * phi;
    }
    return out;
}

Potentials reference_potentials(const core::Background& bg, const core::Params& p) {
    require_positive(bg.Gamma1, "reference_potentials");
    require_positive(bg.Gamma2, "reference_potentials");
    Potentials out{ScalarField(bg.PhiW.grid()), ScalarField(bg.PhiW.grid())};
    for (std::size_t i = 0; i < bg.PhiW.size(); ++i) {
        out.mu1[i] = std::log(bg.Gamma1[i]) + p.z1 * bg.PhiW[i];
        out.mu2[i] = std::log(bg.Gamma2[i]) + p.z2 * bg.PhiW[i];
    }
    return out;
}

IdentityTerms identity_terms(const core::State& s, const core::Background& bg, const core::Params& p) {
    IdentityTerms t;
    t.viscous = p.nu * core::grad_sq(s.u);
    const Potentials mu = electrochemical_potentials(s, bg.PhiW, p);
    const Potentials ms = reference_potentials(bg, p);
    const auto gm1 = core::gradient(mu.mu1), gm2 = core::gradient(mu.mu2);
    const auto gs1 = core::gradient(ms.mu1), gs2 = core::gradient(ms.mu2);
    t.chemical = p.D1 * dot_grad(gm1, gm1, &s.c1) + p.D2 * dot_grad(gm2, gm2, &s.c2);
    double rhs = p.D1 * dot_grad(gm1, gs1, &s.c1) + p.D2 * dot_grad(gm2, gs2, &s.c2);
    // advective work of the boundary data
    ScalarField lg1(s.grid()), lg2(s.grid());
    for (std::size_t i = 0; i < lg1.size(); ++i) {
        lg1[i] = std::log(bg.Gamma1[i]);
        lg2[i] = std::log(bg.Gamma2[i]);
    }
    const ScalarField rho = s.charge(p);
    rhs -= dot_grad(s.u, core::gradient(lg1), &s.c1);
    rhs -= dot_grad(s.u, core::gradient(lg2), &s.c2);
    rhs -= dot_grad(s.u, core::gradient(bg.PhiW), &rho);
    t.rhs = rhs;
    return t;
}

std::vector<double> dissipation_identity_residual(const std::vector<double>& t, const std::vector<double>& E,
                                                  const std::vector<IdentityTerms>& terms) {
    const std::size_t n = t.size();
    if (n < 3 || E.size() != n || terms.size() != n)
        throw InputError("dissipation_identity_residual: need at least 3 snapshots");
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double dEdt;
        if (k == 0) {
            const double h1 = t[1] - t[0], h2 = t[2] - t[1];
            dEdt = (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) * E[0] + ((h1 + h2) / (h1 * h2)) * E[1] -
                   (h1 / (h2 * (h1 + h2))) * E[2];
        } else if (k == n - 1) {
            const double h1 = t[n - 2] - t[n - 3], h2 = t[n - 1] - t[n - 2];
            dEdt = (h2 / (h1 * (h1 + h2))) * E[n - 3] - ((h1 + h2) / (h1 * h2)) * E[n - 2] +
                   ((2.0 * h2 + h1) / (h2 * (h1 + h2))) * E[n - 1];
        } else {
            dEdt = (E[k + 1] - E[k - 1]) / (t[k + 1] - t[k - 1]);
        }
        const double diss = terms[k].viscous + terms[k].chemical;
        const double raw = dEdt + diss - terms[k].rhs;
        out[k] = diss > 0.0 ? raw / diss : raw;
    }
    return out;
}

std::vector<double> dissipation_identity_residual(const std::vector<core::State>& snapshots,
                                                  const core::Background& bg, const core::Params& p) {
    if (snapshots.size() < 3) throw InputError("dissipation_identity_residual: need at least 3 snapshots");
    std::vector<double> t, E;
    std::vector<IdentityTerms> terms;
    for (const auto& s : snapshots) {
        t.push_back(s.t);
        E.push_back(free_energy(s, bg, p));
        terms.push_back(identity_terms(s, bg, p));
    }
    return dissipation_identity_residual(t, E, terms);
}

ModulatedEnergy modulated_energy(const core::State& se, const limit::LimitState& sl, const core::Params& p) {
    if (!(se.grid() == sl.grid())) throw InputError("modulated_energy: grid mismatch");
    require_positive(sl.c1, "modulated_energy");
    require_positive(se.c1, "modulated_energy");
    require_positive(se.c2, "modulated_energy");
    const ScalarField c2l = sl.c2(p);
    require_positive(c2l, "modulated_energy");
    ModulatedEnergy m;
    m.H = core::integrate(relative_entropy_density(sl.c1, se.c1)) + core::integrate(relative_entropy_density(c2l, se.c2));
    m.H += 0.5 * p.eps * p.eps * core::grad_sq(se.psi);
    const core::VelocityField du = se.u - sl.u;
    const double dun = core::l2_norm(du);
    m.H += 0.5 * dun * dun;

    ScalarField inv1(se.grid()), inv2(se.grid());
    for (std::size_t i = 0; i < inv1.size(); ++i) {
        inv1[i] = 1.0 / se.c1[i];
        inv2[i] = 1.0 / se.c2[i];
    }
    const auto g1 = core::gradient(se.c1 - sl.c1);
    const auto g2 = core::gradient(se.c2 - c2l);
    const auto gp = core::gradient(se.psi - sl.psi);
    m.Theta = p.D1 * dot_grad(g1, g1, &inv1) + p.D2 * dot_grad(g2, g2, &inv2);
    m.Theta += p.z1 * p.z1 * p.D1 * dot_grad(gp, gp, &se.c1) + p.z2 * p.z2 * p.D2 * dot_grad(gp, gp, &se.c2);
    const ScalarField rho = se.charge(p);
    const double rn = core::l2_norm(rho) / p.eps;
    m.Theta += p.D_star() * rn * rn;
    m.Theta += p.nu * core::grad_sq(du);
    return m;
}

DataBounds data_bounds(const core::State& init, const core::BoundaryData& bdata) {
    auto lo = [](const core::BoundaryTrace& t) {
        return std::min(*std::min_element(t.bottom.begin(), t.bottom.end()), *std::min_element(t.top.begin(), t.top.end()));
    };
    auto hi = [](const core::BoundaryTrace& t) {
        return std::max(*std::max_element(t.bottom.begin(), t.bottom.end()), *std::max_element(t.top.begin(), t.top.end()));
    };
    DataBounds b;
    b.lambda1 = std::min(lo(bdata.gamma1), init.c1.min());
    b.Lambda1 = std::max(hi(bdata.gamma1), init.c1.max());
    b.lambda2 = std::min(lo(bdata.gamma2), init.c2.min());
    b.Lambda2 = std::max(hi(bdata.gamma2), init.c2.max());
    return b;
}

DataBounds data_bounds(const limit::LimitState& init, const core::BoundaryData& bdata, const core::Params& p) {
    return data_bounds(init.expanded(p), bdata);
}

FieldExtrema extrema(const core::State& s) { return FieldExtrema{s.c1.min(), s.c1.max(), s.c2.min(), s.c2.max()}; }

namespace {
void scan(const ScalarField& c, double lo, double hi, double tol, int species, MaxPrincipleResult& r) {
    const auto& g = c.grid();
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const double v = c(ix, iy);
            const double out = std::max(lo - tol - v, v - hi - tol);
            if (out > 0.0 && out > r.violation) {
                r.pass = false;
                r.violation = out;
                r.species = species;
                r.ix = ix;
                r.iy = iy;
            }
        }
}
} // namespace

MaxPrincipleResult max_principle_check(const core::State& s, const DataBounds& b, double tol) {
    MaxPrincipleResult r;
    r.extrema = extrema(s);
    scan(s.c1, b.lambda1, b.Lambda1, tol, 1, r);
    scan(s.c2, b.lambda2, b.Lambda2, tol, 2, r);
    return r;
}

MaxPrincipleResult max_principle_check(const limit::LimitState& s, const DataBounds& b, double tol,
                                       const core::Params& p) {
    return max_principle_check(s.expanded(p), b, tol);
}

double max_principle_tolerance(double dt, double hy) { return 1e-6 + dt + hy * hy; }

LowerBoundCheck dissipation_lower_bound(const core::State& s, const core::Background& bg, const core::Params& p,
                                        const DataBounds& b) {
    LowerBoundCheck r;
    const ScalarField phi = s.psi + bg.PhiW;
    const double rn = core::l2_norm(s.charge(p)) / p.eps;
    r.lhs = core::grad_sq(s.c1) + core::grad_sq(s.c2) + core::grad_sq(phi) + rn * rn;
    r.dissipation = identity_terms(s, bg, p).chemical;
    const double Ds = p.D_star();
    r.M = 1.0 / std::min({2.0 * Ds, Ds * (p.z1 * p.z1 + p.z2 * p.z2) * b.lambda(), Ds / b.Lambda()});
    r.holds = r.lhs <= r.M * r.dissipation * (1.0 + 1e-12) + 1e-14;
    return r;
}

double growth_constant_required(const std::vector<double>& t, const std::vector<double>& E,
                                const std::vector<IdentityTerms>& terms) {
    const std::size_t n = t.size();
    if (n < 2 || E.size() != n || terms.size() != n) throw InputError("growth_constant_required: bad series");
    double acc_v = 0.0, acc_c = 0.0, Mreq = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double dt = t[k] - t[k - 1];
        acc_v += 0.5 * dt * (terms[k].viscous + terms[k - 1].viscous);
        acc_c += 0.5 * dt * (terms[k].chemical + terms[k - 1].chemical);
        const double lhs = E[k] + 0.5 * acc_v + 0.5 * acc_c;
        const double tk = t[k] - t[0];
        if (tk > 0.0) Mreq = std::max(Mreq, (lhs * std::exp(-tk) - E[0]) / tk);
    }
    return Mreq;
}

RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 3) throw InputError("rate_fit: insufficient points for fit (need >= 3)");
    double sx = 0.0, sy = 0.0;
    for (const auto& [e, err] : pairs) {
        if (!(e > 0.0) || !(err > 0.0) || !std::isfinite(e) || !std::isfinite(err))
            throw InputError("rate_fit: entries must be positive and finite");
        sx += std::log(e);
        sy += std::log(err);
    }
    const double n = static_cast<double>(pairs.size());
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [e, err] : pairs) {
        const double dx = std::log(e) - mx, dy = std::log(err) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw InputError("rate_fit: epsilon values must not all coincide");
    RateFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

} // namespace npnslab::diag
