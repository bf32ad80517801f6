#pragma once

#include "npnslab/core/background.hpp"
#include "npnslab/core/errors.hpp"
#include "npnslab/core/field.hpp"
#include "npnslab/limit/limit_state.hpp"

#include <limits>
#include <utility>
#include <vector>

namespace npnslab::diag {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One row of the diagnostics time series.
struct DiagnosticsRecord {
    double t = 0.0;
    double E = kNaN;
    double H = kNaN;
    double Theta = kNaN;
    FieldExtrema extrema;
    double dissipation_residual = kNaN;
};

/// s log s - s + 1; DomainError for s <= 0.
double phi_entropy(double s);

/// sum_i int Gamma_i phi(c_i / Gamma_i) + eps^2/2 |grad psi|^2 + 1/2 |u|^2.
double free_energy(const core::State& s, const core::Background& bg, const core::Params& p);

struct Potentials {
    core::ScalarField mu1;
    core::ScalarField mu2;
};

/// mu_i = log c_i + z_i (psi + Phi_W).
Potentials electrochemical_potentials(const core::State& s, const core::ScalarField& phiW, const core::Params& p);
/// mu*_i = log Gamma_i + z_i Phi_W.
Potentials reference_potentials(const core::Background& bg, const core::Params& p);

/// Both sides of the energy dissipation identity at one snapshot, dE/dt excluded.
struct IdentityTerms {
    double viscous = 0.0;   // nu |grad u|^2
    double chemical = 0.0;  // sum D_i int c_i |grad mu_i|^2
    double rhs = 0.0;       // work of the boundary data
};
IdentityTerms identity_terms(const core::State& s, const core::Background& bg, const core::Params& p);

/// Residual of the identity at every snapshot: dE/dt from centered differences
/// (second-order one-sided at the ends), normalized by the dissipation magnitude
/// (raw value when the dissipation vanishes). Needs >= 3 snapshots.
std::vector<double> dissipation_identity_residual(const std::vector<core::State>& snapshots,
                                                  const core::Background& bg, const core::Params& p);
/// Same from precomputed per-snapshot data.
std::vector<double> dissipation_identity_residual(const std::vector<double>& t, const std::vector<double>& E,
                                                  const std::vector<IdentityTerms>& terms);

struct ModulatedEnergy {
    double H = 0.0;
    double Theta = 0.0;
};
ModulatedEnergy modulated_energy(const core::State& se, const limit::LimitState& sl, const core::Params& p);

/// Data bounds: lambda_i = min(inf gamma_i, inf c_i(0)), Lambda_i = max(sup gamma_i, sup c_i(0)).
struct DataBounds {
    double lambda1 = 0.0, Lambda1 = 0.0;
    double lambda2 = 0.0, Lambda2 = 0.0;
    [[nodiscard]] double lambda() const noexcept { return lambda1 < lambda2 ? lambda1 : lambda2; }
    [[nodiscard]] double Lambda() const noexcept { return Lambda1 > Lambda2 ? Lambda1 : Lambda2; }
};
DataBounds data_bounds(const core::State& init, const core::BoundaryData& bdata);
DataBounds data_bounds(const limit::LimitState& init, const core::BoundaryData& bdata, const core::Params& p);

struct MaxPrincipleResult {
    bool pass = true;
    FieldExtrema extrema;
    int species = 0;  // 1 or 2 for the worst violation, 0 if none
    int ix = -1;
    int iy = -1;
    double violation = 0.0;  // distance outside the admissible band
};
MaxPrincipleResult max_principle_check(const core::State& s, const DataBounds& b, double tol);
MaxPrincipleResult max_principle_check(const limit::LimitState& s, const DataBounds& b, double tol,
                                       const core::Params& p);

FieldExtrema extrema(const core::State& s);

/// Tolerance used for accepted trajectories: 1e-6 + (dt + h^2).
double max_principle_tolerance(double dt, double hy);

/// |grad c1|^2 + |grad c2|^2 + |grad psi + grad Phi_W|^2 + |rho/eps|^2 <= M sum D_i int c_i |grad mu_i|^2
/// with M = 1 / min(2 D*, D*(z1^2 + z2^2) lambda, D*/Lambda).
struct LowerBoundCheck {
    double lhs = 0.0;
    double dissipation = 0.0;
    double M = 0.0;
    bool holds = true;
};
LowerBoundCheck dissipation_lower_bound(const core::State& s, const core::Background& bg, const core::Params& p,
                                        const DataBounds& b);

/// Smallest M with E(t) + (nu/2) int |grad u|^2 + (1/2) int sum D_i c_i |grad mu_i|^2 <= (E(0) + M t) e^t
/// along the series; an empirical calibration of the growth inequality, reported not enforced.
double growth_constant_required(const std::vector<double>& t, const std::vector<double>& E,
                                const std::vector<IdentityTerms>& terms);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
/// Least squares of log(error) against log(eps). >= 3 positive pairs.
RateFit rate_fit(const std::vector<std::pair<double, double>>& pairs);

} // namespace npnslab::diag
