#include "npnslab/core/navier_stokes.hpp"

#include "npnslab/core/elliptic.hpp"
#include "npnslab/core/operators.hpp"
#include "npnslab/core/projection.hpp"

namespace npnslab::core {

VelocityStep advance_velocity_rhs(const VelocityField& u, double dt, double nu, const VelocityField& rhs) {
    const auto& g = u.grid();
    const BoundaryTrace zero = zero_trace(g);
    const double a = 1.0 / dt;
    VelocityField r = a * u;
    r += rhs;
    VelocityField star(solve_helmholtz(a, nu, r.v, zero), solve_helmholtz(a, nu, r.w, zero));
    Projected pr = project_with_potential(star);
    pr.q *= a;
    return VelocityStep{std::move(pr.u), std::move(pr.q)};
}

VelocityStep advance_velocity(const VelocityField& u, double dt, double nu, const VelocityField& force) {
    VelocityField rhs = force;
    rhs -= advect(u, u);
    return advance_velocity_rhs(u, dt, nu, rhs);
}

} // namespace npnslab::core
