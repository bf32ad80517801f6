#pragma once

#include "npnslab/core/field.hpp"

namespace npnslab::core {

struct VelocityStep {
    VelocityField u;
    ScalarField p;
};

/// One step of explicit advection, implicit viscosity, projection:
/// (u* - u)/dt = -(u.grad)u + nu Lap u* + force, u* = 0 on walls, then u = P u*.
/// Pressure returned as q/dt with zero mean.
VelocityStep advance_velocity(const VelocityField& u, double dt, double nu, const VelocityField& force);

/// Same with a given advecting field and an extra explicit term, used by the
/// linearized inner hierarchy: (u* - u)/dt = rhs + nu Lap u*.
VelocityStep advance_velocity_rhs(const VelocityField& u, double dt, double nu, const VelocityField& rhs);

} // namespace npnslab::core
