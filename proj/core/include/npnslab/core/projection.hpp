#pragma once

#include "npnslab/core/field.hpp"

namespace npnslab::core {

/// Divergence used by the projection: spectral in x', centered in y, interior rows
/// (walls zero).
ScalarField discrete_divergence(const VelocityField& u);

struct Projected {
    VelocityField u;
    ScalarField q;  // potential removed, zero mean
};

/// Orthogonal discrete Helmholtz projection u - G q with q from the exact pressure
/// system B G q = B u (per Fourier mode, two interleaved tridiagonal systems in y).
Projected project_with_potential(const VelocityField& u);
VelocityField project_div_free(const VelocityField& u);

/// Discrete gradient G q adjoint to the projection divergence (q taken zero on walls).
VelocityField projection_gradient(const ScalarField& q);

} // namespace npnslab::core
