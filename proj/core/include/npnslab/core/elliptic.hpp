#pragma once

#include "npnslab/core/field.hpp"

namespace npnslab::core {

/// Discrete harmonic function with the given wall trace.
ScalarField harmonic_extension(const BoundaryTrace& bc, const ChannelGrid& grid);

/// -coeff * Lap f = rhs on interior nodes, f = bc on the walls. Direct solve per
/// transverse Fourier mode.
ScalarField solve_poisson(const ScalarField& rhs, double coeff, const BoundaryTrace& bc);

/// (alpha - beta Lap) f = rhs on interior nodes, f = bc on the walls; alpha >= 0, beta > 0.
ScalarField solve_helmholtz(double alpha, double beta, const ScalarField& rhs, const BoundaryTrace& bc);

/// div(a grad f) = s on interior nodes (conservative stencil of div_coeff_grad),
/// f = bc on the walls, a > 0. Direct block-tridiagonal solve.
ScalarField solve_variable_elliptic(const ScalarField& a, const ScalarField& s, const BoundaryTrace& bc);

/// Zero trace sized for the grid.
BoundaryTrace zero_trace(const ChannelGrid& grid);

} // namespace npnslab::core
