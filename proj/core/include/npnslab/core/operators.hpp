#pragma once

#include "npnslab/core/field.hpp"

namespace npnslab::core {

// Spectral in x', second-order differences in y. Wall rows of y-derivatives use
// second-order one-sided stencils so that every operator returns values on all nodes.

ScalarField dx(const ScalarField& f);
ScalarField dxx(const ScalarField& f);
ScalarField dy(const ScalarField& f);
ScalarField dyy(const ScalarField& f);
ScalarField dxy(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
VelocityField gradient(const ScalarField& f);
ScalarField divergence(const VelocityField& u);

/// (a . grad) f
ScalarField advect(const VelocityField& a, const ScalarField& f);
/// (a . grad) u, componentwise.
VelocityField advect(const VelocityField& a, const VelocityField& u);

/// div(a grad f) in conservative form: x' part D diag(a) D, y part with midpoint
/// averages of a. Interior rows only; wall rows are zero.
ScalarField div_coeff_grad(const ScalarField& a, const ScalarField& f);

/// Cyclic shift by k cells along x'.
ScalarField shift_x(const ScalarField& f, int k);
VelocityField shift_x(const VelocityField& u, int k);

/// Zeroes the wall rows.
void zero_walls(ScalarField& f);

} // namespace npnslab::core
