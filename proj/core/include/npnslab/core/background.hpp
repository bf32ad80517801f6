#pragma once

#include "npnslab/core/field.hpp"

namespace npnslab::core {

/// Harmonic extensions of the boundary data.
struct Background {
    ScalarField Gamma1;
    ScalarField Gamma2;
    ScalarField PhiW;
};

Background make_background(const BoundaryData& bdata, const ChannelGrid& grid);

} // namespace npnslab::core
