#pragma once

#include "npnslab/core/field.hpp"

namespace npnslab::limit {

/// Snapshot of the quasi-neutral limit. c2 is not stored: c2 = -z1 c1 / z2.
struct LimitState {
    double t = 0.0;
    core::ScalarField c1;
    core::VelocityField u;
    core::ScalarField psi;
    core::ScalarField p;

    [[nodiscard]] const core::ChannelGrid& grid() const noexcept { return c1.grid(); }
    [[nodiscard]] core::ScalarField c2(const core::Params& prm) const;
    /// Same data as a State with the implied c2.
    [[nodiscard]] core::State expanded(const core::Params& prm) const;
};

} // namespace npnslab::limit
