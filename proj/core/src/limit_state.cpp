#include "npnslab/limit/limit_state.hpp"

namespace npnslab::limit {

core::ScalarField LimitState::c2(const core::Params& prm) const {
    core::ScalarField out(c1.grid());
    const double r = -prm.z1 / prm.z2;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r * c1[i];
    return out;
}

core::State LimitState::expanded(const core::Params& prm) const {
    return core::State{t, c1, c2(prm), u, psi, p};
}

} // namespace npnslab::limit
