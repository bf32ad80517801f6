#include "npnslab/core/background.hpp"

#include "npnslab/core/elliptic.hpp"

namespace npnslab::core {

Background make_background(const BoundaryData& bdata, const ChannelGrid& grid) {
    return Background{harmonic_extension(bdata.gamma1, grid), harmonic_extension(bdata.gamma2, grid),
                      harmonic_extension(bdata.W, grid)};
}

} // namespace npnslab::core
