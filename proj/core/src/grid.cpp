#include "npnslab/core/grid.hpp"

#include "npnslab/core/errors.hpp"

#include <string>

namespace npnslab::core {

ChannelGrid::ChannelGrid(int d_, int nx_, int ny_) : d(d_), nx(nx_), ny(ny_) { validate(); }

void ChannelGrid::validate() const {
    if (d != 1 && d != 2) throw InputError("grid: d must be 1 or 2, got " + std::to_string(d));
    if (ny < 8) throw InputError("grid: ny must be >= 8, got " + std::to_string(ny));
    if (nx < 1 || (nx & (nx - 1)) != 0) throw InputError("grid: nx must be a power of two");
    if (d == 1 && nx != 1) throw InputError("grid: d = 1 requires nx = 1");
    if (d == 2 && nx < 2) throw InputError("grid: d = 2 requires nx >= 2");
}

} // namespace npnslab::core
