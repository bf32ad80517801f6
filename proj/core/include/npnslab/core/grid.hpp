#pragma once

#include <cstddef>

namespace npnslab::core {

/// Tensor grid on T^{d-1} x [0, 1]: nx periodic nodes, ny nodes including both walls.
struct ChannelGrid {
    int d = 1;
    int nx = 1;
    int ny = 65;

    ChannelGrid() = default;
    ChannelGrid(int d_, int nx_, int ny_);

    void validate() const;

    [[nodiscard]] double hx() const noexcept { return 1.0 / nx; }
    [[nodiscard]] double hy() const noexcept { return 1.0 / (ny - 1); }
    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    }
    [[nodiscard]] std::size_t index(int ix, int iy) const noexcept {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
    }
    [[nodiscard]] double x(int ix) const noexcept { return ix * hx(); }
    [[nodiscard]] double y(int iy) const noexcept { return iy * hy(); }

    friend bool operator==(const ChannelGrid&, const ChannelGrid&) = default;
};

} // namespace npnslab::core
