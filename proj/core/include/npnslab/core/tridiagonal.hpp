#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace npnslab::core {

/// Thomas algorithm: a[k] x[k-1] + b[k] x[k] + c[k] x[k+1] = d[k]. a[0], c[n-1] ignored.
/// Overwrites d with the solution. Intended for diagonally dominant systems.
template <typename T, typename S = double>
void solve_tridiagonal(const std::vector<S>& a, const std::vector<S>& b, const std::vector<S>& c,
                       std::vector<T>& d) {
    const std::size_t n = d.size();
    if (n == 0) return;
    std::vector<S> cp(n);
    S beta = b[0];
    if (beta == S(0)) throw std::runtime_error("tridiagonal solve: zero pivot");
    cp[0] = c[0] / beta;
    d[0] = d[0] / beta;
    for (std::size_t k = 1; k < n; ++k) {
        beta = b[k] - a[k] * cp[k - 1];
        if (beta == S(0)) throw std::runtime_error("tridiagonal solve: zero pivot");
        cp[k] = (k + 1 < n ? c[k] : S(0)) / beta;
        d[k] = (d[k] - a[k] * d[k - 1]) / beta;
    }
    for (std::size_t k = n - 1; k-- > 0;) d[k] -= cp[k] * d[k + 1];
}

} // namespace npnslab::core
