#include "oracles.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {
constexpr double kPi = std::numbers::pi;

int node(const ChannelGrid& g, int ix, int iy) { return iy * g.nx + ix; }
} // namespace

Eigen::MatrixXd dxx_dense(int nx) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nx, nx);
    if (nx == 1) return M;
    for (int j = 0; j < nx; ++j)
        for (int l = 0; l < nx; ++l) {
            double s = 0.0;
            for (int m = -nx / 2; m < nx / 2; ++m) {
                const double k = 2.0 * kPi * m;
                s += -k * k * std::cos(k * (j - l) / nx);
            }
            M(j, l) = s / nx;
        }
    return M;
}

Eigen::MatrixXd dx_dense(int nx) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nx, nx);
    if (nx == 1) return M;
    for (int j = 0; j < nx; ++j)
        for (int l = 0; l < nx; ++l) {
            double s = 0.0;
            for (int m = -nx / 2 + 1; m < nx / 2; ++m) {
                const double k = 2.0 * kPi * m;
                s += -k * std::sin(k * (j - l) / nx);
            }
            M(j, l) = s / nx;
        }
    return M;
}

namespace {

Eigen::MatrixXd laplacian_dense(const ChannelGrid& g) {
    const int N = g.nx * g.ny;
    const double h2 = g.hy() * g.hy();
    const Eigen::MatrixXd X = dxx_dense(g.nx);
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N, N);
    for (int iy = 1; iy < g.ny - 1; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const int r = node(g, ix, iy);
            L(r, node(g, ix, iy - 1)) += 1.0 / h2;
            L(r, r) += -2.0 / h2;
            L(r, node(g, ix, iy + 1)) += 1.0 / h2;
            for (int l = 0; l < g.nx; ++l) L(r, node(g, l, iy)) += X(ix, l);
        }
    return L;
}

ScalarField unpack(const ChannelGrid& g, const Eigen::VectorXd& v) {
    ScalarField f(g);
    for (int i = 0; i < v.size(); ++i) f[static_cast<std::size_t>(i)] = v(i);
    return f;
}

} // namespace

ScalarField dense_poisson(const ScalarField& rhs, double coeff, const BoundaryTrace& bc) {
    const auto& g = rhs.grid();
    Eigen::MatrixXd A = -coeff * laplacian_dense(g);
    Eigen::VectorXd b(g.nx * g.ny);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) b(node(g, ix, iy)) = rhs(ix, iy);
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy : {0, g.ny - 1}) {
            const int r = node(g, ix, iy);
            A.row(r).setZero();
            A(r, r) = 1.0;
            b(r) = iy == 0 ? bc.bottom[ix] : bc.top[ix];
        }
    }
    return unpack(g, A.fullPivLu().solve(b));
}

ScalarField dense_variable_elliptic(const ScalarField& a, const ScalarField& s, const BoundaryTrace& bc) {
    const auto& g = a.grid();
    const int N = g.nx * g.ny;
    const double h2 = g.hy() * g.hy();
    const Eigen::MatrixXd Dx = dx_dense(g.nx);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
    Eigen::VectorXd b(N);
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            const int r = node(g, ix, iy);
            if (iy == 0 || iy == g.ny - 1) {
                A(r, r) = 1.0;
                b(r) = iy == 0 ? bc.bottom[ix] : bc.top[ix];
                continue;
            }
            const double ap = 0.5 * (a(ix, iy) + a(ix, iy + 1)) / h2;
            const double am = 0.5 * (a(ix, iy) + a(ix, iy - 1)) / h2;
            A(r, node(g, ix, iy + 1)) += ap;
            A(r, node(g, ix, iy - 1)) += am;
            A(r, r) -= ap + am;
            for (int m = 0; m < g.nx; ++m)
                for (int l = 0; l < g.nx; ++l) A(r, node(g, l, iy)) += Dx(ix, m) * a(m, iy) * Dx(m, l);
            b(r) = s(ix, iy);
        }
    return unpack(g, A.fullPivLu().solve(b));
}

ScalarField dense_laplacian_apply(const ScalarField& f) {
    const auto& g = f.grid();
    Eigen::VectorXd v(g.nx * g.ny);
    for (int i = 0; i < v.size(); ++i) v(i) = f[static_cast<std::size_t>(i)];
    return unpack(g, laplacian_dense(g) * v);
}

DirectMixed direct_mixed_layer(const std::vector<double>& a1, const std::vector<double>& a2, double gamma1,
                               double gamma2, double z1, double z2, double D1, double D2, double xi_max, int n,
                               const std::vector<double>& tau) {
    DirectMixed out;
    const int m = n + 1;
    const double h = xi_max / n;
    out.xi.resize(m);
    for (int j = 0; j < m; ++j) out.xi[j] = j * h;
    std::vector<double> c1(m), c2(m);
    for (int j = 0; j < m; ++j) {
        c1[j] = a1[0] * std::exp(-out.xi[j]);
        c2[j] = a2[0] * std::exp(-out.xi[j]);
    }
    c1[m - 1] = c2[m - 1] = 0.0;
    out.c1.push_back(c1);
    out.c2.push_back(c2);
    const double z[2] = {z1, z2}, D[2] = {D1, D2}, gm[2] = {gamma1, gamma2};
    for (std::size_t k = 1; k < tau.size(); ++k) {
        const double dt = tau[k] - tau[k - 1];
        std::vector<Eigen::Triplet<double>> T;
        Eigen::VectorXd b(2 * m);
        auto idx = [m](int i, int j) { return i * m + j; };
        const std::vector<double>* prev[2] = {&out.c1.back(), &out.c2.back()};
        const double wall[2] = {a1[k], a2[k]};
        for (int i = 0; i < 2; ++i) {
            T.emplace_back(idx(i, 0), idx(i, 0), 1.0);
            b(idx(i, 0)) = wall[i];
            T.emplace_back(idx(i, m - 1), idx(i, m - 1), 1.0);
            b(idx(i, m - 1)) = 0.0;
            for (int j = 1; j < m - 1; ++j) {
                // c_t = D c'' - z D gamma (z1 c1 + z2 c2)
                T.emplace_back(idx(i, j), idx(i, j), 1.0 + 2.0 * dt * D[i] / (h * h));
                T.emplace_back(idx(i, j), idx(i, j - 1), -dt * D[i] / (h * h));
                T.emplace_back(idx(i, j), idx(i, j + 1), -dt * D[i] / (h * h));
                for (int q = 0; q < 2; ++q) T.emplace_back(idx(i, j), idx(q, j), dt * z[i] * D[i] * gm[i] * z[q]);
                b(idx(i, j)) = (*prev[i])[j];
            }
        }
        Eigen::SparseMatrix<double> A(2 * m, 2 * m);
        A.setFromTriplets(T.begin(), T.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw std::runtime_error("direct_mixed_layer: factorization failed");
        const Eigen::VectorXd x = lu.solve(b);
        for (int j = 0; j < m; ++j) {
            c1[j] = x(idx(0, j));
            c2[j] = x(idx(1, j));
        }
        out.c1.push_back(c1);
        out.c2.push_back(c2);
    }
    return out;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int n) {
    // Nodes by Newton iteration on P_n.
    double s = 0.0;
    for (int i = 1; i <= n; ++i) {
        double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        s += w * f(0.5 * (b - a) * x + 0.5 * (b + a));
    }
    return 0.5 * (b - a) * s;
}

double gauss_composite(const std::function<double(double)>& f, double a, double b, int panels, int n) {
    double s = 0.0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k) s += gauss_legendre(f, a + k * h, a + (k + 1) * h, n);
    return s;
}

} // namespace oracle
