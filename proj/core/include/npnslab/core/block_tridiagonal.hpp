#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace npnslab::core {

/// Block-tridiagonal system solved by block Gaussian elimination (block Thomas) with a
/// partially pivoted LU of every reduced diagonal block. B is the compile-time block
/// size or Eigen::Dynamic.
template <int B>
class BlockTridiagonal {
public:
    using Mat = Eigen::Matrix<double, B, B>;
    using Vec = Eigen::Matrix<double, B, 1>;

    BlockTridiagonal(int nblocks, int block_size)
        : n_(nblocks), bs_(block_size),
          L_(nblocks, Mat::Zero(block_size, block_size)),
          D_(nblocks, Mat::Zero(block_size, block_size)),
          U_(nblocks, Mat::Zero(block_size, block_size)),
          r_(nblocks, Vec::Zero(block_size)) {}

    [[nodiscard]] int blocks() const noexcept { return n_; }
    [[nodiscard]] int block_size() const noexcept { return bs_; }

    Mat& lower(int k) { return L_[k]; }
    Mat& diag(int k) { return D_[k]; }
    Mat& upper(int k) { return U_[k]; }
    Vec& rhs(int k) { return r_[k]; }

    void clear() {
        for (int k = 0; k < n_; ++k) {
            L_[k].setZero();
            D_[k].setZero();
            U_[k].setZero();
            r_[k].setZero();
        }
    }

    /// Solves in place of nothing; returns one vector per block. Throws std::runtime_error
    /// when a reduced block is numerically singular.
    std::vector<Vec> solve(double rcond_floor = 1e-14) const {
        std::vector<Mat> C(n_);
        std::vector<Vec> g(n_);
        Mat Dk;
        Vec rk;
        Eigen::PartialPivLU<Mat> lu;
        for (int k = 0; k < n_; ++k) {
            Dk = D_[k];
            rk = r_[k];
            if (k > 0) {
                Dk.noalias() -= L_[k] * C[k - 1];
                rk.noalias() -= L_[k] * g[k - 1];
            }
            lu.compute(Dk);
            const double rc = lu.rcond();
            if (!(rc > rcond_floor)) throw std::runtime_error("block tridiagonal solve: singular block");
            if (k + 1 < n_) C[k] = lu.solve(U_[k]);
            g[k] = lu.solve(rk);
        }
        for (int k = n_ - 2; k >= 0; --k) g[k].noalias() -= C[k] * g[k + 1];
        return g;
    }

private:
    int n_;
    int bs_;
    std::vector<Mat> L_, D_, U_;
    std::vector<Vec> r_;
};

} // namespace npnslab::core
