#include "oracles.hpp"
#include "test_util.hpp"

#include "npnslab/cli/experiment.hpp"
#include "npnslab/core/elliptic.hpp"
#include "npnslab/core/norms.hpp"
#include "npnslab/core/operators.hpp"
#include "npnslab/layers/composite.hpp"
#include "npnslab/layers/layers.hpp"
#include "npnslab/limit/limit.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace npnslab;
using namespace npnslab::core;
using namespace npnslab::layers;
using testutil::max_diff;

namespace {
constexpr double pi = std::numbers::pi;

Params params(double z1, double z2, double D1, double D2, double eps = 0.1) {
    Params p;
    p.z1 = z1;
    p.z2 = z2;
    p.D1 = D1;
    p.D2 = D2;
    p.eps = eps;
    return p;
}

std::vector<double> tau_grid(double tau_end, int n) {
    std::vector<double> t(n + 1);
    for (int k = 0; k <= n; ++k) t[k] = tau_end * k / n;
    return t;
}
} // namespace

TEST(FastVariables, Definitions) {
    const auto fv = fast_variables(0.02, 0.3, 0.1);
    EXPECT_DOUBLE_EQ(fv.tau, 2.0);
    EXPECT_DOUBLE_EQ(fv.xi, 3.0);
    EXPECT_DOUBLE_EQ(fv.eta, 7.0);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const auto v = fast_variables(u(rng), u(rng), 0.01 + u(rng));
        EXPECT_GE(v.tau, 0.0);
        EXPECT_GE(v.xi, 0.0);
        EXPECT_GE(v.eta, 0.0);
    }
}

TEST(Cutoffs, PlateausAndMirror) {
    for (int k = 0; k <= 1000; ++k) {
        const double y = k / 1000.0;
        if (y <= 0.25) EXPECT_EQ(cutoff_f(y), 1.0);
        if (y >= 0.5) EXPECT_EQ(cutoff_f(y), 0.0);
        EXPECT_GE(cutoff_f(y), 0.0);
        EXPECT_LE(cutoff_f(y), 1.0);
        EXPECT_DOUBLE_EQ(cutoff_g(y), cutoff_f(1.0 - y));
    }
    // monotone blend with flat joins
    for (int k = 1; k <= 1000; ++k) EXPECT_LE(cutoff_f(0.25 + 0.25 * k / 1000.0), cutoff_f(0.25 + 0.25 * (k - 1) / 1000.0));
    // two vanishing derivatives at each join: the deviation from the plateau scales like h^3
    const double h = 1e-3;
    EXPECT_NEAR((1.0 - cutoff_f(0.25 + h)) / (1.0 - cutoff_f(0.25 + h / 2)), 8.0, 0.05);
    EXPECT_NEAR(cutoff_f(0.5 - h) / cutoff_f(0.5 - h / 2), 8.0, 0.05);
}

TEST(BoundaryLayer, WallValueIsLaplacianTrace) {
    const auto p = params(2, -1, 2, 1);
    const auto bl = boundary_layer(Wall::left, {0.7, -1.3}, {1.0, 2.0}, p);
    EXPECT_DOUBLE_EQ(bl.rho(0, 0.0), 0.7);
    EXPECT_DOUBLE_EQ(bl.rho(1, 0.0), -1.3);
    EXPECT_NEAR(p.z1 * bl.c1(1, 0.0) + p.z2 * bl.c2(1, 0.0), -1.3, 1e-15);
}

TEST(BoundaryLayer, SymmetricExample) {
    const auto p = params(1, -1, 1, 1);
    const auto bl = boundary_layer(Wall::right, {1.0}, {2.0}, p);
    EXPECT_DOUBLE_EQ(bl.rate[0], 2.0);
    EXPECT_DOUBLE_EQ(bl.c1(0, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(bl.c2(0, 0.0), -0.5);
    EXPECT_DOUBLE_EQ(bl.phi(0, 0.0), -0.25);
    EXPECT_EQ(bl.velocity(0, 0.0), 0.0);
}

TEST(BoundaryLayer, DecaysAndPairs) {
    const auto p = params(2, -1, 2, 1);
    const auto bl = boundary_layer(Wall::left, {0.9}, {1.5}, p);
    EXPECT_LT(std::abs(bl.rho(0, 60.0)), 1e-30);
    EXPECT_LT(std::abs(bl.phi(0, 60.0)), 1e-30);
    for (double s = 0.0; s < 10.0; s += 0.37) EXPECT_EQ(bl.c1(0, s), -bl.c2(0, s));
    EXPECT_THROW(boundary_layer(Wall::left, {1.0}, {0.0}, p), ParameterError);
    EXPECT_THROW(boundary_layer(Wall::left, {1.0, 2.0}, {1.0}, p), InputError);
}

TEST(BoundaryLayer, ClosedFormSatisfiesLayerSystem) {
    for (const auto& p : {params(1, -1, 1, 1), params(2, -1, 2, 1), params(1, -2, 3, 1)})
        for (double g1 : {0.5, 1.0, 1.5})
            EXPECT_LE(cli::closed_form_layer_residual(0.8, g1, p), 1e-8);
    // independent check with analytic second derivatives: c'' = r^2 c, Phi'' = r^2 Phi
    const auto p = params(2, -1, 2, 1);
    const auto bl = boundary_layer(Wall::left, {0.8}, {1.5}, p);
    const double r2 = bl.rate[0] * bl.rate[0];
    for (double s = 0.0; s < 8.0; s += 0.5) {
        EXPECT_NEAR(r2 * bl.c1(0, s) + p.z1 * 1.5 * r2 * bl.phi(0, s), 0.0, 1e-14);
        EXPECT_NEAR(-r2 * bl.phi(0, s) - bl.rho(0, s), 0.0, 1e-14);
    }
}

TEST(InitialLayer, ZeroData) {
    const ChannelGrid g(2, 4, 17);
    const auto p = params(2, -1, 2, 1);
    const auto march = solve_initial_layer(ScalarField(g, 1.0), ScalarField(g), tau_grid(1.0, 20), p);
    ASSERT_EQ(march.size(), 21u);
    for (const auto& s : march) {
        EXPECT_EQ(s.rho.max_abs(), 0.0);
        EXPECT_EQ(s.phi.max_abs(), 0.0);
    }
}

TEST(InitialLayer, ConstantBackgroundMatchesExponential) {
    const ChannelGrid g(1, 1, 65);
    const auto p = params(2, -1, 2, 1);
    const double cbar = 1.3, Kp = p.z1 * p.kappa();
    const auto rho0 = ScalarField::from_function(g, [](double, double y) { return std::sin(pi * y) + 0.5 * y; });
    std::vector<double> err;
    for (int n : {100, 200, 400}) {
        const auto march = solve_initial_layer(ScalarField(g, cbar), rho0, tau_grid(0.5, n), p);
        double e = 0.0;
        for (const auto& s : march) {
            const double exact = std::exp(-Kp * cbar * s.tau);
            for (std::size_t i = 0; i < s.rho.size(); ++i) e = std::max(e, std::abs(s.rho[i] - rho0[i] * exact));
        }
        err.push_back(e);
        // the discrete march is exactly geometric
        const double dtau = 0.5 / n;
        const auto& last = march.back();
        for (std::size_t i = 0; i < last.rho.size(); ++i)
            EXPECT_NEAR(last.rho[i], rho0[i] * std::pow(1.0 + dtau * Kp * cbar, -n), 1e-12);
    }
    for (std::size_t k = 1; k < err.size(); ++k) EXPECT_NEAR(err[k - 1] / err[k], 2.0, 0.1);
}

TEST(InitialLayer, PoissonRelationAndConstraint) {
    const ChannelGrid g(2, 8, 33);
    const auto p = params(2, -1, 3, 1);
    const auto c = ScalarField::from_function(g, [](double x, double y) { return 1.0 + 0.5 * y + 0.2 * std::sin(pi * y) * std::cos(2 * pi * x); });
    const auto rho0 = ScalarField::from_function(g, [](double x, double y) { return std::cos(pi * y) * (1 + 0.3 * std::sin(2 * pi * x)); });
    const auto march = solve_initial_layer(c, rho0, tau_grid(1.0, 100), p);
    for (const auto& s : march) {
        auto lap = laplacian(s.phi);
        for (int iy = 1; iy < g.ny - 1; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) EXPECT_NEAR(-lap(ix, iy), s.rho(ix, iy), 1e-9);
        for (int ix = 0; ix < g.nx; ++ix) {
            EXPECT_EQ(s.phi(ix, 0), 0.0);
            EXPECT_EQ(s.phi(ix, g.ny - 1), 0.0);
        }
        const auto c1 = initial_layer_c1(s, p), c2 = initial_layer_c2(s, p);
        for (std::size_t i = 0; i < c1.size(); ++i) {
            EXPECT_NEAR(p.D2 * c1[i] + p.D1 * c2[i], 0.0, 1e-10);
            EXPECT_NEAR(p.z1 * c1[i] + p.z2 * c2[i], s.rho[i], 1e-12);
        }
    }
}

TEST(InitialLayer, GradientPotentialDecays) {
    const ChannelGrid g(1, 1, 129);
    const auto p = params(2, -1, 2, 1);
    const auto c = ScalarField::from_function(g, [](double, double y) { return 1.0 + 0.5 * y; });
    const auto rho0 = ScalarField::from_function(g, [](double, double y) { return std::sin(pi * y) + std::cos(3 * pi * y); });
    const auto march = solve_initial_layer(c, rho0, tau_grid(1.0, 1000), p);
    const double lambda = c.min();
    const double rate = 2.0 * p.z1 * p.kappa() * lambda;
    for (std::size_t k = 1; k < march.size(); ++k) {
        const double g0 = grad_sq(march[k - 1].phi), g1 = grad_sq(march[k].phi);
        EXPECT_LE(g1, g0 * (1 + 1e-12));
        const double dtau = march[k].tau - march[k - 1].tau;
        // implicit Euler version of e^{-rate dtau}
        EXPECT_LE(g1, g0 / (1.0 + rate * dtau) * (1 + 1e-9));
    }
}

TEST(InitialLayer, Errors) {
    const ChannelGrid g(1, 1, 17);
    const auto p = params(2, -1, 2, 1);
    ScalarField c(g, 1.0);
    c(0, 3) = 0.0;
    EXPECT_THROW(solve_initial_layer(c, ScalarField(g), tau_grid(1, 4), p), DomainError);
    EXPECT_THROW(solve_initial_layer(ScalarField(g, 1.0), ScalarField(g), {0.1, 0.2}, p), InputError);
    EXPECT_THROW(solve_initial_layer(ScalarField(g, 1.0), ScalarField(g), {0.0, 0.2, 0.2}, p), InputError);
}

TEST(InitialLayer, InterpolationAndTail) {
    const ChannelGrid g(1, 1, 17);
    const auto p = params(2, -1, 2, 1);
    const auto march = solve_initial_layer(ScalarField(g, 1.0), ScalarField(g, 1.0), tau_grid(1.0, 10), p);
    const auto mid = initial_layer_at(march, 0.05);
    for (std::size_t i = 0; i < mid.rho.size(); ++i) EXPECT_NEAR(mid.rho[i], 0.5 * (march[0].rho[i] + march[1].rho[i]), 1e-15);
    EXPECT_EQ(initial_layer_at(march, 2.0).rho.max_abs(), 0.0);
}

TEST(MixedLayer, ZeroTraces) {
    const auto p = params(2, -1, 2, 1);
    const auto t = tau_grid(2.0, 50);
    const std::vector<double> z(t.size(), 0.0);
    const auto sol = solve_mixed_layer(z, z, 1.0, 2.0, p, XiGrid::clustered(), t, Wall::left);
    for (const auto& s : sol.states)
        for (std::size_t j = 0; j < s.c1.size(); ++j) {
            EXPECT_EQ(s.c1[j], 0.0);
            EXPECT_EQ(s.c2[j], 0.0);
        }
    EXPECT_TRUE(sol.warnings.empty());
}

namespace {
struct Traces {
    std::vector<double> tau, a1, a2;
};
Traces decaying_traces(const Params& p, double tau_end, int n) {
    Traces tr;
    tr.tau = tau_grid(tau_end, n);
    for (double t : tr.tau) {
        // shaped like -c_I at a wall: D-weighted pair with a decaying amplitude
        const double rho = 0.8 * std::exp(-1.5 * t);
        tr.a1.push_back(-p.D1 * rho / p.kappa());
        tr.a2.push_back(p.D2 * rho / p.kappa());
    }
    return tr;
}
} // namespace

TEST(MixedLayer, WallConditionExact) {
    const auto p = params(2, -1, 2, 1);
    const auto tr = decaying_traces(p, 3.0, 150);
    const auto sol = solve_mixed_layer(tr.a1, tr.a2, 1.0, 2.0, p, XiGrid::clustered(), tr.tau, Wall::left);
    ASSERT_EQ(sol.states.size(), tr.tau.size());
    for (std::size_t n = 0; n < sol.states.size(); ++n) {
        const auto& s = sol.states[n];
        EXPECT_EQ(s.alpha1.front(), 0.0);
        EXPECT_EQ(s.alpha2.front(), 0.0);
        EXPECT_EQ(s.alpha1.back(), 0.0);
        EXPECT_EQ(s.c1.front(), tr.a1[n]);
        EXPECT_EQ(s.c2.front(), tr.a2[n]);
        double omega = 0.0;
        for (std::size_t j = 0; j < s.alpha1.size(); ++j) omega = std::max(omega, std::abs(p.z1 * s.alpha1[j] + p.z2 * s.alpha2[j]));
        EXPECT_TRUE(std::isfinite(omega));
    }
}

TEST(MixedLayer, MatchesDirectOracle) {
    const auto p = params(2, -1, 2, 1);
    const double g1 = 1.0, g2 = 2.0;
    const auto tr = decaying_traces(p, 2.0, 200);
    const auto sol = solve_mixed_layer(tr.a1, tr.a2, g1, g2, p, XiGrid::clustered(40.0, 2000, 4.0), tr.tau, Wall::left);
    const auto ref = oracle::direct_mixed_layer(tr.a1, tr.a2, g1, g2, p.z1, p.z2, p.D1, p.D2, 40.0, 16000, tr.tau);
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < tr.tau.size(); ++n)
        for (std::size_t j = 0; j < ref.xi.size(); ++j) {
            const double d1 = sol.c1_at(ref.xi[j], tr.tau[n]) - ref.c1[n][j];
            const double d2 = sol.c2_at(ref.xi[j], tr.tau[n]) - ref.c2[n][j];
            num += d1 * d1 + d2 * d2;
            den += ref.c1[n][j] * ref.c1[n][j] + ref.c2[n][j] * ref.c2[n][j];
        }
    EXPECT_LE(std::sqrt(num / den), 1e-3);
}

TEST(MixedLayer, EnergyBounded) {
    const auto p = params(2, -1, 2, 1);
    const auto tr = decaying_traces(p, 4.0, 400);
    for (bool compatible : {true, false}) {
        MixedLayerOptions o;
        o.compatible_start = compatible;
        const auto sol = solve_mixed_layer(tr.a1, tr.a2, 1.0, 2.0, p, XiGrid::clustered(), tr.tau, Wall::left, o);
        const auto en = mixed_layer_energy(sol, tr.a1, tr.a2, 1.0, 2.0, p);
        ASSERT_EQ(en.energy.size(), tr.tau.size());
        for (std::size_t n = 0; n < en.energy.size(); ++n) EXPECT_LE(en.energy[n], en.bound[n] * (1 + 1e-12) + 1e-15);
    }
}

TEST(MixedLayer, TruncationWarningAndStrict) {
    const auto p = params(2, -1, 2, 1);
    const auto tr = decaying_traces(p, 2.0, 50);
    const auto sol = solve_mixed_layer(tr.a1, tr.a2, 1.0, 2.0, p, XiGrid::uniform(3.0, 60), tr.tau, Wall::left);
    EXPECT_FALSE(sol.warnings.empty());
    MixedLayerOptions strict;
    strict.strict = true;
    EXPECT_THROW(solve_mixed_layer(tr.a1, tr.a2, 1.0, 2.0, p, XiGrid::uniform(3.0, 60), tr.tau, Wall::left, strict),
                 TruncationError);
    EXPECT_NO_THROW(solve_mixed_layer(tr.a1, tr.a2, 1.0, 2.0, p, XiGrid::clustered(), tr.tau, Wall::left, strict));
}

TEST(MixedLayer, Errors) {
    const auto p = params(2, -1, 2, 1);
    const auto tr = decaying_traces(p, 1.0, 10);
    EXPECT_THROW(solve_mixed_layer(tr.a1, tr.a2, 0.0, 2.0, p, XiGrid::clustered(), tr.tau, Wall::left), ParameterError);
    auto short_a = tr.a1;
    short_a.pop_back();
    EXPECT_THROW(solve_mixed_layer(short_a, tr.a2, 1.0, 2.0, p, XiGrid::clustered(), tr.tau, Wall::left), InputError);
}

TEST(XiGridTest, ClusteredShape) {
    const auto g = XiGrid::clustered(40.0, 800, 4.0);
    ASSERT_EQ(g.xi.size(), 801u);
    EXPECT_EQ(g.xi.front(), 0.0);
    EXPECT_NEAR(g.xi_max(), 40.0, 1e-12);
    EXPECT_LT(g.xi[1] - g.xi[0], g.xi[800] - g.xi[799]);
}

namespace {
struct Setup {
    Params p;
    BoundaryData bd;
    ChannelGrid g;
    limit::InnerSeries o0, o1, o2;
};

Setup curved_setup(double eps) {
    Setup s;
    s.p = params(2, -1, 2, 1, eps);
    s.g = ChannelGrid(2, 4, 129);
    BoundaryTrace g1 = BoundaryTrace::constant(4, 1.0, 1.3);
    for (int ix = 0; ix < 4; ++ix) g1.bottom[ix] += 0.1 * std::cos(2 * pi * s.g.x(ix));
    s.bd = BoundaryData::electroneutral(s.p, g1, BoundaryTrace::constant(4, 0.0, 0.5));
    const auto G1 = harmonic_extension(s.bd.gamma1, s.g);
    auto c1 = G1 + ScalarField::from_function(s.g, [](double x, double y) { return 0.2 * std::sin(pi * y) * (1 + 0.4 * std::sin(2 * pi * x)); });
    const auto l0 = limit::limit_init(c1, VelocityField(s.g), s.p, s.bd);
    const auto tr = limit::run_limit(l0, s.p, s.bd, 1e-3, 0.01, 1);
    const limit::LimitStepper st(s.p, s.bd, s.g);
    s.o0 = limit::inner_order0(tr, st.background(), s.p);
    s.o1 = limit::solve_inner_hierarchy(1, {s.o0}, s.p, s.bd);
    s.o2 = limit::solve_inner_hierarchy(2, {s.o0, s.o1}, s.p, s.bd);
    return s;
}
} // namespace

TEST(Composite, WallTraceMatchesData) {
    const auto s = curved_setup(0.05);
    for (std::size_t n : {std::size_t{0}, s.o0.size() / 2, s.o0.size() - 1}) {
        const auto [lb, rb] = boundary_layers_at(s.o0[n], s.bd, s.p);
        CompositeInputs in;
        in.order0 = &s.o0[n];
        in.order1 = &s.o1[n];
        in.order2 = &s.o2[n];
        in.left_bl = &lb;
        in.right_bl = &rb;
        const auto app = assemble_composite(in, s.p, CompositeVariant::full_S, s.o0[n].t);
        for (int ix = 0; ix < s.g.nx; ++ix) {
            EXPECT_NEAR(app.c1(ix, 0), s.bd.gamma1.bottom[ix], 1e-10);
            EXPECT_NEAR(app.c1(ix, s.g.ny - 1), s.bd.gamma1.top[ix], 1e-10);
            EXPECT_NEAR(app.c2(ix, 0), s.bd.gamma2.bottom[ix], 1e-10);
            EXPECT_NEAR(app.c2(ix, s.g.ny - 1), s.bd.gamma2.top[ix], 1e-10);
        }
    }
}

TEST(Composite, InitialAndMixedLayersCancelAtWalls) {
    const auto s = curved_setup(0.1);
    const auto& o0 = s.o0[0];
    const auto tau = tau_grid(2.0, 100);
    const auto rho0 = limit::laplacian_phi0(o0);
    const auto il = solve_initial_layer(o0.c1, rho0, tau, s.p);
    std::vector<MixedLayerSolution> left, right;
    for (int ix = 0; ix < s.g.nx; ++ix) {
        std::vector<double> a1l, a2l, a1r, a2r;
        for (const auto& st : il) {
            const auto c1 = initial_layer_c1(st, s.p), c2 = initial_layer_c2(st, s.p);
            a1l.push_back(-c1(ix, 0));
            a2l.push_back(-c2(ix, 0));
            a1r.push_back(-c1(ix, s.g.ny - 1));
            a2r.push_back(-c2(ix, s.g.ny - 1));
        }
        left.push_back(solve_mixed_layer(a1l, a2l, s.bd.gamma1.bottom[ix], s.bd.gamma2.bottom[ix], s.p, XiGrid::clustered(), tau, Wall::left));
        right.push_back(solve_mixed_layer(a1r, a2r, s.bd.gamma1.top[ix], s.bd.gamma2.top[ix], s.p, XiGrid::clustered(), tau, Wall::right));
    }
    CompositeInputs in;
    in.order0 = &o0;
    in.order1 = &s.o1[0];
    in.initial = &il;
    in.left_ml = &left;
    in.right_ml = &right;
    for (double t : {0.0, 0.0033, 0.01}) {
        const auto app = assemble_composite(in, s.p, CompositeVariant::reduced_R, t);
        for (int ix = 0; ix < s.g.nx; ++ix) {
            EXPECT_NEAR(app.c1(ix, 0), s.bd.gamma1.bottom[ix], 1e-10);
            EXPECT_NEAR(app.c2(ix, s.g.ny - 1), s.bd.gamma2.top[ix], 1e-10);
        }
    }
    std::vector<MixedLayerSolution> wrong(3, left[0]);
    in.left_ml = &wrong;
    EXPECT_THROW(assemble_composite(in, s.p, CompositeVariant::reduced_R, 0.0), InputError);
}

TEST(Composite, ZeroLayersGiveInnerExpansion) {
    const auto s = curved_setup(0.1);
    const auto& o0 = s.o0.back();
    CompositeInputs in;
    in.order0 = &o0;
    in.order1 = &s.o1.back();
    in.order2 = &s.o2.back();
    const auto lb = boundary_layer(Wall::left, std::vector<double>(4, 0.0), s.bd.gamma1.bottom, s.p);
    const auto rb = boundary_layer(Wall::right, std::vector<double>(4, 0.0), s.bd.gamma1.top, s.p);
    in.left_bl = &lb;
    in.right_bl = &rb;
    const auto app = assemble_composite(in, s.p, CompositeVariant::full_S, o0.t);
    const double e = s.p.eps;
    auto c1 = o0.c1;
    c1.axpy(e, in.order1->c1);
    c1.axpy(e * e, in.order2->c1);
    EXPECT_LT(max_diff(app.c1, c1), 1e-15);
    auto phi = o0.phi;
    phi.axpy(e, in.order1->phi);
    phi.axpy(e * e, in.order2->phi);
    EXPECT_LT(max_diff(app.phi, phi), 1e-15);
}

TEST(Composite, WellPreparedReducesToBoundaryLayers) {
    // zero first and second inner orders and no initial layer: c^(0) + eps^2 (f c_LB + g c_RB)
    const auto s = curved_setup(0.1);
    const auto& o0 = s.o0.back();
    const auto [lb, rb] = boundary_layers_at(o0, s.bd, s.p);
    CompositeInputs in;
    in.order0 = &o0;
    in.left_bl = &lb;
    in.right_bl = &rb;
    const auto app = assemble_composite(in, s.p, CompositeVariant::full_S, o0.t);
    const double e = s.p.eps;
    for (int iy = 0; iy < s.g.ny; ++iy)
        for (int ix = 0; ix < s.g.nx; ++ix) {
            const double y = s.g.y(iy);
            const double ref = o0.c1(ix, iy) + e * e * (cutoff_f(y) * lb.c1(ix, y / e) + cutoff_g(y) * rb.c1(ix, (1 - y) / e));
            EXPECT_NEAR(app.c1(ix, iy), ref, 1e-14);
        }
    EXPECT_THROW(assemble_composite(CompositeInputs{}, s.p, CompositeVariant::full_S, 0.0), InputError);
}

TEST(Composite, ResidualZeroAndAntisymmetric) {
    const auto s = curved_setup(0.1);
    const auto& o0 = s.o0.back();
    CompositeInputs in;
    in.order0 = &o0;
    const auto app = assemble_composite(in, s.p, CompositeVariant::full_S, o0.t);
    const limit::LimitStepper st(s.p, s.bd, s.g);
    const auto& phiW = st.background().PhiW;
    State same{o0.t, app.c1, app.c2, app.u, app.phi - phiW, ScalarField(s.g)};
    const auto r0 = residual(same, app, phiW);
    EXPECT_LT(r0.c1.max_abs(), 1e-15);
    EXPECT_LT(r0.phi.max_abs(), 1e-14);
    EXPECT_EQ(r0.u.max_abs(), 0.0);

    State other = same;
    other.c1 = app.c1 + testutil::random_field(s.g, 3, -0.1, 0.1);
    other.psi = same.psi + testutil::random_field(s.g, 4, -0.1, 0.1);
    CompositeApproximation swapped = app;
    swapped.c1 = other.c1;
    swapped.phi = other.psi + phiW;
    State as_state = same;
    const auto r1 = residual(other, app, phiW);
    const auto r2 = residual(as_state, swapped, phiW);
    for (std::size_t i = 0; i < r1.c1.size(); ++i) {
        EXPECT_EQ(r1.c1[i], -r2.c1[i]);
        EXPECT_NEAR(r1.phi[i], -r2.phi[i], 1e-15);
    }
    EXPECT_THROW(residual(State{0, ScalarField(ChannelGrid(1, 1, 9)), {}, {}, {}, {}}, app, phiW), InputError);
}

TEST(Composite, GradientResidualDecreasesWithEps) {
    auto cfg = cli::preset_defaults(cli::Preset::thm51_rate);
    const auto a = cli::run_member(cfg, 0.125);
    const auto b = cli::run_member(cfg, 0.0625);
    ASSERT_TRUE(a.error.empty()) << a.error;
    ASSERT_TRUE(b.error.empty()) << b.error;
    EXPECT_LT(b.err_cS_grad_LinfL2, a.err_cS_grad_LinfL2);
}
