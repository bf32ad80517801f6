#include "oracles.hpp"
#include "test_util.hpp"

#include "npnslab/core/background.hpp"
#include "npnslab/core/elliptic.hpp"
#include "npnslab/core/norms.hpp"
#include "npnslab/core/operators.hpp"
#include "npnslab/diagnostics/diagnostics.hpp"
#include "npnslab/limit/limit.hpp"
#include "npnslab/npns/npns.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace npnslab;
using namespace npnslab::core;
using namespace npnslab::diag;

namespace {
constexpr double pi = std::numbers::pi;

Params params(double z1, double z2, double D1, double D2, double eps) {
    Params p;
    p.z1 = z1;
    p.z2 = z2;
    p.D1 = D1;
    p.D2 = D2;
    p.eps = eps;
    return p;
}

npns::NpnsConfig config(const ChannelGrid& g, const Params& p, double g_bottom, double g_top, double W_top, double dt,
                        double t_end) {
    npns::NpnsConfig c;
    c.params = p;
    c.grid = g;
    c.bdata = BoundaryData::electroneutral(p, BoundaryTrace::constant(g.nx, g_bottom, g_top),
                                           BoundaryTrace::constant(g.nx, 0.0, W_top));
    c.dt = dt;
    c.t_end = t_end;
    return c;
}

ScalarField bump(const ChannelGrid& g, double lo, double hi, double amp) {
    return ScalarField::from_function(g, [=](double x, double y) {
        return lo + (hi - lo) * y + amp * std::sin(pi * y) * (1.0 + 0.3 * std::cos(2 * pi * x));
    });
}
} // namespace

TEST(PhiEntropy, Examples) {
    EXPECT_EQ(phi_entropy(1.0), 0.0);
    EXPECT_NEAR(phi_entropy(std::exp(1.0)), 1.0, 1e-15);
    const double v = phi_entropy(1.5);
    EXPECT_NEAR(v, 0.108198, 1e-6);
    EXPECT_LE(0.0625, v);
    EXPECT_LE(v, 0.25);
    EXPECT_THROW(phi_entropy(0.0), DomainError);
    EXPECT_THROW(phi_entropy(-1.0), DomainError);
}

TEST(PhiEntropy, NonnegativeZeroOnlyAtOne) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> e(std::log(1e-6), std::log(1e6));
    for (int k = 0; k < 100000; ++k) {
        const double s = std::exp(e(rng));
        const double v = phi_entropy(s);
        EXPECT_GE(v, 0.0);
        if (std::abs(s - 1.0) > 1e-6) EXPECT_GT(v, 0.0);
    }
}

TEST(PhiEntropy, Sandwich) {
    // The bounds need 1 in [m, M] as well as m <= s <= M (Taylor expansion about 1).
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> e(std::log(1e-3), std::log(1e3)), u(0.0, 1.0);
    for (int k = 0; k < 10000; ++k) {
        const double s = std::exp(e(rng));
        const double m = std::min(s, 1.0) * (0.05 + 0.95 * u(rng));
        const double M = std::max(s, 1.0) * (1.0 + 20.0 * u(rng));
        const double v = phi_entropy(s), q = (s - 1) * (s - 1);
        EXPECT_LE(q / (2 * M), v * (1 + 1e-12) + 1e-300);
        EXPECT_LE(v, q / (2 * m) * (1 + 1e-12));
    }
    // without 1 in [m, M] the upper bound fails: m = M = s = 2 gives (s-1)^2/(2m) = 1/4 < phi(2)
    EXPECT_GT(phi_entropy(2.0), 0.25);
}

namespace {
struct EnergyFixture {
    ChannelGrid g;
    Params p;
    BoundaryData bd;
    Background bg;
};
EnergyFixture energy_fixture(int ny) {
    EnergyFixture f{ChannelGrid(1, 1, ny), params(2, -1, 2, 1, 0.3), {}, {}};
    f.bd = BoundaryData::electroneutral(f.p, BoundaryTrace::constant(1, 1.0, 1.5), BoundaryTrace::constant(1, 0.0, 1.0));
    f.bg = make_background(f.bd, f.g);
    return f;
}
} // namespace

TEST(FreeEnergy, EquilibriumZero) {
    const auto f = energy_fixture(65);
    State s{0.0, f.bg.Gamma1, f.bg.Gamma2, VelocityField(f.g), ScalarField(f.g), ScalarField(f.g)};
    EXPECT_EQ(free_energy(s, f.bg, f.p), 0.0);
}

TEST(FreeEnergy, PotentialOnly) {
    const auto f = energy_fixture(65);
    const auto psi = ScalarField::from_function(f.g, [](double, double y) { return std::sin(2 * pi * y); });
    State s{0.0, f.bg.Gamma1, f.bg.Gamma2, VelocityField(f.g), psi, ScalarField(f.g)};
    EXPECT_NEAR(free_energy(s, f.bg, f.p), 0.5 * f.p.eps * f.p.eps * grad_sq(psi), 1e-15);
}

TEST(FreeEnergy, MatchesHighOrderQuadrature) {
    const auto G1 = [](double y) { return 1.0 + 0.5 * y; };
    const auto G2 = [](double y) { return 2.0 * (1.0 + 0.5 * y); };
    const auto c1 = [&](double y) { return G1(y) + 0.3 * std::sin(pi * y); };
    const auto c2 = [&](double y) { return G2(y) + 0.2 * std::sin(2 * pi * y) + 0.1 * std::sin(pi * y); };
    const auto dpsi = [](double y) { return 0.4 * pi * std::cos(pi * y) + 0.3 * std::exp(y); };
    const auto psi = [](double y) { return 0.4 * std::sin(pi * y) + 0.3 * (std::exp(y) - 1.0 - (std::exp(1.0) - 1.0) * y); };
    const double eps = 0.3;
    const double ref = oracle::gauss_composite(
        [&](double y) {
            const double d = dpsi(y) - 0.3 * (std::exp(1.0) - 1.0);
            return G1(y) * phi_entropy(c1(y) / G1(y)) + G2(y) * phi_entropy(c2(y) / G2(y)) + 0.5 * eps * eps * d * d;
        },
        0.0, 1.0, 16);
    const auto f = energy_fixture(4097);
    State s{0.0, ScalarField::from_function(f.g, [&](double, double y) { return c1(y); }),
            ScalarField::from_function(f.g, [&](double, double y) { return c2(y); }), VelocityField(f.g),
            ScalarField::from_function(f.g, [&](double, double y) { return psi(y); }), ScalarField(f.g)};
    EXPECT_NEAR(free_energy(s, f.bg, f.p) / ref, 1.0, 1e-6);
}

TEST(FreeEnergy, DomainError) {
    const auto f = energy_fixture(17);
    State s{0.0, f.bg.Gamma1, f.bg.Gamma2, VelocityField(f.g), ScalarField(f.g), ScalarField(f.g)};
    s.c2(0, 4) = 0.0;
    EXPECT_THROW(free_energy(s, f.bg, f.p), DomainError);
}

TEST(Potentials, ReferenceAtBackground) {
    const auto f = energy_fixture(33);
    State s{0.0, f.bg.Gamma1, f.bg.Gamma2, VelocityField(f.g), ScalarField(f.g), ScalarField(f.g)};
    const auto mu = electrochemical_potentials(s, f.bg.PhiW, f.p);
    const auto ref = reference_potentials(f.bg, f.p);
    EXPECT_LT(testutil::max_diff(mu.mu1, ref.mu1), 1e-15);
    EXPECT_LT(testutil::max_diff(mu.mu2, ref.mu2), 1e-15);
}

TEST(Potentials, BoltzmannStateHasFlatPotentials) {
    const ChannelGrid g(2, 8, 65);
    const auto p = params(2, -1, 2, 1, 0.2);
    const auto phiW = ScalarField::from_function(g, [](double, double y) { return y; });
    const auto psi = ScalarField::from_function(g, [](double x, double y) { return 0.3 * std::sin(pi * y) * std::cos(2 * pi * x); });
    ScalarField c1(g), c2(g);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        c1[i] = 1.3 * std::exp(-p.z1 * (psi[i] + phiW[i]));
        c2[i] = 0.7 * std::exp(-p.z2 * (psi[i] + phiW[i]));
    }
    const auto mu = electrochemical_potentials(State{0.0, c1, c2, VelocityField(g), psi, ScalarField(g)}, phiW, p);
    EXPECT_LT(gradient(mu.mu1).max_abs(), 1e-12);
    EXPECT_LT(gradient(mu.mu2).max_abs(), 1e-12);
}

TEST(Potentials, NeutralSpeciesIsLogConcentration) {
    const ChannelGrid g(1, 1, 17);
    auto p = params(1, -1, 1, 1, 0.1);
    p.z1 = 0.0;  // composition only, bypasses validation
    const auto c = testutil::random_field(g, 2, 0.5, 2.0);
    const auto psi = testutil::random_field(g, 3);
    const auto mu = electrochemical_potentials(State{0.0, c, c, VelocityField(g), psi, ScalarField(g)}, ScalarField(g), p);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(mu.mu1[i], std::log(c[i]));
}

namespace {
double max_residual(const npns::Trajectory& tr, const npns::NpnsConfig& cfg) {
    const auto bg = make_background(cfg.bdata, cfg.grid);
    double m = 0.0;
    for (double r : dissipation_identity_residual(tr.snapshots, bg, cfg.params)) m = std::max(m, std::abs(r));
    return m;
}
} // namespace

TEST(DissipationIdentity, EquilibriumExactlyZero) {
    const ChannelGrid g(1, 1, 65);
    const auto cfg = config(g, params(2, -1, 2, 1, 0.1), 1.0, 1.0, 0.0, 1e-3, 0.01);
    const auto s0 = npns::well_prepared_init(ScalarField(g, 1.0), VelocityField(g), cfg);
    const auto tr = npns::run_npns(s0, cfg, 1);
    const auto bg = make_background(cfg.bdata, g);
    for (double r : dissipation_identity_residual(tr.snapshots, bg, cfg.params)) EXPECT_EQ(r, 0.0);
}

TEST(DissipationIdentity, TooFewSnapshots) {
    const auto f = energy_fixture(17);
    State s{0.0, f.bg.Gamma1, f.bg.Gamma2, VelocityField(f.g), ScalarField(f.g), ScalarField(f.g)};
    EXPECT_THROW(dissipation_identity_residual(std::vector<State>{s, s}, f.bg, f.p), InputError);
}

TEST(DissipationIdentity, EntropyDiffusionFirstOrder) {
    // z2 = -z1, D1 = D2, W = 0: rho stays zero, psi = 0 and u = 0.
    const ChannelGrid g(1, 1, 129);
    std::vector<double> r;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        const auto cfg = config(g, params(1, -1, 1, 1, 0.1), 1.0, 1.0, 0.0, dt, 0.08);
        const auto s0 = npns::well_prepared_init(bump(g, 1.0, 1.0, 0.4), VelocityField(g), cfg);
        const auto tr = npns::run_npns(s0, cfg, 1);
        for (const auto& s : tr.snapshots) {
            EXPECT_LT(s.psi.max_abs(), 1e-14);
            EXPECT_EQ(s.u.max_abs(), 0.0);
        }
        r.push_back(max_residual(tr, cfg));
    }
    for (std::size_t k = 1; k < r.size(); ++k) {
        EXPECT_GT(r[k - 1] / r[k], 1.7);
        EXPECT_LT(r[k - 1] / r[k], 2.3);
    }
}

TEST(DissipationIdentity, GenericRunJointRefinement) {
    std::vector<double> r;
    const std::pair<double, int> levels[] = {{4e-3, 65}, {2e-3, 129}, {1e-3, 257}};
    for (const auto& [dt, ny] : levels) {
        const ChannelGrid g(1, 1, ny);
        const auto cfg = config(g, params(2, -1, 2, 1, 0.3), 1.0, 1.5, 1.0, dt, 0.1);
        const auto s0 = npns::well_prepared_init(bump(g, 1.0, 1.5, 0.4), VelocityField(g), cfg);
        r.push_back(max_residual(npns::run_npns(s0, cfg, 1), cfg));
    }
    for (std::size_t k = 1; k < r.size(); ++k) EXPECT_LT(r[k], r[k - 1]);
}

namespace {
limit::LimitState limit_like(const State& s, const ScalarField& psi) {
    limit::LimitState l;
    l.t = s.t;
    l.c1 = s.c1;
    l.u = s.u;
    l.psi = psi;
    l.p = s.p;
    return l;
}
} // namespace

TEST(ModulatedEnergy, IdenticalStates) {
    const ChannelGrid g(2, 8, 33);
    const auto p = params(2, -1, 2, 1, 0.2);
    const auto c1 = bump(g, 1.0, 1.5, 0.3);
    State se{0.0, c1, (-p.z1 / p.z2) * c1, VelocityField(g), ScalarField(g), ScalarField(g)};
    auto m = modulated_energy(se, limit_like(se, ScalarField(g)), p);
    EXPECT_EQ(m.H, 0.0);
    EXPECT_EQ(m.Theta, 0.0);
    // matching nonzero potentials: Theta still vanishes, H keeps the unmodulated field energy
    const auto psi = testutil::smooth_field(g);
    se.psi = psi;
    m = modulated_energy(se, limit_like(se, psi), p);
    EXPECT_NEAR(m.H, 0.5 * p.eps * p.eps * grad_sq(psi), 1e-15);
    EXPECT_EQ(m.Theta, 0.0);
}

TEST(ModulatedEnergy, PurePotentialPerturbation) {
    const ChannelGrid g(2, 8, 33);
    const auto p = params(2, -1, 2, 1, 0.2);
    const auto c1 = bump(g, 1.0, 1.5, 0.3);
    VelocityField u(g);
    u.v = testutil::smooth_field(g, 0.4);
    State se{0.0, c1, (-p.z1 / p.z2) * c1, u, testutil::smooth_field(g, 1.0), ScalarField(g)};
    const auto m = modulated_energy(se, limit_like(se, ScalarField(g)), p);
    EXPECT_NEAR(m.H, 0.5 * p.eps * p.eps * grad_sq(se.psi), 1e-15);
}

TEST(ModulatedEnergy, SmallPerturbationTaylor) {
    const ChannelGrid g(2, 8, 65);
    const auto p = params(2, -1, 2, 1, 0.2);
    const auto c1 = bump(g, 1.0, 1.5, 0.3);
    State sl_full{0.0, c1, (-p.z1 / p.z2) * c1, VelocityField(g), ScalarField(g), ScalarField(g)};
    const auto lim = limit_like(sl_full, ScalarField(g));
    const auto d1 = testutil::smooth_field(g, 0.2), d2 = testutil::smooth_field(g, 2.1);
    std::vector<double> rel;
    for (double a : {1e-2, 1e-3}) {
        State se = sl_full;
        se.c1.axpy(a, d1);
        se.c2.axpy(a, d2);
        const double H = modulated_energy(se, lim, p).H;
        ScalarField q1(g), q2(g);
        for (std::size_t i = 0; i < q1.size(); ++i) {
            q1[i] = 0.5 * std::pow(se.c1[i] - sl_full.c1[i], 2) / sl_full.c1[i];
            q2[i] = 0.5 * std::pow(se.c2[i] - sl_full.c2[i], 2) / sl_full.c2[i];
        }
        const double quad = integrate(q1) + integrate(q2);
        rel.push_back(std::abs(H - quad) / quad);
    }
    // the relative gap is first order in the perturbation size, so the absolute gap is third order
    EXPECT_LT(rel[0], 0.05);
    EXPECT_NEAR(rel[0] / rel[1], 10.0, 1.0);
}

TEST(ModulatedEnergy, NonnegativeOnRandomPairs) {
    const ChannelGrid g(2, 8, 17);
    const auto p = params(2, -1, 2, 1, 0.2);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto a = testutil::random_field(g, seed, 0.5, 2.0), b = testutil::random_field(g, seed + 1000, 0.5, 2.0);
        State se{0.0, a, testutil::random_field(g, seed + 2000, 0.5, 2.0), VelocityField(g), testutil::random_field(g, seed + 3000), ScalarField(g)};
        State sl{0.0, b, (-p.z1 / p.z2) * b, VelocityField(g), ScalarField(g), ScalarField(g)};
        const auto m = modulated_energy(se, limit_like(sl, testutil::random_field(g, seed + 4000)), p);
        EXPECT_GE(m.H, 0.0);
        EXPECT_GE(m.Theta, 0.0);
    }
}

TEST(Functionals, ShiftInvariant) {
    const ChannelGrid g(2, 16, 33);
    const auto p = params(2, -1, 2, 1, 0.2);
    auto bd = BoundaryData::electroneutral(p, BoundaryTrace::constant(16, 1.0, 1.3), BoundaryTrace::constant(16, 0.0, 1.0));
    for (int ix = 0; ix < 16; ++ix) bd.gamma1.bottom[ix] += 0.2 * std::cos(2 * pi * g.x(ix));
    bd = BoundaryData::electroneutral(p, bd.gamma1, bd.W);
    const auto bg = make_background(bd, g);
    auto c1 = bg.Gamma1 + ScalarField::from_function(g, [](double x, double y) { return 0.2 * std::sin(pi * y) * (1 + std::sin(2 * pi * x)); });
    auto c2 = bg.Gamma2 + ScalarField::from_function(g, [](double x, double y) { return 0.1 * std::sin(pi * y) * std::cos(4 * pi * x); });
    VelocityField u(testutil::smooth_field(g, 0.3), testutil::smooth_field(g, 1.3));
    State s{0.0, c1, c2, u, testutil::smooth_field(g, 0.7), ScalarField(g)};
    const auto cl = bump(g, 1.0, 1.3, 0.1);
    State slf{0.0, cl, (-p.z1 / p.z2) * cl, VelocityField(g), ScalarField(g), ScalarField(g)};
    const double E = free_energy(s, bg, p);
    const auto m = modulated_energy(s, limit_like(slf, testutil::smooth_field(g, 0.1)), p);
    for (int k : {1, 5}) {
        State ss{0.0, shift_x(s.c1, k), shift_x(s.c2, k), shift_x(s.u, k), shift_x(s.psi, k), ScalarField(g)};
        Background bs{shift_x(bg.Gamma1, k), shift_x(bg.Gamma2, k), shift_x(bg.PhiW, k)};
        State sls{0.0, shift_x(slf.c1, k), shift_x(slf.c2, k), VelocityField(g), ScalarField(g), ScalarField(g)};
        EXPECT_NEAR(free_energy(ss, bs, p), E, 1e-13 * E);
        const auto ms = modulated_energy(ss, limit_like(sls, shift_x(testutil::smooth_field(g, 0.1), k)), p);
        EXPECT_NEAR(ms.H, m.H, 1e-13 * m.H);
        EXPECT_NEAR(ms.Theta, m.Theta, 1e-12 * m.Theta);
    }
}

TEST(MaxPrinciple, ConstantEquilibriumPasses) {
    const ChannelGrid g(1, 1, 17);
    const auto cfg = config(g, params(2, -1, 2, 1, 0.1), 1.0, 1.0, 0.0, 1e-3, 0.01);
    const auto s = npns::well_prepared_init(ScalarField(g, 1.0), VelocityField(g), cfg);
    const auto b = data_bounds(s, cfg.bdata);
    const auto r = max_principle_check(s, b, 1e-6);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.extrema.min_c1, b.lambda1);
    EXPECT_EQ(r.extrema.max_c1, b.Lambda1);
    EXPECT_EQ(r.extrema.min_c2, b.lambda2);
    EXPECT_EQ(r.extrema.max_c2, b.Lambda2);
    EXPECT_EQ(r.species, 0);
}

TEST(MaxPrinciple, ConstructedViolationLocated) {
    const ChannelGrid g(2, 4, 17);
    const auto cfg = config(g, params(2, -1, 2, 1, 0.1), 1.0, 1.0, 0.0, 1e-3, 0.01);
    auto s = npns::well_prepared_init(ScalarField(g, 1.0), VelocityField(g), cfg);
    const auto b = data_bounds(s, cfg.bdata);
    const double tol = 1e-6;
    s.c2(3, 6) = b.lambda2 - 10 * tol;
    const auto r = max_principle_check(s, b, tol);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.species, 2);
    EXPECT_EQ(r.ix, 3);
    EXPECT_EQ(r.iy, 6);
    EXPECT_NEAR(r.violation, 9 * tol, 1e-12);
}

TEST(MaxPrinciple, AcceptedRunPasses) {
    const ChannelGrid g(1, 1, 129);
    const double dt = 1e-3;
    const auto cfg = config(g, params(2, -1, 2, 1, 0.1), 1.0, 1.5, 1.0, dt, 0.05);
    const auto s0 = npns::well_prepared_init(bump(g, 1.0, 1.5, 0.3), VelocityField(g), cfg);
    const auto tr = npns::run_npns(s0, cfg, 1);
    const auto b = data_bounds(s0, cfg.bdata);
    for (const auto& s : tr.snapshots) EXPECT_TRUE(max_principle_check(s, b, max_principle_tolerance(dt, g.hy())).pass);
}

TEST(LowerBound, HoldsAlongTrajectory) {
    const ChannelGrid g(1, 1, 257);
    const auto cfg = config(g, params(2, -1, 2, 1, 0.1), 1.0, 1.5, 1.0, 1e-3, 0.05);
    const auto s0 = npns::well_prepared_init(bump(g, 1.0, 1.5, 0.3), VelocityField(g), cfg);
    const auto tr = npns::run_npns(s0, cfg, 5);
    const auto bg = make_background(cfg.bdata, g);
    const auto b = data_bounds(s0, cfg.bdata);
    std::vector<double> t, E;
    std::vector<IdentityTerms> terms;
    for (const auto& s : tr.snapshots) {
        const auto lb = dissipation_lower_bound(s, bg, cfg.params, b);
        EXPECT_TRUE(lb.holds) << "t = " << s.t << " lhs " << lb.lhs << " M*D " << lb.M * lb.dissipation;
        EXPECT_GT(lb.M, 0.0);
        t.push_back(s.t);
        E.push_back(free_energy(s, bg, cfg.params));
        terms.push_back(identity_terms(s, bg, cfg.params));
    }
    const double Mg = growth_constant_required(t, E, terms);
    EXPECT_TRUE(std::isfinite(Mg));
    EXPECT_GE(Mg, 0.0);
}

TEST(RateFit, ExactPowerLaws) {
    std::vector<std::pair<double, double>> a, b;
    for (int k = 3; k <= 7; ++k) {
        const double e = std::ldexp(1.0, -k);
        a.emplace_back(e, e);
        b.emplace_back(e, 3.0 * std::pow(e, 1.5));
    }
    const auto fa = rate_fit(a), fb = rate_fit(b);
    EXPECT_NEAR(fa.slope, 1.0, 1e-12);
    EXPECT_NEAR(fa.intercept, 0.0, 1e-12);
    EXPECT_NEAR(fa.r2, 1.0, 1e-12);
    EXPECT_NEAR(fb.slope, 1.5, 1e-12);
    EXPECT_NEAR(fb.intercept, std::log(3.0), 1e-12);
}

TEST(RateFit, SeededNoise) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 0.05);
    std::vector<std::pair<double, double>> pts;
    for (int k = 1; k <= 10; ++k) {
        const double e = std::ldexp(1.0, -k);
        pts.emplace_back(e, 2.0 * std::sqrt(e) * std::exp(n(rng)));
    }
    const auto f = rate_fit(pts);
    EXPECT_NEAR(f.slope, 0.5, 0.05);
    EXPECT_GT(f.r2, 0.9);
    EXPECT_EQ(rate_fit(pts).slope, f.slope);
}

TEST(RateFit, Errors) {
    EXPECT_THROW(rate_fit({{0.1, 0.1}, {0.05, 0.05}}), InputError);
    EXPECT_THROW(rate_fit({{0.1, 0.1}, {0.05, 0.0}, {0.025, 0.01}}), InputError);
    EXPECT_THROW(rate_fit({{-0.1, 0.1}, {0.05, 0.05}, {0.025, 0.01}}), InputError);
}
