#include "generators.hpp"
#include "mts/analysis.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mts;

namespace {

// W = V = x^2 / 2 in one dimension.
class Quadratic final : public Problem {
public:
    explicit Quadratic(double eps) : eps_(eps) {}
    std::string_view name() const override { return "quadratic"; }
    std::size_t dimension() const override { return 1; }
    double epsilon() const override { return eps_; }
    void slow_force(std::span<const double> x, std::span<double> f) const override { f[0] = -x[0]; }
    void fast_force(std::span<const double> x, std::span<double> g) const override { g[0] = -x[0]; }
    std::optional<double> slow_potential(std::span<const double> x) const override { return 0.5 * x[0] * x[0]; }
    std::optional<double> fast_potential(std::span<const double> x) const override { return 0.5 * x[0] * x[0]; }

private:
    double eps_;
};

// W depends on x0 only and V on x1 only, so grad W . grad V = 0.
class Orthogonal final : public Problem {
public:
    std::string_view name() const override { return "orthogonal"; }
    std::size_t dimension() const override { return 2; }
    double epsilon() const override { return 0.5; }
    void slow_force(std::span<const double> x, std::span<double> f) const override
    {
        f[0] = -x[0] * x[0] * x[0];
        f[1] = 0.0;
    }
    void fast_force(std::span<const double> x, std::span<double> g) const override
    {
        g[0] = 0.0;
        g[1] = -x[1];
    }
    std::optional<double> slow_potential(std::span<const double> x) const override { return std::pow(x[0], 4) / 4; }
    std::optional<double> fast_potential(std::span<const double> x) const override { return x[1] * x[1] / 2; }
};

const double pi = std::numbers::pi;

} // namespace

TEST_CASE("energy statistics")
{
    const std::vector<double> flat(10, 3.5);
    const auto s = energy_stats(flat);
    CHECK(s.mean == 3.5);
    CHECK(s.std_dev == 0.0);
    CHECK(s.max_drift == 0.0);
    CHECK(s.samples == 10);

    const std::vector<double> h{1.0, 3.0, 1.0, 3.0};
    const auto t = energy_stats(h);
    CHECK(t.mean == 2.0);
    CHECK(t.std_dev == 1.0);
    CHECK(t.max_drift == 2.0);
    CHECK_THROWS_AS(energy_stats(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("oscillator energy fluctuation: impulse III below impulse I")
{
    const CoupledOscillator osc;
    const auto s0 = CoupledOscillator::default_initial_state();
    const StepConfig config{0.12, 0.01};
    const auto n = static_cast<std::size_t>(std::llround(50.0 / 0.12));
    const double std1 = energy_stats(integrate(s0, osc, impulse_I(), config, n), osc).std_dev;
    const double std3 = energy_stats(integrate(s0, osc, impulse_III(), config, n), osc).std_dev;
    CHECK(std3 < std1);
}

TEST_CASE("impulse I energy fluctuation scales as dt^2")
{
    // Fine inner step so the inner Verlet error does not mask the splitting error.
    const CoupledOscillator osc;
    const auto s0 = CoupledOscillator::default_initial_state();
    std::vector<double> dts{0.06, 0.12}, stds;
    for (double dt : dts) {
        const auto n = static_cast<std::size_t>(std::llround(50.0 / dt));
        stds.push_back(energy_stats(integrate(s0, osc, impulse_I(), StepConfig{dt, 0.001}, n), osc).std_dev);
    }
    CHECK(fit_loglog_slope(dts, stds) == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("bracket values")
{
    SUBCASE("quadratic potentials")
    {
        const Quadratic q(0.5);
        const PhaseState s{0, {0.7}, {-1.3}};
        const auto b = bracket_values(q, s);
        CHECK(b.h2_h1 == doctest::Approx(1.3 * 0.7));
        CHECK(b.h2_h2h1 == doctest::Approx(0.49));
        // p^2 W'' - eps^-2 W' V'
        CHECK(b.h2h1_h1 == doctest::Approx(1.69 - 0.49 / 0.25).epsilon(1e-8));
    }
    SUBCASE("orthogonal gradients, p = 0")
    {
        const Orthogonal o;
        const auto b = bracket_values(o, PhaseState{0, {0.8, 0.3}, {0.0, 0.0}});
        CHECK(b.h2h1_h1 == 0.0);
        CHECK(b.h2_h1 == 0.0);
    }
    SUBCASE("oscillator initial state")
    {
        const CoupledOscillator osc;
        const auto s0 = CoupledOscillator::default_initial_state();
        const auto f = osc.forces(s0.x).slow;
        double f2 = 0.0;
        for (double fi : f)
            f2 += fi * fi;
        CHECK(bracket_values(osc, s0).h2_h2h1 == doctest::Approx(f2).epsilon(1e-12));
        CHECK(f2 == doctest::Approx(2e-14).epsilon(1e-6));
    }
}

TEST_CASE("bracket formulas agree with finite-difference Poisson brackets")
{
    gen::Rng rng(51);
    std::vector<PhaseState> osc_states, lin_states, quad_states;
    for (int i = 0; i < 20; ++i) {
        osc_states.push_back(gen::oscillator_state(rng));
        lin_states.push_back(gen::linear_state(rng));
        quad_states.push_back(gen::linear_state(rng));
    }
    const auto a = bracket_sign_check(CoupledOscillator(), osc_states);
    const auto b = bracket_sign_check(LinearResonance(), lin_states);
    const auto c = bracket_sign_check(Quadratic(0.3), quad_states);
    CHECK(a.passed);
    CHECK(b.passed);
    CHECK(c.passed);
    CHECK(a.max_rel_antisymmetry < 1e-10);
    CHECK(a.states == 20);
}

TEST_CASE("finite-difference Poisson bracket of canonical coordinates")
{
    const PhaseFunction x0 = [](std::span<const double> x, std::span<const double>) { return x[0]; };
    const PhaseFunction p0 = [](std::span<const double>, std::span<const double> p) { return p[0]; };
    const std::vector<double> x{0.3, -0.2}, p{1.0, 2.0};
    // {F, G} = grad_p F . grad_x G - grad_x F . grad_p G
    CHECK(poisson_bracket_fd(p0, x0, x, p) == doctest::Approx(1.0));
    CHECK(poisson_bracket_fd(x0, p0, x, p) == doctest::Approx(-1.0));
    CHECK(std::abs(poisson_bracket_fd(x0, x0, x, p)) < 1e-14);
}

TEST_CASE("shadow Hamiltonian")
{
    const CoupledOscillator osc;
    gen::Rng rng(52);
    for (int i = 0; i < 100; ++i) {
        const auto s = gen::oscillator_state(rng);
        CHECK(shadow_hamiltonian(osc, s, 0.0, ShadowForm::ImpulseI) == osc.energy(s));
        CHECK(shadow_hamiltonian(osc, s, 0.0, ShadowForm::ImpulseII) == osc.energy(s));
    }

    const Quadratic q(1.0);
    const PhaseState s{0, {0.5}, {0.25}};
    const auto b = bracket_values(q, s);
    CHECK(shadow_hamiltonian(q, s, 0.2, ShadowForm::ImpulseI)
          == doctest::Approx(q.energy(s) + 0.04 / 12 * b.h2h1_h1 - 0.04 / 24 * b.h2_h2h1));
    CHECK(shadow_hamiltonian(q, s, 0.2, ShadowForm::ImpulseII)
          == doctest::Approx(q.energy(s) + 17 * 0.04 / 96 * b.h2_h2h1));

    CHECK(shadow_form_for(impulse_I()) == ShadowForm::ImpulseI);
    CHECK(shadow_form_for(parse_scheme("2;c=1/4,3/4;d=2/3,1/3")) == ShadowForm::ImpulseII);
    CHECK_FALSE(shadow_form_for(impulse_III()).has_value());
    CHECK_FALSE(shadow_form_for(impulse_IV()).has_value());
}

TEST_CASE("shadow Hamiltonian fluctuates less than H along impulse I")
{
    const CoupledOscillator osc;
    const auto traj = integrate(CoupledOscillator::default_initial_state(), osc, impulse_I(), StepConfig{0.12, 0.01}, 417);
    std::vector<double> hs;
    for (const auto& s : traj)
        hs.push_back(shadow_hamiltonian(osc, s, 0.12, ShadowForm::ImpulseI));
    CHECK(energy_stats(hs).std_dev < energy_stats(traj, osc).std_dev);
}

TEST_CASE("propagation matrix")
{
    const LinearResonance lin;
    const double kf = lin.slow_stiffness(), kg = lin.fast_stiffness();

    const auto tiny = propagation_matrix(impulse_III(), StepConfig{1e-9, 1e-10}, kf, kg);
    CHECK(std::abs(tiny.a11 - 1) < 1e-12);
    CHECK(std::abs(tiny.a12) < 1e-8);
    CHECK(std::abs(tiny.a21) < 1e-7);
    CHECK(std::abs(tiny.a22 - 1) < 1e-12);

    CHECK(std::abs(spectral_radius(propagation_matrix(impulse_I(), StepConfig{0.5, 0.5 / 24}, kf, kg)) - 1.0)
          < 1e-8);

    // Single kick: exact shear.
    const auto k = propagation_matrix(SplittingScheme({1.0}, {1.0}), StepConfig{1.0, 1.0}, kf, 0.0);
    CHECK(k.a21 == doctest::Approx(kf));

    CHECK(spectral_radius(Matrix2{2.0, 0.0, 0.0, 0.5}) == doctest::Approx(2.0));
    CHECK(spectral_radius(Matrix2{0.0, -1.0, 1.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("stability sweep")
{
    const LinearResonance lin;
    const auto grid = make_grid(0.05, 3.0, 0.001);
    CHECK(grid.size() == 2951);
    CHECK(grid.back() == doctest::Approx(3.0));
    CHECK(make_grid(1.0, 0.5, 0.1).empty());
    CHECK_THROWS_AS(make_grid(0.0, 1.0, 0.0), std::invalid_argument);

    const auto schemes = impulse_catalog();
    const auto report = stability_sweep(schemes, grid, InnerStepRule{}, lin);
    REQUIRE(report.rho.size() == 4);
    for (std::size_t s = 0; s < schemes.size(); ++s) {
        INFO(schemes[s].name());
        double peak1 = 0.0, peak2 = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double dt = grid[i], rho = report.rho[s][i];
            CHECK(std::abs(report.det[s][i] - 1.0) < 1e-12);
            const auto m = propagation_matrix(schemes[s], StepConfig{dt, dt / 24}, lin.slow_stiffness(),
                                              lin.fast_stiffness());
            // det 1: on the unit circle exactly when |trace| <= 2
            CHECK((std::abs(m.trace()) <= 2.0) == (rho <= 1.0 + 1e-7));
            if (dt >= 0.95 && dt <= 1.05)
                peak1 = std::max(peak1, rho);
            if (dt >= 1.9 && dt <= 2.1)
                peak2 = std::max(peak2, rho);
            const bool near_resonance = std::abs(dt - std::round(dt)) < 0.1;
            if (i > 0 && !near_resonance)
                CHECK(std::abs(rho - report.rho[s][i - 1]) < 0.5);
        }
        CHECK(peak1 > 1.0 + 1e-6);
        CHECK(peak2 > 1.0 + 1e-6);
    }
    CHECK_THROWS_AS(stability_sweep(schemes, std::vector<double>{}, InnerStepRule{}, lin), std::invalid_argument);
}

TEST_CASE("coordinates")
{
    CHECK(Coordinate::parse("q1").kind == Coordinate::Kind::Position);
    CHECK(Coordinate::parse("q1").index == 0);
    CHECK(Coordinate::parse("p2").kind == Coordinate::Kind::Velocity);
    CHECK(Coordinate::parse("p2").index == 1);
    CHECK(Coordinate::parse("x3").index == 3);
    CHECK(Coordinate::parse("v0").label() == "v0");
    CHECK_THROWS_AS(Coordinate::parse("q0"), std::invalid_argument);
    CHECK_THROWS_AS(Coordinate::parse("z1"), std::invalid_argument);
    CHECK_THROWS_AS(Coordinate::parse("x"), std::invalid_argument);
    CHECK_THROWS_AS(Coordinate::parse("x0").of(PhaseState{0, {}, {}}), std::out_of_range);
}

TEST_CASE("log-log slope fit")
{
    const std::vector<double> x{0.1, 0.2, 0.4}, y{0.02, 0.08, 0.32};
    CHECK(fit_loglog_slope(x, y) == doctest::Approx(2.0));
    CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_loglog_slope(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("convergence on the linear model against the closed form")
{
    const LinearResonance lin;
    const std::vector<double> dts{0.01, 0.02, 0.04, 0.08};
    const auto report = convergence_study(lin, LinearResonance::default_initial_state(), impulse_catalog(), dts,
                                          InnerStepRule{0.0, 24.0}, 10.0, Coordinate::parse("x0"));
    CHECK(report.analytic_reference);
    for (const auto& series : report.series) {
        INFO(series.scheme);
        CHECK(series.slope >= 1.8);
    }
}

TEST_CASE("convergence study on the oscillator")
{
    const CoupledOscillator osc;
    const auto s0 = CoupledOscillator::default_initial_state();
    const std::vector<double> dts{0.03, 0.06, 0.12};
    const auto report = convergence_study(osc, s0, impulse_catalog(), dts, InnerStepRule{0.01, 0.0}, 50.0,
                                          Coordinate::parse("p1"), 1e-4);
    CHECK_FALSE(report.analytic_reference);
    CHECK(report.reference_dt == 1e-4);
    CHECK(report.final_times.back() == doctest::Approx(50.04));
    // Momenta: all four methods within a factor 3 of each other at dt = 0.12.
    double lo = 1e300, hi = 0.0;
    for (const auto& series : report.series) {
        lo = std::min(lo, series.errors.back());
        hi = std::max(hi, series.errors.back());
    }
    CHECK(hi < 3 * lo);
}

TEST_CASE("convergence study argument checks")
{
    const LinearResonance lin;
    const auto s0 = LinearResonance::default_initial_state();
    const auto schemes = impulse_catalog();
    const auto x0 = Coordinate::parse("x0");
    CHECK_THROWS_AS(convergence_study(lin, s0, schemes, std::vector<double>{0.1, 0.2}, InnerStepRule{}, 1.0, x0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        convergence_study(lin, s0, schemes, std::vector<double>{0.1, 0.2, 0.4}, InnerStepRule{}, 1.0, x0, 0.01),
        std::invalid_argument);
}
