#include "generators.hpp"
#include "mts/analysis.hpp"
#include "mts/integrator.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mts;

namespace {

// x'' = a x + eps^-2 b x in one dimension, with optional overflow.
class Linear1D final : public Problem {
public:
    Linear1D(double a, double b, double eps = 1.0) : a_(a), b_(b), eps_(eps) {}
    std::string_view name() const override { return "linear1d"; }
    std::size_t dimension() const override { return 1; }
    double epsilon() const override { return eps_; }
    void slow_force(std::span<const double> x, std::span<double> f) const override { f[0] = a_ * x[0]; }
    void fast_force(std::span<const double> x, std::span<double> g) const override { g[0] = b_ * x[0]; }

private:
    double a_, b_, eps_;
};

double max_diff(const PhaseState& a, const PhaseState& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i)
        m = std::max({m, std::abs(a.x[i] - b.x[i]), std::abs(a.v[i] - b.v[i])});
    return m;
}

const double pi = std::numbers::pi;

} // namespace

TEST_CASE("kick")
{
    const Linear1D free(0.0, 0.0);
    const PhaseState s{0.0, {0.3}, {-0.7}};
    CHECK(kick(s, free, 2.0) == s);

    const LinearResonance lin;
    const auto k = kick(PhaseState{0.0, {1.0}, {0.0}}, lin, 1.0);
    CHECK(k.v[0] == doctest::Approx(-pi * pi / 25).epsilon(1e-15));
    CHECK(k.x[0] == 1.0);
    CHECK(k.t == 0.0);

    gen::Rng rng(41);
    const CoupledOscillator osc;
    for (int i = 0; i < 10; ++i) {
        const auto s0 = gen::oscillator_state(rng);
        const double tau = gen::uniform(rng, -1, 1);
        const auto back = kick(kick(s0, osc, tau), osc, -tau);
        CHECK(max_diff(back, s0) < 1e-15);
    }
}

TEST_CASE("fast flow")
{
    SUBCASE("free drift")
    {
        const Linear1D free(0.0, 0.0);
        const auto s = fast_flow(PhaseState{1.0, {0.5}, {2.0}}, free, 0.3, 0.01);
        CHECK(s.x[0] == doctest::Approx(0.5 + 0.3 * 2.0).epsilon(1e-14));
        CHECK(s.v[0] == 2.0);
        CHECK(s.t == doctest::Approx(1.3));
    }
    SUBCASE("harmonic rotation, second order")
    {
        const Linear1D harmonic(0.0, -pi * pi);
        std::vector<double> err;
        std::vector<double> h;
        for (int m : {100, 200, 400, 800}) {
            const auto s = fast_flow(PhaseState{0.0, {1.0}, {0.0}}, harmonic, 1.0, 1.0 / m);
            // x sits at a turning point at tau = 1, so v carries the leading phase error.
            err.push_back(max_diff(s, PhaseState{1.0, {std::cos(pi)}, {-pi * std::sin(pi)}}));
            h.push_back(1.0 / m);
        }
        CHECK(err[0] < 1e-3);
        const double order = fit_loglog_slope(h, err);
        CHECK(order == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("time reversible")
    {
        const CoupledOscillator osc;
        gen::Rng rng(42);
        for (int i = 0; i < 10; ++i) {
            const auto s0 = gen::oscillator_state(rng);
            const double tau = gen::uniform(rng, 0.05, 0.3);
            const auto back = fast_flow(fast_flow(s0, osc, tau, 0.01), osc, -tau, 0.01);
            CHECK(max_diff(back, s0) < 1e-12);
        }
    }
    CHECK(substep_count(0.12, 0.01) == 12);
    CHECK(substep_count(-0.2043, 0.01) == 20);
    CHECK(substep_count(0.001, 0.01) == 1);
}

TEST_CASE("impulse I step is half kick, fast flow, half kick")
{
    const CoupledOscillator osc;
    gen::Rng rng(43);
    const StepConfig config{0.12, 0.01};
    for (int i = 0; i < 5; ++i) {
        const auto s0 = gen::oscillator_state(rng);
        const auto manual = kick(fast_flow(kick(s0, osc, 0.06), osc, 0.12, 0.01), osc, 0.06);
        CHECK(step(s0, osc, impulse_I(), config) == manual);
    }
}

TEST_CASE("free particle: every scheme drifts exactly")
{
    const Linear1D free(0.0, 0.0);
    for (const auto& scheme : impulse_catalog()) {
        const auto s = step(PhaseState{0.0, {1.0}, {-0.5}}, free, scheme, StepConfig{0.12, 0.01});
        CHECK(s.x[0] == doctest::Approx(1.0 - 0.06).epsilon(1e-14));
        CHECK(s.v[0] == -0.5);
        CHECK(s.t == 0.12);
    }
}

TEST_CASE("step equals the propagation matrix on the linear model")
{
    const LinearResonance lin;
    gen::Rng rng(44);
    for (const auto& scheme : impulse_catalog()) {
        for (int i = 0; i < 50; ++i) {
            const double dt = gen::uniform(rng, 0.05, 3.0);
            const StepConfig config{dt, dt / 24};
            const auto s0 = gen::linear_state(rng);
            const auto s1 = step(s0, lin, scheme, config);
            const auto m = propagation_matrix(scheme, config, lin.slow_stiffness(), lin.fast_stiffness());
            const auto [x, v] = m.apply(s0.x[0], s0.v[0]);
            CHECK(std::abs(s1.x[0] - x) < 1e-12);
            CHECK(std::abs(s1.v[0] - v) < 1e-12);
            CHECK(std::abs(m.det() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("execution order")
{
    const CoupledOscillator osc;
    const auto s0 = CoupledOscillator::default_initial_state();
    const StepConfig fwd{0.12, 0.01, ExecutionOrder::LeftToRight};
    const StepConfig adj{0.12, 0.01, ExecutionOrder::RightToLeft};
    // Symmetric schemes run the same sequence of fractional maps either way.
    for (const auto& scheme : {impulse_I(), impulse_III(), impulse_IV()})
        CHECK(step(s0, osc, scheme, fwd) == step(s0, osc, scheme, adj));
    CHECK_FALSE(step(s0, osc, impulse_II(), fwd) == step(s0, osc, impulse_II(), adj));
    // The adjoint ordering of II undoes the forward ordering over a negative step.
    const auto there = step(s0, osc, impulse_II(), fwd);
    const auto manual_back = [&] {
        PhaseState s = there;
        s = fast_flow(s, osc, -0.04, 0.01);
        s = kick(s, osc, -0.09);
        s = fast_flow(s, osc, -0.08, 0.01);
        return kick(s, osc, -0.03);
    }();
    CHECK(max_diff(manual_back, s0) < 1e-13);
}

TEST_CASE("integrate")
{
    const CoupledOscillator osc;
    const auto s0 = CoupledOscillator::default_initial_state();
    const StepConfig config{0.12, 0.01};

    const auto one = integrate(s0, osc, impulse_III(), config, 1);
    REQUIRE(one.size() == 2);
    CHECK(one[1] == step(s0, osc, impulse_III(), config));

    const auto a = integrate(s0, osc, impulse_IV(), config, 50);
    const auto b = integrate(s0, osc, impulse_IV(), config, 50);
    CHECK(a == b);
    CHECK(a.back().t == doctest::Approx(6.0));

    std::size_t seen = 0;
    integrate(s0, osc, impulse_I(), config, 7, [&](std::size_t k, const PhaseState&) { seen = k + 1; });
    CHECK(seen == 8);

    CHECK_THROWS_AS(integrate(s0, osc, impulse_I(), config, 0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(s0, osc, SplittingScheme({0.5}, {1.0}), config, 1), std::invalid_argument);
    CHECK_THROWS_AS(integrate(PhaseState{0, {1}, {0}}, osc, impulse_I(), config, 1), std::invalid_argument);
}

TEST_CASE("symmetric schemes are reversible")
{
    const CoupledOscillator osc;
    const auto s0 = CoupledOscillator::default_initial_state();
    const StepConfig config{0.12, 0.01};
    for (const auto& scheme : {impulse_I(), impulse_III(), impulse_IV()}) {
        auto fwd = integrate(s0, osc, scheme, config, 100).back();
        for (double& v : fwd.v)
            v = -v;
        auto back = integrate(fwd, osc, scheme, config, 100).back();
        for (double& v : back.v)
            v = -v;
        CHECK(max_diff(back, s0) < 1e-6);
    }
}

TEST_CASE("divergence is reported with its step")
{
    const Linear1D runaway(1e200, 0.0);
    try {
        integrate(PhaseState{0, {1.0}, {0.0}}, runaway, impulse_I(), StepConfig{0.12, 0.01}, 100);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.step() >= 1);
        CHECK(std::string(e.what()) == "diverged at step " + std::to_string(e.step()));
    }
}

TEST_CASE("step configuration validation")
{
    CHECK_NOTHROW((StepConfig{0.12, 0.01}).validate());
    CHECK_THROWS_AS((StepConfig{0.0, 0.01}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((StepConfig{0.12, -1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((StepConfig{0.01, 0.12}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((StepConfig{NAN, 0.01}).validate(), std::invalid_argument);
}

TEST_CASE("reference Verlet")
{
    SUBCASE("free flight")
    {
        const Linear1D free(0.0, 0.0);
        const auto t = reference_verlet(PhaseState{0, {1.0}, {0.25}}, free, 0.1, 10);
        CHECK(t.size() == 11);
        CHECK(t.back().x[0] == doctest::Approx(1.25).epsilon(1e-14));
    }
    SUBCASE("linear model, second order against the closed form")
    {
        const LinearResonance lin;
        const auto s0 = LinearResonance::default_initial_state();
        const auto exact = *lin.exact_solution(s0, 1.0);
        const double e1 = std::abs(reference_verlet(s0, lin, 1e-3, 1000).back().x[0] - exact.x[0]);
        const double e2 = std::abs(reference_verlet(s0, lin, 5e-4, 2000).back().x[0] - exact.x[0]);
        CHECK(e1 < 1e-5);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
    }
    SUBCASE("oscillator self-convergence")
    {
        const CoupledOscillator osc;
        const auto s0 = CoupledOscillator::default_initial_state();
        const auto a = reference_verlet(s0, osc, 4e-3, 250, 250).back();
        const auto b = reference_verlet(s0, osc, 2e-3, 500, 500).back();
        const auto c = reference_verlet(s0, osc, 1e-3, 1000, 1000).back();
        CHECK(max_diff(a, b) / max_diff(b, c) == doctest::Approx(4.0).epsilon(0.1));
    }
    SUBCASE("sampling stride")
    {
        const LinearResonance lin;
        const auto t = reference_verlet(LinearResonance::default_initial_state(), lin, 0.01, 25, 10);
        CHECK(t.size() == 4); // 0, 10, 20, 25
        CHECK(t.back().t == doctest::Approx(0.25));
        CHECK_THROWS_AS(reference_verlet(LinearResonance::default_initial_state(), lin, 0.0, 1), std::invalid_argument);
    }
}

TEST_CASE("global error is second order with a fine inner step")
{
    const CoupledOscillator osc;
    const auto s0 = CoupledOscillator::default_initial_state();
    const std::vector<double> dts{0.03, 0.06, 0.12};
    const auto report = convergence_study(osc, s0, impulse_catalog(), dts, InnerStepRule{0.001, 0.0}, 5.0,
                                          Coordinate::parse("q1"), 1e-5);
    for (const auto& series : report.series) {
        INFO(series.scheme);
        CHECK(series.fitted_points == 3);
        CHECK(series.slope >= 1.8);
    }
}
