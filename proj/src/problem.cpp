#include "mts/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mts {

ForcePair Problem::forces(std::span<const double> x) const
{
    ForcePair out{std::vector<double>(dimension()), std::vector<double>(dimension())};
    slow_force(x, out.slow);
    fast_force(x, out.fast);
    return out;
}

double Problem::energy(const PhaseState& state) const
{
    auto w = slow_potential(state.x);
    auto v = fast_potential(state.x);
    if (!w || !v)
        throw std::logic_error(std::string(name()) + ": potentials unavailable");
    double kinetic = 0.0;
    for (double p : state.v)
        kinetic += p * p;
    const double eps = epsilon();
    return 0.5 * kinetic + *v / (eps * eps) + *w;
}

CoupledOscillator::CoupledOscillator(double epsilon, double beta) : epsilon_(epsilon), beta_(beta)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("oscillator: eps must be positive and finite");
    if (!std::isfinite(beta))
        throw std::invalid_argument("oscillator: beta must be finite");
}

void CoupledOscillator::slow_force(std::span<const double> x, std::span<double> f) const
{
    const double q1 = x[0], q2 = x[1];
    const double r1 = x[2] - q1, r2 = x[3] - q2;
    const double qn = std::hypot(q1, q2);
    if (qn == 0.0)
        throw std::domain_error("oscillator: slow force is singular at |q| = 0");
    const double radial = (1.0 - qn) / qn;
    const double cubic = beta_ * (r1 * r1 + r2 * r2);
    f[0] = radial * q1 + cubic * r1;
    f[1] = radial * q2 + cubic * r2;
    f[2] = -cubic * r1;
    f[3] = -cubic * r2;
}

void CoupledOscillator::fast_force(std::span<const double> x, std::span<double> g) const
{
    const double r1 = x[2] - x[0], r2 = x[3] - x[1];
    g[0] = r1;
    g[1] = r2;
    g[2] = -r1;
    g[3] = -r2;
}

std::optional<double> CoupledOscillator::slow_potential(std::span<const double> x) const
{
    const double r1 = x[2] - x[0], r2 = x[3] - x[1];
    const double r_sq = r1 * r1 + r2 * r2;
    const double stretch = std::hypot(x[0], x[1]) - 1.0;
    return 0.25 * beta_ * r_sq * r_sq + 0.5 * stretch * stretch;
}

std::optional<double> CoupledOscillator::fast_potential(std::span<const double> x) const
{
    const double r1 = x[2] - x[0], r2 = x[3] - x[1];
    return 0.5 * (r1 * r1 + r2 * r2);
}

PhaseState CoupledOscillator::default_initial_state()
{
    return PhaseState{0.0, {1.0, 0.0, 1.01, 0.0}, {0.0, 1.0, 0.0, 0.05}};
}

LinearResonance::LinearResonance()
    : LinearResonance(-(std::numbers::pi / 5.0) * (std::numbers::pi / 5.0), -std::numbers::pi * std::numbers::pi)
{
}

LinearResonance::LinearResonance(double slow_stiffness, double fast_stiffness)
    : k_slow_(slow_stiffness), k_fast_(fast_stiffness)
{
}

void LinearResonance::slow_force(std::span<const double> x, std::span<double> f) const
{
    f[0] = k_slow_ * x[0];
}

void LinearResonance::fast_force(std::span<const double> x, std::span<double> g) const
{
    g[0] = k_fast_ * x[0];
}

std::optional<double> LinearResonance::slow_potential(std::span<const double> x) const
{
    return -0.5 * k_slow_ * x[0] * x[0];
}

std::optional<double> LinearResonance::fast_potential(std::span<const double> x) const
{
    return -0.5 * k_fast_ * x[0] * x[0];
}

std::optional<PhaseState> LinearResonance::exact_solution(const PhaseState& initial, double t) const
{
    const double k = k_slow_ + k_fast_;
    if (!(k < 0.0))
        return std::nullopt;
    const double omega = std::sqrt(-k);
    const double tau = t - initial.t;
    const double c = std::cos(omega * tau), s = std::sin(omega * tau);
    PhaseState out{t, {c * initial.x[0] + s * initial.v[0] / omega}, {-omega * s * initial.x[0] + c * initial.v[0]}};
    return out;
}

PhaseState LinearResonance::default_initial_state()
{
    return PhaseState{0.0, {1.0}, {0.0}};
}

} // namespace mts
