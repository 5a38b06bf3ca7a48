#pragma once

// Test problems of the form
//   x' = v,   v' = f(x) + eps^-2 g(x)
// with a slow force f = -grad W and a fast force g = -grad V. Problems expose
// g without the eps^-2 factor; the integrators and the energy apply it once.

#include "mts/state.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mts {

struct ForcePair {
    std::vector<double> slow; // f
    std::vector<double> fast; // g, without eps^-2
};

class Problem {
public:
    virtual ~Problem() = default;

    virtual std::string_view name() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual double epsilon() const = 0;

    virtual void slow_force(std::span<const double> x, std::span<double> f) const = 0;
    virtual void fast_force(std::span<const double> x, std::span<double> g) const = 0;

    // W and V (V without eps^-2), when the problem is Hamiltonian.
    virtual std::optional<double> slow_potential(std::span<const double>) const { return std::nullopt; }
    virtual std::optional<double> fast_potential(std::span<const double>) const { return std::nullopt; }

    // Closed-form solution from `initial` at time t, when one exists.
    virtual std::optional<PhaseState> exact_solution(const PhaseState&, double) const { return std::nullopt; }

    ForcePair forces(std::span<const double> x) const;

    // H = 1/2 |v|^2 + eps^-2 V(x) + W(x). Throws std::logic_error without potentials.
    double energy(const PhaseState& state) const;
};

// Planar nonlinear oscillator with state x = (q1, q2, theta1, theta2):
//   q''     = (1 - |q|)/|q| q + beta |theta - q|^2 (theta - q) + eps^-2 (theta - q)
//   theta'' =               - beta |theta - q|^2 (theta - q) - eps^-2 (theta - q)
class CoupledOscillator final : public Problem {
public:
    explicit CoupledOscillator(double epsilon = 0.1, double beta = 0.1);

    std::string_view name() const override { return "oscillator"; }
    std::size_t dimension() const override { return 4; }
    double epsilon() const override { return epsilon_; }
    double beta() const { return beta_; }

    // Throws std::domain_error at |q| = 0, where the slow force is singular.
    void slow_force(std::span<const double> x, std::span<double> f) const override;
    void fast_force(std::span<const double> x, std::span<double> g) const override;

    std::optional<double> slow_potential(std::span<const double> x) const override;
    std::optional<double> fast_potential(std::span<const double> x) const override;

    // q = (1, 0), theta = (1.01, 0), q' = (0, 1), theta' = (0, 0.05)
    static PhaseState default_initial_state();

private:
    double epsilon_;
    double beta_;
};

// Scalar linear model f = k_f x, g = k_g x with eps = 1. Defaults
// k_f = -(pi/5)^2 and k_g = -pi^2 give a fast period of 2.
class LinearResonance final : public Problem {
public:
    LinearResonance();
    LinearResonance(double slow_stiffness, double fast_stiffness);

    std::string_view name() const override { return "linear"; }
    std::size_t dimension() const override { return 1; }
    double epsilon() const override { return 1.0; }
    double slow_stiffness() const { return k_slow_; }
    double fast_stiffness() const { return k_fast_; }

    void slow_force(std::span<const double> x, std::span<double> f) const override;
    void fast_force(std::span<const double> x, std::span<double> g) const override;

    std::optional<double> slow_potential(std::span<const double> x) const override;
    std::optional<double> fast_potential(std::span<const double> x) const override;

    // Valid for k_f + k_g < 0 (oscillatory total force).
    std::optional<PhaseState> exact_solution(const PhaseState& initial, double t) const override;

    // x = 1, v = 0
    static PhaseState default_initial_state();

private:
    double k_slow_;
    double k_fast_;
};

} // namespace mts
