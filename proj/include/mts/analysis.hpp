#pragma once

// Diagnostics for splitting integrators: energy statistics, the shadow
// Hamiltonian, Poisson-bracket checks, the linear propagation matrix and its
// spectral radius, and convergence studies against a fine reference.

#include "mts/integrator.hpp"
#include "mts/problem.hpp"
#include "mts/scheme.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mts {

// ---------------------------------------------------------------------------
// Energy

struct EnergyStats {
    double mean = 0.0;
    double std_dev = 0.0;   // population standard deviation
    double max_drift = 0.0; // max |H(t) - H(0)|
    std::size_t samples = 0;
};

// Throws std::invalid_argument for fewer than two samples.
EnergyStats energy_stats(std::span<const double> energies);
EnergyStats energy_stats(const Trajectory& trajectory, const Problem& problem);

std::vector<double> energies(const Trajectory& trajectory, const Problem& problem);

// ---------------------------------------------------------------------------
// Hamiltonian splitting H = H1 + H2 with H2 = W(x), H1 = eps^-2 V(x) + |p|^2 / 2.
//
// Brackets use {F, G} = grad_p F . grad_x G - grad_x F . grad_p G, under which
// {H2, H1} = -p . grad W. The two double brackets do not depend on the sign
// convention.

struct BracketValues {
    double h2_h1 = 0.0;    // {H2, H1}    = -p . grad W
    double h2h1_h1 = 0.0;  // {{H2,H1},H1} = p' Hess(W) p - eps^-2 grad W . grad V
    double h2_h2h1 = 0.0;  // {H2,{H2,H1}} = grad W . grad W
};

// Closed-form bracket values; the Hessian term is a central difference of
// grad W along p with h = 1e-5 (1 + |x|).
BracketValues bracket_values(const Problem& problem, const PhaseState& state);

enum class ShadowForm { ImpulseI, ImpulseII };

// Impulse I:  H + dt^2/12 {{H2,H1},H1} - dt^2/24 {H2,{H2,H1}}
// Impulse II: H + 17 dt^2/96 {H2,{H2,H1}}
double shadow_hamiltonian(const Problem& problem, const PhaseState& state, double dt, ShadowForm form);

// nullopt unless the scheme is impulse I or II (matched by coefficients).
std::optional<ShadowForm> shadow_form_for(const SplittingScheme& scheme);

using PhaseFunction = std::function<double(std::span<const double> x, std::span<const double> p)>;

// {F, G} at (x, p) by fourth-order central differences with relative step h.
double poisson_bracket_fd(const PhaseFunction& f, const PhaseFunction& g, std::span<const double> x,
                          std::span<const double> p, double h = 1e-3);

struct BracketCheck {
    double max_rel_error_h2_h1 = 0.0;
    double max_rel_error_h2h1_h1 = 0.0;
    double max_rel_error_h2_h2h1 = 0.0;
    double max_rel_antisymmetry = 0.0; // |{H1,H2} + {H2,H1}| relative
    std::size_t states = 0;
    bool passed = false;
};

// Compares bracket_values() with nested finite-difference Poisson brackets of
// H1 and H2 at each state. Relative errors use max(|formula|, 1e-8) as scale.
BracketCheck bracket_sign_check(const Problem& problem, std::span<const PhaseState> states, double tol = 1e-5);

// ---------------------------------------------------------------------------
// Linear stability

struct Matrix2 {
    double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;

    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }
    std::array<double, 2> apply(double x, double v) const { return {a11 * x + a12 * v, a21 * x + a22 * v}; }

    friend Matrix2 operator*(const Matrix2& l, const Matrix2& r)
    {
        return {l.a11 * r.a11 + l.a12 * r.a21, l.a11 * r.a12 + l.a12 * r.a22, l.a21 * r.a11 + l.a22 * r.a21,
                l.a21 * r.a12 + l.a22 * r.a22};
    }
};

// Largest eigenvalue modulus.
double spectral_radius(const Matrix2& m);

// One-step map (x, v) -> (x', v') of the scheme on x'' = k_slow x + k_fast x
// (eps = 1), composed in the integrator's execution order and substep rule.
Matrix2 propagation_matrix(const SplittingScheme& scheme, const StepConfig& config, double k_slow, double k_fast);

// Inner step per outer step: `absolute` when positive, otherwise dt / ratio.
struct InnerStepRule {
    double absolute = 0.0;
    double ratio = 24.0;

    double resolve(double dt) const { return absolute > 0.0 ? std::min(absolute, dt) : dt / ratio; }
};

struct StabilityReport {
    std::vector<double> dts;
    std::vector<std::string> schemes;
    std::vector<std::vector<double>> rho; // [scheme][dt]
    std::vector<std::vector<double>> det; // [scheme][dt]
};

// lo, lo + step, ... up to hi (inclusive within step/2). Empty when lo > hi.
std::vector<double> make_grid(double lo, double hi, double step);

StabilityReport stability_sweep(std::span<const SplittingScheme> schemes, std::span<const double> dts,
                                const InnerStepRule& inner, const LinearResonance& problem,
                                ExecutionOrder order = ExecutionOrder::LeftToRight);

// ---------------------------------------------------------------------------
// Convergence

struct Coordinate {
    enum class Kind { Position, Velocity };
    Kind kind = Kind::Position;
    std::size_t index = 0;

    // "x0", "v1", or the 1-based aliases "q1", "p1".
    static Coordinate parse(std::string_view text);
    std::string label() const;
    double of(const PhaseState& state) const;
};

// |value of coordinate| scale used for the pre-saturation cutoff: the max-norm
// of the position (or velocity) block.
double block_magnitude(const PhaseState& state, Coordinate::Kind kind);

// Ordinary least squares slope of log y against log x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct ConvergenceSeries {
    std::string scheme;
    std::vector<double> errors;
    double slope = 0.0;
    std::size_t fitted_points = 0;
};

struct ConvergenceReport {
    std::vector<double> dts;
    std::vector<double> final_times; // realized n * dt per grid point
    Coordinate coordinate;
    double reference_dt = 0.0;
    bool analytic_reference = false;
    std::vector<ConvergenceSeries> series;
};

// Fine reference state at time t: the closed-form solution when the problem
// has one, otherwise reference Verlet with the largest step <= dt_ref that
// lands exactly on t.
PhaseState reference_state(const Problem& problem, const PhaseState& initial, double t, double dt_ref);

// Final-time error per scheme and dt. The slope is fitted over points whose
// error is below 10% of the reference block magnitude. Throws
// std::invalid_argument for fewer than 3 grid points or reference_dt > min(dt)/100.
// reference_dt defaults to min(dt)/100.
ConvergenceReport convergence_study(const Problem& problem, const PhaseState& initial,
                                    std::span<const SplittingScheme> schemes, std::span<const double> dts,
                                    const InnerStepRule& inner, double t_final, Coordinate coordinate,
                                    std::optional<double> reference_dt = std::nullopt,
                                    ExecutionOrder order = ExecutionOrder::LeftToRight);

} // namespace mts
