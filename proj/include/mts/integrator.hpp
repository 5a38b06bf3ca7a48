#pragma once

// Execution of a splitting scheme: exact slow-force kicks interleaved with
// velocity-Verlet integration of the fast subsystem x' = v, v' = eps^-2 g(x).

#include "mts/problem.hpp"
#include "mts/scheme.hpp"
#include "mts/state.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>

namespace mts {

enum class ExecutionOrder {
    LeftToRight, // kick c_1, flow d_1, ..., kick c_k, flow d_k
    RightToLeft, // flow d_k, kick c_k, ..., flow d_1, kick c_1 (the adjoint sequence)
};

struct StepConfig {
    double dt = 0.12;       // outer step
    double inner_dt = 0.01; // target inner Verlet step
    ExecutionOrder order = ExecutionOrder::LeftToRight;

    // Throws std::invalid_argument unless 0 < inner_dt <= dt, both finite.
    void validate() const;
};

class DivergenceError : public std::runtime_error {
public:
    explicit DivergenceError(std::size_t step);
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

// max(1, round(|tau| / inner_dt)): Verlet substeps used for a fast flow of duration tau.
int substep_count(double tau, double inner_dt);

// v <- v + tau f(x); x and t unchanged.
PhaseState kick(PhaseState state, const Problem& problem, double tau);

// Velocity Verlet on the fast subsystem over duration tau (may be negative) with
// substep_count(tau, inner_dt) equal substeps; t <- t + tau.
PhaseState fast_flow(PhaseState state, const Problem& problem, double tau, double inner_dt);

// One outer step of size config.dt. Zero coefficients are skipped; t ends at t + dt.
// Throws std::invalid_argument for an invalid scheme or config.
PhaseState step(PhaseState state, const Problem& problem, const SplittingScheme& scheme, const StepConfig& config);

using Observer = std::function<void(std::size_t step, const PhaseState& state)>;

// n_steps outer steps; returns the initial state followed by one sample per step.
// The observer, if set, sees every sample. Throws DivergenceError on a non-finite state.
Trajectory integrate(const PhaseState& initial, const Problem& problem, const SplittingScheme& scheme,
                     const StepConfig& config, std::size_t n_steps, const Observer& observer = {});

// Velocity Verlet on the full force f + eps^-2 g with step dt_ref. Samples the
// initial state, every `stride`-th step, and the final state.
Trajectory reference_verlet(const PhaseState& initial, const Problem& problem, double dt_ref, std::size_t n_steps,
                            std::size_t stride = 1);

} // namespace mts
