#include "mts/integrator.hpp"

#include <cmath>
#include <string>

namespace mts {

namespace {

// Scratch buffers reused across the substeps of one trajectory.
struct Workspace {
    explicit Workspace(std::size_t n) : force(n), fast(n) {}
    std::vector<double> force;
    std::vector<double> fast;
};

void kick_inplace(PhaseState& s, const Problem& problem, double tau, Workspace& ws)
{
    problem.slow_force(s.x, ws.force);
    for (std::size_t i = 0; i < s.v.size(); ++i)
        s.v[i] += tau * ws.force[i];
}

void fast_flow_inplace(PhaseState& s, const Problem& problem, double tau, double inner_dt, Workspace& ws)
{
    const int m = substep_count(tau, inner_dt);
    const double h = tau / m;
    const double eps = problem.epsilon();
    const double half = 0.5 * h / (eps * eps);
    const std::size_t n = s.x.size();

    problem.fast_force(s.x, ws.fast);
    for (int j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < n; ++i)
            s.v[i] += half * ws.fast[i];
        for (std::size_t i = 0; i < n; ++i)
            s.x[i] += h * s.v[i];
        problem.fast_force(s.x, ws.fast);
        for (std::size_t i = 0; i < n; ++i)
            s.v[i] += half * ws.fast[i];
    }
    s.t += tau;
}

void step_inplace(PhaseState& s, const Problem& problem, const SplittingScheme& scheme, const StepConfig& config,
                  Workspace& ws)
{
    const double t0 = s.t;
    const std::size_t k = scheme.stages();
    auto stage_kick = [&](std::size_t i) {
        if (scheme.c()[i] != 0.0)
            kick_inplace(s, problem, scheme.c()[i] * config.dt, ws);
    };
    auto stage_flow = [&](std::size_t i) {
        if (scheme.d()[i] != 0.0)
            fast_flow_inplace(s, problem, scheme.d()[i] * config.dt, config.inner_dt, ws);
    };
    if (config.order == ExecutionOrder::LeftToRight) {
        for (std::size_t i = 0; i < k; ++i) {
            stage_kick(i);
            stage_flow(i);
        }
    } else {
        for (std::size_t i = k; i-- > 0;) {
            stage_flow(i);
            stage_kick(i);
        }
    }
    s.t = t0 + config.dt;
}

void check_scheme(const SplittingScheme& scheme)
{
    if (auto violations = validate(scheme); !violations.empty()) {
        std::string msg = "invalid scheme:";
        for (const auto& v : violations)
            msg += " " + v + ";";
        throw std::invalid_argument(msg);
    }
}

void check_state(const PhaseState& state, const Problem& problem)
{
    if (state.x.size() != problem.dimension() || state.v.size() != problem.dimension())
        throw std::invalid_argument("state dimension does not match problem '" + std::string(problem.name()) + "'");
}

} // namespace

void StepConfig::validate() const
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("outer step dt must be positive and finite");
    if (!(inner_dt > 0.0) || !std::isfinite(inner_dt))
        throw std::invalid_argument("inner step must be positive and finite");
    if (inner_dt > dt)
        throw std::invalid_argument("inner step must not exceed the outer step");
}

DivergenceError::DivergenceError(std::size_t step)
    : std::runtime_error("diverged at step " + std::to_string(step)), step_(step)
{
}

int substep_count(double tau, double inner_dt)
{
    return std::max(1, static_cast<int>(std::lround(std::abs(tau) / inner_dt)));
}

PhaseState kick(PhaseState state, const Problem& problem, double tau)
{
    check_state(state, problem);
    Workspace ws(problem.dimension());
    kick_inplace(state, problem, tau, ws);
    return state;
}

PhaseState fast_flow(PhaseState state, const Problem& problem, double tau, double inner_dt)
{
    check_state(state, problem);
    if (!(inner_dt > 0.0))
        throw std::invalid_argument("inner step must be positive");
    Workspace ws(problem.dimension());
    fast_flow_inplace(state, problem, tau, inner_dt, ws);
    return state;
}

PhaseState step(PhaseState state, const Problem& problem, const SplittingScheme& scheme, const StepConfig& config)
{
    check_state(state, problem);
    check_scheme(scheme);
    config.validate();
    Workspace ws(problem.dimension());
    step_inplace(state, problem, scheme, config, ws);
    return state;
}

Trajectory integrate(const PhaseState& initial, const Problem& problem, const SplittingScheme& scheme,
                     const StepConfig& config, std::size_t n_steps, const Observer& observer)
{
    if (n_steps < 1)
        throw std::invalid_argument("integrate: n_steps must be at least 1");
    check_state(initial, problem);
    check_scheme(scheme);
    config.validate();

    Workspace ws(problem.dimension());
    Trajectory out;
    out.reserve(n_steps + 1);
    out.push_back(initial);
    if (observer)
        observer(0, initial);

    PhaseState s = initial;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        step_inplace(s, problem, scheme, config, ws);
        s.t = initial.t + static_cast<double>(n) * config.dt;
        if (!s.is_finite())
            throw DivergenceError(n);
        out.push_back(s);
        if (observer)
            observer(n, s);
    }
    return out;
}

Trajectory reference_verlet(const PhaseState& initial, const Problem& problem, double dt_ref, std::size_t n_steps,
                            std::size_t stride)
{
    if (!(dt_ref > 0.0) || !std::isfinite(dt_ref))
        throw std::invalid_argument("reference step must be positive and finite");
    if (stride == 0)
        throw std::invalid_argument("sampling stride must be positive");
    check_state(initial, problem);

    const std::size_t dim = problem.dimension();
    const double inv_eps2 = 1.0 / (problem.epsilon() * problem.epsilon());
    std::vector<double> slow(dim), fast(dim), accel(dim);
    auto acceleration = [&](const std::vector<double>& x) {
        problem.slow_force(x, slow);
        problem.fast_force(x, fast);
        for (std::size_t i = 0; i < dim; ++i)
            accel[i] = slow[i] + inv_eps2 * fast[i];
    };

    Trajectory out;
    out.push_back(initial);
    PhaseState s = initial;
    acceleration(s.x);
    const double half = 0.5 * dt_ref;
    for (std::size_t n = 1; n <= n_steps; ++n) {
        for (std::size_t i = 0; i < dim; ++i)
            s.v[i] += half * accel[i];
        for (std::size_t i = 0; i < dim; ++i)
            s.x[i] += dt_ref * s.v[i];
        acceleration(s.x);
        for (std::size_t i = 0; i < dim; ++i)
            s.v[i] += half * accel[i];
        s.t = initial.t + static_cast<double>(n) * dt_ref;
        if (!s.is_finite())
            throw DivergenceError(n);
        if (n % stride == 0 || n == n_steps)
            out.push_back(s);
    }
    return out;
}

} // namespace mts
