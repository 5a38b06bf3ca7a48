#include "mts/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace mts {

namespace {

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a)
{
    return std::sqrt(dot(a, a));
}

// grad W = -f
std::vector<double> grad_slow(const Problem& problem, std::span<const double> x)
{
    std::vector<double> g(problem.dimension());
    problem.slow_force(x, g);
    for (double& gi : g)
        gi = -gi;
    return g;
}

std::vector<double> grad_fast(const Problem& problem, std::span<const double> x)
{
    std::vector<double> g(problem.dimension());
    problem.fast_force(x, g);
    for (double& gi : g)
        gi = -gi;
    return g;
}

double rel_error(double measured, double expected)
{
    return std::abs(measured - expected) / std::max(std::abs(expected), 1e-8);
}

} // namespace

EnergyStats energy_stats(std::span<const double> h)
{
    if (h.size() < 2)
        throw std::invalid_argument("energy_stats: need at least two samples");
    EnergyStats out;
    out.samples = h.size();
    out.mean = std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
    double var = 0.0;
    for (double e : h) {
        var += (e - out.mean) * (e - out.mean);
        out.max_drift = std::max(out.max_drift, std::abs(e - h.front()));
    }
    out.std_dev = std::sqrt(var / static_cast<double>(h.size()));
    return out;
}

std::vector<double> energies(const Trajectory& trajectory, const Problem& problem)
{
    std::vector<double> out;
    out.reserve(trajectory.size());
    for (const auto& s : trajectory)
        out.push_back(problem.energy(s));
    return out;
}

EnergyStats energy_stats(const Trajectory& trajectory, const Problem& problem)
{
    auto h = energies(trajectory, problem);
    return energy_stats(h);
}

BracketValues bracket_values(const Problem& problem, const PhaseState& state)
{
    const auto& x = state.x;
    const auto& p = state.v;
    const auto gw = grad_slow(problem, x);
    const auto gv = grad_fast(problem, x);
    const double eps = problem.epsilon();

    // p' Hess(W) p as the derivative of grad W . p along p
    const double h = 1e-5 * (1.0 + norm(x));
    std::vector<double> xp(x), xm(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] += h * p[i];
        xm[i] -= h * p[i];
    }
    const auto gwp = grad_slow(problem, xp);
    const auto gwm = grad_slow(problem, xm);
    const double hess_pp = (dot(gwp, p) - dot(gwm, p)) / (2.0 * h);

    BracketValues out;
    out.h2_h1 = -dot(p, gw);
    out.h2h1_h1 = hess_pp - dot(gw, gv) / (eps * eps);
    out.h2_h2h1 = dot(gw, gw);
    return out;
}

double shadow_hamiltonian(const Problem& problem, const PhaseState& state, double dt, ShadowForm form)
{
    const double h = problem.energy(state);
    if (dt == 0.0)
        return h;
    const auto b = bracket_values(problem, state);
    const double dt2 = dt * dt;
    switch (form) {
    case ShadowForm::ImpulseI:
        return h + dt2 / 12.0 * b.h2h1_h1 - dt2 / 24.0 * b.h2_h2h1;
    case ShadowForm::ImpulseII:
        return h + 17.0 * dt2 / 96.0 * b.h2_h2h1;
    }
    return h;
}

std::optional<ShadowForm> shadow_form_for(const SplittingScheme& scheme)
{
    auto same = [](const SplittingScheme& a, const SplittingScheme& b) {
        if (a.stages() != b.stages())
            return false;
        for (std::size_t i = 0; i < a.stages(); ++i)
            if (std::abs(a.c()[i] - b.c()[i]) > 1e-14 || std::abs(a.d()[i] - b.d()[i]) > 1e-14)
                return false;
        return true;
    };
    if (same(scheme, impulse_I()))
        return ShadowForm::ImpulseI;
    if (same(scheme, impulse_II()))
        return ShadowForm::ImpulseII;
    return std::nullopt;
}

double poisson_bracket_fd(const PhaseFunction& f, const PhaseFunction& g, std::span<const double> x,
                          std::span<const double> p, double h)
{
    const std::size_t n = x.size();
    std::vector<double> xs(x.begin(), x.end()), ps(p.begin(), p.end());

    // d/dz_i of fn, where z_i is x_i (use_p = false) or p_i
    auto partial = [&](const PhaseFunction& fn, std::size_t i, bool use_p) {
        double& z = use_p ? ps[i] : xs[i];
        const double z0 = z;
        const double step = h * (1.0 + std::abs(z0));
        auto at = [&](double offset) {
            z = z0 + offset;
            return fn(xs, ps);
        };
        const double d = (-at(2.0 * step) + 8.0 * at(step) - 8.0 * at(-step) + at(-2.0 * step)) / (12.0 * step);
        z = z0;
        return d;
    };

    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += partial(f, i, true) * partial(g, i, false) - partial(f, i, false) * partial(g, i, true);
    return acc;
}

BracketCheck bracket_sign_check(const Problem& problem, std::span<const PhaseState> states, double tol)
{
    const double eps2 = problem.epsilon() * problem.epsilon();
    PhaseFunction h2 = [&problem](std::span<const double> x, std::span<const double>) {
        return *problem.slow_potential(x);
    };
    PhaseFunction h1 = [&problem, eps2](std::span<const double> x, std::span<const double> p) {
        return *problem.fast_potential(x) / eps2 + 0.5 * dot(p, p);
    };
    if (!problem.slow_potential(states.empty() ? std::span<const double>{} : std::span<const double>(states[0].x)))
        throw std::logic_error("bracket_sign_check: problem has no potentials");

    PhaseFunction h2_h1 = [&](std::span<const double> x, std::span<const double> p) {
        return poisson_bracket_fd(h2, h1, x, p);
    };

    BracketCheck out;
    for (const auto& s : states) {
        const auto expected = bracket_values(problem, s);
        const double fd_h2_h1 = poisson_bracket_fd(h2, h1, s.x, s.v);
        const double fd_h1_h2 = poisson_bracket_fd(h1, h2, s.x, s.v);
        const double fd_h2h1_h1 = poisson_bracket_fd(h2_h1, h1, s.x, s.v);
        const double fd_h2_h2h1 = poisson_bracket_fd(h2, h2_h1, s.x, s.v);

        out.max_rel_error_h2_h1 = std::max(out.max_rel_error_h2_h1, rel_error(fd_h2_h1, expected.h2_h1));
        out.max_rel_error_h2h1_h1 = std::max(out.max_rel_error_h2h1_h1, rel_error(fd_h2h1_h1, expected.h2h1_h1));
        out.max_rel_error_h2_h2h1 = std::max(out.max_rel_error_h2_h2h1, rel_error(fd_h2_h2h1, expected.h2_h2h1));
        out.max_rel_antisymmetry = std::max(out.max_rel_antisymmetry, rel_error(-fd_h1_h2, fd_h2_h1));
        ++out.states;
    }
    out.passed = out.states > 0 && out.max_rel_error_h2_h1 < tol && out.max_rel_error_h2h1_h1 < tol
                 && out.max_rel_error_h2_h2h1 < tol && out.max_rel_antisymmetry < tol;
    return out;
}

double spectral_radius(const Matrix2& m)
{
    // roots of lambda^2 - tr lambda + det
    const std::complex<double> tr = m.trace();
    const std::complex<double> disc = std::sqrt(tr * tr - 4.0 * m.det());
    return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

Matrix2 propagation_matrix(const SplittingScheme& scheme, const StepConfig& config, double k_slow, double k_fast)
{
    config.validate();
    Matrix2 total; // identity

    auto kick = [&](double c) {
        if (c != 0.0)
            total = Matrix2{1.0, 0.0, c * config.dt * k_slow, 1.0} * total;
    };
    auto flow = [&](double d) {
        if (d == 0.0)
            return;
        const double tau = d * config.dt;
        const int m = substep_count(tau, config.inner_dt);
        const double h = tau / m;
        const Matrix2 half{1.0, 0.0, 0.5 * h * k_fast, 1.0};
        const Matrix2 drift{1.0, h, 0.0, 1.0};
        const Matrix2 sub = half * drift * half;
        for (int j = 0; j < m; ++j)
            total = sub * total;
    };

    const std::size_t k = scheme.stages();
    if (config.order == ExecutionOrder::LeftToRight) {
        for (std::size_t i = 0; i < k; ++i) {
            kick(scheme.c()[i]);
            flow(scheme.d()[i]);
        }
    } else {
        for (std::size_t i = k; i-- > 0;) {
            flow(scheme.d()[i]);
            kick(scheme.c()[i]);
        }
    }
    return total;
}

std::vector<double> make_grid(double lo, double hi, double step)
{
    if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi))
        throw std::invalid_argument("grid: step must be positive and bounds finite");
    std::vector<double> out;
    if (lo > hi)
        return out;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
    for (std::size_t i = 0; i <= n; ++i)
        out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

StabilityReport stability_sweep(std::span<const SplittingScheme> schemes, std::span<const double> dts,
                                const InnerStepRule& inner, const LinearResonance& problem, ExecutionOrder order)
{
    if (dts.empty())
        throw std::invalid_argument("empty grid");
    StabilityReport report;
    report.dts.assign(dts.begin(), dts.end());
    for (const auto& scheme : schemes) {
        report.schemes.push_back(scheme.name());
        auto& rho = report.rho.emplace_back();
        auto& det = report.det.emplace_back();
        for (double dt : dts) {
            StepConfig config{dt, inner.resolve(dt), order};
            const Matrix2 m = propagation_matrix(scheme, config, problem.slow_stiffness(), problem.fast_stiffness());
            rho.push_back(spectral_radius(m));
            det.push_back(m.det());
        }
    }
    return report;
}

Coordinate Coordinate::parse(std::string_view text)
{
    if (text.size() < 2)
        throw std::invalid_argument("coordinate '" + std::string(text) + "': expected x<i>, v<i>, q<i> or p<i>");
    const char kind = text[0];
    std::size_t index = 0;
    for (char ch : text.substr(1)) {
        if (ch < '0' || ch > '9')
            throw std::invalid_argument("coordinate '" + std::string(text) + "': bad index");
        index = index * 10 + static_cast<std::size_t>(ch - '0');
    }
    switch (kind) {
    case 'x': return {Kind::Position, index};
    case 'v': return {Kind::Velocity, index};
    case 'q':
    case 'p':
        if (index == 0)
            throw std::invalid_argument("coordinate '" + std::string(text) + "': q/p indices start at 1");
        return {kind == 'q' ? Kind::Position : Kind::Velocity, index - 1};
    default:
        throw std::invalid_argument("coordinate '" + std::string(text) + "': expected x<i>, v<i>, q<i> or p<i>");
    }
}

std::string Coordinate::label() const
{
    return (kind == Kind::Position ? "x" : "v") + std::to_string(index);
}

double Coordinate::of(const PhaseState& state) const
{
    const auto& block = kind == Kind::Position ? state.x : state.v;
    if (index >= block.size())
        throw std::out_of_range("coordinate " + label() + " out of range");
    return block[index];
}

double block_magnitude(const PhaseState& state, Coordinate::Kind kind)
{
    const auto& block = kind == Coordinate::Kind::Position ? state.x : state.v;
    double m = 0.0;
    for (double z : block)
        m = std::max(m, std::abs(z));
    return m;
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope fit needs at least two (x, y) pairs");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("slope fit needs distinct x values");
    return sxy / sxx;
}

PhaseState reference_state(const Problem& problem, const PhaseState& initial, double t, double dt_ref)
{
    if (auto exact = problem.exact_solution(initial, t))
        return *exact;
    const double span = t - initial.t;
    const auto n = static_cast<std::size_t>(std::ceil(span / dt_ref - 1e-9));
    if (n == 0)
        return initial;
    auto traj = reference_verlet(initial, problem, span / static_cast<double>(n), n, n);
    return traj.back();
}

ConvergenceReport convergence_study(const Problem& problem, const PhaseState& initial,
                                    std::span<const SplittingScheme> schemes, std::span<const double> dts,
                                    const InnerStepRule& inner, double t_final, Coordinate coordinate,
                                    std::optional<double> reference_dt, ExecutionOrder order)
{
    if (dts.size() < 3)
        throw std::invalid_argument("grid too coarse for a fit (need at least 3 dt values)");
    if (!(t_final > 0.0))
        throw std::invalid_argument("final time must be positive");
    const double dt_min = *std::min_element(dts.begin(), dts.end());
    if (!(dt_min > 0.0))
        throw std::invalid_argument("dt values must be positive");
    const double ref_dt = reference_dt.value_or(dt_min / 100.0);
    if (!(ref_dt > 0.0) || ref_dt > dt_min / 100.0 * (1.0 + 1e-12))
        throw std::invalid_argument("reference step must satisfy 0 < dt_ref <= min(dt)/100");

    ConvergenceReport report;
    report.dts.assign(dts.begin(), dts.end());
    report.coordinate = coordinate;
    report.reference_dt = ref_dt;
    report.analytic_reference = problem.exact_solution(initial, initial.t).has_value();

    std::vector<PhaseState> refs;
    std::vector<std::size_t> steps;
    for (double dt : dts) {
        const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_final / dt)));
        steps.push_back(n);
        const double t_end = initial.t + static_cast<double>(n) * dt;
        report.final_times.push_back(t_end);
        refs.push_back(reference_state(problem, initial, t_end, ref_dt));
    }

    for (const auto& scheme : schemes) {
        ConvergenceSeries series;
        series.scheme = scheme.name();
        std::vector<double> fit_x, fit_y;
        for (std::size_t i = 0; i < dts.size(); ++i) {
            StepConfig config{dts[i], inner.resolve(dts[i]), order};
            const auto traj = integrate(initial, problem, scheme, config, steps[i]);
            const double err = std::abs(coordinate.of(traj.back()) - coordinate.of(refs[i]));
            series.errors.push_back(err);
            if (err > 0.0 && err < 0.1 * block_magnitude(refs[i], coordinate.kind)) {
                fit_x.push_back(dts[i]);
                fit_y.push_back(err);
            }
        }
        series.fitted_points = fit_x.size();
        series.slope = fit_x.size() >= 2 ? fit_loglog_slope(fit_x, fit_y) : std::nan("");
        report.series.push_back(std::move(series));
    }
    return report;
}

} // namespace mts
