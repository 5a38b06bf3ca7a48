#include "mts/cli.hpp"

#include "mts/analysis.hpp"
#include "mts/expansion.hpp"
#include "mts/integrator.hpp"
#include "mts/problem.hpp"
#include "mts/scheme.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace mts {

namespace {

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Options {
    std::string scheme = "impulse1";
    std::vector<std::string> schemes = {"impulse1", "impulse2", "impulse3", "impulse4"};
    std::string problem = "oscillator";
    double dt = 0.12;
    double ddt = 0.01;
    double tfinal = 50.0;
    int order = 5;
    std::string out;
    double eps = 0.1;
    double beta = 0.1;
    bool reverse = false;

    // stability
    double dt_min = 0.05;
    double dt_max = 3.0;
    double dt_step = 0.001;
    double inner_ratio = 24.0;
    double k_slow = 0.0;
    double k_fast = 0.0;

    // converge
    std::vector<double> dts = {0.03, 0.06, 0.12};
    std::string coord = "q1";
    double ref_dt = 0.0;

    // shadow
    double shadow_dt = -1.0;
};

void require_positive(double value, const char* flag)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument(std::string(flag) + " must be positive and finite");
}

ExecutionOrder execution_order(const Options& o)
{
    return o.reverse ? ExecutionOrder::RightToLeft : ExecutionOrder::LeftToRight;
}

std::unique_ptr<Problem> make_problem(const Options& o, const CLI::App& sub)
{
    if (o.problem == "oscillator") {
        require_positive(o.eps, "--eps");
        if (!std::isfinite(o.beta))
            throw std::invalid_argument("--beta must be finite");
        return std::make_unique<CoupledOscillator>(o.eps, o.beta);
    }
    if (o.problem == "linear") {
        if (sub.count("--eps") || sub.count("--beta"))
            throw std::invalid_argument("--eps and --beta apply to the oscillator problem only");
        return std::make_unique<LinearResonance>();
    }
    throw std::invalid_argument("unknown problem '" + o.problem + "' (expected oscillator or linear)");
}

PhaseState initial_state(const Problem& problem)
{
    if (problem.dimension() == 4)
        return CoupledOscillator::default_initial_state();
    return LinearResonance::default_initial_state();
}

std::size_t step_count(double tfinal, double dt)
{
    require_positive(tfinal, "--tfinal");
    const auto n = static_cast<std::size_t>(std::llround(tfinal / dt));
    if (n < 1)
        throw std::invalid_argument("--tfinal is shorter than one outer step");
    return n;
}

// CSV column suffix: named schemes keep their name, inline ones are numbered.
std::string column_name(const SplittingScheme& s, std::size_t index)
{
    const auto& n = s.name();
    if (n.rfind("impulse", 0) == 0 && n.size() == 8)
        return n;
    return "scheme" + std::to_string(index + 1);
}

std::vector<SplittingScheme> parse_schemes(const std::vector<std::string>& texts)
{
    std::vector<SplittingScheme> out;
    for (const auto& t : texts)
        out.push_back(parse_scheme(t));
    return out;
}

void check_schemes(const std::vector<SplittingScheme>& schemes)
{
    for (const auto& s : schemes) {
        auto v = validate(s);
        if (!v.empty())
            throw std::invalid_argument("scheme '" + s.name() + "' is inconsistent: " + v.front());
    }
}

template <typename T>
void expand_report(std::ostream& os, const SplittingScheme& scheme, int order)
{
    const auto r = remainder<T>(scheme, order);
    os << "# remainder R - I of " << format_scheme(scheme) << " over " << name_of(Alphabet::AB) << ", order "
       << order << ", " << (std::is_same_v<T, Rational> ? "exact" : "double") << " arithmetic\n";
    os << "# coeff  eps  word\n";
    for (int j = 1; j <= order; ++j) {
        const auto part = r.homogeneous_part(j);
        os << "dt^" << j << ":\n";
        if (part.is_zero()) {
            os << "  0\n";
        } else {
            std::ostringstream terms;
            write_terms(terms, part);
            std::istringstream lines(terms.str());
            for (std::string line; std::getline(lines, line);)
                os << "  " << line << "\n";
        }
        if (j >= 2 && j <= 4) {
            const auto p = project_onto_d_basis(r, j);
            const auto ops = d_operators_of_length(j);
            for (std::size_t i = 0; i < ops.size(); ++i)
                os << "  " << name_of(ops[i]) << ": " << format_coefficient(p.coefficients[i]) << "\n";
            os << "  residual: " << num(p.residual()) << "\n";
        }
        std::optional<int> e;
        bool negligible = false;
        if constexpr (std::is_same_v<T, double>) {
            negligible = part.max_abs() < 1e-12;
            if (!negligible)
                e = epsilon_order(part, 1e-12);
        } else {
            e = epsilon_order(part);
        }
        if (negligible)
            os << "  eps order: vanishes (|coeff| < 1e-12)\n";
        else if (e)
            os << "  eps order: " << *e << "\n";
        else
            os << "  eps order: vanishes\n";
    }
}

void cmd_expand(const Options& o, std::ostream& os)
{
    if (o.order < 2 || o.order > 8)
        throw std::invalid_argument("--order must be between 2 and 8");
    const auto scheme = parse_scheme(o.scheme);
    if (scheme.is_exact())
        expand_report<Rational>(os, scheme, o.order);
    else
        expand_report<double>(os, scheme, o.order);
}

void cmd_integrate(const Options& o, const CLI::App& sub, std::ostream& os)
{
    require_positive(o.dt, "--dt");
    require_positive(o.ddt, "--ddt");
    const auto problem = make_problem(o, sub);
    const auto scheme = parse_scheme(o.scheme);
    const StepConfig config{o.dt, o.ddt, execution_order(o)};
    config.validate();
    const std::size_t n = step_count(o.tfinal, o.dt);
    const std::size_t dim = problem->dimension();

    os << "# problem " << problem->name() << ", scheme " << format_scheme(scheme) << ", dt " << num(o.dt)
       << ", ddt " << num(o.ddt) << ", steps " << n << "\n";
    os << "t";
    for (std::size_t i = 0; i < dim; ++i)
        os << ",x_" << i;
    for (std::size_t i = 0; i < dim; ++i)
        os << ",v_" << i;
    os << ",H\n";
    integrate(initial_state(*problem), *problem, scheme, config, n, [&](std::size_t, const PhaseState& s) {
        os << num(s.t);
        for (double x : s.x)
            os << "," << num(x);
        for (double v : s.v)
            os << "," << num(v);
        os << "," << num(problem->energy(s)) << "\n";
    });
}

void cmd_stability(const Options& o, const CLI::App& sub, std::ostream& os)
{
    require_positive(o.dt_step, "--dt-step");
    require_positive(o.dt_min, "--dt-min");
    require_positive(o.inner_ratio, "--inner-ratio");
    InnerStepRule inner{0.0, o.inner_ratio};
    if (sub.count("--ddt")) {
        require_positive(o.ddt, "--ddt");
        inner.absolute = o.ddt;
    }
    const auto dts = make_grid(o.dt_min, o.dt_max, o.dt_step);
    if (dts.empty())
        throw std::invalid_argument("empty grid");
    const auto schemes = parse_schemes(o.schemes);
    check_schemes(schemes);
    LinearResonance model;
    if (sub.count("--k-slow") || sub.count("--k-fast")) {
        const LinearResonance defaults;
        model = LinearResonance(sub.count("--k-slow") ? o.k_slow : defaults.slow_stiffness(),
                                sub.count("--k-fast") ? o.k_fast : defaults.fast_stiffness());
    }
    const auto report = stability_sweep(schemes, dts, inner, model, execution_order(o));

    os << "# linear model x'' = " << num(model.slow_stiffness()) << " x + " << num(model.fast_stiffness())
       << " x; inner step "
       << (inner.absolute > 0.0 ? num(inner.absolute) : "dt/" + num(inner.ratio)) << "\n";
    for (std::size_t s = 0; s < schemes.size(); ++s)
        if (column_name(schemes[s], s) != schemes[s].name())
            os << "# " << column_name(schemes[s], s) << " = " << format_scheme(schemes[s]) << "\n";
    os << "dt";
    for (std::size_t s = 0; s < schemes.size(); ++s)
        os << ",rho_" << column_name(schemes[s], s);
    os << "\n";
    for (std::size_t i = 0; i < dts.size(); ++i) {
        os << num(report.dts[i]);
        for (std::size_t s = 0; s < schemes.size(); ++s)
            os << "," << num(report.rho[s][i]);
        os << "\n";
    }
}

void cmd_converge(const Options& o, const CLI::App& sub, std::ostream& os)
{
    for (double dt : o.dts)
        require_positive(dt, "--dts entries");
    require_positive(o.tfinal, "--tfinal");
    const auto problem = make_problem(o, sub);
    const auto schemes = parse_schemes(o.schemes);
    check_schemes(schemes);
    const auto coord = Coordinate::parse(o.coord);
    const auto initial = initial_state(*problem);
    coord.of(initial); // range check

    InnerStepRule inner{o.ddt, 0.0};
    if (sub.count("--inner-ratio")) {
        if (sub.count("--ddt"))
            throw std::invalid_argument("--ddt and --inner-ratio are mutually exclusive");
        require_positive(o.inner_ratio, "--inner-ratio");
        inner = InnerStepRule{0.0, o.inner_ratio};
    } else {
        require_positive(o.ddt, "--ddt");
    }
    std::optional<double> ref;
    if (sub.count("--ref-dt")) {
        require_positive(o.ref_dt, "--ref-dt");
        ref = o.ref_dt;
    }
    const auto report =
        convergence_study(*problem, initial, schemes, o.dts, inner, o.tfinal, coord, ref, execution_order(o));

    os << "# problem " << problem->name() << ", coordinate " << coord.label() << ", T " << num(o.tfinal)
       << ", inner step " << (inner.absolute > 0.0 ? num(inner.absolute) : "dt/" + num(inner.ratio)) << "\n";
    if (report.analytic_reference)
        os << "# reference: closed-form solution\n";
    else
        os << "# reference: velocity Verlet, dt_ref " << num(report.reference_dt)
           << (ref ? "" : " (default min(dt)/100)") << "\n";
    for (std::size_t s = 0; s < schemes.size(); ++s)
        if (column_name(schemes[s], s) != schemes[s].name())
            os << "# " << column_name(schemes[s], s) << " = " << format_scheme(schemes[s]) << "\n";
    os << "dt";
    for (std::size_t s = 0; s < schemes.size(); ++s)
        os << ",err_" << column_name(schemes[s], s);
    os << "\n";
    for (std::size_t i = 0; i < report.dts.size(); ++i) {
        os << num(report.dts[i]);
        for (const auto& series : report.series)
            os << "," << num(series.errors[i]);
        os << "\n";
    }
    for (std::size_t s = 0; s < schemes.size(); ++s) {
        const auto& series = report.series[s];
        os << "# slope " << column_name(schemes[s], s) << " " << num(series.slope) << " over "
           << series.fitted_points << " points\n";
    }
}

void cmd_shadow(const Options& o, const CLI::App& sub, std::ostream& os)
{
    require_positive(o.dt, "--dt");
    require_positive(o.ddt, "--ddt");
    const double shadow_dt = sub.count("--shadow-dt") ? o.shadow_dt : o.dt;
    if (!(shadow_dt >= 0.0) || !std::isfinite(shadow_dt))
        throw std::invalid_argument("--shadow-dt must be non-negative and finite");
    const auto scheme = parse_scheme(o.scheme);
    const auto form = shadow_form_for(scheme);
    if (!form)
        throw std::invalid_argument("shadow form available for impulse I and II only");
    const auto problem = make_problem(o, sub);
    const StepConfig config{o.dt, o.ddt, execution_order(o)};
    config.validate();
    const std::size_t n = step_count(o.tfinal, o.dt);

    std::vector<double> h, hs;
    os << "# problem " << problem->name() << ", scheme " << scheme.name() << ", dt " << num(o.dt) << ", shadow dt "
       << num(shadow_dt) << "\n";
    os << "t,H,H_shadow\n";
    integrate(initial_state(*problem), *problem, scheme, config, n, [&](std::size_t, const PhaseState& s) {
        h.push_back(problem->energy(s));
        hs.push_back(shadow_hamiltonian(*problem, s, shadow_dt, *form));
        os << num(s.t) << "," << num(h.back()) << "," << num(hs.back()) << "\n";
    });
    os << "# std(H) " << num(energy_stats(h).std_dev) << "\n";
    os << "# std(H_shadow) " << num(energy_stats(hs).std_dev) << "\n";
}

void add_common(CLI::App* sub, Options& o, bool with_scheme)
{
    if (with_scheme)
        sub->add_option("--scheme", o.scheme, "impulse1..impulse4 or 'k;c=...;d=...'")->capture_default_str();
    sub->add_option("--problem", o.problem, "oscillator or linear")->capture_default_str();
    sub->add_option("--ddt", o.ddt, "inner (fast) step")->capture_default_str();
    sub->add_option("--tfinal", o.tfinal, "final time")->capture_default_str();
    sub->add_option("--eps", o.eps, "oscillator scale separation")->capture_default_str();
    sub->add_option("--beta", o.beta, "oscillator coupling")->capture_default_str();
    sub->add_flag("--reverse", o.reverse, "execute stages right to left");
    sub->add_option("--out", o.out, "write output to this file");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Generalized impulse (multiple time-stepping) splitting toolkit", "mts"};
    app.require_subcommand(1);

    auto* expand = app.add_subcommand("expand", "splitting-error expansion and D-basis projection");
    expand->add_option("--scheme", o.scheme, "impulse1..impulse4 or 'k;c=...;d=...'")->capture_default_str();
    expand->add_option("--order", o.order, "truncation order (2..8)")->capture_default_str();
    expand->add_option("--out", o.out, "write output to this file");

    auto* integ = app.add_subcommand("integrate", "trajectory CSV with energy");
    add_common(integ, o, true);
    integ->add_option("--dt", o.dt, "outer step")->capture_default_str();

    auto* stab = app.add_subcommand("stability", "spectral radius sweep on the linear model");
    stab->add_option("--scheme", o.schemes, "schemes to sweep (repeatable)")->capture_default_str();
    stab->add_option("--dt-min", o.dt_min)->capture_default_str();
    stab->add_option("--dt-max", o.dt_max)->capture_default_str();
    stab->add_option("--dt-step", o.dt_step)->capture_default_str();
    stab->add_option("--inner-ratio", o.inner_ratio, "inner step dt/ratio unless --ddt is given")
        ->capture_default_str();
    stab->add_option("--ddt", o.ddt, "fixed inner step");
    stab->add_option("--k-slow", o.k_slow, "slow stiffness (default -(pi/5)^2)");
    stab->add_option("--k-fast", o.k_fast, "fast stiffness (default -pi^2)");
    stab->add_flag("--reverse", o.reverse, "execute stages right to left");
    stab->add_option("--out", o.out, "write output to this file");

    auto* conv = app.add_subcommand("converge", "final-time error against a fine reference");
    add_common(conv, o, false);
    conv->add_option("--scheme", o.schemes, "schemes to compare (repeatable)")->capture_default_str();
    conv->add_option("--dts", o.dts, "outer steps")->delimiter(',')->capture_default_str();
    conv->add_option("--coord", o.coord, "x<i>, v<i>, or 1-based q<i>, p<i>")->capture_default_str();
    conv->add_option("--ref-dt", o.ref_dt, "reference Verlet step (default min(dt)/100)");
    conv->add_option("--inner-ratio", o.inner_ratio, "inner step dt/ratio instead of a fixed --ddt");

    auto* shadow = app.add_subcommand("shadow", "energy and shadow Hamiltonian along a trajectory");
    add_common(shadow, o, true);
    shadow->add_option("--dt", o.dt, "outer step")->capture_default_str();
    shadow->add_option("--shadow-dt", o.shadow_dt, "step used in the shadow formula (default --dt)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << " (run with --help for usage)\n";
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        std::ostringstream buffer;
        if (expand->parsed())
            cmd_expand(o, buffer);
        else if (integ->parsed())
            cmd_integrate(o, *integ, buffer);
        else if (stab->parsed())
            cmd_stability(o, *stab, buffer);
        else if (conv->parsed())
            cmd_converge(o, *conv, buffer);
        else if (shadow->parsed())
            cmd_shadow(o, *shadow, buffer);

        if (o.out.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(o.out, std::ios::binary);
            if (!file)
                throw std::runtime_error("cannot open '" + o.out + "' for writing");
            file << buffer.str();
            if (!file)
                throw std::runtime_error("write to '" + o.out + "' failed");
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace mts
