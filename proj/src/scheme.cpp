#include "mts/scheme.hpp"

#include "mts/expansion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <limits>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mts {

namespace {

std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

double parse_real(std::string_view text)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw std::invalid_argument("bad coefficient '" + std::string(text) + "'");
    return value;
}

} // namespace

SplittingScheme::SplittingScheme(std::vector<double> c, std::vector<double> d, std::string name)
    : c_(std::move(c)), d_(std::move(d)), name_(std::move(name))
{
    if (c_.size() != d_.size())
        throw std::invalid_argument("splitting scheme: c has " + std::to_string(c_.size()) + " entries, d has "
                                    + std::to_string(d_.size()));
}

SplittingScheme SplittingScheme::exact(std::vector<Rational> c, std::vector<Rational> d, std::string name)
{
    std::vector<double> cr, dr;
    for (const auto& x : c)
        cr.push_back(static_cast<double>(x));
    for (const auto& x : d)
        dr.push_back(static_cast<double>(x));
    SplittingScheme s(std::move(cr), std::move(dr), std::move(name));
    s.exact_ = ExactCoefficients{std::move(c), std::move(d)};
    return s;
}

std::vector<double> SplittingScheme::partial_sums_c() const
{
    std::vector<double> out(c_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i)
        out[i] = acc += c_[i];
    return out;
}

std::vector<double> SplittingScheme::partial_sums_d() const
{
    std::vector<double> out(d_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d_.size(); ++i)
        out[i] = acc += d_[i];
    return out;
}

std::vector<double> SplittingScheme::interleaved() const
{
    std::vector<double> seq;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        seq.push_back(c_[i]);
        seq.push_back(d_[i]);
    }
    while (!seq.empty() && seq.back() == 0.0)
        seq.pop_back();
    return seq;
}

bool SplittingScheme::is_symmetric(double tol) const
{
    auto seq = interleaved();
    for (std::size_t i = 0, j = seq.size(); i < j--; ++i)
        if (std::abs(seq[i] - seq[j]) > tol)
            return false;
    return true;
}

SplittingScheme impulse_I()
{
    return SplittingScheme::exact({Rational(1, 2), Rational(1, 2)}, {Rational(1), Rational(0)}, "impulse1");
}

SplittingScheme impulse_II()
{
    return SplittingScheme::exact({Rational(1, 4), Rational(3, 4)}, {Rational(2, 3), Rational(1, 3)}, "impulse2");
}

SplittingScheme impulse_III()
{
    return SplittingScheme::exact({Rational(1, 6), Rational(2, 3), Rational(1, 6)},
                                  {Rational(1, 2), Rational(1, 2), Rational(0)}, "impulse3");
}

double impulse_IV_c1()
{
    return std::cbrt(2.0) / 6.0 + std::cbrt(4.0) / 12.0 + 1.0 / 3.0;
}

SplittingScheme impulse_IV()
{
    const double c1 = impulse_IV_c1();
    const double d1 = 2.0 * c1;
    return SplittingScheme({c1, 0.5 - c1, 0.5 - c1, c1}, {d1, 1.0 - 2.0 * d1, d1, 0.0}, "impulse4");
}

std::vector<SplittingScheme> impulse_catalog()
{
    return {impulse_I(), impulse_II(), impulse_III(), impulse_IV()};
}

K4Solution solve_k4_equations()
{
    // d1 is the real root of 6z^3 - 12z^2 + 6z - 1; the discriminant is -108,
    // so there is exactly one, and p(1) = -1 < 0 < p(2) = 11 brackets it.
    auto p = [](double z) { return ((6.0 * z - 12.0) * z + 6.0) * z - 1.0; };
    auto dp = [](double z) { return (18.0 * z - 24.0) * z + 6.0; };

    double lo = 1.0, hi = 2.0;
    if (!(p(0.0) < 0.0 && p(lo) < 0.0 && p(hi) > 0.0))
        throw std::logic_error("solve_k4_equations: root not bracketed on [1, 2]");

    double z = 1.5;
    for (int iter = 0; iter < 200; ++iter) {
        const double pz = p(z);
        if (pz == 0.0)
            break;
        (pz < 0.0 ? lo : hi) = z;
        double next = z - pz / dp(z);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - z) <= 4.0 * std::numeric_limits<double>::epsilon() * z) {
            z = next;
            break;
        }
        z = next;
    }

    K4Solution sol{};
    sol.d1 = z;
    sol.c1 = 0.5 * z;
    sol.cubic_residual = p(z);
    auto coeffs = four_stage_symmetric_closed_form<double>(sol.c1, sol.d1);
    sol.d41_residual = coeffs.d41;
    sol.d42_residual = coeffs.d42;
    return sol;
}

std::vector<std::string> validate(const SplittingScheme& scheme, double tol)
{
    std::vector<std::string> violations;
    if (scheme.stages() == 0) {
        violations.emplace_back("k = 0: at least one stage is required");
        return violations;
    }
    bool finite = true;
    for (std::size_t i = 0; i < scheme.stages(); ++i) {
        if (!std::isfinite(scheme.c()[i])) {
            violations.push_back("c_" + std::to_string(i + 1) + " is not finite");
            finite = false;
        }
        if (!std::isfinite(scheme.d()[i])) {
            violations.push_back("d_" + std::to_string(i + 1) + " is not finite");
            finite = false;
        }
    }
    if (!finite)
        return violations;

    if (const auto& exact = scheme.exact_coefficients()) {
        Rational sc = 0, sd = 0;
        for (const auto& x : exact->c)
            sc += x;
        for (const auto& x : exact->d)
            sd += x;
        if (sc != 1)
            violations.push_back("C_k = " + sc.str() + " ≠ 1");
        if (sd != 1)
            violations.push_back("D_k = " + sd.str() + " ≠ 1");
        return violations;
    }

    const double sc = scheme.partial_sums_c().back();
    const double sd = scheme.partial_sums_d().back();
    if (std::abs(sc - 1.0) > tol)
        violations.push_back("C_k = " + format_real(sc) + " ≠ 1");
    if (std::abs(sd - 1.0) > tol)
        violations.push_back("D_k = " + format_real(sd) + " ≠ 1");
    return violations;
}

std::optional<Rational> parse_rational(std::string_view text)
{
    text = trim(text);
    if (text.empty())
        return std::nullopt;

    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = parse_rational(text.substr(0, slash));
        auto den_text = trim(text.substr(slash + 1));
        if (!num || !all_digits(den_text))
            return std::nullopt;
        if (denominator(*num) != 1)
            return std::nullopt;
        std::string den_digits(den_text);
        den_digits.erase(0, std::min(den_digits.find_first_not_of('0'), den_digits.size() - 1));
        Rational den{boost::multiprecision::cpp_int(den_digits)};
        if (den == 0)
            return std::nullopt;
        return *num / den;
    }

    bool negative = false;
    if (text.front() == '+' || text.front() == '-') {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    auto dot = text.find('.');
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
        return std::nullopt;
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)))
        return std::nullopt;

    // cpp_int reads a leading 0 as an octal prefix
    std::string digits = std::string(int_part) + std::string(frac_part);
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    boost::multiprecision::cpp_int num(digits);
    boost::multiprecision::cpp_int den = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                   static_cast<unsigned>(frac_part.size()));
    Rational value(num, den);
    return negative ? Rational(-value) : value;
}

SplittingScheme parse_scheme(std::string_view text)
{
    text = trim(text);
    if (text == "impulse1")
        return impulse_I();
    if (text == "impulse2")
        return impulse_II();
    if (text == "impulse3")
        return impulse_III();
    if (text == "impulse4")
        return impulse_IV();

    auto fields = split(text, ';');
    if (fields.size() != 3)
        throw std::invalid_argument("scheme '" + std::string(text)
                                    + "': expected impulse1..impulse4 or 'k; c=...; d=...'");

    int k = 0;
    {
        auto f = fields[0];
        auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), k);
        if (ec != std::errc{} || ptr != f.data() + f.size() || k < 1)
            throw std::invalid_argument("scheme: bad stage count '" + std::string(f) + "'");
    }

    std::optional<std::vector<std::string_view>> c_items, d_items;
    for (std::size_t i = 1; i < fields.size(); ++i) {
        auto eq = fields[i].find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("scheme: expected 'c=...' or 'd=...', got '" + std::string(fields[i]) + "'");
        auto key = trim(fields[i].substr(0, eq));
        auto items = split(fields[i].substr(eq + 1), ',');
        if (key == "c" && !c_items)
            c_items = items;
        else if (key == "d" && !d_items)
            d_items = items;
        else
            throw std::invalid_argument("scheme: unexpected field '" + std::string(key) + "'");
    }
    if (!c_items || !d_items)
        throw std::invalid_argument("scheme: both c= and d= are required");
    if (c_items->size() != static_cast<std::size_t>(k) || d_items->size() != static_cast<std::size_t>(k))
        throw std::invalid_argument("scheme: k = " + std::to_string(k) + " but c has " + std::to_string(c_items->size())
                                    + " and d has " + std::to_string(d_items->size()) + " entries");

    std::vector<Rational> ce, de;
    bool exact = true;
    for (auto item : *c_items) {
        auto r = parse_rational(item);
        exact = exact && r.has_value();
        if (r)
            ce.push_back(*r);
    }
    for (auto item : *d_items) {
        auto r = parse_rational(item);
        exact = exact && r.has_value();
        if (r)
            de.push_back(*r);
    }
    if (exact) {
        auto scheme = SplittingScheme::exact(std::move(ce), std::move(de), std::string(text));
        if (validate(scheme).empty())
            return scheme;
        // Rounded decimals of an irrational scheme: keep them as reals if that is consistent.
        SplittingScheme real(scheme.c(), scheme.d(), scheme.name());
        return validate(real).empty() ? real : scheme;
    }

    std::vector<double> cr, dr;
    for (auto item : *c_items)
        cr.push_back(parse_real(item));
    for (auto item : *d_items)
        dr.push_back(parse_real(item));
    return SplittingScheme(std::move(cr), std::move(dr), std::string(text));
}

std::string format_scheme(const SplittingScheme& scheme)
{
    std::ostringstream os;
    os << scheme.stages();
    auto list = [&](char key, const std::vector<double>& real, const std::vector<Rational>* exact) {
        os << ';' << key << '=';
        for (std::size_t i = 0; i < real.size(); ++i) {
            if (i)
                os << ',';
            os << (exact ? (*exact)[i].str() : format_real(real[i]));
        }
    };
    const auto& ex = scheme.exact_coefficients();
    list('c', scheme.c(), ex ? &ex->c : nullptr);
    list('d', scheme.d(), ex ? &ex->d : nullptr);
    return os.str();
}

} // namespace mts
