#pragma once

// Splitting coefficients (c_1..c_k; d_1..d_k) of a generalized impulse method
//   exp(dt L) ~ prod_{i=1..k} exp(c_i dt L2) exp(d_i dt L1),
// where L2 is the slow-force kick and L1 the fast subsystem.

#include "mts/word_series.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mts {

struct ExactCoefficients {
    std::vector<Rational> c;
    std::vector<Rational> d;
};

class SplittingScheme {
public:
    // Throws std::invalid_argument if c and d differ in length.
    SplittingScheme(std::vector<double> c, std::vector<double> d, std::string name = {});

    // Rational scheme; the real coefficients are the rounded rationals.
    static SplittingScheme exact(std::vector<Rational> c, std::vector<Rational> d, std::string name = {});

    std::size_t stages() const { return c_.size(); }
    const std::vector<double>& c() const { return c_; }
    const std::vector<double>& d() const { return d_; }
    const std::optional<ExactCoefficients>& exact_coefficients() const { return exact_; }
    bool is_exact() const { return exact_.has_value(); }
    const std::string& name() const { return name_; }

    // C_i and D_i, i = 1..k
    std::vector<double> partial_sums_c() const;
    std::vector<double> partial_sums_d() const;

    // Interleaved sequence (c1, d1, ..., ck, dk) with trailing zeros dropped.
    std::vector<double> interleaved() const;

    // The interleaved sequence is a palindrome (within tol).
    bool is_symmetric(double tol = 1e-14) const;

private:
    std::vector<double> c_;
    std::vector<double> d_;
    std::optional<ExactCoefficients> exact_;
    std::string name_;
};

SplittingScheme impulse_I();
SplittingScheme impulse_II();
SplittingScheme impulse_III();
SplittingScheme impulse_IV();

std::vector<SplittingScheme> impulse_catalog();

// Closed form of the four-stage coefficient, 2^(1/3)/6 + 4^(1/3)/12 + 1/3.
double impulse_IV_c1();

// Root of the two annihilation conditions of the symmetric four-stage family.
struct K4Solution {
    double c1;
    double d1;
    double cubic_residual;      // 6 d1^3 - 12 d1^2 + 6 d1 - 1
    double d41_residual;        // D41 coefficient at (c1, d1)
    double d42_residual;        // D42 coefficient at (c1, d1)
};

K4Solution solve_k4_equations();

// Consistency violations; empty when the scheme is valid. Never throws.
std::vector<std::string> validate(const SplittingScheme& scheme, double tol = 1e-14);

// Accepts `impulse1`..`impulse4` or an inline `k; c=...; d=...` form. Entries
// that are integers, fractions p/q or plain decimals are kept exact.
// Throws std::invalid_argument on malformed input.
SplittingScheme parse_scheme(std::string_view text);

// Inline form; irrational coefficients are written with 17 significant digits.
std::string format_scheme(const SplittingScheme& scheme);

// Parses an integer, p/q or a decimal without exponent; nullopt otherwise.
std::optional<Rational> parse_rational(std::string_view text);

} // namespace mts
