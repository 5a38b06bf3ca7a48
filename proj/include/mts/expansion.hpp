#pragma once

// Splitting-error expansion of generalized impulse schemes.
//
// With A = dt*L2 (slow kick) and B = dt*L1 (fast subsystem), a scheme
// prod_i exp(c_i A) exp(d_i B) is written as R * exp(A + B). The remainder
// R - I is computed here as a truncated word series; its homogeneous parts
// are projected onto the reference combinations D21 .. D43 and graded by
// powers of eps after splitting B = X + eps^-2 V.

#include "mts/scheme.hpp"
#include "mts/word_series.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace mts {

enum class DOperator { D21, D31, D32, D41, D42, D43 };

inline constexpr std::array<DOperator, 6> all_d_operators{DOperator::D21, DOperator::D31, DOperator::D32,
                                                          DOperator::D41, DOperator::D42, DOperator::D43};

std::string_view name_of(DOperator op);
int length_of(DOperator op);

// Word list of the reference combination over {A, B}, A = L2, B = L1.
// D21 = L2 L1 - L1 L2 = AB - BA, and so on.
template <typename T>
WordSeries<T> d_operator(DOperator op, int order);

// The D operators of a given word length (2, 3 or 4).
std::vector<DOperator> d_operators_of_length(int length);

// R - I for the scheme, over {A, B}, truncated at word length `order`.
// Rational mode requires the scheme to carry exact coefficients.
// Throws std::invalid_argument for order < 2, inconsistent schemes, or a
// rational request on an irrational scheme.
template <typename T>
WordSeries<T> remainder(const SplittingScheme& scheme, int order);

template <typename T>
struct Projection {
    std::vector<T> coefficients;
    T residual_squared{0};

    double residual() const { return std::sqrt(to_double(residual_squared)); }
};

// Least-squares projection of `part` onto span(basis), word coefficients as coordinates.
template <typename T>
Projection<T> project(const WordSeries<T>& part, const std::vector<WordSeries<T>>& basis);

// Projection of the length-`length` part of a remainder onto the D operators of that length.
template <typename T>
Projection<T> project_onto_d_basis(const WordSeries<T>& remainder, int length);

template <typename T>
T order2_coefficient(const SplittingScheme& scheme);

// coefficients = {D31, D32}
template <typename T>
Projection<T> order3_coefficients(const SplittingScheme& scheme);

// coefficients = {D41, D42, D43}
template <typename T>
Projection<T> order4_coefficients(const SplittingScheme& scheme);

// Closed-form leading coefficients for the two-stage family c = (c1, 1-c1), d = (d1, 1-d1).
template <typename T>
struct TwoStageCoefficients {
    T order2; // D21
    T d31;
    T d32;
};

template <typename T>
TwoStageCoefficients<T> two_stage_closed_form(const T& c1, const T& d1);

// Symmetric three-stage family c = (c1, 1-2c1, c1), d = (1/2, 1/2, 0): {D31, D32}.
template <typename T>
std::array<T, 2> three_stage_symmetric_closed_form(const T& c1);

// Symmetric four-stage family c = (c1, 1/2-c1, 1/2-c1, c1), d = (d1, 1-2d1, d1, 0).
template <typename T>
struct FourStageCoefficients {
    T d31, d32, d41, d42, d43;
};

template <typename T>
FourStageCoefficients<T> four_stage_symmetric_closed_form(const T& c1, const T& d1);

// Substitutes A -> F and B -> X + eps^-2 V. The eps exponent of a graded word
// is -2 * (number of V letters), see epsilon_exponent().
template <typename T>
WordSeries<T> graded_expand(const WordSeries<T>& series);

// Canonical form under the relation FV = VF: inside every maximal run of
// letters from {V, F}, all V precede all F.
template <typename T>
WordSeries<T> normalize_commuting(const WordSeries<T>& series);

// Terms of a graded series carrying eps^exponent.
template <typename T>
WordSeries<T> epsilon_component(const WordSeries<T>& graded, int exponent);

// Most negative eps exponent that survives normalization, i.e. the series is
// O(eps^result) for generic forces. std::nullopt means the series vanishes
// identically (modulo FV = VF). In real mode, terms below rel_tol times the
// largest input coefficient are treated as cancelled.
template <typename T>
std::optional<int> epsilon_order(const WordSeries<T>& series, double rel_tol = 0.0);

#define MTS_EXPANSION_EXTERN(T)                                                                     \
    extern template WordSeries<T> d_operator<T>(DOperator, int);                                   \
    extern template WordSeries<T> remainder<T>(const SplittingScheme&, int);                       \
    extern template Projection<T> project<T>(const WordSeries<T>&, const std::vector<WordSeries<T>>&); \
    extern template Projection<T> project_onto_d_basis<T>(const WordSeries<T>&, int);              \
    extern template T order2_coefficient<T>(const SplittingScheme&);                               \
    extern template Projection<T> order3_coefficients<T>(const SplittingScheme&);                  \
    extern template Projection<T> order4_coefficients<T>(const SplittingScheme&);                  \
    extern template TwoStageCoefficients<T> two_stage_closed_form<T>(const T&, const T&);          \
    extern template std::array<T, 2> three_stage_symmetric_closed_form<T>(const T&);               \
    extern template FourStageCoefficients<T> four_stage_symmetric_closed_form<T>(const T&, const T&); \
    extern template WordSeries<T> graded_expand<T>(const WordSeries<T>&);                          \
    extern template WordSeries<T> normalize_commuting<T>(const WordSeries<T>&);                    \
    extern template WordSeries<T> epsilon_component<T>(const WordSeries<T>&, int);                 \
    extern template std::optional<int> epsilon_order<T>(const WordSeries<T>&, double);

MTS_EXPANSION_EXTERN(Rational)
MTS_EXPANSION_EXTERN(double)

#undef MTS_EXPANSION_EXTERN

} // namespace mts
