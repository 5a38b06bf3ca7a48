#include "mts/expansion.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mts {

namespace {

template <typename T>
T frac(long p, long q)
{
    if constexpr (std::is_same_v<T, Rational>)
        return Rational(p, q);
    else
        return static_cast<double>(p) / static_cast<double>(q);
}

template <typename T>
const std::vector<T>& coefficients_c(const SplittingScheme& scheme)
{
    if constexpr (std::is_same_v<T, Rational>) {
        if (!scheme.is_exact())
            throw std::invalid_argument("scheme '" + scheme.name() + "' has no exact rational coefficients");
        return scheme.exact_coefficients()->c;
    } else {
        return scheme.c();
    }
}

template <typename T>
const std::vector<T>& coefficients_d(const SplittingScheme& scheme)
{
    if constexpr (std::is_same_v<T, Rational>) {
        if (!scheme.is_exact())
            throw std::invalid_argument("scheme '" + scheme.name() + "' has no exact rational coefficients");
        return scheme.exact_coefficients()->d;
    } else {
        return scheme.d();
    }
}

// Solves the small dense system G a = b in place.
template <typename T>
std::vector<T> solve_dense(std::vector<std::vector<T>> g, std::vector<T> b)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col; row < n; ++row) {
            if constexpr (std::is_same_v<T, Rational>) {
                if (!is_zero(g[row][col])) {
                    pivot = row;
                    break;
                }
            } else {
                if (std::abs(g[row][col]) > std::abs(g[pivot][col]))
                    pivot = row;
            }
        }
        if (is_zero(g[pivot][col]))
            throw std::runtime_error("projection basis is linearly dependent");
        std::swap(g[col], g[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t row = col + 1; row < n; ++row) {
            if (is_zero(g[row][col]))
                continue;
            T factor = g[row][col] / g[col][col];
            for (std::size_t k = col; k < n; ++k)
                g[row][k] -= factor * g[col][k];
            b[row] -= factor * b[col];
        }
    }
    std::vector<T> x(n);
    for (std::size_t i = n; i-- > 0;) {
        T acc = b[i];
        for (std::size_t k = i + 1; k < n; ++k)
            acc -= g[i][k] * x[k];
        x[i] = acc / g[i][i];
    }
    return x;
}

template <typename T>
T dot(const WordSeries<T>& lhs, const WordSeries<T>& rhs)
{
    T acc(0);
    for (const auto& [w, c] : lhs.terms()) {
        auto it = rhs.terms().find(w);
        if (it != rhs.terms().end())
            acc += c * it->second;
    }
    return acc;
}

} // namespace

std::string_view name_of(DOperator op)
{
    switch (op) {
    case DOperator::D21: return "D21";
    case DOperator::D31: return "D31";
    case DOperator::D32: return "D32";
    case DOperator::D41: return "D41";
    case DOperator::D42: return "D42";
    case DOperator::D43: return "D43";
    }
    return "?";
}

int length_of(DOperator op)
{
    switch (op) {
    case DOperator::D21: return 2;
    case DOperator::D31:
    case DOperator::D32: return 3;
    default: return 4;
    }
}

std::vector<DOperator> d_operators_of_length(int length)
{
    std::vector<DOperator> out;
    for (auto op : all_d_operators)
        if (length_of(op) == length)
            out.push_back(op);
    return out;
}

template <typename T>
WordSeries<T> d_operator(DOperator op, int order)
{
    using Terms = std::vector<std::pair<T, std::string>>;
    auto build = [order](const Terms& terms) { return WordSeries<T>::from_terms(Alphabet::AB, order, terms); };
    switch (op) {
    case DOperator::D21: // L2 L1 - L1 L2
        return build({{T(1), "AB"}, {T(-1), "BA"}});
    case DOperator::D31: // L1 L1 L2 - 2 L1 L2 L1 + L2 L1 L1
        return build({{T(1), "BBA"}, {T(-2), "BAB"}, {T(1), "ABB"}});
    case DOperator::D32: // L1 L2 L2 - 2 L2 L1 L2 + L2 L2 L1
        return build({{T(1), "BAA"}, {T(-2), "ABA"}, {T(1), "AAB"}});
    case DOperator::D41: // L1L1L1L2 - L2L1L1L1 + 3 L1L2L1L1 - 3 L1L1L2L1
        return build({{T(1), "BBBA"}, {T(-1), "ABBB"}, {T(3), "BABB"}, {T(-3), "BBAB"}});
    case DOperator::D42: // L2L2L1L1 - L1L1L2L2 + 2 L1L2L1L2 - 2 L2L1L2L1
        return build({{T(1), "AABB"}, {T(-1), "BBAA"}, {T(2), "BABA"}, {T(-2), "ABAB"}});
    case DOperator::D43: // L1L2L2L2 - L2L2L2L1 + 3 L2L2L1L2 - 3 L2L1L2L2
        return build({{T(1), "BAAA"}, {T(-1), "AAAB"}, {T(3), "AABA"}, {T(-3), "ABAA"}});
    }
    throw std::invalid_argument("unknown D operator");
}

template <typename T>
WordSeries<T> remainder(const SplittingScheme& scheme, int order)
{
    if (order < 2)
        throw std::invalid_argument("remainder: truncation order must be at least 2");
    if (auto violations = validate(scheme); !violations.empty()) {
        std::string msg = "remainder: inconsistent scheme:";
        for (const auto& v : violations)
            msg += " " + v + ";";
        throw std::invalid_argument(msg);
    }

    const auto& c = coefficients_c<T>(scheme);
    const auto& d = coefficients_d<T>(scheme);
    const auto a = WordSeries<T>::letter(Alphabet::AB, 'A', order);
    const auto b = WordSeries<T>::letter(Alphabet::AB, 'B', order);
    const auto identity = WordSeries<T>::identity(Alphabet::AB, order);

    auto product = identity;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!is_zero(c[i]))
            product = product * exp_series(a * c[i], order);
        if (!is_zero(d[i]))
            product = product * exp_series(b * d[i], order);
    }
    product = product * exp_series(-(a + b), order);
    return product - identity;
}

template <typename T>
Projection<T> project(const WordSeries<T>& part, const std::vector<WordSeries<T>>& basis)
{
    const std::size_t n = basis.size();
    std::vector<std::vector<T>> gram(n, std::vector<T>(n));
    std::vector<T> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            gram[i][j] = dot(basis[i], basis[j]);
        rhs[i] = dot(basis[i], part);
    }

    Projection<T> result;
    result.coefficients = n == 0 ? std::vector<T>{} : solve_dense(std::move(gram), std::move(rhs));

    auto residual = part;
    for (std::size_t i = 0; i < n; ++i)
        residual -= basis[i] * result.coefficients[i];
    result.residual_squared = dot(residual, residual);
    return result;
}

template <typename T>
Projection<T> project_onto_d_basis(const WordSeries<T>& remainder, int length)
{
    if (length > remainder.order())
        throw std::invalid_argument("project_onto_d_basis: remainder truncated below length "
                                    + std::to_string(length));
    std::vector<WordSeries<T>> basis;
    for (auto op : d_operators_of_length(length))
        basis.push_back(d_operator<T>(op, remainder.order()));
    return project(remainder.homogeneous_part(length), basis);
}

template <typename T>
T order2_coefficient(const SplittingScheme& scheme)
{
    return project_onto_d_basis(remainder<T>(scheme, 2), 2).coefficients.at(0);
}

template <typename T>
Projection<T> order3_coefficients(const SplittingScheme& scheme)
{
    return project_onto_d_basis(remainder<T>(scheme, 3), 3);
}

template <typename T>
Projection<T> order4_coefficients(const SplittingScheme& scheme)
{
    return project_onto_d_basis(remainder<T>(scheme, 4), 4);
}

template <typename T>
TwoStageCoefficients<T> two_stage_closed_form(const T& c1, const T& d1)
{
    const T one(1);
    return {
        (c1 - one) * d1 + frac<T>(1, 2),
        d1 * d1 * (one - c1) / T(2) - frac<T>(1, 6),
        d1 * (c1 * c1 - one) / T(2) + frac<T>(1, 3),
    };
}

template <typename T>
std::array<T, 2> three_stage_symmetric_closed_form(const T& c1)
{
    return {c1 / T(4) - frac<T>(1, 24), c1 * c1 / T(2) - c1 / T(2) + frac<T>(1, 12)};
}

template <typename T>
FourStageCoefficients<T> four_stage_symmetric_closed_form(const T& c1, const T& d1)
{
    const T cd = c1 * d1;
    const T cdd = c1 * d1 * d1;
    const T ccd = c1 * c1 * d1;
    const T dd = d1 * d1;
    FourStageCoefficients<T> out;
    out.d31 = cd - d1 / T(2) - cdd + dd / T(2) + frac<T>(1, 12);
    out.d32 = d1 / T(4) - cd + ccd - frac<T>(1, 24);
    out.d41 = cd / T(2) - d1 / T(4) - cdd / T(2) + dd / T(4) + frac<T>(1, 24);
    out.d42 = cd - frac<T>(3, 8) * d1 - cdd / T(2) - ccd / T(2) + dd / T(4) + frac<T>(1, 16);
    out.d43 = cd / T(2) - d1 / T(8) - ccd / T(2) + frac<T>(1, 48);
    return out;
}

template <typename T>
WordSeries<T> graded_expand(const WordSeries<T>& series)
{
    if (series.alphabet() != Alphabet::AB)
        throw std::invalid_argument("graded_expand: input must be over {A,B}");
    WordSeries<T> out(Alphabet::XVF, series.order());
    for (const auto& [word, coeff] : series.terms()) {
        std::vector<std::string> expanded{std::string{}};
        for (char letter : word.letters()) {
            std::vector<std::string> next;
            next.reserve(expanded.size() * 2);
            for (const auto& prefix : expanded) {
                if (letter == 'A') {
                    next.push_back(prefix + 'F');
                } else {
                    next.push_back(prefix + 'X');
                    next.push_back(prefix + 'V');
                }
            }
            expanded = std::move(next);
        }
        for (auto& letters : expanded)
            out.add(Word(std::move(letters)), coeff);
    }
    return out;
}

template <typename T>
WordSeries<T> normalize_commuting(const WordSeries<T>& series)
{
    if (series.alphabet() != Alphabet::XVF)
        throw std::invalid_argument("normalize_commuting: input must be over {X,V,F}");
    WordSeries<T> out(Alphabet::XVF, series.order());
    for (const auto& [word, coeff] : series.terms()) {
        std::string letters = word.letters();
        auto it = letters.begin();
        while (it != letters.end()) {
            auto block_end = std::find(it, letters.end(), 'X');
            // all V before all F inside the {V, F} run
            std::stable_partition(it, block_end, [](char ch) { return ch == 'V'; });
            it = block_end == letters.end() ? block_end : std::next(block_end);
        }
        out.add(Word(std::move(letters)), coeff);
    }
    return out;
}

template <typename T>
WordSeries<T> epsilon_component(const WordSeries<T>& graded, int exponent)
{
    WordSeries<T> out(graded.alphabet(), graded.order());
    for (const auto& [word, coeff] : graded.terms())
        if (epsilon_exponent(graded.alphabet(), word) == exponent)
            out.add(word, coeff);
    return out;
}

template <typename T>
std::optional<int> epsilon_order(const WordSeries<T>& series, double rel_tol)
{
    const auto normalized = normalize_commuting(graded_expand(series));
    const double cutoff = rel_tol * series.max_abs();
    std::optional<int> order;
    for (const auto& [word, coeff] : normalized.terms()) {
        if (magnitude(coeff) <= cutoff)
            continue;
        const int e = epsilon_exponent(Alphabet::XVF, word);
        order = order ? std::min(*order, e) : e;
    }
    return order;
}

#define MTS_EXPANSION_INSTANTIATE(T)                                                        \
    template WordSeries<T> d_operator<T>(DOperator, int);                                  \
    template WordSeries<T> remainder<T>(const SplittingScheme&, int);                      \
    template Projection<T> project<T>(const WordSeries<T>&, const std::vector<WordSeries<T>>&); \
    template Projection<T> project_onto_d_basis<T>(const WordSeries<T>&, int);             \
    template T order2_coefficient<T>(const SplittingScheme&);                              \
    template Projection<T> order3_coefficients<T>(const SplittingScheme&);                 \
    template Projection<T> order4_coefficients<T>(const SplittingScheme&);                 \
    template TwoStageCoefficients<T> two_stage_closed_form<T>(const T&, const T&);         \
    template std::array<T, 2> three_stage_symmetric_closed_form<T>(const T&);              \
    template FourStageCoefficients<T> four_stage_symmetric_closed_form<T>(const T&, const T&); \
    template WordSeries<T> graded_expand<T>(const WordSeries<T>&);                         \
    template WordSeries<T> normalize_commuting<T>(const WordSeries<T>&);                   \
    template WordSeries<T> epsilon_component<T>(const WordSeries<T>&, int);                \
    template std::optional<int> epsilon_order<T>(const WordSeries<T>&, double);

MTS_EXPANSION_INSTANTIATE(Rational)
MTS_EXPANSION_INSTANTIATE(double)

} // namespace mts
