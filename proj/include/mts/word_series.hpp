#pragma once

// Truncated series over words of noncommuting letters.
//
// A WordSeries is a finite linear combination of words over a small alphabet,
// truncated at a maximum word length. Multiplication concatenates words, so
// the series behaves like an element of the free associative algebra modulo
// words longer than the truncation order. The length of a word is the power
// of the step size it carries.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mts {

using Rational = boost::multiprecision::cpp_rational;

// {A, B}: A is the slow-force kick operator, B the fast subsystem operator.
// {X, V, F}: B split as X + eps^-2 V (drift and fast force), F = A.
enum class Alphabet { AB, XVF };

std::string_view letters_of(Alphabet alphabet);
std::string_view name_of(Alphabet alphabet);
bool contains_letter(Alphabet alphabet, char letter);

class Word {
public:
    Word() = default;
    explicit Word(std::string letters) : letters_(std::move(letters)) {}

    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    const std::string& letters() const { return letters_; }
    char operator[](std::size_t i) const { return letters_[i]; }
    std::size_t count(char letter) const;

    friend Word operator+(const Word& lhs, const Word& rhs) { return Word(lhs.letters_ + rhs.letters_); }
    friend bool operator==(const Word&, const Word&) = default;

    // shortlex: shorter words first, then lexicographic
    friend std::strong_ordering operator<=>(const Word& lhs, const Word& rhs)
    {
        if (auto c = lhs.size() <=> rhs.size(); c != 0)
            return c;
        return lhs.letters_.compare(rhs.letters_) <=> 0;
    }

private:
    std::string letters_;
};

// Coefficient-domain hooks. Exact zero is the pruning criterion in both domains.
inline bool is_zero(const Rational& x) { return x.is_zero(); }
inline bool is_zero(double x) { return x == 0.0; }
inline double to_double(const Rational& x) { return static_cast<double>(x); }
inline double to_double(double x) { return x; }
inline double magnitude(const Rational& x) { return std::abs(static_cast<double>(x)); }
inline double magnitude(double x) { return std::abs(x); }
inline std::string format_coefficient(const Rational& x) { return x.str(); }
inline std::string format_coefficient(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// epsilon exponent attached to a word of the graded alphabet: every V carries eps^-2
inline int epsilon_exponent(Alphabet alphabet, const Word& word)
{
    return alphabet == Alphabet::XVF ? -2 * static_cast<int>(word.count('V')) : 0;
}

template <typename T>
class WordSeries {
public:
    using Terms = std::map<Word, T>;

    WordSeries(Alphabet alphabet, int order) : alphabet_(alphabet), order_(order)
    {
        if (order < 0)
            throw std::invalid_argument("truncation order must be non-negative");
    }

    static WordSeries identity(Alphabet alphabet, int order)
    {
        WordSeries s(alphabet, order);
        s.add(Word{}, T(1));
        return s;
    }

    static WordSeries letter(Alphabet alphabet, char letter, int order, const T& coeff = T(1))
    {
        WordSeries s(alphabet, order);
        s.add(Word(std::string(1, letter)), coeff);
        return s;
    }

    // Convenience builder: {{coeff, "AB"}, {-coeff, "BA"}}.
    static WordSeries from_terms(Alphabet alphabet, int order, const std::vector<std::pair<T, std::string>>& terms)
    {
        WordSeries s(alphabet, order);
        for (const auto& [coeff, letters] : terms)
            s.add(Word(letters), coeff);
        return s;
    }

    Alphabet alphabet() const { return alphabet_; }
    int order() const { return order_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    T coefficient(const Word& word) const
    {
        auto it = terms_.find(word);
        return it == terms_.end() ? T(0) : it->second;
    }
    T coefficient(std::string_view letters) const { return coefficient(Word(std::string(letters))); }

    // Adds coeff * word. Words longer than the truncation order are dropped.
    void add(const Word& word, const T& coeff)
    {
        for (char ch : word.letters())
            if (!contains_letter(alphabet_, ch))
                throw std::invalid_argument(std::string("letter '") + ch + "' not in alphabet "
                                            + std::string(name_of(alphabet_)));
        if (static_cast<int>(word.size()) > order_ || mts::is_zero(coeff))
            return;
        auto [it, inserted] = terms_.try_emplace(word, coeff);
        if (!inserted) {
            it->second += coeff;
            if (mts::is_zero(it->second))
                terms_.erase(it);
        }
    }

    WordSeries homogeneous_part(int length) const
    {
        WordSeries out(alphabet_, order_);
        for (const auto& [w, c] : terms_)
            if (static_cast<int>(w.size()) == length)
                out.terms_.emplace(w, c);
        return out;
    }

    WordSeries truncated(int order) const
    {
        WordSeries out(alphabet_, std::min(order, order_));
        for (const auto& [w, c] : terms_)
            if (static_cast<int>(w.size()) <= out.order_)
                out.terms_.emplace(w, c);
        return out;
    }

    T constant_term() const { return coefficient(Word{}); }

    WordSeries& operator+=(const WordSeries& rhs)
    {
        check_compatible(rhs);
        order_ = std::min(order_, rhs.order_);
        prune_above_order();
        for (const auto& [w, c] : rhs.terms_)
            add(w, c);
        return *this;
    }

    WordSeries& operator-=(const WordSeries& rhs)
    {
        check_compatible(rhs);
        order_ = std::min(order_, rhs.order_);
        prune_above_order();
        for (const auto& [w, c] : rhs.terms_)
            add(w, -c);
        return *this;
    }

    WordSeries& operator*=(const T& scalar)
    {
        if (mts::is_zero(scalar)) {
            terms_.clear();
            return *this;
        }
        for (auto it = terms_.begin(); it != terms_.end();) {
            it->second *= scalar;
            it = mts::is_zero(it->second) ? terms_.erase(it) : std::next(it);
        }
        return *this;
    }

    friend WordSeries operator+(WordSeries lhs, const WordSeries& rhs) { return lhs += rhs; }
    friend WordSeries operator-(WordSeries lhs, const WordSeries& rhs) { return lhs -= rhs; }
    friend WordSeries operator*(WordSeries lhs, const T& scalar) { return lhs *= scalar; }
    friend WordSeries operator*(const T& scalar, WordSeries rhs) { return rhs *= scalar; }
    friend WordSeries operator-(WordSeries s) { return s *= T(-1); }

    // Truncated concatenation product.
    friend WordSeries operator*(const WordSeries& lhs, const WordSeries& rhs)
    {
        lhs.check_compatible(rhs);
        WordSeries out(lhs.alphabet_, std::min(lhs.order_, rhs.order_));
        for (const auto& [wl, cl] : lhs.terms_) {
            if (static_cast<int>(wl.size()) > out.order_)
                break; // shortlex: all remaining words are at least as long
            for (const auto& [wr, cr] : rhs.terms_) {
                if (static_cast<int>(wl.size() + wr.size()) > out.order_)
                    break;
                out.add(wl + wr, cl * cr);
            }
        }
        return out;
    }

    friend bool operator==(const WordSeries& lhs, const WordSeries& rhs)
    {
        return lhs.alphabet_ == rhs.alphabet_ && lhs.terms_ == rhs.terms_;
    }

    // Largest coefficient magnitude; used for "zero within tolerance" checks in real mode.
    double max_abs() const
    {
        double m = 0.0;
        for (const auto& [w, c] : terms_)
            m = std::max(m, magnitude(c));
        return m;
    }

private:
    void check_compatible(const WordSeries& rhs) const
    {
        if (alphabet_ != rhs.alphabet_)
            throw std::invalid_argument("word series over different alphabets");
    }

    void prune_above_order()
    {
        for (auto it = terms_.begin(); it != terms_.end();)
            it = static_cast<int>(it->first.size()) > order_ ? terms_.erase(it) : std::next(it);
    }

    Alphabet alphabet_;
    int order_;
    Terms terms_;
};

// Sum_{j=0..n} S^j / j!, truncated at word length n.
template <typename T>
WordSeries<T> exp_series(const WordSeries<T>& generator, int order)
{
    if (!is_zero(generator.constant_term()))
        throw std::invalid_argument("exp_series: generator has a nonzero constant term");
    auto gen = generator.truncated(order);
    auto result = WordSeries<T>::identity(gen.alphabet(), order);
    auto power = result;
    // Each factor of a constant-free generator adds at least one letter, so n terms suffice.
    for (int j = 1; j <= order; ++j) {
        power = power * gen;
        power *= T(1) / T(j);
        if (power.is_zero())
            break;
        result += power;
    }
    return result;
}

// Plain-text report: one line per term, `coeff  epsilon_exp  word`.
// The empty word is written as `I`.
template <typename T>
void write_terms(std::ostream& os, const WordSeries<T>& series)
{
    for (const auto& [w, c] : series.terms())
        os << format_coefficient(c) << "  " << epsilon_exponent(series.alphabet(), w) << "  "
           << (w.empty() ? std::string("I") : w.letters()) << '\n';
}

} // namespace mts
