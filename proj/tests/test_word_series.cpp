#include "generators.hpp"
#include "mts/word_series.hpp"

#include <doctest.h>

#include <sstream>

using namespace mts;
using RS = WordSeries<Rational>;

TEST_CASE("words order by length, then lexicographically")
{
    CHECK(Word("B") < Word("AA"));
    CHECK(Word("AB") < Word("BA"));
    CHECK(Word() < Word("A"));
    CHECK((Word("AB") + Word("BA")).letters() == "ABBA");
    CHECK(Word("VXVF").count('V') == 2);
}

TEST_CASE("series rejects foreign letters and drops long words")
{
    RS s(Alphabet::AB, 2);
    CHECK_THROWS_AS(s.add(Word("AX"), Rational(1)), std::invalid_argument);
    s.add(Word("ABA"), Rational(5));
    CHECK(s.is_zero());
    s.add(Word("AB"), Rational(1, 2));
    s.add(Word("AB"), Rational(-1, 2));
    CHECK(s.is_zero());
    CHECK_THROWS_AS(RS(Alphabet::AB, -1), std::invalid_argument);
    CHECK_THROWS_AS(RS(Alphabet::AB, 2) + RS(Alphabet::XVF, 2), std::invalid_argument);
}

TEST_CASE("exp_series examples")
{
    CHECK(exp_series(RS(Alphabet::AB, 4), 4) == RS::identity(Alphabet::AB, 4));

    const Rational c(3, 7);
    auto e = exp_series(RS::letter(Alphabet::AB, 'A', 2, c), 2);
    CHECK(e == RS::from_terms(Alphabet::AB, 2, {{1, ""}, {c, "A"}, {c * c / 2, "AA"}}));

    auto sum = RS::letter(Alphabet::AB, 'A', 3) + RS::letter(Alphabet::AB, 'B', 3);
    auto es = exp_series(sum, 3);
    CHECK(es.coefficient("AB") == Rational(1, 2));
    CHECK(es.coefficient("BAB") == Rational(1, 6));

    CHECK_THROWS_AS(exp_series(RS::identity(Alphabet::AB, 3), 3), std::invalid_argument);
}

TEST_CASE("product is associative and bilinear (random exact series)")
{
    gen::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 4;
        const auto alpha = trial % 2 ? Alphabet::AB : Alphabet::XVF;
        auto p = gen::series(rng, alpha, n);
        auto q = gen::series(rng, alpha, n);
        auto r = gen::series(rng, alpha, n);
        const auto k = gen::rational(rng);
        CHECK((p * q) * r == p * (q * r));
        CHECK(p * (q + r) == p * q + p * r);
        CHECK((p + q) * r == p * r + q * r);
        CHECK((k * p) * q == k * (p * q));
    }
}

TEST_CASE("exp(S) exp(-S) is the identity up to the truncation order")
{
    gen::Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 4;
        auto s = gen::series(rng, Alphabet::AB, n, 5, true);
        CHECK(exp_series(s, n) * exp_series(-s, n) == RS::identity(Alphabet::AB, n));
    }
}

TEST_CASE("homogeneous parts and truncation")
{
    auto s = RS::from_terms(Alphabet::AB, 3, {{2, ""}, {1, "A"}, {3, "AB"}, {-1, "BA"}, {5, "ABA"}});
    CHECK(s.constant_term() == 2);
    CHECK(s.homogeneous_part(2) == RS::from_terms(Alphabet::AB, 3, {{3, "AB"}, {-1, "BA"}}));
    CHECK(s.truncated(1).size() == 2);
    CHECK(s.max_abs() == doctest::Approx(5.0));
}

TEST_CASE("double-mode series")
{
    using DS = WordSeries<double>;
    auto e = exp_series(DS::letter(Alphabet::AB, 'B', 3, 0.5), 3);
    CHECK(e.coefficient("BBB") == doctest::Approx(0.125 / 6.0));
}

TEST_CASE("text report lines are `coeff  eps  word`")
{
    auto s = RS::from_terms(Alphabet::XVF, 3, {{1, ""}, {Rational(1, 12), "VVF"}, {Rational(-1, 2), "XF"}});
    std::ostringstream os;
    write_terms(os, s);
    CHECK(os.str() == "1  0  I\n-1/2  0  XF\n1/12  -4  VVF\n");
    CHECK(epsilon_exponent(Alphabet::AB, Word("BB")) == 0);
}
