#include "doctest.h"
#include "oracle.hpp"

#include "hofbauer/numerics.hpp"

#include <cmath>
#include <random>

using namespace hofbauer;

namespace {

Scalar plastic_elem(const std::array<mpq_class, 3>& c)
{
    return Scalar::from_coeffs(NumberField::plastic(), {c[0], c[1], c[2]});
}

} // namespace

TEST_CASE("field creation locates the requested roots")
{
    auto golden = NumberField::create({1, -1, -1}, Rational(1), Rational(2));
    CHECK(golden->degree() == 2);
    CHECK(golden->root_approx() == doctest::Approx(1.6180339887).epsilon(1e-10));

    auto plastic = NumberField::create({1, 0, -1, -1}, Rational(1), Rational(2));
    CHECK(plastic->root_approx() == doctest::Approx(1.3247179572).epsilon(1e-10));
    CHECK(plastic->root_approx() == doctest::Approx(oracle::plastic().root.get_d()).epsilon(1e-15));
}

TEST_CASE("reducible polynomials are rejected with a factor")
{
    try {
        NumberField::create({1, 0, -4}, Rational(1), Rational(3));
        FAIL("x^2-4 accepted");
    } catch (const NumericError& e) {
        std::string msg = e.what();
        CHECK(msg.find("reducible") != std::string::npos);
        CHECK((msg.find("x - 2") != std::string::npos || msg.find("x + 2") != std::string::npos ||
               msg.find("-2 + x") != std::string::npos || msg.find("2 + x") != std::string::npos));
    }
    // Degree 4 without rational roots: (x^2+1)(x^2-3) is caught by trial factorization.
    CHECK_THROWS_AS(NumberField::create({1, 0, -2, 0, -3}, Rational(1), Rational(2)), NumericError);
    CHECK_FALSE(find_integer_factor({1, 0, -2, 0, -3}).empty());
    CHECK(find_integer_factor({1, 0, -1, -1}).empty());
}

TEST_CASE("field creation errors")
{
    CHECK_THROWS_AS(NumberField::create({1, -1, -1}, Rational(2), Rational(3)), NumericError); // no sign change
    CHECK_THROWS_AS(NumberField::create({2, -1, -1}, Rational(1), Rational(2)), NumericError); // not monic
    CHECK_THROWS_AS(NumberField::create({1}, Rational(1), Rational(2)), NumericError);
}

TEST_CASE("golden ratio squared reduces to beta + 1")
{
    Scalar b = Scalar::generator(NumberField::golden());
    Scalar sq = b * b;
    CHECK(sq == b + Scalar(1));
    CHECK(sq.field_element().coeffs.size() == 2);
    CHECK(sq.to_string() == "1 + b");
    CHECK(compare(sq - b - Scalar(1), Scalar(0)) == Ordering::equal);
}

TEST_CASE("plastic identities")
{
    Scalar b = Scalar::generator(NumberField::plastic());
    Scalar one(1);
    CHECK(b * (b * b - one) == one);
    CHECK(b * b - one == one / b);
    // (2 - beta) * beta = 2 beta - beta^2
    Scalar prod = (Scalar(2) - b) * b;
    CHECK(prod.to_string() == "2*b - b^2");
    CHECK(compare(Scalar(2) - b, one / b) == Ordering::less);
    CHECK((Scalar(2) - b).to_double() == doctest::Approx(0.6753).epsilon(1e-4));
    CHECK((one / b).to_double() == doctest::Approx(0.7549).epsilon(1e-4));
}

TEST_CASE("float tolerance in comparison")
{
    Scalar a = Scalar::from_float(0.3), b = Scalar::from_float(0.3 + 1e-12);
    CHECK(compare(a, b) == Ordering::equal);
    CHECK(compare(a, Scalar::from_float(0.31)) == Ordering::less);
    CHECK((a + Scalar(1, 2)).is_float());
}

TEST_CASE("mode mixing is rejected")
{
    Scalar g = Scalar::generator(NumberField::golden());
    Scalar p = Scalar::generator(NumberField::plastic());
    CHECK_THROWS_AS(g + p, NumericError);
    CHECK_THROWS_AS(g * Scalar::from_float(1.0), NumericError);
    CHECK_THROWS_AS(compare(g, Scalar::from_float(1.0)), NumericError);
    CHECK_THROWS_AS(g / Scalar(0), NumericError);
    CHECK_THROWS_AS(Scalar(1) / Scalar(0), NumericError);
    // Rationals embed into field contexts.
    CHECK(g + Scalar(1, 2) == Scalar(1, 2) + g);
}

TEST_CASE("property: ring axioms on random plastic elements agree with the oracle")
{
    std::mt19937_64 rng(7);
    const auto& of = oracle::plastic();
    for (int i = 0; i < 10000; ++i) {
        std::array<mpq_class, 3> ca, cb, cc;
        for (int k = 0; k < 3; ++k) {
            ca[k] = oracle::random_rational(rng);
            cb[k] = oracle::random_rational(rng);
            cc[k] = oracle::random_rational(rng);
        }
        Scalar a = plastic_elem(ca), b = plastic_elem(cb), c = plastic_elem(cc);
        REQUIRE((a * b) * c == a * (b * c));
        REQUIRE(a * (b + c) == a * b + a * c);

        oracle::P oa{&of, ca}, ob{&of, cb};
        auto prod = oracle::from_library(of, a * b);
        REQUIRE(prod == oa * ob);
        if (!b.is_zero()) REQUIRE(oracle::from_library(of, a / b) == oa / ob);
    }
}

TEST_CASE("property: to_double agrees with a high-precision evaluation")
{
    std::mt19937_64 rng(11);
    const auto& of = oracle::plastic();
    for (int i = 0; i < 2000; ++i) {
        std::array<mpq_class, 3> c;
        for (auto& x : c) x = oracle::random_rational(rng, 1000, 97);
        oracle::P o{&of, c};
        double expected = o.to_double();
        double got = plastic_elem(c).to_double();
        REQUIRE(std::fabs(got - expected) <= 1e-12 * std::max(1.0, std::fabs(expected)));
    }
}

TEST_CASE("property: comparison is a total order consistent with the oracle")
{
    std::mt19937_64 rng(13);
    const auto& of = oracle::golden();
    auto g = NumberField::golden();
    auto draw = [&] {
        std::array<mpq_class, 2> c{oracle::random_rational(rng, 20, 7), oracle::random_rational(rng, 20, 7)};
        return std::make_pair(Scalar::from_coeffs(g, {c[0], c[1]}), oracle::G{&of, c});
    };
    for (int i = 0; i < 3000; ++i) {
        auto [a, oa] = draw();
        auto [b, ob] = draw();
        auto [c, oc] = draw();
        Ordering ab = compare(a, b), ba = compare(b, a);
        REQUIRE((ab == Ordering::less) == (ba == Ordering::greater));
        REQUIRE((ab == Ordering::equal) == (ba == Ordering::equal));
        REQUIRE((ab == Ordering::less) == (oa < ob));
        if (a <= b && b <= c) REQUIRE(a <= c);
    }
}

TEST_CASE("nearly equal field elements are separated exactly")
{
    // F_40 / F_39 is within 1e-16 of the golden ratio but not equal to it.
    Scalar b = Scalar::generator(NumberField::golden());
    Scalar q(Rational(oracle::fibonacci(40), oracle::fibonacci(39)));
    CHECK(compare(q, b) != Ordering::equal);
    CHECK((compare(q, b) == Ordering::greater) == (oracle::fibonacci(40) * oracle::fibonacci(40) >
                                                    oracle::fibonacci(39) * oracle::fibonacci(41)));
}

TEST_CASE("parsing")
{
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("-0.25") == Rational(-1, 4));
    CHECK(parse_rational("7") == Rational(7));
    CHECK_THROWS_AS(parse_rational("1/0"), NumericError);
    auto p = parse_polynomial("x^3-x-1");
    REQUIRE(p.size() == 4);
    CHECK(p[0] == -1);
    CHECK(p[1] == -1);
    CHECK(p[2] == 0);
    CHECK(p[3] == 1);
    auto q = parse_polynomial("1/2 + 3*b - b^2");
    CHECK(q[0] == Rational(1, 2));
    CHECK(q[2] == -1);
    CHECK(format_polynomial(q) == "1/2 + 3*b - b^2");
}

TEST_CASE("to_double stays accurate under heavy cancellation")
{
    // F_{n+1} - F_n * beta = (-1/beta)^n shrinks while the coefficients grow.
    const auto& of = oracle::golden();
    auto g = NumberField::golden();
    for (unsigned n = 10; n <= 80; n += 10) {
        mpq_class a(oracle::fibonacci(n + 1)), b(-oracle::fibonacci(n));
        Scalar s = Scalar::from_coeffs(g, {a, b});
        double expected = oracle::G{&of, {a, b}}.to_double();
        CHECK(s.to_double() == doctest::Approx(expected).epsilon(1e-14));
        CHECK(expected == doctest::Approx(std::pow(-1.0 / of.root.get_d(), double(n))).epsilon(1e-12));
    }
}
