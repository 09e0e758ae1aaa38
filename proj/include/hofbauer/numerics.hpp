#pragma once

#include <gmpxx.h>

#include <compare>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hofbauer {

/// Raised for mode/field mismatches, division by zero and malformed fields.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Rational = mpq_class;

/// Dense polynomial with rational coefficients, constant term first.
using RationalPoly = std::vector<Rational>;

/// Parses a univariate polynomial such as "x^3-x-1" or "1/2 + 3*b - b^2".
/// Any single letter is accepted as the variable. Returns constant-first coefficients.
RationalPoly parse_polynomial(std::string_view text);

/// Long division over Q: {quotient, remainder}, constant-first, trailing zeros trimmed.
std::pair<RationalPoly, RationalPoly> poly_divmod(const RationalPoly& num, const RationalPoly& den);

/// Formats constant-first coefficients as a polynomial in `var`.
std::string format_polynomial(const RationalPoly& coeffs, char var = 'b');

/// Parses "p/q", an integer, or a finite decimal such as "0.3" into an exact rational.
Rational parse_rational(std::string_view text);

/// The real number field Q(beta), beta a real root of an irreducible monic
/// integer polynomial of degree at most 16, pinned by an isolating interval.
class NumberField {
public:
    static constexpr int kMaxDegree = 16;

    /// `minpoly` is leading-coefficient first, e.g. {1, -1, -1} for x^2 - x - 1.
    /// Throws NumericError when the polynomial is not monic, reducible, or has
    /// no sign change on [lo, hi].
    static std::shared_ptr<const NumberField> create(const std::vector<long long>& minpoly,
                                                     const Rational& lo, const Rational& hi,
                                                     std::string name = {});

    /// Picks the largest root in (lo, hi) by scanning for sign changes.
    static std::shared_ptr<const NumberField> create_largest_root(
        const std::vector<long long>& minpoly, const Rational& lo, const Rational& hi,
        std::string name = {});

    static std::shared_ptr<const NumberField> golden();
    static std::shared_ptr<const NumberField> plastic();

    int degree() const { return static_cast<int>(minpoly_.size()) - 1; }
    /// Constant-first monic coefficients.
    const RationalPoly& minpoly() const { return minpoly_; }
    std::vector<long long> minpoly_leading_first() const;
    const std::string& name() const { return name_; }
    double root_approx() const { return root_double_; }

    /// Isolating interval refined until its width is below 2^-bits.
    std::pair<Rational, Rational> refined_interval(unsigned bits) const;
    std::pair<Rational, Rational> isolating_interval() const { return {lo_, hi_}; }

    RationalPoly reduce(RationalPoly p) const;
    RationalPoly multiply(const RationalPoly& a, const RationalPoly& b) const;
    RationalPoly inverse(const RationalPoly& a) const;
    /// Sign of a(beta) for a reduced coefficient vector; exact.
    int sign(const RationalPoly& a) const;
    double evaluate(const RationalPoly& a) const;

    bool same_field(const NumberField& other) const;

private:
    NumberField() = default;

    RationalPoly minpoly_;
    std::vector<long long> integer_minpoly_;
    Rational lo_, hi_;          // isolating interval as given
    Rational fine_lo_, fine_hi_; // refined to width < 2^-160 at construction
    long double root_double_ = 0;
    std::string name_;
};

using FieldPtr = std::shared_ptr<const NumberField>;

/// Finds a nontrivial factor of an integer polynomial (leading first), or an
/// empty vector if irreducible over Q. Exposed for testing.
std::vector<long long> find_integer_factor(const std::vector<long long>& poly);

enum class Ordering { less, equal, greater };

/// Exact or tolerant real scalar: Rational | FieldElement | Float.
/// Rationals embed into field elements and into floats; field elements and
/// floats never mix, and neither do elements of distinct fields.
class Scalar {
public:
    static constexpr double kDefaultEps = 1e-9;

    struct FieldElement {
        FieldPtr field;
        RationalPoly coeffs; // reduced, degree < field->degree(), trailing zeros trimmed
    };
    struct Float {
        double value = 0;
        double eps = kDefaultEps;
    };

    Scalar() : v_(Rational(0)) {}
    Scalar(int v) : v_(Rational(v)) {}
    Scalar(long v) : v_(Rational(v)) {}
    Scalar(const Rational& q) : v_(q) {}
    Scalar(long num, long den);

    static Scalar from_float(double value, double eps = kDefaultEps);
    /// The generator beta of `field`.
    static Scalar generator(const FieldPtr& field);
    static Scalar from_coeffs(const FieldPtr& field, RationalPoly coeffs);

    bool is_rational() const { return std::holds_alternative<Rational>(v_); }
    bool is_field() const { return std::holds_alternative<FieldElement>(v_); }
    bool is_float() const { return std::holds_alternative<Float>(v_); }

    const Rational& rational() const { return std::get<Rational>(v_); }
    const FieldElement& field_element() const { return std::get<FieldElement>(v_); }
    const Float& float_value() const { return std::get<Float>(v_); }
    /// Field context if this is a field element, else null.
    FieldPtr field() const;

    double to_double() const;
    /// "p/q", a polynomial in b, or a shortest round-trip decimal.
    std::string to_string() const;

    /// Exact zero test in exact modes; |x| <= eps in float mode.
    bool is_zero() const;
    int sign() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

    friend Scalar operator+(const Scalar& a, const Scalar& b);
    friend Scalar operator-(const Scalar& a, const Scalar& b);
    friend Scalar operator*(const Scalar& a, const Scalar& b);
    friend Scalar operator/(const Scalar& a, const Scalar& b);

    friend Ordering compare(const Scalar& a, const Scalar& b);
    friend bool operator==(const Scalar& a, const Scalar& b) { return compare(a, b) == Ordering::equal; }
    friend bool operator<(const Scalar& a, const Scalar& b) { return compare(a, b) == Ordering::less; }
    friend bool operator>(const Scalar& a, const Scalar& b) { return compare(a, b) == Ordering::greater; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return compare(a, b) != Ordering::greater; }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return compare(a, b) != Ordering::less; }

    /// Canonical text used as a hash key; equal exact values give equal keys.
    std::string key() const;

private:
    using Value = std::variant<Rational, FieldElement, Float>;
    explicit Scalar(Value v) : v_(std::move(v)) {}

    Value v_;
};

enum class ArithOp { add, sub, mul, div };
Scalar scalar_arith(const Scalar& a, const Scalar& b, ArithOp op);
inline Ordering scalar_compare(const Scalar& a, const Scalar& b) { return compare(a, b); }

Scalar abs(const Scalar& x);
Scalar min(const Scalar& a, const Scalar& b);
Scalar max(const Scalar& a, const Scalar& b);

/// Numeric context used to lift rationals into the active mode.
struct NumericMode {
    enum class Kind { rational, field, floating };
    Kind kind = Kind::rational;
    FieldPtr field;
    double eps = Scalar::kDefaultEps;

    static NumericMode exact_rational() { return {}; }
    static NumericMode exact_field(FieldPtr f) { return {Kind::field, std::move(f), Scalar::kDefaultEps}; }
    static NumericMode floating(double eps = Scalar::kDefaultEps) { return {Kind::floating, nullptr, eps}; }

    bool exact() const { return kind != Kind::floating; }
    /// Converts an exact rational into this mode.
    Scalar lift(const Rational& q) const;
    Scalar lift(long num, long den = 1) const { return lift(Rational(num, den)); }
};

} // namespace hofbauer
