#include "hofbauer/numerics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace hofbauer {

namespace {

Rational q_of(long long v) { return Rational(static_cast<long>(v)); }

void trim(RationalPoly& p)
{
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Rational eval_rational(const RationalPoly& p, const Rational& x)
{
    Rational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// Interval Horner over rationals. Returns [lo, hi] enclosing p([a, b]).
std::pair<Rational, Rational> eval_interval(const RationalPoly& p, const Rational& a, const Rational& b)
{
    Rational lo = 0, hi = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        Rational c1 = lo * a, c2 = lo * b, c3 = hi * a, c4 = hi * b;
        Rational mn = std::min({c1, c2, c3, c4});
        Rational mx = std::max({c1, c2, c3, c4});
        lo = mn + *it;
        hi = mx + *it;
    }
    return {lo, hi};
}

// Polynomial long division over Q; constant-first. Returns {quotient, remainder}.
std::pair<RationalPoly, RationalPoly> divmod(RationalPoly num, RationalPoly den)
{
    trim(num);
    trim(den);
    if (den.empty()) throw NumericError("polynomial division by zero");
    if (num.size() < den.size()) return {{}, num};
    RationalPoly quot(num.size() - den.size() + 1);
    const Rational& lead = den.back();
    for (std::size_t i = num.size() - 1;; --i) {
        Rational q = num[i] / lead;
        std::size_t shift = i - (den.size() - 1);
        if (q != 0) {
            quot[shift] = q;
            for (std::size_t k = 0; k < den.size(); ++k) num[shift + k] -= q * den[k];
        }
        if (shift == 0) break;
    }
    trim(num);
    trim(quot);
    return {quot, num};
}

RationalPoly poly_mul(const RationalPoly& a, const RationalPoly& b)
{
    if (a.empty() || b.empty()) return {};
    RationalPoly out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    trim(out);
    return out;
}

RationalPoly poly_sub(RationalPoly a, const RationalPoly& b)
{
    if (a.size() < b.size()) a.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    trim(a);
    return a;
}

std::vector<long long> divisors(long long v)
{
    v = std::llabs(v);
    std::vector<long long> out;
    for (long long d = 1; d * d <= v; ++d) {
        if (v % d == 0) {
            out.push_back(d);
            if (d != v / d) out.push_back(v / d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

RationalPoly to_rational_poly(const std::vector<long long>& leading_first)
{
    RationalPoly p;
    for (auto it = leading_first.rbegin(); it != leading_first.rend(); ++it) p.push_back(q_of(*it));
    trim(p);
    return p;
}

// Lagrange interpolation through (xs[i], ys[i]); constant-first.
RationalPoly interpolate(const std::vector<long long>& xs, const std::vector<long long>& ys)
{
    RationalPoly out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        RationalPoly basis{Rational(1)};
        Rational denom = 1;
        for (std::size_t j = 0; j < xs.size(); ++j) {
            if (j == i) continue;
            basis = poly_mul(basis, RationalPoly{q_of(-xs[j]), Rational(1)});
            denom *= q_of(xs[i] - xs[j]);
        }
        Rational scale = q_of(ys[i]) / denom;
        for (auto& c : basis) c *= scale;
        if (out.size() < basis.size()) out.resize(basis.size());
        for (std::size_t k = 0; k < basis.size(); ++k) out[k] += basis[k];
    }
    trim(out);
    return out;
}

std::string shortest_double(double v)
{
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::pair<RationalPoly, RationalPoly> poly_divmod(const RationalPoly& num, const RationalPoly& den)
{
    return divmod(num, den);
}

// ---------------------------------------------------------------- parsing

Rational parse_rational(std::string_view text)
{
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw NumericError("empty rational literal");
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        bool neg = s[0] == '-';
        std::string digits = s.substr(neg ? 1 : 0);
        dot = digits.find('.');
        std::string whole = digits.substr(0, dot);
        std::string frac = digits.substr(dot + 1);
        if (whole.empty()) whole = "0";
        for (char c : whole + frac)
            if (!std::isdigit(static_cast<unsigned char>(c))) throw NumericError("bad decimal literal: " + s);
        mpz_class num(whole + frac, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        Rational q(num, den);
        q.canonicalize();
        return neg ? Rational(-q) : q;
    }
    Rational q;
    if (q.set_str(s, 10) != 0) throw NumericError("bad rational literal: " + s);
    if (q.get_den() == 0) throw NumericError("zero denominator in literal: " + s);
    q.canonicalize();
    return q;
}

RationalPoly parse_polynomial(std::string_view text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw NumericError("empty polynomial");
    RationalPoly out;
    std::size_t i = 0;
    char var = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        }
        std::size_t start = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '/' || s[i] == '.')) ++i;
        Rational coeff = 1;
        if (i > start) coeff = parse_rational(s.substr(start, i - start));
        if (i < s.size() && s[i] == '*') ++i;
        std::size_t power = 0;
        if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) {
            if (var != 0 && s[i] != var) throw NumericError("polynomial mixes variables: " + s);
            var = s[i];
            ++i;
            power = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                std::size_t ps = i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (ps == i) throw NumericError("missing exponent in: " + s);
                power = std::stoul(s.substr(ps, i - ps));
            }
        } else if (i == start) {
            throw NumericError("cannot parse polynomial term in: " + s);
        }
        if (power > 64) throw NumericError("exponent too large in: " + s);
        if (out.size() <= power) out.resize(power + 1);
        out[power] += sign * coeff;
        if (i < s.size() && s[i] != '+' && s[i] != '-') throw NumericError("unexpected character in: " + s);
    }
    trim(out);
    return out;
}

std::string format_polynomial(const RationalPoly& coeffs, char var)
{
    std::string out;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const Rational& c = coeffs[i];
        if (c == 0) continue;
        Rational mag = abs(c);
        if (out.empty()) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (i == 0) {
            out += mag.get_str();
        } else {
            if (mag != 1) out += mag.get_str() + "*";
            out += var;
            if (i > 1) out += "^" + std::to_string(i);
        }
    }
    return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------- factoring

std::vector<long long> find_integer_factor(const std::vector<long long>& poly)
{
    RationalPoly f = to_rational_poly(poly);
    const int d = static_cast<int>(f.size()) - 1;
    if (d <= 1) return {};
    // Rational root test: root p/q with p | a0, q | lead.
    long long a0 = poly.back();
    long long lead = poly.front();
    if (a0 == 0) return {1, 0};
    for (long long p : divisors(a0)) {
        for (long long q : divisors(lead)) {
            for (int s : {1, -1}) {
                Rational r(q_of(s * p) / q_of(q));
                r.canonicalize();
                if (eval_rational(f, r) == 0) {
                    return {r.get_den().get_si(), -r.get_num().get_si()};
                }
            }
        }
    }
    if (d <= 3) return {};
    // Kronecker: a degree-k factor g has g(x_i) | f(x_i) at k+1 integer points.
    for (int k = 2; k <= d / 2; ++k) {
        std::vector<long long> xs, fx;
        for (long long x = 0; static_cast<int>(xs.size()) < k + 1; x = x <= 0 ? 1 - x : -x) {
            Rational v = eval_rational(f, q_of(x));
            // Roots were ruled out above, so v != 0.
            xs.push_back(x);
            fx.push_back(v.get_num().get_si());
        }
        std::vector<std::vector<long long>> choices;
        for (long long v : fx) {
            std::vector<long long> c;
            for (long long dv : divisors(v)) {
                c.push_back(dv);
                c.push_back(-dv);
            }
            choices.push_back(std::move(c));
        }
        std::vector<std::size_t> idx(choices.size(), 0);
        while (true) {
            std::vector<long long> ys(idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) ys[i] = choices[i][idx[i]];
            RationalPoly g = interpolate(xs, ys);
            bool integral = static_cast<int>(g.size()) - 1 == k &&
                            std::all_of(g.begin(), g.end(), [](const Rational& c) { return c.get_den() == 1; });
            if (integral && divmod(f, g).second.empty()) {
                std::vector<long long> out;
                for (auto it = g.rbegin(); it != g.rend(); ++it) out.push_back(it->get_num().get_si());
                return out;
            }
            std::size_t pos = 0;
            while (pos < idx.size() && ++idx[pos] == choices[pos].size()) idx[pos++] = 0;
            if (pos == idx.size()) break;
        }
    }
    return {};
}

// ---------------------------------------------------------------- fields

std::shared_ptr<const NumberField> NumberField::create(const std::vector<long long>& minpoly, const Rational& lo,
                                                       const Rational& hi, std::string name)
{
    if (minpoly.size() < 2) throw NumericError("minimal polynomial must have degree >= 1");
    if (static_cast<int>(minpoly.size()) - 1 > kMaxDegree) throw NumericError("minimal polynomial degree exceeds 16");
    if (minpoly.front() != 1) throw NumericError("minimal polynomial must be monic");
    if (!(lo < hi)) throw NumericError("isolating interval must satisfy lo < hi");
    if (auto factor = find_integer_factor(minpoly); !factor.empty()) {
        RationalPoly fp = to_rational_poly(factor);
        std::string msg = "reducible minimal polynomial: factor " + format_polynomial(fp, 'x');
        throw NumericError(msg);
    }
    auto field = std::shared_ptr<NumberField>(new NumberField());
    field->integer_minpoly_ = minpoly;
    field->minpoly_ = to_rational_poly(minpoly);
    field->lo_ = lo;
    field->hi_ = hi;
    int slo = sgn(eval_rational(field->minpoly_, lo));
    int shi = sgn(eval_rational(field->minpoly_, hi));
    if (slo == 0 || shi == 0 || slo == shi) throw NumericError("no sign change of the minimal polynomial on the interval");
    Rational a = lo, b = hi;
    Rational eps(1);
    eps /= mpz_class(1) << 160;
    while (b - a > eps) {
        Rational m = (a + b) / 2;
        int sm = sgn(eval_rational(field->minpoly_, m));
        if (sm == 0) { // rational root: impossible for an irreducible polynomial of degree > 1
            a = b = m;
            break;
        }
        (sm == slo ? a : b) = m;
    }
    field->fine_lo_ = a;
    field->fine_hi_ = b;
    field->root_double_ = static_cast<long double>(Rational((a + b) / 2).get_d());
    // get_d truncates; refine the long double by Newton on the exact polynomial.
    long double x = field->root_double_;
    for (int it = 0; it < 4; ++it) {
        long double fx = 0, dfx = 0;
        for (auto c = field->minpoly_.rbegin(); c != field->minpoly_.rend(); ++c) {
            dfx = dfx * x + fx;
            fx = fx * x + static_cast<long double>(c->get_d());
        }
        if (dfx != 0) x -= fx / dfx;
    }
    field->root_double_ = x;
    field->name_ = std::move(name);
    return field;
}

std::shared_ptr<const NumberField> NumberField::create_largest_root(const std::vector<long long>& minpoly,
                                                                   const Rational& lo, const Rational& hi,
                                                                   std::string name)
{
    RationalPoly f = to_rational_poly(minpoly);
    const int steps = 4096;
    Rational width = (hi - lo) / steps;
    Rational b = hi;
    int sb = sgn(eval_rational(f, b));
    for (int i = steps - 1; i >= 0; --i) {
        Rational a = lo + width * i;
        int sa = sgn(eval_rational(f, a));
        if (sa != 0 && sb != 0 && sa != sb) return create(minpoly, a, b, std::move(name));
        if (sa != 0) {
            b = a;
            sb = sa;
        }
    }
    throw NumericError("no simple real root found in the requested range");
}

std::shared_ptr<const NumberField> NumberField::golden()
{
    static const auto field = create({1, -1, -1}, Rational(1), Rational(2), "golden");
    return field;
}

std::shared_ptr<const NumberField> NumberField::plastic()
{
    static const auto field = create({1, 0, -1, -1}, Rational(1), Rational(2), "plastic");
    return field;
}

std::vector<long long> NumberField::minpoly_leading_first() const { return integer_minpoly_; }

std::pair<Rational, Rational> NumberField::refined_interval(unsigned bits) const
{
    Rational a = fine_lo_, b = fine_hi_;
    Rational eps(1);
    eps /= mpz_class(1) << bits;
    int sa = sgn(eval_rational(minpoly_, a));
    while (b - a > eps) {
        Rational m = (a + b) / 2;
        int sm = sgn(eval_rational(minpoly_, m));
        if (sm == 0) return {m, m};
        (sm == sa ? a : b) = m;
    }
    return {a, b};
}

RationalPoly NumberField::reduce(RationalPoly p) const
{
    trim(p);
    if (static_cast<int>(p.size()) <= degree()) return p;
    return divmod(std::move(p), minpoly_).second;
}

RationalPoly NumberField::multiply(const RationalPoly& a, const RationalPoly& b) const
{
    return reduce(poly_mul(a, b));
}

RationalPoly NumberField::inverse(const RationalPoly& a) const
{
    // Extended Euclid: s*a + t*m = g, g a nonzero constant since m is irreducible.
    RationalPoly r0 = minpoly_, r1 = a;
    trim(r1);
    if (r1.empty()) throw NumericError("division by zero");
    RationalPoly s0{}, s1{Rational(1)};
    while (r1.size() > 1) {
        auto [q, r] = divmod(r0, r1);
        RationalPoly s = poly_sub(s0, poly_mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r1.empty()) throw NumericError("element not invertible (minimal polynomial is reducible)");
    Rational g = r1[0];
    for (auto& c : s1) c /= g;
    return reduce(s1);
}

double NumberField::evaluate(const RationalPoly& a) const
{
    long double acc = 0, mag = 0;
    const long double r = std::fabs(root_double_);
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        long double c = static_cast<long double>(it->get_d());
        acc = acc * root_double_ + c;
        mag = mag * r + std::fabs(c);
    }
    // Little cancellation: the long double result is already correctly rounded to double.
    if (std::fabs(acc) * 8 >= mag || a.size() < 2) return static_cast<double>(acc);
    // Heavy cancellation: evaluate on rational enclosures of the root until the
    // enclosure of the value is narrow relative to its size.
    auto [lo, hi] = eval_interval(a, fine_lo_, fine_hi_);
    for (unsigned bits = 320; sgn(lo) != sgn(hi) || Rational(hi - lo) * (mpz_class(1) << 64) > abs(lo); bits *= 2) {
        if (lo == 0 && hi == 0) return 0.0;
        auto [ia, ib] = refined_interval(bits);
        std::tie(lo, hi) = eval_interval(a, ia, ib);
    }
    return Rational((lo + hi) / 2).get_d();
}

int NumberField::sign(const RationalPoly& a) const
{
    if (a.empty()) return 0;
    if (a.size() == 1) return sgn(a[0]);
    // Fast path: long double evaluation with a generous error bound.
    long double acc = 0, mag = 0;
    long double r = std::fabs(root_double_);
    for (auto it = a.rbegin(); it != a.rend(); ++it) {
        long double c = static_cast<long double>(it->get_d());
        acc = acc * root_double_ + c;
        mag = mag * r + std::fabs(c);
    }
    long double bound = mag * 1e-15L + 1e-300L;
    if (std::isfinite(static_cast<double>(acc)) && std::isfinite(static_cast<double>(mag)) && std::fabs(acc) > bound)
        return acc > 0 ? 1 : -1;
    // Exact path: the value is nonzero (a is reduced and nonzero), so refining terminates.
    auto [lo, hi] = eval_interval(a, fine_lo_, fine_hi_);
    if (lo > 0) return 1;
    if (hi < 0) return -1;
    for (unsigned bits = 320;; bits *= 2) {
        auto [ia, ib] = refined_interval(bits);
        std::tie(lo, hi) = eval_interval(a, ia, ib);
        if (lo > 0) return 1;
        if (hi < 0) return -1;
    }
}

bool NumberField::same_field(const NumberField& other) const
{
    if (this == &other) return true;
    if (integer_minpoly_ != other.integer_minpoly_) return false;
    return !(fine_hi_ < other.fine_lo_ || other.fine_hi_ < fine_lo_);
}

// ---------------------------------------------------------------- scalars

Scalar::Scalar(long num, long den)
{
    if (den == 0) throw NumericError("division by zero");
    Rational q(num, den);
    q.canonicalize();
    v_ = q;
}

Scalar Scalar::from_float(double value, double eps) { return Scalar(Value(Float{value, eps})); }

Scalar Scalar::generator(const FieldPtr& field)
{
    if (field->degree() == 1) return Scalar(Rational(-field->minpoly()[0]));
    return from_coeffs(field, RationalPoly{Rational(0), Rational(1)});
}

Scalar Scalar::from_coeffs(const FieldPtr& field, RationalPoly coeffs)
{
    coeffs = field->reduce(std::move(coeffs));
    if (coeffs.size() <= 1) return Scalar(coeffs.empty() ? Rational(0) : coeffs[0]);
    return Scalar(Value(FieldElement{field, std::move(coeffs)}));
}

FieldPtr Scalar::field() const
{
    if (auto* fe = std::get_if<FieldElement>(&v_)) return fe->field;
    return nullptr;
}

double Scalar::to_double() const
{
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Rational>) return v.get_d();
            else if constexpr (std::is_same_v<T, FieldElement>) return v.field->evaluate(v.coeffs);
            else return v.value;
        },
        v_);
}

std::string Scalar::to_string() const
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Rational>) return v.get_str();
            else if constexpr (std::is_same_v<T, FieldElement>) return format_polynomial(v.coeffs, 'b');
            else return shortest_double(v.value);
        },
        v_);
}

std::string Scalar::key() const
{
    if (is_float()) return shortest_double(float_value().value);
    return to_string();
}

bool Scalar::is_zero() const
{
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Rational>) return v == 0;
            else if constexpr (std::is_same_v<T, FieldElement>) return v.coeffs.empty();
            else return std::fabs(v.value) <= v.eps;
        },
        v_);
}

int Scalar::sign() const
{
    return std::visit(
        [](const auto& v) -> int {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Rational>) return sgn(v);
            else if constexpr (std::is_same_v<T, FieldElement>) return v.field->sign(v.coeffs);
            else return std::fabs(v.value) <= v.eps ? 0 : (v.value > 0 ? 1 : -1);
        },
        v_);
}

Scalar Scalar::operator-() const { return Scalar(0) - *this; }

namespace {

enum class Kind { rational, field, floating };

Kind kind_of(const Scalar& s)
{
    if (s.is_rational()) return Kind::rational;
    if (s.is_field()) return Kind::field;
    return Kind::floating;
}

RationalPoly coeffs_of(const Scalar& s)
{
    if (s.is_rational()) {
        if (s.rational() == 0) return {};
        return {s.rational()};
    }
    return s.field_element().coeffs;
}

FieldPtr common_field(const Scalar& a, const Scalar& b)
{
    FieldPtr fa = a.field(), fb = b.field();
    if (fa && fb && !fa->same_field(*fb)) throw NumericError("arithmetic across distinct number fields");
    return fa ? fa : fb;
}

double eps_of(const Scalar& s) { return s.is_float() ? s.float_value().eps : 0.0; }

} // namespace

Scalar scalar_arith(const Scalar& a, const Scalar& b, ArithOp op)
{
    Kind ka = kind_of(a), kb = kind_of(b);
    if ((ka == Kind::field && kb == Kind::floating) || (ka == Kind::floating && kb == Kind::field))
        throw NumericError("arithmetic mixes field elements and floats");

    if (ka == Kind::floating || kb == Kind::floating) {
        double x = a.to_double(), y = b.to_double();
        double eps = std::max(eps_of(a), eps_of(b));
        switch (op) {
        case ArithOp::add: return Scalar::from_float(x + y, eps);
        case ArithOp::sub: return Scalar::from_float(x - y, eps);
        case ArithOp::mul: return Scalar::from_float(x * y, eps);
        case ArithOp::div:
            if (y == 0) throw NumericError("division by zero");
            return Scalar::from_float(x / y, eps);
        }
    }
    if (ka == Kind::rational && kb == Kind::rational) {
        const Rational& x = a.rational();
        const Rational& y = b.rational();
        switch (op) {
        case ArithOp::add: return Scalar(Rational(x + y));
        case ArithOp::sub: return Scalar(Rational(x - y));
        case ArithOp::mul: return Scalar(Rational(x * y));
        case ArithOp::div:
            if (y == 0) throw NumericError("division by zero");
            return Scalar(Rational(x / y));
        }
    }
    FieldPtr field = common_field(a, b);
    RationalPoly x = coeffs_of(a), y = coeffs_of(b);
    switch (op) {
    case ArithOp::add:
    case ArithOp::sub: {
        RationalPoly out(std::max(x.size(), y.size()));
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
        for (std::size_t i = 0; i < y.size(); ++i) out[i] += op == ArithOp::add ? y[i] : Rational(-y[i]);
        return Scalar::from_coeffs(field, std::move(out));
    }
    case ArithOp::mul: return Scalar::from_coeffs(field, field->multiply(x, y));
    case ArithOp::div:
        if (y.empty()) throw NumericError("division by zero");
        return Scalar::from_coeffs(field, field->multiply(x, field->inverse(y)));
    }
    throw NumericError("unknown arithmetic operation");
}

Scalar operator+(const Scalar& a, const Scalar& b) { return scalar_arith(a, b, ArithOp::add); }
Scalar operator-(const Scalar& a, const Scalar& b) { return scalar_arith(a, b, ArithOp::sub); }
Scalar operator*(const Scalar& a, const Scalar& b) { return scalar_arith(a, b, ArithOp::mul); }
Scalar operator/(const Scalar& a, const Scalar& b) { return scalar_arith(a, b, ArithOp::div); }

Ordering compare(const Scalar& a, const Scalar& b)
{
    Kind ka = kind_of(a), kb = kind_of(b);
    if (ka == Kind::floating || kb == Kind::floating) {
        if (ka == Kind::field || kb == Kind::field) throw NumericError("comparison mixes field elements and floats");
        double x = a.to_double(), y = b.to_double();
        double eps = std::max(eps_of(a), eps_of(b));
        if (std::fabs(x - y) <= eps) return Ordering::equal;
        return x < y ? Ordering::less : Ordering::greater;
    }
    if (ka == Kind::rational && kb == Kind::rational) {
        int c = cmp(a.rational(), b.rational());
        return c < 0 ? Ordering::less : (c > 0 ? Ordering::greater : Ordering::equal);
    }
    int s = (a - b).sign();
    return s < 0 ? Ordering::less : (s > 0 ? Ordering::greater : Ordering::equal);
}

Scalar abs(const Scalar& x) { return x.sign() < 0 ? -x : x; }
Scalar min(const Scalar& a, const Scalar& b) { return b < a ? b : a; }
Scalar max(const Scalar& a, const Scalar& b) { return a < b ? b : a; }

Scalar NumericMode::lift(const Rational& q) const
{
    if (kind == Kind::floating) return Scalar::from_float(q.get_d(), eps);
    return Scalar(q);
}

} // namespace hofbauer
