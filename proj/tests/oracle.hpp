#pragma once

// Reference arithmetic that shares no code with the library: elements of
// Q[x]/(f) for a fixed monic f, with the root located by Newton's method in
// high-precision floating point.

#include "hofbauer/numerics.hpp"

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

template <std::size_t D>
struct Field {
    std::array<mpq_class, D> reduce_rule; // x^D = sum reduce_rule[i] x^i
    mpf_class root;
};

inline mpf_class newton_root(const std::vector<mpq_class>& f_constant_first, double start)
{
    mpf_class x(start, 512);
    for (int it = 0; it < 200; ++it) {
        mpf_class val(0, 512), der(0, 512);
        for (std::size_t i = f_constant_first.size(); i-- > 0;) {
            der = der * x + val;
            val = val * x + mpf_class(f_constant_first[i], 512);
        }
        x -= val / der;
    }
    return x;
}

inline const Field<2>& golden()
{
    // x^2 = x + 1
    static const Field<2> f{{mpq_class(1), mpq_class(1)}, newton_root({-1, -1, 1}, 1.6)};
    return f;
}

inline const Field<3>& plastic()
{
    // x^3 = x + 1
    static const Field<3> f{{mpq_class(1), mpq_class(1), mpq_class(0)}, newton_root({-1, -1, 0, 1}, 1.3)};
    return f;
}

template <std::size_t D>
struct Num {
    const Field<D>* field = nullptr;
    std::array<mpq_class, D> c{};

    static Num constant(const Field<D>& f, mpq_class q)
    {
        Num n{&f, {}};
        q.canonicalize();
        n.c[0] = q;
        return n;
    }
    static Num gen(const Field<D>& f)
    {
        Num n{&f, {}};
        n.c[1] = 1;
        return n;
    }

    Num operator+(const Num& o) const
    {
        Num r{field, {}};
        for (std::size_t i = 0; i < D; ++i) r.c[i] = c[i] + o.c[i];
        return r;
    }
    Num operator-(const Num& o) const
    {
        Num r{field, {}};
        for (std::size_t i = 0; i < D; ++i) r.c[i] = c[i] - o.c[i];
        return r;
    }
    Num operator*(const Num& o) const
    {
        std::vector<mpq_class> prod(2 * D - 1, mpq_class(0));
        for (std::size_t i = 0; i < D; ++i)
            for (std::size_t j = 0; j < D; ++j) prod[i + j] += c[i] * o.c[j];
        // Fold high powers down with x^D = rule.
        for (std::size_t k = prod.size(); k-- > D;) {
            mpq_class top = prod[k];
            prod[k] = 0;
            for (std::size_t i = 0; i < D; ++i) prod[k - D + i] += top * field->reduce_rule[i];
        }
        Num r{field, {}};
        for (std::size_t i = 0; i < D; ++i) r.c[i] = prod[i];
        return r;
    }
    /// Inverse by solving the D x D linear system (multiplication matrix) with Gauss-Jordan over Q.
    Num inverse() const
    {
        std::vector<std::vector<mpq_class>> m(D, std::vector<mpq_class>(D + 1, mpq_class(0)));
        for (std::size_t j = 0; j < D; ++j) {
            Num e{field, {}};
            e.c[j] = 1;
            Num col = *this * e;
            for (std::size_t i = 0; i < D; ++i) m[i][j] = col.c[i];
        }
        m[0][D] = 1;
        for (std::size_t col = 0; col < D; ++col) {
            std::size_t p = col;
            while (m[p][col] == 0) ++p;
            std::swap(m[p], m[col]);
            for (std::size_t r = 0; r < D; ++r) {
                if (r == col || m[r][col] == 0) continue;
                mpq_class f = m[r][col] / m[col][col];
                for (std::size_t k = col; k <= D; ++k) m[r][k] -= f * m[col][k];
            }
        }
        Num r{field, {}};
        for (std::size_t i = 0; i < D; ++i) r.c[i] = m[i][D] / m[i][i];
        return r;
    }
    Num operator/(const Num& o) const { return *this * o.inverse(); }

    mpf_class value() const
    {
        mpf_class v(0, 512), p(1, 512);
        for (std::size_t i = 0; i < D; ++i) {
            v += mpf_class(c[i], 512) * p;
            p *= field->root;
        }
        return v;
    }
    double to_double() const { return value().get_d(); }
    bool operator==(const Num& o) const { return c == o.c; }
    /// Exact for distinct elements whose difference exceeds 2^-400 in size.
    bool operator<(const Num& o) const { return !(*this == o) && cmp((*this - o).value(), 0) < 0; }
    bool operator<=(const Num& o) const { return *this == o || *this < o; }
};

using G = Num<2>;
using P = Num<3>;

/// Converts a library field element into the oracle representation via its coefficients.
template <std::size_t D>
Num<D> from_library(const Field<D>& f, const hofbauer::Scalar& s)
{
    Num<D> n{&f, {}};
    if (s.is_rational()) {
        n.c[0] = s.rational();
        return n;
    }
    const auto& coeffs = s.field_element().coeffs;
    for (std::size_t i = 0; i < coeffs.size() && i < D; ++i) n.c[i] = coeffs[i];
    return n;
}

inline mpq_class random_rational(std::mt19937_64& rng, long range = 50, long den = 60)
{
    std::uniform_int_distribution<long> num(-range, range), d(1, den);
    mpq_class q(num(rng), d(rng));
    q.canonicalize();
    return q;
}

/// Fibonacci numbers with f1 = f2 = 1.
inline mpz_class fibonacci(unsigned n)
{
    mpz_class a = 0, b = 1;
    for (unsigned i = 0; i < n; ++i) {
        mpz_class t = a + b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace oracle
