#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "padyn/errors.hpp"

namespace padyn {

using BigInt = mpz_class;
using Prime = std::uint32_t;

bool is_prime(std::uint64_t n);

/// Throws ConfigError unless p is a prime.
void require_prime(std::uint64_t p);

/// p^k as an exact integer.
BigInt power(Prime p, unsigned k);

/// Number of base-p digits of n (0 for n == 0).
unsigned digit_count(const BigInt& n, Prime p);

/// ord_p(m!) by Legendre's formula.
unsigned factorial_valuation(std::uint64_t m, Prime p);

/// p-adic valuation of an integer known modulo p^K.
///
/// A zero residue only tells us ord_p >= K, so it is reported as AtLeast(K)
/// instead of an infinite sentinel.
class Valuation {
public:
    enum class Kind { Exact, AtLeast };

    static Valuation exact(unsigned v) { return {Kind::Exact, v}; }
    static Valuation at_least(unsigned k) { return {Kind::AtLeast, k}; }

    Kind kind() const noexcept { return kind_; }
    unsigned value() const noexcept { return value_; }
    bool is_exact() const noexcept { return kind_ == Kind::Exact; }

    enum class Certainty { Yes, No, Unknown };

    /// Whether ord_p >= required is certified by this valuation.
    Certainty certifies(unsigned required) const noexcept;

    std::string str() const;

    bool operator==(const Valuation&) const = default;

private:
    Valuation(Kind k, unsigned v) : kind_(k), value_(v) {}
    Kind kind_;
    unsigned value_;
};

/// Valuation of `residue` taken modulo p^precision.
Valuation valuation_of(const BigInt& residue, Prime p, unsigned precision);

/// |x|_p = p^-v, or the "at most p^-K" marker when the residue vanishes.
struct PNorm {
    Prime p = 2;
    bool zero_at_precision = false;
    unsigned exponent = 0;  // v for p^-v, or K for the zero marker

    /// Total order by magnitude; the zero marker is below every p^-v with v < K.
    std::strong_ordering operator<=>(const PNorm& o) const;
    bool operator==(const PNorm& o) const {
        return (*this <=> o) == std::strong_ordering::equal;
    }
    std::string str() const;
};

/// A p-adic integer known to `precision` base-p digits: a residue mod p^K.
class PadicApprox {
public:
    static PadicApprox from_residue(Prime p, unsigned precision, BigInt value);
    static PadicApprox from_digits(std::span<const unsigned> digits, Prime p);

    Prime prime() const noexcept { return p_; }
    unsigned precision() const noexcept { return k_; }
    const BigInt& residue() const noexcept { return r_; }

    /// δ_0 .. δ_{K-1}.
    std::vector<unsigned> digits() const;

    bool operator==(const PadicApprox&) const = default;

private:
    PadicApprox(Prime p, unsigned k, BigInt r) : p_(p), k_(k), r_(std::move(r)) {}
    Prime p_;
    unsigned k_;
    BigInt r_;
};

enum class ArithOp { Add, Sub, Mul };

unsigned digit(const PadicApprox& x, unsigned i);
PadicApprox reduce(const PadicApprox& x, unsigned k);
PadicApprox arith(ArithOp op, const PadicApprox& x, const PadicApprox& y);
Valuation valuation(const PadicApprox& x);
PNorm distance(const PadicApprox& x, const PadicApprox& y);
PadicApprox sigma_shift(const PadicApprox& x, unsigned n);
bool is_unit(const PadicApprox& x);

inline PadicApprox operator+(const PadicApprox& x, const PadicApprox& y) {
    return arith(ArithOp::Add, x, y);
}
inline PadicApprox operator-(const PadicApprox& x, const PadicApprox& y) {
    return arith(ArithOp::Sub, x, y);
}
inline PadicApprox operator*(const PadicApprox& x, const PadicApprox& y) {
    return arith(ArithOp::Mul, x, y);
}

/// C(x, m) = x(x-1)...(x-m+1) / m!, computed by exact division.
///
/// Defined for every integer x, so C(-1, m) = (-1)^m. For 0 <= x < m it is 0.
BigInt binomial(const BigInt& x, std::uint64_t m);

/// Non-negative residue of n mod p^k.
BigInt mod_pow(const BigInt& n, Prime p, unsigned k);
BigInt mod_value(const BigInt& n, const BigInt& modulus);

/// Representative of `residue` in (-m/2, m/2], for display.
BigInt balanced(const BigInt& residue, const BigInt& modulus);

}  // namespace padyn
