#include "padyn/padic.hpp"

#include <algorithm>

namespace padyn {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

void require_prime(std::uint64_t p) {
    if (!is_prime(p)) throw ConfigError("p must be prime (got " + std::to_string(p) + ")");
}

BigInt power(Prime p, unsigned k) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, k);
    return r;
}

unsigned digit_count(const BigInt& n, Prime p) {
    unsigned count = 0;
    BigInt rest = abs(n);
    while (rest != 0) {
        mpz_fdiv_q_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
        ++count;
    }
    return count;
}

unsigned factorial_valuation(std::uint64_t m, Prime p) {
    unsigned v = 0;
    while (m > 0) {
        m /= p;
        v += static_cast<unsigned>(m);
    }
    return v;
}

BigInt mod_value(const BigInt& n, const BigInt& modulus) {
    BigInt r;
    mpz_fdiv_r(r.get_mpz_t(), n.get_mpz_t(), modulus.get_mpz_t());
    return r;
}

BigInt mod_pow(const BigInt& n, Prime p, unsigned k) { return mod_value(n, power(p, k)); }

BigInt balanced(const BigInt& residue, const BigInt& modulus) {
    BigInt r = mod_value(residue, modulus);
    if (2 * r > modulus) r -= modulus;
    return r;
}

// ---------------------------------------------------------------- Valuation

Valuation::Certainty Valuation::certifies(unsigned required) const noexcept {
    if (kind_ == Kind::Exact) return value_ >= required ? Certainty::Yes : Certainty::No;
    return required <= value_ ? Certainty::Yes : Certainty::Unknown;
}

std::string Valuation::str() const {
    return is_exact() ? std::to_string(value_) : ">=" + std::to_string(value_);
}

Valuation valuation_of(const BigInt& residue, Prime p, unsigned precision) {
    BigInt r = mod_pow(residue, p, precision);
    if (r == 0) return Valuation::at_least(precision);
    unsigned v = static_cast<unsigned>(mpz_remove(r.get_mpz_t(), r.get_mpz_t(), BigInt(p).get_mpz_t()));
    return Valuation::exact(v);
}

// -------------------------------------------------------------------- PNorm

std::strong_ordering PNorm::operator<=>(const PNorm& o) const {
    // Smaller magnitude <=> larger exponent; the zero marker sits below all.
    if (zero_at_precision != o.zero_at_precision) {
        return zero_at_precision ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (zero_at_precision) return std::strong_ordering::equal;
    return o.exponent <=> exponent;
}

std::string PNorm::str() const {
    const std::string base = std::to_string(p) + "^-" + std::to_string(exponent);
    if (zero_at_precision) return "<=" + base;
    if (exponent == 0) return "1";
    return "1/" + power(p, exponent).get_str();
}

// -------------------------------------------------------------- PadicApprox

PadicApprox PadicApprox::from_residue(Prime p, unsigned precision, BigInt value) {
    require_prime(p);
    if (precision < 1) throw PrecisionError("precision must be at least 1");
    return PadicApprox(p, precision, mod_pow(value, p, precision));
}

PadicApprox PadicApprox::from_digits(std::span<const unsigned> digits, Prime p) {
    require_prime(p);
    if (digits.empty()) throw ConfigError("digit sequence must not be empty");
    BigInt r = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (*it >= p) {
            throw ConfigError("digit " + std::to_string(*it) + " out of range for p = " +
                              std::to_string(p));
        }
        r = r * p + *it;
    }
    return PadicApprox(p, static_cast<unsigned>(digits.size()), std::move(r));
}

std::vector<unsigned> PadicApprox::digits() const {
    std::vector<unsigned> out;
    out.reserve(k_);
    BigInt rest = r_;
    for (unsigned i = 0; i < k_; ++i) {
        out.push_back(static_cast<unsigned>(mpz_fdiv_q_ui(rest.get_mpz_t(), rest.get_mpz_t(), p_)));
    }
    return out;
}

// --------------------------------------------------------------- operations

namespace {

void require_same_prime(const PadicApprox& x, const PadicApprox& y) {
    if (x.prime() != y.prime()) {
        throw ConfigError("mismatched primes " + std::to_string(x.prime()) + " and " +
                          std::to_string(y.prime()));
    }
}

}  // namespace

unsigned digit(const PadicApprox& x, unsigned i) {
    if (i >= x.precision()) {
        throw PrecisionError("digit " + std::to_string(i) + " requested at precision " +
                             std::to_string(x.precision()));
    }
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), x.residue().get_mpz_t(), power(x.prime(), i).get_mpz_t());
    return static_cast<unsigned>(mpz_fdiv_ui(q.get_mpz_t(), x.prime()));
}

PadicApprox reduce(const PadicApprox& x, unsigned k) {
    if (k > x.precision()) {
        throw PrecisionError("cannot reduce precision " + std::to_string(x.precision()) +
                             " to " + std::to_string(k));
    }
    return PadicApprox::from_residue(x.prime(), k, x.residue());
}

PadicApprox arith(ArithOp op, const PadicApprox& x, const PadicApprox& y) {
    require_same_prime(x, y);
    const unsigned k = std::min(x.precision(), y.precision());
    BigInt r;
    switch (op) {
        case ArithOp::Add: r = x.residue() + y.residue(); break;
        case ArithOp::Sub: r = x.residue() - y.residue(); break;
        case ArithOp::Mul: r = x.residue() * y.residue(); break;
    }
    return PadicApprox::from_residue(x.prime(), k, std::move(r));
}

Valuation valuation(const PadicApprox& x) {
    return valuation_of(x.residue(), x.prime(), x.precision());
}

PNorm distance(const PadicApprox& x, const PadicApprox& y) {
    const Valuation v = valuation(x - y);
    return PNorm{x.prime(), !v.is_exact(), v.value()};
}

PadicApprox sigma_shift(const PadicApprox& x, unsigned n) {
    if (n >= x.precision()) {
        throw PrecisionError("shift by " + std::to_string(n) + " exhausts precision " +
                             std::to_string(x.precision()));
    }
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), x.residue().get_mpz_t(), power(x.prime(), n).get_mpz_t());
    return PadicApprox::from_residue(x.prime(), x.precision() - n, std::move(q));
}

bool is_unit(const PadicApprox& x) { return digit(x, 0) != 0; }

BigInt binomial(const BigInt& x, std::uint64_t m) {
    if (m == 0) return 1;
    if (x >= 0 && x < m) return 0;
    BigInt num = 1;
    for (std::uint64_t i = 0; i < m; ++i) num *= x - i;
    BigInt den;
    mpz_fac_ui(den.get_mpz_t(), m);
    BigInt r;
    mpz_divexact(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return r;
}

}  // namespace padyn
