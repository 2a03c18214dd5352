#include <doctest.h>

#include <vector>

#include "padyn/padic.hpp"

using namespace padyn;

namespace {

PadicApprox P(Prime p, unsigned k, long v) { return PadicApprox::from_residue(p, k, BigInt(v)); }

// Pascal's triangle, built row by row with no division.
std::vector<std::vector<BigInt>> pascal(unsigned rows) {
    std::vector<std::vector<BigInt>> t(rows);
    for (unsigned r = 0; r < rows; ++r) {
        t[r].assign(r + 1, 1);
        for (unsigned c = 1; c < r; ++c) t[r][c] = t[r - 1][c - 1] + t[r - 1][c];
    }
    return t;
}

}  // namespace

TEST_CASE("primes") {
    CHECK(is_prime(2));
    CHECK(is_prime(97));
    CHECK_FALSE(is_prime(1));
    CHECK_FALSE(is_prime(91));
    CHECK_THROWS_AS(require_prime(4), ConfigError);
    CHECK_THROWS_WITH(require_prime(4), "p must be prime (got 4)");
    CHECK_THROWS_AS(P(6, 3, 1), ConfigError);
}

TEST_CASE("from_digits") {
    std::vector<unsigned> a{1, 0, 1, 1};
    auto x = PadicApprox::from_digits(a, 2);
    CHECK(x.residue() == 13);
    CHECK(x.precision() == 4);

    std::vector<unsigned> zero{0};
    CHECK(PadicApprox::from_digits(zero, 3).residue() == 0);
    CHECK(PadicApprox::from_digits(zero, 3).precision() == 1);

    std::vector<unsigned> b{2, 1};
    CHECK(PadicApprox::from_digits(b, 3).residue() == 5);

    std::vector<unsigned> bad{0, 2};
    CHECK_THROWS_AS(PadicApprox::from_digits(bad, 2), ConfigError);
    std::vector<unsigned> empty;
    CHECK_THROWS_AS(PadicApprox::from_digits(empty, 2), ConfigError);
    CHECK_THROWS_AS(PadicApprox::from_digits(a, 9), ConfigError);
}

TEST_CASE("digit") {
    CHECK(digit(P(2, 4, 6), 1) == 1);
    CHECK(digit(P(2, 4, 6), 0) == 0);
    CHECK(digit(P(3, 2, 5), 1) == 1);
    CHECK_THROWS_AS(digit(P(2, 4, 6), 4), PrecisionError);
}

TEST_CASE("reduce") {
    CHECK(reduce(P(2, 4, 11), 2).residue() == 3);
    CHECK(reduce(P(2, 4, 11), 2).precision() == 2);
    CHECK(reduce(P(3, 2, 5), 2).residue() == 5);
    CHECK(reduce(P(3, 3, 9), 2).residue() == 0);
    CHECK_THROWS_AS(reduce(P(3, 3, 9), 4), PrecisionError);
}

TEST_CASE("arith") {
    CHECK((P(2, 3, 3) + P(2, 3, 5)).residue() == 0);
    CHECK((P(2, 3, 1) - P(2, 3, 2)).residue() == 7);
    CHECK((P(2, 3, 2) * P(2, 3, 3)).residue() == 6);
    auto mixed = P(2, 5, 31) + P(2, 3, 1);
    CHECK(mixed.precision() == 3);
    CHECK(mixed.residue() == 0);
    CHECK_THROWS_AS(P(2, 3, 1) + P(3, 3, 1), ConfigError);
}

TEST_CASE("valuation") {
    CHECK(valuation(P(2, 6, 12)) == Valuation::exact(2));
    CHECK(valuation(P(2, 6, 0)) == Valuation::at_least(6));
    CHECK(valuation(P(3, 4, 5)) == Valuation::exact(0));
    CHECK(Valuation::at_least(6).str() == ">=6");
    CHECK(Valuation::exact(2).str() == "2");

    using C = Valuation::Certainty;
    CHECK(Valuation::exact(2).certifies(2) == C::Yes);
    CHECK(Valuation::exact(2).certifies(3) == C::No);
    CHECK(Valuation::at_least(6).certifies(6) == C::Yes);
    CHECK(Valuation::at_least(6).certifies(7) == C::Unknown);
}

TEST_CASE("distance") {
    auto d = distance(P(2, 4, 3), P(2, 4, 11));
    CHECK_FALSE(d.zero_at_precision);
    CHECK(d.exponent == 3);
    CHECK(d.str() == "1/8");
    auto z = distance(P(2, 4, 7), P(2, 4, 7));
    CHECK(z.zero_at_precision);
    CHECK(z.str() == "<=2^-4");
    CHECK(distance(P(3, 2, 1), P(3, 2, 2)).str() == "1");
    CHECK(z < d);
    CHECK_THROWS_AS(distance(P(2, 4, 3), P(3, 4, 3)), ConfigError);
}

TEST_CASE("sigma_shift") {
    auto s = sigma_shift(P(2, 4, 11), 1);
    CHECK(s.residue() == 5);
    CHECK(s.precision() == 3);
    CHECK(sigma_shift(P(2, 4, 11), 0) == P(2, 4, 11));
    auto t = sigma_shift(P(3, 2, 5), 1);
    CHECK(t.residue() == 1);
    CHECK(t.precision() == 1);
    CHECK_THROWS_AS(sigma_shift(P(3, 2, 5), 2), PrecisionError);
}

TEST_CASE("is_unit") {
    CHECK(is_unit(P(2, 4, 3)));
    CHECK_FALSE(is_unit(P(2, 4, 6)));
    CHECK_FALSE(is_unit(P(5, 2, 5)));
}

TEST_CASE("binomial") {
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(4, 0) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(0, 0) == 1);
    for (unsigned m = 0; m < 12; ++m) CHECK(binomial(-1, m) == ((m % 2) ? -1 : 1));

    const auto t = pascal(40);
    for (unsigned r = 0; r < 40; ++r) {
        for (unsigned c = 0; c <= r; ++c) CHECK(binomial(r, c) == t[r][c]);
        CHECK(binomial(r, r + 1) == 0);
    }
}

TEST_CASE("helpers") {
    CHECK(power(3, 4) == 81);
    CHECK(digit_count(0, 2) == 0);
    CHECK(digit_count(8, 2) == 4);
    CHECK(digit_count(8, 3) == 2);
    CHECK(factorial_valuation(4, 2) == 3);
    CHECK(factorial_valuation(10, 3) == 4);
    CHECK(mod_pow(-1, 2, 3) == 7);
    CHECK(balanced(7, 8) == -1);
    CHECK(balanced(4, 8) == 4);
}

TEST_CASE("ultrametric inequality, exhaustive") {
    for (Prime p : {2u, 3u}) {
        const unsigned K = p == 2 ? 5 : 3;
        const long n = power(p, K).get_si();
        for (long a = 0; a < n; ++a) {
            for (long b = 0; b < n; ++b) {
                for (long c = 0; c < n; ++c) {
                    auto x = P(p, K, a), y = P(p, K, b), z = P(p, K, c);
                    CHECK(distance(x, z) <= std::max(distance(x, y), distance(y, z)));
                }
            }
        }
    }
}

TEST_CASE("digit round-trip, valuation multiplicativity and reduction coherence") {
    for (Prime p : {2u, 3u, 5u}) {
        const unsigned K = p == 2 ? 7 : 4;
        const long n = power(p, K).get_si();
        for (long a = 0; a < n; ++a) {
            auto x = P(p, K, a);
            auto ds = x.digits();
            CHECK(PadicApprox::from_digits(ds, p) == x);
            for (unsigned k = 0; k <= K; ++k) {
                for (unsigned j = 1; j <= k; ++j) CHECK(reduce(reduce(x, k), j) == reduce(x, j));
            }
            // x = d0 + p * sigma(x) at precision K-1
            if (K > 1) {
                auto lhs = P(p, K - 1, digit(x, 0)) + P(p, K - 1, p) * sigma_shift(x, 1);
                CHECK(lhs == reduce(x, K - 1));
            }
            for (long b = 1; b < n; b += 3) {
                auto y = P(p, K, b);
                auto vx = valuation(x), vy = valuation(y);
                if (vx.is_exact() && vy.is_exact() && vx.value() + vy.value() < K) {
                    CHECK(valuation(x * y) == Valuation::exact(vx.value() + vy.value()));
                }
            }
        }
    }
}

TEST_CASE("sigma^n expands distances by at most p^n") {
    for (Prime p : {2u, 3u}) {
        const unsigned K = p == 2 ? 8 : 5;
        const long size = power(p, K).get_si();
        for (unsigned n = 1; n < K; ++n) {
            for (long a = 0; a < size; ++a) {
                for (long b = 0; b < size; ++b) {
                    if (a == b) continue;
                    auto x = P(p, K, a), y = P(p, K, b);
                    const unsigned v = valuation(x - y).value();
                    const auto vs = valuation(sigma_shift(x, n) - sigma_shift(y, n));
                    CHECK(vs.value() + n >= v);
                }
            }
        }
    }
}

TEST_CASE("sigma_shift matches brute-force floor division") {
    for (long a = 0; a < 4096; ++a) {
        for (unsigned n = 0; n < 12; ++n) {
            long q = a;
            for (unsigned i = 0; i < n; ++i) q /= 2;
            CHECK(sigma_shift(P(2, 12, a), n).residue() == q);
        }
    }
}
