#include "padyn/mahler.hpp"

#include <algorithm>

namespace padyn {

MahlerCoeffs MahlerCoeffs::from_integers(Prime p, unsigned precision, const std::vector<BigInt>& values,
                                         std::optional<std::uint64_t> degree_bound) {
    require_prime(p);
    if (values.empty()) throw ConfigError("coefficient list must not be empty");
    MahlerCoeffs c;
    c.p = p;
    c.precision = precision;
    c.degree_bound = degree_bound;
    const BigInt modulus = power(p, precision);
    for (const BigInt& v : values) {
        c.coeffs.push_back(mod_value(v, modulus));
        c.valuations.push_back(valuation_of(c.coeffs.back(), p, precision));
    }
    return c;
}

MahlerCoeffs mahler_coeffs(const MapExpr& e, Prime p, std::size_t max_index, unsigned precision) {
    require_prime(p);
    if (precision < 1) throw ConfigError("precision K must be at least 1");
    const unsigned ell = lookahead_bound(e, p);
    const unsigned k_in = precision + ell + digit_count(BigInt(static_cast<unsigned long>(max_index)), p);
    const BigInt modulus = power(p, precision);

    std::vector<BigInt> diff;
    diff.reserve(max_index + 1);
    for (std::size_t i = 0; i <= max_index; ++i) {
        diff.push_back(mod_value(eval_integer(e, p, BigInt(static_cast<unsigned long>(i)), k_in), modulus));
    }
    // In place: after pass j, diff[i] = Δ^j f(i - j) for i >= j.
    for (std::size_t j = 1; j <= max_index; ++j) {
        for (std::size_t i = max_index; i >= j; --i) {
            diff[i] = mod_value(diff[i] - diff[i - 1], modulus);
        }
    }
    return MahlerCoeffs::from_integers(p, precision, diff, e.degree_bound());
}

BigInt eval_mahler(const MahlerCoeffs& c, std::size_t i) {
    if (i > c.max_index()) {
        throw ConfigError("point " + std::to_string(i) + " beyond coefficient bound " +
                          std::to_string(c.max_index()));
    }
    BigInt sum = 0;
    const BigInt x(static_cast<unsigned long>(i));
    for (std::size_t m = 0; m <= i; ++m) sum += c.coeffs[m] * binomial(x, m);
    return mod_pow(sum, c.p, c.precision);
}

unsigned floor_log(std::uint64_t m, const BigInt& base) {
    if (m == 0) throw ConfigError("floor_log of zero");
    unsigned e = 0;
    BigInt acc = base;
    const BigInt target(static_cast<unsigned long>(m));
    while (acc <= target) {
        acc *= base;
        ++e;
    }
    return e;
}

std::string Verdict::kind_name(Kind k) {
    switch (k) {
        case Kind::SatisfiedUpTo: return "SatisfiedUpTo";
        case Kind::ViolatedAt: return "ViolatedAt";
        case Kind::UndecidableAt: return "UndecidableAt";
    }
    return "";
}

std::string Verdict::summary() const {
    std::string s = kind_name(kind) + "(" + std::to_string(index) + ")";
    if (satisfied()) {
        if (total) s += " (total: finitely many nonzero coefficients)";
    } else {
        s += ": " + condition;
        if (observed) s += " [observed valuation " + observed->str() + ", required " + std::to_string(required) + "]";
    }
    if (!note.empty()) s += "; " + note;
    return s;
}

namespace {

/// Accumulates clauses in check order and settles the verdict: the first
/// violation wins, otherwise the first undecidable clause, otherwise satisfied.
class ClauseLog {
public:
    ClauseLog(const MahlerCoeffs& c, std::string name) : c_(c) { v_.name = std::move(name); }

    const MahlerCoeffs& coeffs() const { return c_; }

    /// ord_p(value) >= required, with `value` known mod p^K.
    void require_valuation(std::size_t m, const BigInt& value, unsigned required, const std::string& text) {
        const Valuation obs = valuation_of(value, c_.p, c_.precision);
        record(m, obs.certifies(required), obs, required, text);
    }

    /// a_m != 0 (mod p).
    void require_unit(std::size_t m, const BigInt& value, const std::string& text) {
        const Valuation obs = valuation_of(value, c_.p, c_.precision);
        const auto ok = obs.is_exact() && obs.value() == 0 ? Valuation::Certainty::Yes : Valuation::Certainty::No;
        record(m, ok, obs, 0, text);
    }

    Verdict finish() {
        if (first_bad_) {
            apply(*first_bad_, Verdict::Kind::ViolatedAt);
        } else if (first_unknown_) {
            apply(*first_unknown_, Verdict::Kind::UndecidableAt);
        } else {
            v_.kind = Verdict::Kind::SatisfiedUpTo;
            v_.index = c_.max_index();
            v_.total = c_.degree_bound && *c_.degree_bound <= c_.max_index();
        }
        return v_;
    }

    Verdict& verdict() { return v_; }

private:
    struct Failure {
        std::size_t m;
        Valuation observed;
        unsigned required;
        std::string text;
    };

    void record(std::size_t m, Valuation::Certainty ok, const Valuation& obs, unsigned required,
                const std::string& text) {
        if (ok == Valuation::Certainty::Yes) return;
        Failure f{m, obs, required, text};
        const char* tag = ok == Valuation::Certainty::No ? "violated" : "undecidable";
        v_.failures.push_back(std::string(tag) + " at m=" + std::to_string(m) + ": " + text);
        if (ok == Valuation::Certainty::No && !first_bad_) first_bad_ = f;
        if (ok == Valuation::Certainty::Unknown && !first_unknown_) first_unknown_ = f;
    }

    void apply(const Failure& f, Verdict::Kind kind) {
        v_.kind = kind;
        v_.index = f.m;
        v_.condition = f.text;
        v_.observed = f.observed;
        v_.required = f.required;
    }

    const MahlerCoeffs& c_;
    Verdict v_;
    std::optional<Failure> first_bad_;
    std::optional<Failure> first_unknown_;
};

std::string pow_text(Prime p, unsigned e) { return std::to_string(p) + "^" + std::to_string(e); }

std::string coeff(std::size_t m) { return "a_" + std::to_string(m); }

/// p^n as a machine integer, or nullopt when it exceeds every index we hold.
std::optional<std::size_t> pivot_index(Prime p, unsigned n, std::size_t limit) {
    const BigInt pn = power(p, n);
    if (pn > BigInt(static_cast<unsigned long>(limit))) return std::nullopt;
    return static_cast<std::size_t>(pn.get_ui());
}

}  // namespace

Verdict check_bernoulli_properties(const MahlerCoeffs& c, unsigned n) {
    if (n < 1) throw ConfigError("shift level n must be at least 1");
    ClauseLog log(c, "bernoulli");
    const BigInt pn = power(c.p, n);
    const BigInt one_less = pn - 1;
    const unsigned K = c.precision;
    for (std::size_t m = 0; m <= c.max_index(); ++m) {
        const BigInt big_m(static_cast<unsigned long>(m));
        if (big_m < pn) {
            log.require_valuation(m, c.coeffs[m], K, coeff(m) + " = 0 for m < p^n");
        } else if (big_m == pn) {
            log.require_valuation(m, c.coeffs[m] - 1, K, coeff(m) + " = 1 for m = p^n");
        }
        if (m >= 2) {
            // Largest j with j p^n - j + 1 < m.
            BigInt j;
            mpz_fdiv_q(j.get_mpz_t(), BigInt(big_m - 2).get_mpz_t(), one_less.get_mpz_t());
            const unsigned required = static_cast<unsigned>(std::min<unsigned long>(j.get_ui(), K + 1UL));
            if (required > 0) {
                log.require_valuation(m, c.coeffs[m], required,
                                      pow_text(c.p, required) + " | " + coeff(m) + " (m > j p^n - j + 1)");
            }
        }
    }
    return log.finish();
}

Verdict check_lipschitz_mp(const MahlerCoeffs& c) {
    ClauseLog log(c, "lipschitz_mp");
    const BigInt p(c.p);
    if (c.max_index() >= 1) log.require_unit(1, c.coeffs[1], "a_1 != 0 (mod p)");
    for (std::size_t m = 2; m <= c.max_index(); ++m) {
        const unsigned r = floor_log(m, p) + 1;
        log.require_valuation(m, c.coeffs[m], r, coeff(m) + " = 0 (mod " + pow_text(c.p, r) + ")");
    }
    Verdict v = log.finish();
    v.sufficient_only = true;
    return v;
}

Verdict check_lipschitz_ergodic(const MahlerCoeffs& c, bool strict_m1) {
    ClauseLog log(c, "lipschitz_ergodic");
    const BigInt p(c.p);
    log.require_unit(0, c.coeffs[0], "a_0 != 0 (mod p)");
    if (c.max_index() >= 1) {
        if (c.p == 2) log.require_valuation(1, c.coeffs[1] - 1, 2, "a_1 = 1 (mod 4)");
        else log.require_valuation(1, c.coeffs[1] - 1, 1, "a_1 = 1 (mod p)");
    }
    for (std::size_t m = strict_m1 ? 1 : 2; m <= c.max_index(); ++m) {
        const unsigned r = floor_log(m + 1, p) + 1;
        log.require_valuation(m, c.coeffs[m], r, coeff(m) + " = 0 (mod " + pow_text(c.p, r) + ")");
    }
    Verdict v = log.finish();
    if (c.p == 2) {
        v.definitive = true;
        v.note = "in the case p=2 these conditions are necessary";
    } else {
        v.sufficient_only = true;
        v.note = "sufficient condition only";
    }
    if (strict_m1) v.note += "; strict mode: tail clause applied from m=1";
    return v;
}

Verdict check_complex_shift_bound(const MahlerCoeffs& c, unsigned n) {
    if (n < 1) throw ConfigError("shift level n must be at least 1");
    ClauseLog log(c, "cs");
    const BigInt base = power(c.p, n);
    for (std::size_t m = 1; m <= c.max_index(); ++m) {
        const unsigned fl = floor_log(m, base);
        const unsigned r = fl > 0 ? fl - 1 : 0;
        if (r == 0) continue;
        log.require_valuation(m, c.coeffs[m], r,
                              "|" + coeff(m) + "|_p <= p^(1 - " + std::to_string(fl) + ")");
    }
    Verdict v = log.finish();
    v.definitive = true;
    return v;
}

namespace {

void cs_tail(ClauseLog& log, std::size_t pivot, unsigned n) {
    const auto& c = log.coeffs();
    const BigInt base = power(c.p, n);
    for (std::size_t m = pivot + 1; m <= c.max_index(); ++m) {
        const unsigned r = floor_log(m, base);
        log.require_valuation(m, c.coeffs[m], r, coeff(m) + " = 0 (mod " + pow_text(c.p, r) + ")");
    }
}

}  // namespace

Verdict check_cs_mp(const MahlerCoeffs& c, unsigned n) {
    if (n < 1) throw ConfigError("shift level n must be at least 1");
    const auto pivot = pivot_index(c.p, n, c.max_index());
    if (!pivot) {
        Verdict v;
        v.name = "cs_mp";
        v.kind = Verdict::Kind::UndecidableAt;
        v.index = c.max_index();
        v.condition = "insufficient coefficients: need M >= p^n";
        v.sufficient_only = true;
        return v;
    }
    ClauseLog log(c, "cs_mp");
    log.require_unit(*pivot, c.coeffs[*pivot], coeff(*pivot) + " != 0 (mod p) for m = p^n");
    cs_tail(log, *pivot, n);
    Verdict v = log.finish();
    v.sufficient_only = true;
    v.note = "sufficient condition only";
    return v;
}

Verdict check_cs_ergodic(const MahlerCoeffs& c, unsigned n) {
    if (n < 1) throw ConfigError("shift level n must be at least 1");
    const auto pivot = pivot_index(c.p, n, c.max_index());
    if (!pivot) throw ConfigError("insufficient coefficients: ergodicity check needs M >= p^n");
    ClauseLog log(c, "cs_ergodic");
    log.require_valuation(*pivot, c.coeffs[*pivot] - 1, 1, coeff(*pivot) + " = 1 (mod p) for m = p^n");
    BigInt sum = 0;
    for (std::size_t m = 1; m < *pivot; ++m) sum += c.coeffs[m];
    log.require_valuation(*pivot - 1, sum, 1, "a_1 + ... + a_" + std::to_string(*pivot - 1) + " = 0 (mod p)");
    cs_tail(log, *pivot, n);
    Verdict v = log.finish();
    v.sufficient_only = true;
    v.note = "sufficient condition only";
    return v;
}

}  // namespace padyn
