#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "padyn/map_dsl.hpp"
#include "padyn/padic.hpp"

namespace padyn {

/// a_0 .. a_M of a map, each reduced mod p^K.
struct MahlerCoeffs {
    Prime p = 2;
    unsigned precision = 1;
    std::vector<BigInt> coeffs;
    std::vector<Valuation> valuations;
    /// Set when every a_m with m > degree_bound is known to vanish.
    std::optional<std::uint64_t> degree_bound;

    std::size_t max_index() const { return coeffs.size() - 1; }

    /// Builds from explicit integers (reduced mod p^K); used for injected faults.
    static MahlerCoeffs from_integers(Prime p, unsigned precision, const std::vector<BigInt>& values,
                                      std::optional<std::uint64_t> degree_bound = std::nullopt);
};

/// Outcome of a bounded check of a condition quantified over all m.
struct Verdict {
    enum class Kind { SatisfiedUpTo, ViolatedAt, UndecidableAt };

    std::string name;  // checker identifier, e.g. "cs_mp"
    Kind kind = Kind::SatisfiedUpTo;
    std::size_t index = 0;  // M when satisfied, else the witness m
    std::string condition;  // the clause that failed (empty when satisfied)
    std::optional<Valuation> observed;
    unsigned required = 0;
    bool total = false;           // satisfied and no nonzero coefficient beyond M
    bool definitive = false;      // a violation refutes the property itself
    bool sufficient_only = false; // the condition is only sufficient
    std::string note;
    std::vector<std::string> failures;  // every failed or undecidable clause

    bool satisfied() const { return kind == Kind::SatisfiedUpTo; }
    bool violated() const { return kind == Kind::ViolatedAt; }

    /// "SatisfiedUpTo(64) (total: ...)", "ViolatedAt(1): ...", ...
    std::string summary() const;
    static std::string kind_name(Kind k);
};

/// Mahler coefficients through the forward-difference table of f(0..M).
MahlerCoeffs mahler_coeffs(const MapExpr& e, Prime p, std::size_t max_index, unsigned precision);

/// sum_{m<=i} a_m C(i, m) mod p^K.
BigInt eval_mahler(const MahlerCoeffs& c, std::size_t i);

/// Largest e with base^e <= m (m >= 1), by exact comparison.
unsigned floor_log(std::uint64_t m, const BigInt& base);

/// Coefficient properties of sigma^n: a_m = 0 for m < p^n, a_{p^n} = 1, and
/// p^j | a_m whenever m > j p^n - j + 1.
Verdict check_bernoulli_properties(const MahlerCoeffs& c, unsigned n);

/// a_1 != 0 (mod p); a_m = 0 (mod p^(floor(log_p m) + 1)) for m >= 2.
Verdict check_lipschitz_mp(const MahlerCoeffs& c);

/// a_0 != 0 (mod p); a_1 = 1 (mod p, or mod 4 when p = 2);
/// a_m = 0 (mod p^(floor(log_p(m+1)) + 1)) for m >= 2, or m >= 1 when `strict_m1`.
Verdict check_lipschitz_ergodic(const MahlerCoeffs& c, bool strict_m1 = false);

/// |a_m|_p <= p^(1 - floor(log_{p^n} m)) for m >= 1.
Verdict check_complex_shift_bound(const MahlerCoeffs& c, unsigned n);

/// a_{p^n} != 0 (mod p); a_m = 0 (mod p^floor(log_{p^n} m)) for m > p^n.
Verdict check_cs_mp(const MahlerCoeffs& c, unsigned n);

/// a_{p^n} = 1 (mod p); a_1 + ... + a_{p^n - 1} = 0 (mod p);
/// a_m = 0 (mod p^floor(log_{p^n} m)) for m > p^n. Needs M >= p^n.
Verdict check_cs_ergodic(const MahlerCoeffs& c, unsigned n);

}  // namespace padyn
