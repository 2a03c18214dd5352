#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "padyn/padic.hpp"
#include "padyn/transducer.hpp"

namespace padyn {

inline constexpr std::uint64_t kDefaultBudget = std::uint64_t{1} << 22;

enum class ExprKind { Const, Var, Add, Sub, Mul, Pow, Shift, Binom, Mahler, Auto };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Node of a map expression. `count` is the exponent (Pow), shift depth
/// (Shift) or lower index m (Binom).
struct Expr {
    ExprKind kind = ExprKind::Const;
    BigInt value;                   // Const
    unsigned count = 0;             // Pow, Shift, Binom
    std::vector<BigInt> coeffs;     // Mahler
    std::string path;               // Auto
    std::shared_ptr<const Automaton> automaton;
    std::vector<ExprPtr> args;
};

/// Parsed self-map of Z_p. Immutable; cheap to copy.
class MapExpr {
public:
    explicit MapExpr(ExprPtr root) : root_(std::move(root)) {}

    const Expr& root() const { return *root_; }
    ExprPtr root_ptr() const { return root_; }

    /// Canonical text; parse_map(to_string()) rebuilds the same tree.
    std::string to_string() const;

    /// Structural equality (automata compared by path).
    bool same_tree(const MapExpr& other) const;

    /// Degree in the binomial basis when the map is a polynomial-like
    /// expression with finitely many nonzero Mahler coefficients.
    std::optional<std::uint64_t> degree_bound() const;

    /// No sigma, no auto, no mahler, and every C(e, m) has m < p.
    bool is_polynomial(Prime p) const;

private:
    ExprPtr root_;
};

/// Recursive-descent parser for
///
///     expr   := term (('+'|'-') term)*
///     term   := factor ('*' factor)*
///     factor := atom ('^' uint)?
///     atom   := int | 'x' | '(' expr ')' | 'sigma' ['^' uint] '(' expr ')'
///             | 'C' '(' expr ',' uint ')' | 'mahler' '[' int {',' int} ']' '(' expr ')'
///             | 'auto' '(' string ')' '(' expr ')'
///
/// Automaton files named in auto(...) are loaded relative to the working
/// directory. Errors carry the byte offset.
MapExpr parse_map(std::string_view text);

/// The certified digit lookahead: x = y (mod p^(k+l)) implies f(x) = f(y) (mod p^k).
unsigned lookahead_bound(const MapExpr& e, Prime p);

/// Exact integer value of the expression at the integer `lift`, where the
/// argument is known to `k_in` digits. Only the automaton nodes use `k_in`.
BigInt eval_integer(const MapExpr& e, Prime p, const BigInt& lift, unsigned k_in);

/// Evaluates at the zero-padded lift of x; the result has precision K_in - l.
PadicApprox eval_map(const MapExpr& e, const PadicApprox& x);

/// Table of residues: values[i] = f(i) mod p^out_digits for i in [0, p^in_digits).
struct ResidueTable {
    Prime p = 2;
    unsigned in_digits = 0;
    unsigned out_digits = 0;
    std::vector<std::uint64_t> values;
};

/// Throws BudgetError unless p^digits <= budget.
std::uint64_t checked_size(Prime p, unsigned digits, std::uint64_t budget);

/// Tabulates f over Z/p^(k_out + l) with values in Z/p^k_out.
ResidueTable tabulate(const MapExpr& e, Prime p, unsigned k_out,
                      std::uint64_t budget = kDefaultBudget);

/// Tabulates f mod p^out_digits over Z/p^in_digits, zero-padding every
/// argument to enough digits for the output to be certified.
ResidueTable tabulate_padded(const MapExpr& e, Prime p, unsigned in_digits, unsigned out_digits,
                             std::uint64_t budget = kDefaultBudget);

/// Smallest l' such that the table is constant on residue classes mod p^l'.
unsigned step_order(const std::vector<std::uint64_t>& table, Prime p);

/// f(x) = G_z(t) + T(z) with z = x mod p^n and t = (x - z) / p^n, checked
/// exhaustively for t in Z/p^depth.
struct ComplexShiftDecomposition {
    Prime p = 2;
    unsigned n = 0;
    unsigned depth = 0;
    unsigned value_digits = 0;                 // precision of T and G values
    std::vector<std::uint64_t> step;           // T(z), z in Z/p^n
    std::vector<std::vector<std::uint64_t>> g; // g[z][t] = G_z(t)
    bool verified = false;
    std::vector<std::string> log;

    struct Witness {
        std::uint64_t z, t1, t2;
        unsigned level;  // t1 = t2 mod p^level but G_z differs mod p^level
    };
    std::optional<Witness> witness;

    /// T viewed as a step function on Z/p^(n + extra).
    std::vector<std::uint64_t> step_table(unsigned extra) const;
};

ComplexShiftDecomposition decompose_complex_shift(const MapExpr& e, Prime p, unsigned n,
                                                  unsigned depth,
                                                  std::uint64_t budget = kDefaultBudget);

}  // namespace padyn
