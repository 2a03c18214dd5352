#include "padyn/map_dsl.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace padyn {

namespace {

ExprPtr make_node(ExprKind kind, std::vector<ExprPtr> args = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->args = std::move(args);
    return e;
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    ExprPtr parse() {
        ExprPtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("syntax error at " + std::to_string(pos_) + ": " + msg, pos_);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    bool peek_digit() {
        skip_ws();
        return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]));
    }

    BigInt integer() {
        if (!peek_digit()) fail("expected an integer");
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return BigInt(std::string(s_.substr(start, pos_ - start)));
    }

    BigInt signed_integer() {
        if (accept('-')) return -integer();
        return integer();
    }

    unsigned small_uint() {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '-') fail("negative exponent or index");
        const BigInt v = integer();
        if (v > 1'000'000) fail("exponent or index too large");
        return static_cast<unsigned>(v.get_ui());
    }

    std::string identifier() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
        }
        return std::string(s_.substr(start, pos_ - start));
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make_node(ExprKind::Add, {lhs, term()});
            else if (accept('-')) lhs = make_node(ExprKind::Sub, {lhs, term()});
            else return lhs;
        }
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (accept('*')) lhs = make_node(ExprKind::Mul, {lhs, factor()});
        return lhs;
    }

    ExprPtr factor() {
        ExprPtr base = atom();
        if (accept('^')) {
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Pow;
            e->count = small_uint();
            e->args = {base};
            return e;
        }
        return base;
    }

    ExprPtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (peek_digit()) {
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Const;
            e->value = integer();
            return e;
        }
        if (accept('(')) {
            ExprPtr inner = expr();
            expect(')');
            return inner;
        }
        const std::size_t id_pos = pos_;
        const std::string id = identifier();
        if (id == "x") return make_node(ExprKind::Var);
        if (id == "sigma") {
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Shift;
            e->count = accept('^') ? small_uint() : 1;
            expect('(');
            e->args = {expr()};
            expect(')');
            return e;
        }
        if (id == "C") {
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Binom;
            expect('(');
            e->args = {expr()};
            expect(',');
            e->count = small_uint();
            expect(')');
            return e;
        }
        if (id == "mahler") {
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Mahler;
            expect('[');
            e->coeffs.push_back(signed_integer());
            while (accept(',')) e->coeffs.push_back(signed_integer());
            expect(']');
            expect('(');
            e->args = {expr()};
            expect(')');
            return e;
        }
        if (id == "auto") {
            auto e = std::make_shared<Expr>();
            e->kind = ExprKind::Auto;
            expect('(');
            expect('"');
            const std::size_t start = pos_;
            while (pos_ < s_.size() && s_[pos_] != '"') ++pos_;
            if (pos_ >= s_.size()) fail("unterminated string");
            e->path = std::string(s_.substr(start, pos_ - start));
            ++pos_;
            expect(')');
            auto a = std::make_shared<const Automaton>(load_automaton(e->path));
            if (!max_output_deficit(*a)) {
                fail("automaton '" + e->path + "' has unbounded output lookahead");
            }
            e->automaton = std::move(a);
            expect('(');
            e->args = {expr()};
            expect(')');
            return e;
        }
        pos_ = id_pos;
        if (id.empty()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        fail("unknown identifier '" + id + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

// ------------------------------------------------------------ pretty-print

bool is_additive(const Expr& e) { return e.kind == ExprKind::Add || e.kind == ExprKind::Sub; }

void print(const Expr& e, std::ostream& os);

void print_wrapped(const Expr& e, bool wrap, std::ostream& os) {
    if (wrap) os << '(';
    print(e, os);
    if (wrap) os << ')';
}

void print(const Expr& e, std::ostream& os) {
    switch (e.kind) {
        case ExprKind::Const: os << e.value.get_str(); break;
        case ExprKind::Var: os << 'x'; break;
        case ExprKind::Add:
        case ExprKind::Sub:
            print(*e.args[0], os);
            os << (e.kind == ExprKind::Add ? " + " : " - ");
            print_wrapped(*e.args[1], is_additive(*e.args[1]), os);
            break;
        case ExprKind::Mul:
            print_wrapped(*e.args[0], is_additive(*e.args[0]), os);
            os << '*';
            print_wrapped(*e.args[1], is_additive(*e.args[1]) || e.args[1]->kind == ExprKind::Mul, os);
            break;
        case ExprKind::Pow: {
            const auto k = e.args[0]->kind;
            print_wrapped(*e.args[0],
                          k == ExprKind::Add || k == ExprKind::Sub || k == ExprKind::Mul || k == ExprKind::Pow,
                          os);
            os << '^' << e.count;
            break;
        }
        case ExprKind::Shift:
            os << "sigma";
            if (e.count != 1) os << '^' << e.count;
            os << '(';
            print(*e.args[0], os);
            os << ')';
            break;
        case ExprKind::Binom:
            os << "C(";
            print(*e.args[0], os);
            os << ", " << e.count << ')';
            break;
        case ExprKind::Mahler:
            os << "mahler[";
            for (std::size_t i = 0; i < e.coeffs.size(); ++i) os << (i ? "," : "") << e.coeffs[i].get_str();
            os << "](";
            print(*e.args[0], os);
            os << ')';
            break;
        case ExprKind::Auto:
            os << "auto(\"" << e.path << "\")(";
            print(*e.args[0], os);
            os << ')';
            break;
    }
}

bool same(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.count != b.count || a.value != b.value || a.coeffs != b.coeffs ||
        a.path != b.path || a.args.size() != b.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same(*a.args[i], *b.args[i])) return false;
    }
    return true;
}

std::optional<std::uint64_t> degree(const Expr& e) {
    auto child = [&](std::size_t i) { return degree(*e.args[i]); };
    switch (e.kind) {
        case ExprKind::Const: return 0;
        case ExprKind::Var: return 1;
        case ExprKind::Add:
        case ExprKind::Sub: {
            auto a = child(0), b = child(1);
            if (!a || !b) return std::nullopt;
            return std::max(*a, *b);
        }
        case ExprKind::Mul: {
            auto a = child(0), b = child(1);
            if (!a || !b) return std::nullopt;
            return *a + *b;
        }
        case ExprKind::Pow:
        case ExprKind::Binom: {
            auto a = child(0);
            if (!a) return std::nullopt;
            return *a * e.count;
        }
        case ExprKind::Mahler: {
            auto a = child(0);
            if (!a) return std::nullopt;
            std::uint64_t top = 0;
            for (std::size_t m = 0; m < e.coeffs.size(); ++m) {
                if (e.coeffs[m] != 0) top = m;
            }
            return *a * top;
        }
        case ExprKind::Shift:
        case ExprKind::Auto: return std::nullopt;
    }
    return std::nullopt;
}

bool polynomial(const Expr& e, Prime p) {
    switch (e.kind) {
        case ExprKind::Shift:
        case ExprKind::Auto:
        case ExprKind::Mahler: return false;
        case ExprKind::Binom:
            if (e.count >= p) return false;
            break;
        default: break;
    }
    return std::all_of(e.args.begin(), e.args.end(), [p](const ExprPtr& a) { return polynomial(*a, p); });
}

unsigned lookahead(const Expr& e, Prime p) {
    switch (e.kind) {
        case ExprKind::Const:
        case ExprKind::Var: return 0;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul: return std::max(lookahead(*e.args[0], p), lookahead(*e.args[1], p));
        case ExprKind::Pow: return lookahead(*e.args[0], p);
        case ExprKind::Shift: return e.count + lookahead(*e.args[0], p);
        case ExprKind::Binom: return lookahead(*e.args[0], p) + factorial_valuation(e.count, p);
        case ExprKind::Mahler: {
            unsigned extra = 0;
            for (std::size_t m = 0; m < e.coeffs.size(); ++m) {
                if (e.coeffs[m] != 0) extra = std::max(extra, factorial_valuation(m, p));
            }
            return lookahead(*e.args[0], p) + extra;
        }
        case ExprKind::Auto: {
            const auto d = max_output_deficit(*e.automaton);
            if (!d) throw PrecisionError("automaton '" + e.path + "' has unbounded output lookahead");
            return lookahead(*e.args[0], p) + static_cast<unsigned>(*d);
        }
    }
    return 0;
}

BigInt evaluate(const Expr& e, Prime p, const BigInt& x, unsigned k_in) {
    switch (e.kind) {
        case ExprKind::Const: return e.value;
        case ExprKind::Var: return x;
        case ExprKind::Add: return evaluate(*e.args[0], p, x, k_in) + evaluate(*e.args[1], p, x, k_in);
        case ExprKind::Sub: return evaluate(*e.args[0], p, x, k_in) - evaluate(*e.args[1], p, x, k_in);
        case ExprKind::Mul: return evaluate(*e.args[0], p, x, k_in) * evaluate(*e.args[1], p, x, k_in);
        case ExprKind::Pow: {
            BigInt r;
            const BigInt b = evaluate(*e.args[0], p, x, k_in);
            mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e.count);
            return r;
        }
        case ExprKind::Shift: {
            // Floor division agrees with the p-adic shift on negative integers too.
            BigInt r;
            const BigInt v = evaluate(*e.args[0], p, x, k_in);
            mpz_fdiv_q(r.get_mpz_t(), v.get_mpz_t(), power(p, e.count).get_mpz_t());
            return r;
        }
        case ExprKind::Binom: return binomial(evaluate(*e.args[0], p, x, k_in), e.count);
        case ExprKind::Mahler: {
            const BigInt v = evaluate(*e.args[0], p, x, k_in);
            BigInt sum = 0;
            for (std::size_t m = 0; m < e.coeffs.size(); ++m) {
                if (e.coeffs[m] != 0) sum += e.coeffs[m] * binomial(v, m);
            }
            return sum;
        }
        case ExprKind::Auto: {
            const Automaton& a = *e.automaton;
            if (a.prime() != p) {
                throw ConfigError("automaton '" + e.path + "' is over p = " + std::to_string(a.prime()) +
                                  ", map evaluated at p = " + std::to_string(p));
            }
            const unsigned inner = lookahead(*e.args[0], p);
            if (k_in <= inner) throw PrecisionError("automaton input precision exhausted");
            const unsigned k_sub = k_in - inner;
            const auto digits =
                PadicApprox::from_residue(p, k_sub, evaluate(*e.args[0], p, x, k_in)).digits();
            const RunTrace t = run(a, digits);
            BigInt r = 0;
            for (auto it = t.output.rbegin(); it != t.output.rend(); ++it) r = r * p + *it;
            return r;
        }
    }
    return 0;
}

}  // namespace

std::string MapExpr::to_string() const {
    std::ostringstream os;
    print(*root_, os);
    return os.str();
}

bool MapExpr::same_tree(const MapExpr& other) const { return same(*root_, *other.root_); }

std::optional<std::uint64_t> MapExpr::degree_bound() const { return degree(*root_); }

bool MapExpr::is_polynomial(Prime p) const { return polynomial(*root_, p); }

MapExpr parse_map(std::string_view text) { return MapExpr(Parser(text).parse()); }

unsigned lookahead_bound(const MapExpr& e, Prime p) { return lookahead(e.root(), p); }

BigInt eval_integer(const MapExpr& e, Prime p, const BigInt& lift, unsigned k_in) {
    return evaluate(e.root(), p, lift, k_in);
}

PadicApprox eval_map(const MapExpr& e, const PadicApprox& x) {
    const Prime p = x.prime();
    const unsigned ell = lookahead_bound(e, p);
    if (x.precision() <= ell) {
        throw PrecisionError("input precision " + std::to_string(x.precision()) +
                             " does not exceed lookahead " + std::to_string(ell));
    }
    return PadicApprox::from_residue(p, x.precision() - ell, eval_integer(e, p, x.residue(), x.precision()));
}

// ------------------------------------------------------------- tabulation

std::uint64_t checked_size(Prime p, unsigned digits, std::uint64_t budget) {
    std::uint64_t size = 1;
    for (unsigned i = 0; i < digits; ++i) {
        if (size > budget / p) {
            throw BudgetError(std::to_string(p) + "^" + std::to_string(digits) +
                              " entries exceed the enumeration budget of " + std::to_string(budget));
        }
        size *= p;
    }
    if (size > budget) throw BudgetError("table exceeds the enumeration budget");
    return size;
}

ResidueTable tabulate_padded(const MapExpr& e, Prime p, unsigned in_digits, unsigned out_digits,
                             std::uint64_t budget) {
    require_prime(p);
    const std::uint64_t size = checked_size(p, in_digits, budget);
    const BigInt modulus = power(p, out_digits);
    if (!modulus.fits_ulong_p()) throw BudgetError("output modulus does not fit a machine word");
    const unsigned long mod = modulus.get_ui();
    const unsigned k_in = std::max(in_digits, out_digits + lookahead_bound(e, p));

    ResidueTable t{p, in_digits, out_digits, {}};
    t.values.resize(size);
    for (std::uint64_t i = 0; i < size; ++i) {
        const BigInt v = eval_integer(e, p, BigInt(static_cast<unsigned long>(i)), k_in);
        t.values[i] = mpz_fdiv_ui(v.get_mpz_t(), mod);
    }
    return t;
}

ResidueTable tabulate(const MapExpr& e, Prime p, unsigned k_out, std::uint64_t budget) {
    return tabulate_padded(e, p, k_out + lookahead_bound(e, p), k_out, budget);
}

unsigned step_order(const std::vector<std::uint64_t>& table, Prime p) {
    unsigned levels = 0;
    std::uint64_t size = 1;
    while (size < table.size()) {
        size *= p;
        ++levels;
    }
    if (size != table.size()) throw ConfigError("table length is not a power of p");
    std::uint64_t block = 1;
    for (unsigned order = 0; order <= levels; ++order, block *= p) {
        bool constant = true;
        for (std::uint64_t i = block; i < table.size() && constant; ++i) {
            constant = table[i] == table[i % block];
        }
        if (constant) return order;
    }
    return levels;
}

// ---------------------------------------------------------- complex shift

std::vector<std::uint64_t> ComplexShiftDecomposition::step_table(unsigned extra) const {
    std::vector<std::uint64_t> out;
    const std::uint64_t classes = step.size();
    std::uint64_t size = classes;
    for (unsigned i = 0; i < extra; ++i) size *= p;
    out.reserve(size);
    for (std::uint64_t x = 0; x < size; ++x) out.push_back(step[x % classes]);
    return out;
}

ComplexShiftDecomposition decompose_complex_shift(const MapExpr& e, Prime p, unsigned n,
                                                  unsigned depth, std::uint64_t budget) {
    require_prime(p);
    if (n < 1) throw ConfigError("complex-shift level n must be at least 1");
    checked_size(p, n + depth, budget);
    const unsigned ell = lookahead_bound(e, p);
    const unsigned k_in = n + depth;
    if (k_in <= ell) throw PrecisionError("depth too small for the map's lookahead");

    ComplexShiftDecomposition d;
    d.p = p;
    d.n = n;
    d.depth = depth;
    d.value_digits = k_in - ell;
    const BigInt modulus = power(p, d.value_digits);
    const BigInt shift = power(p, n);
    const std::uint64_t zs = power(p, n).get_ui();
    const std::uint64_t ts = power(p, depth).get_ui();

    auto f = [&](const BigInt& x) { return mod_value(eval_integer(e, p, x, k_in), modulus); };

    for (std::uint64_t z = 0; z < zs; ++z) d.step.push_back(f(BigInt(z)).get_ui());

    bool recombines = true;
    d.g.assign(zs, {});
    for (std::uint64_t z = 0; z < zs; ++z) {
        auto& row = d.g[z];
        row.reserve(ts);
        for (std::uint64_t t = 0; t < ts; ++t) {
            const BigInt x = BigInt(z) + shift * BigInt(t);
            const BigInt g = mod_value(f(x) - BigInt(d.step[z]), modulus);
            row.push_back(g.get_ui());
            // Recombination against a direct evaluation at the padded lift.
            const BigInt direct = eval_map(e, PadicApprox::from_residue(p, k_in, x)).residue();
            if (mod_value(g + BigInt(d.step[z]), modulus) != direct) recombines = false;
        }
    }
    d.log.push_back(std::string("recombination G_z(t) + T(z) = f(x): ") + (recombines ? "ok" : "FAILED"));

    // G_z is 1-Lipschitz iff for each j, G_z mod p^j depends only on t mod p^j.
    const unsigned top = std::min(depth, d.value_digits);
    std::uint64_t block = 1;
    for (unsigned j = 1; j <= top && !d.witness; ++j) {
        block *= p;
        for (std::uint64_t z = 0; z < zs && !d.witness; ++z) {
            for (std::uint64_t t = block; t < ts; ++t) {
                const std::uint64_t r = t % block;
                if (d.g[z][t] % block != d.g[z][r] % block) {
                    d.witness = ComplexShiftDecomposition::Witness{z, r, t, j};
                    break;
                }
            }
        }
    }
    if (d.witness) {
        const auto& w = *d.witness;
        d.log.push_back("G_z 1-Lipschitz: FAILED at z=" + std::to_string(w.z) + ", t=" + std::to_string(w.t1) +
                        " vs t'=" + std::to_string(w.t2) + " (congruent mod " + std::to_string(p) + "^" +
                        std::to_string(w.level) + ", images differ)");
    } else {
        d.log.push_back("G_z 1-Lipschitz: ok for all z up to level " + std::to_string(top));
    }
    const unsigned order = step_order(d.step_table(1), p);
    d.log.push_back("step order of T: " + std::to_string(order));
    d.verified = recombines && !d.witness && order <= n;
    return d;
}

}  // namespace padyn
