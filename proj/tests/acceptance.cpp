// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "padyn/cli.hpp"
#include "padyn/dynamics.hpp"
#include "padyn/mahler.hpp"

using namespace padyn;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

const std::vector<std::string> kCorpus = {
    "x", "x+1", "3*x+1", "x^2", "x^2+x+1", "sigma(x)", "sigma^2(x)", "sigma(x^2+x+1)", "C(x,2)",
    "mahler[1,2,4](x)",
};

std::string sigma_text(unsigned n) { return n == 1 ? "sigma(x)" : "sigma^" + std::to_string(n) + "(x)"; }

// Exact a_m of floor(x / p^n) by the alternating sum, with no reduction.
std::vector<BigInt> sigma_coefficients(Prime p, unsigned n, std::size_t M) {
    const std::uint64_t d = power(p, n).get_ui();
    std::vector<BigInt> row{1}, a;
    for (std::size_t m = 0; m <= M; ++m) {
        if (m > 0) {
            std::vector<BigInt> next(m + 1, 1);
            for (std::size_t c = 1; c < m; ++c) next[c] = row[c - 1] + row[c];
            row = std::move(next);
        }
        BigInt s = 0;
        for (std::size_t i = 0; i <= m; ++i) {
            const BigInt term = BigInt(static_cast<unsigned long>(i / d)) * row[i];
            if ((m + i) % 2) s -= term;
            else s += term;
        }
        a.push_back(s);
    }
    return a;
}

bool divisible(const BigInt& a, const BigInt& d) { return mpz_divisible_p(a.get_mpz_t(), d.get_mpz_t()) != 0; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check bernoulli_coefficients() {
    Check c;
    const unsigned K = 24;
    for (Prime p : {2u, 3u}) {
        for (unsigned n : {1u, 2u}) {
            const std::uint64_t pn = power(p, n).get_ui();
            const std::size_t M = 2 * pn * pn;
            const auto exact = sigma_coefficients(p, n, M);
            const auto lib = mahler_coeffs(parse_map(sigma_text(n)), p, M, K);
            const std::string tag = " (p=" + std::to_string(p) + ", n=" + std::to_string(n) + ")";
            for (std::size_t m = 0; m <= M; ++m) {
                c.require(lib.coeffs[m] == mod_pow(exact[m], p, K), "library a_" + std::to_string(m) + " differs" + tag);
                if (m < pn) c.require(exact[m] == 0, "a_m != 0 below p^n" + tag);
            }
            c.require(exact[pn] == 1, "a_{p^n} != 1" + tag);
            for (unsigned j = 1; j <= K; ++j) {
                const BigInt pj = power(p, j);
                for (std::size_t m = 0; m <= M; ++m) {
                    if (BigInt(static_cast<unsigned long>(m)) > BigInt(j) * pn - j + 1) {
                        c.require(divisible(exact[m], pj),
                                  "p^" + std::to_string(j) + " does not divide a_" + std::to_string(m) + tag);
                    }
                }
            }
            c.require(check_bernoulli_properties(lib, n).satisfied(), "bernoulli checker not satisfied" + tag);
        }
    }
    return c;
}

Check mahler_round_trip() {
    Check c;
    const std::size_t M = 64;
    const unsigned K = 16;
    for (Prime p : {2u, 3u}) {
        const BigInt mod = power(p, K);
        for (const auto& s : kCorpus) {
            const auto e = parse_map(s);
            const auto coeffs = mahler_coeffs(e, p, M, K);
            const unsigned k_in = K + lookahead_bound(e, p) + digit_count(M, p);
            for (std::size_t i = 0; i <= M; ++i) {
                const auto direct = eval_map(e, PadicApprox::from_residue(p, k_in, static_cast<unsigned long>(i)));
                c.require(eval_mahler(coeffs, i) == mod_value(direct.residue(), mod),
                          s + " differs at i=" + std::to_string(i) + " p=" + std::to_string(p));
            }
        }
    }
    return c;
}

Check checkers_on_sigma() {
    Check c;
    for (Prime p : {2u, 3u}) {
        for (unsigned n : {1u, 2u}) {
            const std::uint64_t pn = power(p, n).get_ui();
            const std::size_t M = 2 * pn * pn;
            const auto e = parse_map(sigma_text(n));
            const auto co = mahler_coeffs(e, p, M, 24);
            const std::string tag = " (p=" + std::to_string(p) + ", n=" + std::to_string(n) + ")";
            for (const auto& v : {check_complex_shift_bound(co, n), check_cs_mp(co, n), check_cs_ergodic(co, n)}) {
                c.require(v.satisfied() && v.index == M, v.name + " gave " + v.summary() + tag);
            }
            const unsigned k_max = (p == 2 ? 6 : 4) / n;
            for (unsigned k = 2; k <= k_max; ++k) {
                const auto census = preimage_census(level_map(e, p, n, k));
                bool exact = census.uniform && census.expected == pn;
                for (auto cnt : census.counts) exact = exact && cnt == pn;
                c.require(exact, "census not uniform at k=" + std::to_string(k) + tag);
            }
        }
    }
    return c;
}

Check ergodic_affine() {
    Check c;
    const auto e = parse_map("x+1");
    for (Prime p : {2u, 3u}) {
        c.require(check_lipschitz_ergodic(mahler_coeffs(e, p, 64, 16)).satisfied(),
                  "ergodicity conditions fail for p=" + std::to_string(p));
        for (unsigned k = 1; k <= (p == 2 ? 12u : 7u); ++k) {
            const auto r = cycle_report(padded_endomap(e, p, k).table.values);
            c.require(r.unique_cycle() && r.cycles[0].size() == power(p, k).get_ui(),
                      "no single full cycle mod " + std::to_string(p) + "^" + std::to_string(k));
        }
    }
    return c;
}

Check necessity_at_two() {
    Check c;
    const auto e = parse_map("3*x+1");
    const auto v = check_lipschitz_ergodic(mahler_coeffs(e, 2, 64, 16));
    c.require(v.violated() && v.index == 1, "expected ViolatedAt(1), got " + v.summary());
    c.require(v.definitive, "violation not flagged definitive");
    c.require(v.note.find("in the case p=2 these conditions are necessary") != std::string::npos,
              "necessity note missing");
    bool split = false;
    for (unsigned k = 1; k <= 10; ++k) {
        if (cycle_report(padded_endomap(e, 2, k).table.values).cycles.size() > 1) split = true;
    }
    c.require(split, "a unique cycle persists through k=10");
    return c;
}

Check non_preserving_square() {
    Check c;
    const auto e = parse_map("x^2");
    for (Prime p : {2u, 3u}) {
        const auto t = padded_endomap(e, p, 2).table.values;
        const auto w = find_collision(t);
        c.require(w && w->first != w->second && t[w->first] == t[w->second],
                  "no collision witness mod " + std::to_string(p) + "^2");
    }
    const auto v = check_lipschitz_mp(mahler_coeffs(e, 3, 64, 16));
    c.require(v.violated() && v.index == 2, "expected ViolatedAt(2), got " + v.summary());
    return c;
}

Check complex_shift_decomposition() {
    Check c;
    const unsigned depth = 6, n = 1;
    for (const char* s : {"sigma(x)", "x"}) {
        const auto e = parse_map(s);
        const auto d = decompose_complex_shift(e, 2, n, depth);
        c.require(d.verified, std::string(s) + " not verified");
        c.require(step_order(d.step_table(depth), 2) <= n, std::string(s) + " step order exceeds n");
        // Independent sweep: G_z(t) + T(z) = f(z + 2t), and t = t' mod 2^j gives G equal mod 2^j.
        const std::uint64_t ts = std::uint64_t{1} << depth;
        const BigInt vmod = power(2, d.value_digits);
        for (std::uint64_t z = 0; z < 2; ++z) {
            for (std::uint64_t t = 0; t < ts; ++t) {
                const BigInt f = eval_integer(e, 2, BigInt(static_cast<unsigned long>(z + 2 * t)), n + depth);
                c.require(mod_value(BigInt(static_cast<unsigned long>(d.g[z][t] + d.step[z])) - f, vmod) == 0,
                          std::string(s) + " does not recombine");
                for (std::uint64_t u = t + 1; u < ts; ++u) {
                    for (unsigned j = 1; j <= std::min(depth, d.value_digits); ++j) {
                        const std::uint64_t m = std::uint64_t{1} << j;
                        if (t % m == u % m) c.require(d.g[z][t] % m == d.g[z][u] % m, std::string(s) + " G_z not 1-Lipschitz");
                    }
                }
            }
        }
    }
    return c;
}

Check one_sidedness() {
    Check c;
    const auto e = parse_map("C(x,2)");
    const auto co = mahler_coeffs(e, 2, 256, 16);
    const auto mp = check_cs_mp(co, 1);
    const auto erg = check_cs_ergodic(co, 1);
    c.require(mp.satisfied() && mp.index == 256, "measure-preservation checker: " + mp.summary());
    c.require(erg.satisfied() && erg.index == 256, "ergodicity checker: " + erg.summary());
    for (unsigned k = 2; k <= 6; ++k) {
        const auto census = preimage_census(level_map(e, 2, 1, k));
        c.require(census.uniform && census.expected == 2, "census not Uniform(2) at k=" + std::to_string(k));
    }
    const auto r = cycle_report(padded_endomap(e, 2, 2).table.values);
    c.require(r.cycles == std::vector<std::vector<std::uint64_t>>{{0}, {3}}, "cycles at m=2 are not {0},{3}");

    const std::string path = "acceptance_one_sided.json";
    std::ostringstream out, err;
    const int code = cli::run_command({"analyze", "--p", "2", "--K", "16", "--map", "C(x,2)", "--n", "1", "--mmax",
                                       "256", "--kmax", "6", "--json", path},
                                      out, err);
    c.require(code == 0, "analyze exited with " + std::to_string(code));
    const std::string text = out.str();
    c.require(text.find("cs_mp             SatisfiedUpTo(256)") != std::string::npos, "text lacks the cs_mp verdict");
    c.require(text.find("cs_ergodic        SatisfiedUpTo(256)") != std::string::npos, "text lacks the cs_ergodic verdict");
    c.require(text.find("m=2: 2 cycle(s)") != std::string::npos, "text lacks the two-cycle report");
    c.require(text.find("neither refutes the other") != std::string::npos, "text lacks the side-by-side note");
    const auto j = nlohmann::json::parse(slurp(path));
    std::remove(path.c_str());
    c.require(j["verdicts"]["cs_mp"]["kind"] == "satisfied_up_to", "JSON cs_mp verdict");
    c.require(j["verdicts"]["cs_ergodic"]["kind"] == "satisfied_up_to", "JSON cs_ergodic verdict");
    bool cycles_ok = false;
    for (const auto& entry : j["cycles"]) {
        if (entry["digits"] == 2) cycles_ok = entry["cycle_count"] == 2 && entry["unique"] == false;
    }
    c.require(cycles_ok, "JSON lacks the m=2 cycle verdict");
    return c;
}

Check padding_independence() {
    Check c;
    const Prime p = 2;
    for (const auto& s : kCorpus) {
        const auto e = parse_map(s);
        const unsigned ell = lookahead_bound(e, p);
        for (unsigned k = 1; k + ell <= 10; ++k) {
            const unsigned kin = k + ell;
            const BigInt step = power(p, kin), mod = power(p, k);
            const long size = step.get_si();
            for (long x = 0; x < size; ++x) {
                const BigInt fx = mod_value(eval_integer(e, p, x, kin), mod);
                for (long j : {-3L, -1L, 1L, 2L, 5L, 1000003L}) {
                    const BigInt y = BigInt(x) + j * step;
                    if (mod_value(eval_integer(e, p, y, kin), mod) != fx) {
                        c.require(false, s + ": k=" + std::to_string(k) + " x=" + std::to_string(x) +
                                             " y=" + y.get_str());
                    }
                }
            }
        }
    }
    return c;
}

Check plot_set() {
    Check c;
    const auto e = parse_map("sigma(x)");
    for (unsigned k = 1; k <= 12; ++k) {
        const std::uint64_t bound = std::uint64_t{1} << (k + 1);
        for (const auto& pt : plot_points(e, 2, 1, k).points) {
            using u128 = unsigned __int128;
            // |y - x| <= 2^-(k+1)  <=>  |yn*xd - xn*yd| * 2^(k+1) <= xd*yd
            const u128 a = u128(pt.ynum) * pt.xden, b = u128(pt.xnum) * pt.yden;
            const u128 diff = a > b ? a - b : b - a;
            c.require(diff * bound <= u128(pt.xden) * pt.yden, "point off the band at k=" + std::to_string(k));
        }
    }
    const auto ps = plot_points_upto(e, 2, 1, 12);
    double prev = 2.0;
    for (std::uint64_t g : {16u, 64u, 256u}) {
        const double f = box_count(ps, g).fraction();
        c.require(f < prev, "fraction not strictly decreasing at G=" + std::to_string(g));
        prev = f;
    }
    c.require(prev <= 0.05, "fraction at G=256 is " + std::to_string(prev));

    const std::vector<std::string> args = {"plotset", "--p", "2", "--map", "sigma(x)", "--n", "1", "--kmax", "12",
                                           "--grid", "256", "--csv", "acceptance_pts.csv", "--pgm",
                                           "acceptance_raster.pgm"};
    std::string csv[2], pgm[2];
    for (int run = 0; run < 2; ++run) {
        std::ostringstream out, err;
        c.require(cli::run_command(args, out, err) == 0, "plotset command failed");
        csv[run] = slurp("acceptance_pts.csv");
        pgm[run] = slurp("acceptance_raster.pgm");
    }
    std::remove("acceptance_pts.csv");
    std::remove("acceptance_raster.pgm");
    c.require(!csv[0].empty() && csv[0] == csv[1], "CSV differs across runs");
    c.require(!pgm[0].empty() && pgm[0] == pgm[1], "PGM differs across runs");
    c.require(csv[0] == plot_csv(ps), "CSV does not match the accumulated point set");
    return c;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"Bernoulli-shift coefficient properties", bernoulli_coefficients},
        {"Mahler round-trip on the corpus", mahler_round_trip},
        {"complex-shift checkers and census on sigma^n", checkers_on_sigma},
        {"ergodic affine map x+1", ergodic_affine},
        {"necessity at p=2 for 3x+1", necessity_at_two},
        {"non-preserving map x^2", non_preserving_square},
        {"complex-shift decomposition at depth 6", complex_shift_decomposition},
        {"one-sided diagnostics for C(x,2)", one_sidedness},
        {"padding independence", padding_independence},
        {"plot set band, box counts and determinism", plot_set},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Check result;
        try {
            result = criteria[i].second();
        } catch (const std::exception& ex) {
            result.ok = false;
            result.detail = std::string("exception: ") + ex.what();
        }
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu  %-46s %8.1f ms%s%s\n", result.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), ms,
                    result.ok ? "" : "  ", result.detail.c_str());
        if (!result.ok) ++failures;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
