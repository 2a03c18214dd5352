#include "padyn/dynamics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace padyn {

ReducedLevelMap level_map(const MapExpr& e, Prime p, unsigned n, unsigned k, std::uint64_t budget) {
    if (n < 1) throw ConfigError("level n must be at least 1");
    if (k < 2) throw ConfigError("census level k must be at least 2");
    ReducedLevelMap m;
    m.form = ReducedLevelMap::Form::Census;
    m.n = n;
    m.k = k;
    m.table = tabulate_padded(e, p, n * k, n * (k - 1), budget);
    return m;
}

ReducedLevelMap padded_endomap(const MapExpr& e, Prime p, unsigned digits, std::uint64_t budget) {
    if (digits < 1) throw ConfigError("endomap needs at least one digit");
    ReducedLevelMap m;
    m.form = ReducedLevelMap::Form::Endomap;
    m.n = 1;
    m.k = digits;
    m.table = tabulate_padded(e, p, digits, digits, budget);
    return m;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> Census::histogram() const {
    std::map<std::uint64_t, std::uint64_t> h;
    for (auto c : counts) ++h[c];
    return {h.begin(), h.end()};
}

Census preimage_census(const ReducedLevelMap& m) {
    const auto& t = m.table;
    std::uint64_t codomain = 1;
    for (unsigned i = 0; i < t.out_digits; ++i) codomain *= t.p;
    Census c;
    c.counts.assign(codomain, 0);
    for (auto v : t.values) ++c.counts[v];
    c.total = t.values.size();
    c.expected = 1;
    const unsigned spread = t.in_digits - t.out_digits;
    for (unsigned i = 0; i < spread; ++i) c.expected *= t.p;
    for (std::uint64_t y = 0; y < codomain; ++y) {
        if (c.counts[y] != c.expected) {
            c.witness = y;
            break;
        }
    }
    c.uniform = !c.witness;
    return c;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> find_collision(const std::vector<std::uint64_t>& table) {
    std::map<std::uint64_t, std::uint64_t> first;
    for (std::uint64_t x = 0; x < table.size(); ++x) {
        auto [it, fresh] = first.emplace(table[x], x);
        if (!fresh) return std::make_pair(it->second, x);
    }
    return std::nullopt;
}

CycleReport cycle_report(const std::vector<std::uint64_t>& table) {
    constexpr auto unknown = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t size = table.size();
    // dist[x]: steps from x to its cycle; unknown until settled.
    std::vector<std::uint64_t> dist(size, unknown);
    std::vector<unsigned char> on_path(size, 0);
    CycleReport r;
    std::vector<std::uint64_t> path;
    for (std::uint64_t start = 0; start < size; ++start) {
        if (dist[start] != unknown) continue;
        path.clear();
        std::uint64_t x = start;
        while (dist[x] == unknown && !on_path[x]) {
            on_path[x] = 1;
            path.push_back(x);
            x = table[x];
        }
        std::size_t tail_end = path.size();
        if (dist[x] == unknown) {
            // x is on the current path: the suffix from x is a new cycle.
            const auto pos = static_cast<std::size_t>(std::find(path.begin(), path.end(), x) - path.begin());
            std::vector<std::uint64_t> cycle(path.begin() + static_cast<std::ptrdiff_t>(pos), path.end());
            for (auto c : cycle) dist[c] = 0;
            std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
            r.cycles.push_back(std::move(cycle));
            tail_end = pos;
        }
        for (std::size_t i = tail_end; i-- > 0;) {
            dist[path[i]] = dist[table[path[i]]] + 1;
        }
        for (auto v : path) on_path[v] = 0;
    }
    for (auto d : dist) {
        if (d >= r.tail_histogram.size()) r.tail_histogram.resize(d + 1, 0);
        ++r.tail_histogram[d];
        if (d > 0) ++r.tail_nodes;
    }
    std::sort(r.cycles.begin(), r.cycles.end());
    return r;
}

Orbit orbit(const MapExpr& e, Prime p, const BigInt& x0, std::size_t steps, unsigned digits,
            std::uint64_t budget) {
    require_prime(p);
    if (digits < 1) throw ConfigError("orbit needs at least one digit");
    if (steps > budget) throw BudgetError("orbit length exceeds the enumeration budget");
    const unsigned k_in = digits + lookahead_bound(e, p);
    const BigInt modulus = power(p, digits);
    Orbit o;
    std::map<BigInt, std::size_t> seen;
    BigInt x = mod_value(x0, modulus);
    for (std::size_t i = 0; i <= steps; ++i) {
        o.values.push_back(x);
        if (!o.cycle_entry) {
            auto [it, fresh] = seen.emplace(x, i);
            if (!fresh) {
                o.cycle_entry = it->second;
                o.cycle_length = i - it->second;
            }
        }
        if (i < steps) x = mod_value(eval_integer(e, p, x, k_in), modulus);
    }
    return o;
}

// ------------------------------------------------------------------ plot set

namespace {

std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t> reduced_key(const PlotPoint& pt) {
    const auto gx = std::gcd(pt.xnum, pt.xden);
    const auto gy = std::gcd(pt.ynum, pt.yden);
    return {pt.xnum / gx, pt.xden / gx, pt.ynum / gy, pt.yden / gy};
}

void append_level(PlotSet& ps, const MapExpr& e, unsigned k, std::uint64_t budget,
                  std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>>& seen) {
    const ResidueTable t = tabulate_padded(e, ps.p, ps.n + k, k, budget);
    const auto xden = static_cast<std::uint64_t>(t.values.size());
    const std::uint64_t yden = power(ps.p, k).get_ui();
    for (std::uint64_t x = 0; x < xden; ++x) {
        PlotPoint pt{x, xden, t.values[x], yden, k};
        if (seen.insert(reduced_key(pt)).second) ps.points.push_back(pt);
    }
}

}  // namespace

PlotSet plot_points(const MapExpr& e, Prime p, unsigned n, unsigned k, std::uint64_t budget) {
    if (k < 1) throw ConfigError("plot level k must be at least 1");
    PlotSet ps{p, n, k, k, {}};
    std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>> seen;
    append_level(ps, e, k, budget, seen);
    return ps;
}

PlotSet plot_points_upto(const MapExpr& e, Prime p, unsigned n, unsigned k_max, std::uint64_t budget) {
    if (k_max < 1) throw ConfigError("k_max must be at least 1");
    PlotSet ps{p, n, 1, k_max, {}};
    std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>> seen;
    std::uint64_t spent = 0;
    for (unsigned k = 1; k <= k_max; ++k) {
        spent += checked_size(p, n + k, budget);
        if (spent > budget) throw BudgetError("accumulated plot set exceeds the enumeration budget");
        append_level(ps, e, k, budget, seen);
    }
    return ps;
}

BoxCount box_count(const PlotSet& ps, std::uint64_t grid) {
    if (grid < 1) throw ConfigError("grid size must be at least 1");
    BoxCount b;
    b.grid = grid;
    b.cells.assign(grid * grid, 0);
    using u128 = unsigned __int128;
    for (const auto& pt : ps.points) {
        const auto col = static_cast<std::uint64_t>(u128(pt.xnum) * grid / pt.xden);
        const auto from_bottom = static_cast<std::uint64_t>(u128(pt.ynum) * grid / pt.yden);
        const std::uint64_t row = grid - 1 - from_bottom;
        auto& cell = b.cells[row * grid + col];
        if (!cell) {
            cell = 1;
            ++b.covered;
        }
    }
    return b;
}

std::string plot_csv(const PlotSet& ps) {
    std::ostringstream os;
    os << "xnum,xden,ynum,yden\n";
    for (const auto& pt : ps.points) os << pt.xnum << ',' << pt.xden << ',' << pt.ynum << ',' << pt.yden << '\n';
    return os.str();
}

std::string raster_pgm(const BoxCount& b) {
    std::ostringstream os;
    os << "P2\n" << b.grid << ' ' << b.grid << "\n1\n";
    for (std::uint64_t r = 0; r < b.grid; ++r) {
        for (std::uint64_t c = 0; c < b.grid; ++c) {
            if (c) os << ' ';
            os << static_cast<int>(b.cells[r * b.grid + c]);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace padyn
