#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padyn/map_dsl.hpp"

namespace padyn {

/// f reduced to a finite ring. The census form maps Z/p^(nk) -> Z/p^(n(k-1));
/// the endomap form maps Z/p^m -> Z/p^m under the zero-padded lift.
struct ReducedLevelMap {
    enum class Form { Census, Endomap };
    Form form = Form::Endomap;
    unsigned n = 1;
    unsigned k = 1;
    ResidueTable table;
};

ReducedLevelMap level_map(const MapExpr& e, Prime p, unsigned n, unsigned k,
                          std::uint64_t budget = kDefaultBudget);

ReducedLevelMap padded_endomap(const MapExpr& e, Prime p, unsigned digits,
                               std::uint64_t budget = kDefaultBudget);

struct Census {
    std::vector<std::uint64_t> counts;  // preimage count per codomain point
    std::uint64_t expected = 0;         // p^n
    std::uint64_t total = 0;            // always p^(nk)
    bool uniform = false;
    std::optional<std::uint64_t> witness;  // a point whose count differs

    /// count value -> number of codomain points with that count, ascending.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> histogram() const;
};

Census preimage_census(const ReducedLevelMap& m);

/// Two distinct points with the same image, if the table is not injective.
std::optional<std::pair<std::uint64_t, std::uint64_t>> find_collision(const std::vector<std::uint64_t>& table);

struct CycleReport {
    std::vector<std::vector<std::uint64_t>> cycles;  // each starts at its smallest member
    std::vector<std::uint64_t> tail_histogram;       // [d] = nodes at distance d from a cycle
    std::uint64_t tail_nodes = 0;

    bool unique_cycle() const { return cycles.size() == 1; }
};

/// Functional-graph decomposition of an endomap table.
CycleReport cycle_report(const std::vector<std::uint64_t>& table);

struct Orbit {
    std::vector<BigInt> values;  // x0, f(x0), ..., steps + 1 entries
    std::optional<std::size_t> cycle_entry;  // first index lying on the cycle
    std::optional<std::size_t> cycle_length;
};

/// Iterates the padded endomap mod p^digits starting from x0.
Orbit orbit(const MapExpr& e, Prime p, const BigInt& x0, std::size_t steps, unsigned digits,
            std::uint64_t budget = kDefaultBudget);

/// Exact point (x mod p^(n+k)) / p^(n+k), (f(x) mod p^k) / p^k.
struct PlotPoint {
    std::uint64_t xnum, xden, ynum, yden;
    unsigned level;
};

struct PlotSet {
    Prime p = 2;
    unsigned n = 1;
    unsigned k_min = 1;
    unsigned k_max = 1;
    std::vector<PlotPoint> points;  // duplicates (as rationals) removed
};

/// E_k(f) for a single level k.
PlotSet plot_points(const MapExpr& e, Prime p, unsigned n, unsigned k,
                    std::uint64_t budget = kDefaultBudget);

/// Union of E_k(f) for k = 1 .. k_max.
PlotSet plot_points_upto(const MapExpr& e, Prime p, unsigned n, unsigned k_max,
                         std::uint64_t budget = kDefaultBudget);

struct BoxCount {
    std::uint64_t grid = 1;
    std::uint64_t covered = 0;
    std::vector<unsigned char> cells;  // row-major, row 0 = top (y near 1)

    double fraction() const {
        return static_cast<double>(covered) / (static_cast<double>(grid) * static_cast<double>(grid));
    }
};

BoxCount box_count(const PlotSet& ps, std::uint64_t grid);

/// CSV with header `xnum,xden,ynum,yden`.
std::string plot_csv(const PlotSet& ps);

/// Plain PGM (P2), 1 = covered.
std::string raster_pgm(const BoxCount& b);

}  // namespace padyn
