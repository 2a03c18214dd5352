#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "padyn/dynamics.hpp"
#include "padyn/mahler.hpp"

namespace padyn::cli {

struct AnalysisConfig {
    std::string command;
    Prime p = 2;
    unsigned precision = 16;
    std::string map_text;
    std::string automaton_file;
    unsigned n = 1;
    std::size_t m_max = 32;
    unsigned k_max = 4;
    std::vector<std::uint64_t> grids{256};
    std::uint64_t budget = kDefaultBudget;
    bool strict_m1 = false;
    std::string json_path, csv_path, pgm_path;
    // orbit / automaton run
    std::string x0 = "0";
    std::size_t steps = 16;
    unsigned digits = 4;
    std::string word;

    /// The expression analysed: --map, or auto("file")(x) for --file.
    std::string effective_map() const;
};

struct CensusEntry {
    unsigned k = 0;
    Census census;
};

struct CycleEntry {
    unsigned digits = 0;
    CycleReport report;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> collision;
};

struct PlotSummary {
    unsigned n = 1;
    unsigned k_max = 1;
    std::size_t point_count = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> covered;  // (grid, covered cells)
};

struct Report {
    AnalysisConfig config;
    std::optional<MahlerCoeffs> coefficients;
    std::vector<Verdict> verdicts;
    std::vector<CensusEntry> census;
    std::vector<CycleEntry> cycles;
    std::optional<PlotSummary> plotset;
    std::optional<Orbit> orbit;
    std::optional<nlohmann::json> automaton;
    std::vector<std::string> notes;
    double elapsed_ms = 0;
};

enum class Format { Text, Json };

/// Deterministic apart from the "timing" field.
std::string render_report(const Report& r, Format format);

nlohmann::json report_json(const Report& r);

/// Runs one command line (args exclude the program name). Exit codes:
/// 0 success (violated conditions included), 2 configuration or input error,
/// 3 budget or precision exhausted.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace padyn::cli
