#include "padyn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

namespace padyn::cli {

using nlohmann::json;

std::string AnalysisConfig::effective_map() const {
    if (!automaton_file.empty()) return "auto(\"" + automaton_file + "\")(x)";
    return map_text;
}

namespace {

std::string kind_tag(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::SatisfiedUpTo: return "satisfied_up_to";
        case Verdict::Kind::ViolatedAt: return "violated_at";
        case Verdict::Kind::UndecidableAt: return "undecidable_at";
    }
    return "";
}

json valuation_json(const Valuation& v) {
    return {{"kind", v.is_exact() ? "exact" : "at_least"}, {"value", v.value()}};
}

json verdict_json(const Verdict& v) {
    json j{{"kind", kind_tag(v.kind)},
           {"total", v.total},
           {"definitive", v.definitive},
           {"sufficient_only", v.sufficient_only},
           {"note", v.note},
           {"failures", v.failures}};
    if (v.satisfied()) {
        j["bound"] = v.index;
    } else {
        j["m"] = v.index;
        j["condition"] = v.condition;
        j["observed_valuation"] = v.observed ? valuation_json(*v.observed) : json(nullptr);
        j["required_valuation"] = v.required;
    }
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file '" + path + "'");
    out << content;
    if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

constexpr std::size_t kMaxListedMembers = 64;
constexpr std::size_t kMaxListedCoeffs = 33;

}  // namespace

json report_json(const Report& r) {
    const auto& c = r.config;
    json j;
    j["config"] = {{"command", c.command},       {"p", c.p},
                   {"K", c.precision},           {"map", c.effective_map()},
                   {"n", c.n},                   {"mmax", c.m_max},
                   {"kmax", c.k_max},            {"grid", c.grids},
                   {"budget", c.budget},         {"strict_m1", c.strict_m1}};

    j["coefficients"] = json::array();
    if (r.coefficients) {
        const auto& co = *r.coefficients;
        const BigInt modulus = power(co.p, co.precision);
        for (std::size_t m = 0; m < co.coeffs.size(); ++m) {
            j["coefficients"].push_back({{"m", m},
                                         {"residue", co.coeffs[m].get_str()},
                                         {"balanced", balanced(co.coeffs[m], modulus).get_str()},
                                         {"valuation", valuation_json(co.valuations[m])}});
        }
    }

    j["verdicts"] = json::object();
    for (const auto& v : r.verdicts) j["verdicts"][v.name] = verdict_json(v);

    j["census"] = json::array();
    for (const auto& e : r.census) {
        json h = json::array();
        for (auto [count, points] : e.census.histogram()) h.push_back({count, points});
        j["census"].push_back({{"k", e.k},
                               {"n", c.n},
                               {"expected", e.census.expected},
                               {"total", e.census.total},
                               {"uniform", e.census.uniform},
                               {"witness", e.census.witness ? json(*e.census.witness) : json(nullptr)},
                               {"histogram", h}});
    }

    j["cycles"] = json::array();
    for (const auto& e : r.cycles) {
        json lengths = json::array();
        json cycles = json::array();
        for (const auto& cyc : e.report.cycles) {
            lengths.push_back(cyc.size());
            cycles.push_back(cyc.size() <= kMaxListedMembers ? json(cyc) : json(nullptr));
        }
        json collision = nullptr;
        if (e.collision) collision = {e.collision->first, e.collision->second};
        j["cycles"].push_back({{"digits", e.digits},
                               {"cycle_count", e.report.cycles.size()},
                               {"unique", e.report.unique_cycle()},
                               {"cycle_lengths", lengths},
                               {"cycles", cycles},
                               {"tail_nodes", e.report.tail_nodes},
                               {"tail_histogram", e.report.tail_histogram},
                               {"collision", collision}});
    }

    if (r.plotset) {
        json grids = json::array();
        for (auto [g, covered] : r.plotset->covered) {
            grids.push_back({{"grid", g},
                             {"covered", covered},
                             {"fraction", static_cast<double>(covered) / (static_cast<double>(g) * g)}});
        }
        j["plotset"] = {{"n", r.plotset->n},
                        {"k_max", r.plotset->k_max},
                        {"points", r.plotset->point_count},
                        {"grids", grids}};
    } else {
        j["plotset"] = nullptr;
    }

    if (r.orbit) {
        json values = json::array();
        for (const auto& v : r.orbit->values) values.push_back(v.get_str());
        j["orbit"] = {{"values", values},
                      {"cycle_entry", r.orbit->cycle_entry ? json(*r.orbit->cycle_entry) : json(nullptr)},
                      {"cycle_length", r.orbit->cycle_length ? json(*r.orbit->cycle_length) : json(nullptr)}};
    }
    if (r.automaton) j["automaton"] = *r.automaton;
    j["notes"] = r.notes;
    j["timing"] = {{"elapsed_ms", r.elapsed_ms}};
    return j;
}

namespace {

std::string render_text(const Report& r) {
    std::ostringstream os;
    const auto& c = r.config;
    os << "padyn " << c.command << ": p=" << c.p << " K=" << c.precision;
    if (!c.effective_map().empty()) os << " map=" << c.effective_map();
    os << " n=" << c.n << '\n';

    if (r.coefficients) {
        const auto& co = *r.coefficients;
        const BigInt modulus = power(co.p, co.precision);
        os << "\nMahler coefficients (mod " << co.p << '^' << co.precision << ")\n";
        const std::size_t shown = std::min(co.coeffs.size(), kMaxListedCoeffs);
        const char* more = shown < co.coeffs.size() ? ",... (full list in --json)" : "";
        os << "a_0..a_" << co.max_index() << " = ";
        for (std::size_t m = 0; m < shown; ++m) os << (m ? "," : "") << balanced(co.coeffs[m], modulus).get_str();
        os << more << "\nvaluations = ";
        for (std::size_t m = 0; m < shown; ++m) os << (m ? "," : "") << co.valuations[m].str();
        os << more << '\n';
    }

    if (!r.verdicts.empty()) {
        os << "\nVerdicts\n";
        for (const auto& v : r.verdicts) os << "  " << std::left << std::setw(18) << v.name << v.summary() << '\n';
    }

    if (!r.census.empty()) {
        os << "\nPreimage census (level maps Z/p^(nk) -> Z/p^(n(k-1)))\n";
        for (const auto& e : r.census) {
            os << "  k=" << e.k << ": " << (e.census.uniform ? "Uniform(" : "NotUniform(expected ")
               << e.census.expected << ")";
            if (e.census.witness) {
                os << " witness point " << *e.census.witness << " has " << e.census.counts[*e.census.witness]
                   << " preimages";
            }
            os << '\n';
        }
    }

    if (!r.cycles.empty()) {
        os << "\nCycles of the zero-padded endomap mod p^m\n";
        for (const auto& e : r.cycles) {
            os << "  m=" << e.digits << ": " << e.report.cycles.size() << " cycle(s)"
               << (e.report.unique_cycle() ? " UniqueCycle" : "") << ", lengths [";
            for (std::size_t i = 0; i < e.report.cycles.size(); ++i) {
                os << (i ? "," : "") << e.report.cycles[i].size();
            }
            os << "], tail nodes " << e.report.tail_nodes;
            if (e.collision) os << ", NotBijective witness x=" << e.collision->first << "," << e.collision->second;
            os << '\n';
            if (e.report.cycles.size() <= 8) {
                for (const auto& cyc : e.report.cycles) {
                    if (cyc.size() > 16) continue;
                    os << "    {";
                    for (std::size_t i = 0; i < cyc.size(); ++i) os << (i ? "," : "") << cyc[i];
                    os << "}\n";
                }
            }
        }
    }

    if (r.plotset) {
        os << "\nPlot set E(f), k=1.." << r.plotset->k_max << ": " << r.plotset->point_count << " points\n";
        for (auto [g, covered] : r.plotset->covered) {
            os << "  G=" << g << ": " << covered << " of " << g * g << " cells covered (fraction "
               << static_cast<double>(covered) / (static_cast<double>(g) * g) << ")\n";
        }
    }

    if (r.orbit) {
        os << "\nOrbit: ";
        for (std::size_t i = 0; i < r.orbit->values.size(); ++i) os << (i ? "," : "") << r.orbit->values[i].get_str();
        os << '\n';
        if (r.orbit->cycle_entry) {
            os << "  enters a cycle of length " << *r.orbit->cycle_length << " at step " << *r.orbit->cycle_entry
               << '\n';
        }
    }

    if (r.automaton) os << "\nAutomaton\n" << r.automaton->dump(2) << '\n';

    for (const auto& n : r.notes) os << "note: " << n << '\n';
    os << "\nelapsed " << std::fixed << std::setprecision(1) << r.elapsed_ms << " ms\n";
    return os.str();
}

// ------------------------------------------------------------- pipelines

MapExpr load_map(const AnalysisConfig& c) {
    const std::string text = c.effective_map();
    if (text.empty()) throw ConfigError("a map is required (--map or --file)");
    return parse_map(text);
}

void add_coefficients(Report& r, const MapExpr& e) {
    const auto& c = r.config;
    r.coefficients = mahler_coeffs(e, c.p, c.m_max, c.precision);
}

Verdict insufficient(const std::string& name, const AnalysisConfig& c) {
    Verdict v;
    v.name = name;
    v.kind = Verdict::Kind::UndecidableAt;
    v.index = c.m_max;
    v.condition = "insufficient coefficients: need M >= p^n";
    v.sufficient_only = true;
    return v;
}

void add_coefficient_verdicts(Report& r) {
    const auto& co = *r.coefficients;
    const auto& c = r.config;
    r.verdicts.push_back(check_lipschitz_mp(co));
    r.verdicts.push_back(check_lipschitz_ergodic(co, c.strict_m1));
    r.verdicts.push_back(check_complex_shift_bound(co, c.n));
    r.verdicts.push_back(check_cs_mp(co, c.n));
    try {
        r.verdicts.push_back(check_cs_ergodic(co, c.n));
    } catch (const ConfigError&) {
        r.verdicts.push_back(insufficient("cs_ergodic", c));
    }
}

void add_census(Report& r, const MapExpr& e) {
    const auto& c = r.config;
    for (unsigned k = 2; k <= c.k_max; ++k) {
        r.census.push_back({k, preimage_census(level_map(e, c.p, c.n, k, c.budget))});
    }
}

void add_cycles(Report& r, const MapExpr& e, bool by_level) {
    const auto& c = r.config;
    for (unsigned k = 1; k <= c.k_max; ++k) {
        const unsigned digits = by_level ? c.n * k : k;
        const auto m = padded_endomap(e, c.p, digits, c.budget);
        r.cycles.push_back({digits, cycle_report(m.table.values), find_collision(m.table.values)});
    }
}

void add_plotset(Report& r, const MapExpr& e) {
    const auto& c = r.config;
    const PlotSet ps = plot_points_upto(e, c.p, c.n, c.k_max, c.budget);
    PlotSummary s{c.n, c.k_max, ps.points.size(), {}};
    std::optional<BoxCount> last;
    for (auto g : c.grids) {
        last = box_count(ps, g);
        s.covered.emplace_back(g, last->covered);
    }
    r.plotset = s;
    if (!c.csv_path.empty()) write_file(c.csv_path, plot_csv(ps));
    if (!c.pgm_path.empty() && last) write_file(c.pgm_path, raster_pgm(*last));
}

void add_one_sided_note(Report& r) {
    const Verdict* ergodic = nullptr;
    for (const auto& v : r.verdicts) {
        if (v.name == "cs_ergodic") ergodic = &v;
    }
    const bool all_unique = std::all_of(r.cycles.begin(), r.cycles.end(),
                                        [](const CycleEntry& e) { return e.report.unique_cycle(); });
    if (ergodic && !r.cycles.empty() && ergodic->satisfied() != all_unique) {
        r.notes.push_back(
            "the Mahler ergodicity condition and the unique-cycle test disagree; both are sufficient-only "
            "diagnostics (cycles use the zero-padded lift), so neither refutes the other");
    }
}

Verdict run_check(const std::string& which, const MahlerCoeffs& co, const AnalysisConfig& c) {
    if (which == "lipschitz-mp") return check_lipschitz_mp(co);
    if (which == "lipschitz-ergodic") return check_lipschitz_ergodic(co, c.strict_m1);
    if (which == "cs") return check_complex_shift_bound(co, c.n);
    if (which == "cs-mp") return check_cs_mp(co, c.n);
    if (which == "cs-ergodic") return check_cs_ergodic(co, c.n);
    if (which == "bernoulli") return check_bernoulli_properties(co, c.n);
    throw ConfigError("unknown check '" + which + "'");
}

json automaton_summary(const Automaton& a) {
    const auto nd = check_nondegenerate(a);
    json j{{"p", a.prime()},
           {"states", a.state_count()},
           {"synchronous", a.synchronous()},
           {"nondegenerate", nd.nondegenerate},
           {"warnings", a.warnings()}};
    if (nd.witness) j["degenerate_at"] = a.name(*nd.witness);
    if (nd.nondegenerate) {
        const auto d = max_output_deficit(a);
        j["lookahead"] = d ? json(*d) : json(nullptr);
    }
    return j;
}

Report execute(AnalysisConfig cfg, const std::string& check_name, const std::string& automaton_action) {
    const auto start = std::chrono::steady_clock::now();
    require_prime(cfg.p);
    if (cfg.precision < 1) throw ConfigError("K must be at least 1");
    if (cfg.m_max < 1) throw ConfigError("mmax must be at least 1");
    if (cfg.k_max < 1) throw ConfigError("kmax must be at least 1");
    Report r;
    r.config = cfg;
    const std::string& cmd = cfg.command;

    if (cmd == "automaton") {
        if (cfg.automaton_file.empty()) throw ConfigError("--file is required");
        const Automaton a = load_automaton(cfg.automaton_file);
        json j = automaton_summary(a);
        if (automaton_action == "run") {
            Word w;
            for (char ch : cfg.word) {
                if (ch < '0' || ch > '9') throw ConfigError("--word must be a string of digits");
                w.push_back(static_cast<unsigned>(ch - '0'));
            }
            const RunTrace t = run(a, w);
            json states = json::array();
            for (auto s : t.states) states.push_back(a.name(s));
            std::string out;
            for (auto d : t.output) out += std::to_string(d);
            j["run"] = {{"input", cfg.word}, {"states", states}, {"output", out}, {"consumed", t.consumed}};
        }
        r.automaton = j;
    } else {
        const MapExpr e = load_map(cfg);
        r.notes.push_back("lookahead bound l = " + std::to_string(lookahead_bound(e, cfg.p)));
        if (cmd == "analyze") {
            add_coefficients(r, e);
            add_coefficient_verdicts(r);
            add_census(r, e);
            add_cycles(r, e, true);
            add_plotset(r, e);
            add_one_sided_note(r);
        } else if (cmd == "mahler") {
            add_coefficients(r, e);
        } else if (cmd == "check") {
            add_coefficients(r, e);
            r.verdicts.push_back(run_check(check_name, *r.coefficients, cfg));
        } else if (cmd == "preimages") {
            add_census(r, e);
        } else if (cmd == "cycles") {
            add_cycles(r, e, false);
        } else if (cmd == "orbit") {
            r.orbit = orbit(e, cfg.p, BigInt(cfg.x0), cfg.steps, cfg.digits, cfg.budget);
        } else if (cmd == "plotset") {
            add_plotset(r, e);
        } else {
            throw ConfigError("unknown subcommand '" + cmd + "'");
        }
    }
    r.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::uint64_t budget_from_env() {
    if (const char* env = std::getenv("PADYN_BUDGET")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError("PADYN_BUDGET must be a non-negative integer");
        }
    }
    return kDefaultBudget;
}

void add_common(CLI::App* sub, AnalysisConfig& c, std::optional<std::uint64_t>& budget) {
    sub->add_option("--p", c.p, "prime");
    sub->add_option("--K", c.precision, "working precision in base-p digits");
    sub->add_option("--map", c.map_text, "map expression");
    sub->add_option("--file", c.automaton_file, "automaton file");
    sub->add_option("--n", c.n, "complex-shift level");
    sub->add_option("--mmax", c.m_max, "largest Mahler index");
    sub->add_option("--kmax", c.k_max, "oracle depth");
    sub->add_option("--grid", c.grids, "box-counting grid size (repeatable)");
    sub->add_option("--budget", budget, "enumeration budget (table entries)");
    sub->add_option("--json", c.json_path, "write the JSON report here");
    sub->add_option("--csv", c.csv_path, "write plot points as CSV");
    sub->add_option("--pgm", c.pgm_path, "write the box-count raster as PGM");
    sub->add_flag("--strict-m1", c.strict_m1, "apply the ergodic tail clause from m=1");
    sub->add_option("--x0", c.x0, "orbit start");
    sub->add_option("--steps", c.steps, "orbit length");
    sub->add_option("--digits", c.digits, "orbit modulus p^digits");
    sub->add_option("--word", c.word, "input word for automaton run");
}

}  // namespace

std::string render_report(const Report& r, Format format) {
    if (format == Format::Json) return report_json(r).dump(2) + "\n";
    return render_text(r);
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"p-adic dynamics analyser", "padyn"};
    app.require_subcommand(1);
    AnalysisConfig cfg;
    std::optional<std::uint64_t> budget;
    std::string check_name;
    std::string automaton_action;

    for (const char* name : {"analyze", "mahler", "preimages", "cycles", "orbit", "plotset"}) {
        add_common(app.add_subcommand(name), cfg, budget);
    }
    auto* check = app.add_subcommand("check", "check one coefficient condition");
    check->require_subcommand(1);
    for (const char* name : {"lipschitz-mp", "lipschitz-ergodic", "cs", "cs-mp", "cs-ergodic", "bernoulli"}) {
        add_common(check->add_subcommand(name), cfg, budget);
    }
    auto* autom = app.add_subcommand("automaton", "inspect an automaton file");
    autom->require_subcommand(1);
    for (const char* name : {"run", "check"}) add_common(autom->add_subcommand(name), cfg, budget);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    auto* top = app.get_subcommands().front();
    cfg.command = top->get_name();
    if (!top->get_subcommands().empty()) {
        const std::string leaf = top->get_subcommands().front()->get_name();
        if (cfg.command == "check") check_name = leaf;
        else automaton_action = leaf;
    }

    try {
        cfg.budget = budget ? *budget : budget_from_env();
        const Report r = execute(cfg, check_name, automaton_action);
        out << render_report(r, Format::Text);
        if (!cfg.json_path.empty()) write_file(cfg.json_path, render_report(r, Format::Json));
        return 0;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const BudgetError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const PrecisionError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace padyn::cli
