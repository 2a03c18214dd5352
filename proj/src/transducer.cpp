#include "padyn/transducer.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <sstream>

namespace padyn {

namespace {

std::size_t index_or_throw(const std::map<std::string, std::size_t>& index, const std::string& id,
                           std::size_t line = 0) {
    auto it = index.find(id);
    if (it == index.end()) throw ParseError("unknown state '" + id + "'", line);
    return it->second;
}

}  // namespace

Automaton Automaton::build(Prime p, std::vector<std::string> states, const std::string& initial,
                           const std::vector<Row>& rows) {
    require_prime(p);
    if (states.empty()) throw ParseError("automaton has no states", 0);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!index.emplace(states[i], i).second) {
            throw ParseError("duplicate state '" + states[i] + "'", 0);
        }
    }
    const std::size_t n = states.size();
    const std::size_t init = index_or_throw(index, initial);

    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> next(n * p, unset);
    std::vector<Word> out(n * p);
    for (const Row& r : rows) {
        const std::size_t from = index_or_throw(index, r.from);
        const std::size_t to = index_or_throw(index, r.to);
        if (r.letter >= p) {
            throw ParseError("letter " + std::to_string(r.letter) + " out of range", 0);
        }
        for (unsigned d : r.output) {
            if (d >= p) throw ParseError("output letter " + std::to_string(d) + " out of range", 0);
        }
        const std::size_t slot = from * p + r.letter;
        if (next[slot] != unset) {
            throw ParseError("duplicate transition (" + r.from + ", " + std::to_string(r.letter) + ")",
                             0);
        }
        next[slot] = to;
        out[slot] = r.output;
    }
    for (std::size_t s = 0; s < n; ++s) {
        for (unsigned a = 0; a < p; ++a) {
            if (next[s * p + a] == unset) {
                throw ParseError("missing transition (" + states[s] + ", " + std::to_string(a) + ")",
                                 0);
            }
        }
    }

    // Keep only states reachable from the initial one.
    std::vector<std::size_t> remap(n, unset);
    std::vector<std::size_t> order;
    std::queue<std::size_t> todo;
    remap[init] = 0;
    order.push_back(init);
    todo.push(init);
    while (!todo.empty()) {
        const std::size_t s = todo.front();
        todo.pop();
        for (unsigned a = 0; a < p; ++a) {
            const std::size_t t = next[s * p + a];
            if (remap[t] == unset) {
                remap[t] = order.size();
                order.push_back(t);
                todo.push(t);
            }
        }
    }

    Automaton m;
    m.p_ = p;
    m.initial_ = 0;
    for (std::size_t s : order) m.names_.push_back(states[s]);
    m.next_.resize(order.size() * p);
    m.out_.resize(order.size() * p);
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (unsigned a = 0; a < p; ++a) {
            m.next_[i * p + a] = remap[next[order[i] * p + a]];
            m.out_[i * p + a] = out[order[i] * p + a];
        }
    }
    for (std::size_t s = 0; s < n; ++s) {
        if (remap[s] == unset) m.warnings_.push_back("ignoring inaccessible state '" + states[s] + "'");
    }
    return m;
}

bool Automaton::synchronous() const {
    return std::all_of(out_.begin(), out_.end(), [](const Word& w) { return w.size() == 1; });
}

bool Automaton::same_machine(const Automaton& o) const {
    return p_ == o.p_ && initial_ == o.initial_ && next_ == o.next_ && out_ == o.out_;
}

std::string Automaton::to_text() const {
    std::ostringstream os;
    os << "p " << p_ << "\nstates";
    for (const auto& n : names_) os << ' ' << n;
    os << "\ninitial " << names_[initial_] << '\n';
    for (std::size_t s = 0; s < state_count(); ++s) {
        for (unsigned a = 0; a < p_; ++a) {
            os << names_[s] << ' ' << a << " -> " << names_[next(s, a)] << " / ";
            const Word& w = output(s, a);
            if (w.empty()) os << '-';
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (p_ > 10 && i > 0) os << '.';
                os << w[i];
            }
            os << '\n';
        }
    }
    return os.str();
}

// ------------------------------------------------------------------ parsing

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> toks;
    for (std::string t; is >> t;) toks.push_back(t);
    return toks;
}

unsigned parse_uint(const std::string& tok, std::size_t line) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
        tok.size() > 9) {
        throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
    }
    return static_cast<unsigned>(std::stoul(tok));
}

Word parse_output(const std::string& tok, Prime p, std::size_t line) {
    Word w;
    if (tok == "-") return w;
    if (p > 10) {
        std::istringstream is(tok);
        for (std::string part; std::getline(is, part, '.');) w.push_back(parse_uint(part, line));
    } else {
        for (char c : tok) {
            if (c < '0' || c > '9') throw ParseError("bad output letter '" + std::string(1, c) + "'", line);
            w.push_back(static_cast<unsigned>(c - '0'));
        }
    }
    for (unsigned d : w) {
        if (d >= p) throw ParseError("output letter " + std::to_string(d) + " out of range", line);
    }
    return w;
}

}  // namespace

Automaton parse_automaton(std::string_view text) {
    std::istringstream is{std::string(text)};
    std::optional<Prime> p;
    std::vector<std::string> states;
    std::optional<std::string> initial;
    std::vector<Automaton::Row> rows;
    std::vector<std::size_t> row_lines;

    std::size_t lineno = 0;
    int header = 0;
    for (std::string line; std::getline(is, line);) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto toks = tokenize(line);
        if (toks.empty()) continue;
        if (header == 0) {
            if (toks.size() != 2 || toks[0] != "p") throw ParseError("expected 'p <prime>'", lineno);
            const unsigned value = parse_uint(toks[1], lineno);
            if (!is_prime(value)) {
                throw ParseError("alphabet size " + toks[1] + " is not prime", lineno);
            }
            p = value;
            ++header;
        } else if (header == 1) {
            if (toks.size() < 2 || toks[0] != "states") throw ParseError("expected 'states <id> ...'", lineno);
            states.assign(toks.begin() + 1, toks.end());
            ++header;
        } else if (header == 2) {
            if (toks.size() != 2 || toks[0] != "initial") throw ParseError("expected 'initial <id>'", lineno);
            initial = toks[1];
            ++header;
        } else {
            if (toks.size() != 6 || toks[2] != "->" || toks[4] != "/") {
                throw ParseError("expected '<state> <letter> -> <state> / <output>'", lineno);
            }
            rows.push_back({toks[0], parse_uint(toks[1], lineno), toks[3], parse_output(toks[5], *p, lineno)});
            row_lines.push_back(lineno);
        }
    }
    if (header < 3) throw ParseError("incomplete header", lineno);

    // Re-check rows individually first so errors carry the offending line.
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) index.emplace(states[i], i);
    if (!index.count(*initial)) throw ParseError("unknown state '" + *initial + "'", 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        index_or_throw(index, rows[i].from, row_lines[i]);
        index_or_throw(index, rows[i].to, row_lines[i]);
        if (rows[i].letter >= *p) {
            throw ParseError("letter " + std::to_string(rows[i].letter) + " out of range", row_lines[i]);
        }
    }
    return Automaton::build(*p, std::move(states), *initial, rows);
}

Automaton load_automaton(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open automaton file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_automaton(ss.str());
}

Automaton make_shift_automaton(unsigned n, Prime p) {
    require_prime(p);
    std::vector<std::string> names;
    for (unsigned i = 0; i <= n; ++i) names.push_back("s" + std::to_string(i));
    std::vector<Automaton::Row> rows;
    for (unsigned i = 0; i <= n; ++i) {
        for (unsigned a = 0; a < p; ++a) {
            if (i < n) rows.push_back({names[i], a, names[i + 1], {}});
            else rows.push_back({names[i], a, names[i], {a}});
        }
    }
    return Automaton::build(p, names, names[0], rows);
}

// ---------------------------------------------------------------- execution

RunTrace run(const Automaton& a, std::span<const unsigned> word) {
    RunTrace trace;
    std::size_t s = a.initial();
    for (unsigned letter : word) {
        if (letter >= a.prime()) {
            throw ConfigError("input letter " + std::to_string(letter) + " out of range");
        }
        trace.states.push_back(s);
        const Word& w = a.output(s, letter);
        trace.output.insert(trace.output.end(), w.begin(), w.end());
        s = a.next(s, letter);
        ++trace.consumed;
    }
    return trace;
}

NondegeneracyVerdict check_nondegenerate(const Automaton& a) {
    // Cycle search restricted to empty-output edges; all stored states are accessible.
    enum Color : unsigned char { White, Grey, Black };
    const std::size_t n = a.state_count();
    const Prime p = a.prime();
    std::vector<Color> color(n, White);
    for (std::size_t root = 0; root < n; ++root) {
        if (color[root] != White) continue;
        std::vector<std::pair<std::size_t, unsigned>> stack{{root, 0}};
        color[root] = Grey;
        while (!stack.empty()) {
            auto& [s, letter] = stack.back();
            if (letter == p) {
                color[s] = Black;
                stack.pop_back();
                continue;
            }
            const unsigned a_letter = letter++;
            if (!a.output(s, a_letter).empty()) continue;
            const std::size_t t = a.next(s, a_letter);
            if (color[t] == Grey) return {false, t};
            if (color[t] == White) {
                color[t] = Grey;
                stack.emplace_back(t, 0);
            }
        }
    }
    return {};
}

std::size_t guaranteed_output_length(const Automaton& a, std::size_t input_len) {
    if (auto v = check_nondegenerate(a); !v.nondegenerate) {
        throw ConfigError("automaton is degenerate at state '" + a.name(*v.witness) + "'");
    }
    constexpr auto inf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> best(a.state_count(), inf);
    best[a.initial()] = 0;
    for (std::size_t step = 0; step < input_len; ++step) {
        std::vector<std::size_t> next(a.state_count(), inf);
        for (std::size_t s = 0; s < a.state_count(); ++s) {
            if (best[s] == inf) continue;
            for (unsigned l = 0; l < a.prime(); ++l) {
                auto& slot = next[a.next(s, l)];
                slot = std::min(slot, best[s] + a.output(s, l).size());
            }
        }
        best = std::move(next);
    }
    return *std::min_element(best.begin(), best.end());
}

std::optional<std::size_t> max_output_deficit(const Automaton& a) {
    // Shortest paths with edge weight |output| - 1; a negative cycle means
    // the deficit grows without bound.
    const std::size_t n = a.state_count();
    constexpr auto inf = std::numeric_limits<long long>::max();
    std::vector<long long> dist(n, inf);
    dist[a.initial()] = 0;
    for (std::size_t round = 0; round <= n; ++round) {
        bool changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (dist[s] == inf) continue;
            for (unsigned l = 0; l < a.prime(); ++l) {
                const long long w = static_cast<long long>(a.output(s, l).size()) - 1;
                auto& d = dist[a.next(s, l)];
                if (dist[s] + w < d) {
                    d = dist[s] + w;
                    changed = true;
                }
            }
        }
        if (!changed) {
            const long long lowest = *std::min_element(dist.begin(), dist.end());
            return static_cast<std::size_t>(-std::min(lowest, 0LL));
        }
    }
    return std::nullopt;
}

PadicApprox induced_map(const Automaton& a, const PadicApprox& x) {
    if (x.prime() != a.prime()) throw ConfigError("automaton and argument use different primes");
    const std::size_t k_out = guaranteed_output_length(a, x.precision());
    if (k_out == 0) throw PrecisionError("automaton output exhausts precision");
    const auto digits = x.digits();
    const RunTrace t = run(a, digits);
    return PadicApprox::from_digits(std::span(t.output).first(k_out), a.prime());
}

}  // namespace padyn
