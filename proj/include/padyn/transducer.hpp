#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "padyn/padic.hpp"

namespace padyn {

using Word = std::vector<unsigned>;

/// Finite letter-to-word transducer over the alphabet {0..p-1}.
///
/// States are dense indices; names are kept for printing. Only accessible
/// states are stored: unreachable ones are dropped at construction and noted
/// in warnings().
class Automaton {
public:
    struct Row {
        std::string from;
        unsigned letter;
        std::string to;
        Word output;
    };

    /// Validates totality and membership of every referenced state.
    static Automaton build(Prime p, std::vector<std::string> states, const std::string& initial,
                           const std::vector<Row>& rows);

    Prime prime() const noexcept { return p_; }
    std::size_t state_count() const noexcept { return names_.size(); }
    std::size_t initial() const noexcept { return initial_; }
    const std::string& name(std::size_t s) const { return names_.at(s); }
    std::size_t next(std::size_t s, unsigned letter) const { return next_[s * p_ + letter]; }
    const Word& output(std::size_t s, unsigned letter) const { return out_[s * p_ + letter]; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    /// Every output word has length exactly 1.
    bool synchronous() const;

    /// Same states, transitions, outputs and initial state (names ignored).
    bool same_machine(const Automaton& other) const;

    /// Serializes to the line-oriented file format accepted by parse_automaton.
    std::string to_text() const;

private:
    Automaton() = default;
    Prime p_ = 2;
    std::vector<std::string> names_;
    std::size_t initial_ = 0;
    std::vector<std::size_t> next_;
    std::vector<Word> out_;
    std::vector<std::string> warnings_;
};

struct RunTrace {
    std::vector<std::size_t> states;  // state before each consumed letter
    Word output;
    std::size_t consumed = 0;
};

struct NondegeneracyVerdict {
    bool nondegenerate = true;
    std::optional<std::size_t> witness;  // a state on an all-empty-output cycle
};

/// Parses the automaton file format:
///
///     p <prime>
///     states <id> <id> ...
///     initial <id>
///     <state> <letter> -> <state> / <output>     (one per pair; '-' = empty word)
///
/// '#' starts a comment. Output letters are single digits, or '.'-separated
/// numbers when p > 10.
Automaton parse_automaton(std::string_view text);
Automaton load_automaton(const std::string& path);

/// C^(n): n counting states that swallow their input, then the identity.
Automaton make_shift_automaton(unsigned n, Prime p);

RunTrace run(const Automaton& a, std::span<const unsigned> word);

NondegeneracyVerdict check_nondegenerate(const Automaton& a);

/// Minimum emitted length over all inputs of length L.
std::size_t guaranteed_output_length(const Automaton& a, std::size_t input_len);

/// sup_L (L - guaranteed_output_length(L)); nullopt when unbounded.
std::optional<std::size_t> max_output_deficit(const Automaton& a);

/// Feeds the K digits of x; the result carries the guaranteed output digits.
PadicApprox induced_map(const Automaton& a, const PadicApprox& x);

}  // namespace padyn
