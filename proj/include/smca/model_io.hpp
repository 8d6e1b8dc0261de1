#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "smca/chain.hpp"
#include "smca/rabin.hpp"

namespace smca {

// Explicit-state text formats. All parsers report failures as ParseError
// with the 1-based line number; blank lines are permitted and skipped.
//
//   .tra   header "<n_states> <n_transitions>", then one "src dst prob"
//          line per transition.
//   .lab   header of id="name" pairs, then one "state: id id ..." line per
//          labeled state.
//   .rew   one "state reward" line per state with a nonzero reward.
//   .init  one "state prob" line per initial state.

/// Parses a .tra stream into a fresh Data with n_states and rows set.
MarkovChain::Data parse_tra(std::istream& in, const std::string& source = "<tra>");
/// Parses a .lab stream into data.label_names / data.state_labels.
void parse_lab(std::istream& in, MarkovChain::Data& data, const std::string& source = "<lab>");
void parse_rew(std::istream& in, MarkovChain::Data& data, const std::string& source = "<rew>");
void parse_init(std::istream& in, MarkovChain::Data& data, const std::string& source = "<init>");

struct ChainFiles {
    std::string tra;
    std::string lab;
    std::optional<std::string> init;   // absent: all mass on state 0
    std::optional<std::string> rew;    // absent: all rewards 0
};

MarkovChain load_chain(const ChainFiles& files, double declared_pmin = 0.0);

// Serializers emit the renormalized chain with shortest round-tripping
// number formatting, so parse(serialize(chain)) reproduces every
// probability bit for bit.
void write_tra(std::ostream& out, const MarkovChain& chain);
void write_lab(std::ostream& out, const MarkovChain& chain);
void write_rew(std::ostream& out, const MarkovChain& chain);
void write_init(std::ostream& out, const MarkovChain& chain);

/// Writes <prefix>.tra and <prefix>.lab, plus <prefix>.rew when the chain
/// carries rewards and <prefix>.init when the initial distribution is not
/// concentrated on state 0.
void save_chain(const std::string& prefix, const MarkovChain& chain);

/// Parses a deterministic complete state-based Rabin automaton from a HOA
/// stream. Supported headers: HOA: v1, States:, Start: (single), AP: (at
/// most 16 quoted names), Acceptance: (Rabin pairs "(Fin(2i) & Inf(2i+1))"
/// joined by |), optional acc-name: Rabin k; name:, tool: and properties:
/// are ignored. Body: "State: <id> {sets}" with "[guard] dst" edges.
RabinAutomaton parse_hoa(std::istream& in, const std::string& source = "<hoa>");
RabinAutomaton load_hoa(const std::string& path);

} // namespace smca
