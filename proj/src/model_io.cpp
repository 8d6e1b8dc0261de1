#include "smca/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "smca/errors.hpp"

namespace smca {

namespace {

struct LineReader {
    std::istream& in;
    const std::string& source;
    std::uint64_t line_no = 0;

    /// Next non-blank line, stripped of a trailing '\r'.
    std::optional<std::string> next() {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") != std::string::npos) return line;
        }
        return std::nullopt;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source, line_no, what); }
};

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(std::move(tok));
    return tokens;
}

std::uint64_t parse_uint(const LineReader& rd, const std::string& tok, const char* what) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        rd.fail(std::string("expected ") + what + ", got '" + tok + "'");
    return value;
}

double parse_double(const LineReader& rd, const std::string& tok, const char* what) {
    char* end = nullptr;
    const double value = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty())
        rd.fail(std::string("expected ") + what + ", got '" + tok + "'");
    return value;
}

StateId parse_state(const LineReader& rd, const std::string& tok, StateId n_states) {
    const std::uint64_t s = parse_uint(rd, tok, "a state index");
    if (s >= n_states)
        rd.fail("state " + tok + " out of range, chain has " + std::to_string(n_states) +
                " states");
    return static_cast<StateId>(s);
}

} // namespace

MarkovChain::Data parse_tra(std::istream& in, const std::string& source) {
    LineReader rd{in, source};
    const auto header = rd.next();
    if (!header) rd.fail("missing header '<n_states> <n_transitions>'");
    const auto head_toks = split_ws(*header);
    if (head_toks.size() != 2) rd.fail("header must be '<n_states> <n_transitions>'");
    const std::uint64_t n = parse_uint(rd, head_toks[0], "the state count");
    const std::uint64_t m = parse_uint(rd, head_toks[1], "the transition count");
    if (n == 0 || n > kNoState) rd.fail("state count " + head_toks[0] + " out of range");

    MarkovChain::Data data;
    data.n_states = static_cast<StateId>(n);
    data.rows.resize(data.n_states);
    std::uint64_t seen = 0;
    while (const auto line = rd.next()) {
        const auto toks = split_ws(*line);
        if (toks.size() != 3) rd.fail("expected 'src dst prob'");
        const StateId src = parse_state(rd, toks[0], data.n_states);
        const StateId dst = parse_state(rd, toks[1], data.n_states);
        const double p = parse_double(rd, toks[2], "a probability");
        data.rows[src].push_back({dst, p});
        ++seen;
    }
    if (seen != m)
        throw ParseError(source, rd.line_no,
                         "header declares " + std::to_string(m) + " transitions, file has " +
                             std::to_string(seen));
    return data;
}

void parse_lab(std::istream& in, MarkovChain::Data& data, const std::string& source) {
    LineReader rd{in, source};
    const auto header = rd.next();
    if (!header) {
        // a label-free chain serializes to an empty file
        data.state_labels.assign(data.n_states, {});
        return;
    }

    // Header: whitespace-separated id="name" pairs.
    std::map<std::uint64_t, LabelId> id_map;
    for (const auto& tok : split_ws(*header)) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || tok.size() < eq + 3 || tok[eq + 1] != '"' ||
            tok.back() != '"')
            rd.fail("expected id=\"name\", got '" + tok + "'");
        const std::uint64_t file_id = parse_uint(rd, tok.substr(0, eq), "a label id");
        const std::string name = tok.substr(eq + 2, tok.size() - eq - 3);
        if (name.empty()) rd.fail("empty label name");
        if (id_map.count(file_id)) rd.fail("label id " + tok.substr(0, eq) + " declared twice");
        for (const auto& existing : data.label_names)
            if (existing == name) rd.fail("label \"" + name + "\" declared twice");
        id_map[file_id] = static_cast<LabelId>(data.label_names.size());
        data.label_names.push_back(name);
    }

    data.state_labels.assign(data.n_states, {});
    std::vector<bool> labeled(data.n_states, false);
    while (const auto line = rd.next()) {
        const auto colon = line->find(':');
        if (colon == std::string::npos) rd.fail("expected '<state>: <id> <id> ...'");
        const auto state_toks = split_ws(line->substr(0, colon));
        if (state_toks.size() != 1) rd.fail("expected '<state>: <id> <id> ...'");
        const StateId s = parse_state(rd, state_toks[0], data.n_states);
        if (labeled[s]) rd.fail("state " + std::to_string(s) + " labeled twice");
        labeled[s] = true;
        for (const auto& tok : split_ws(line->substr(colon + 1))) {
            const std::uint64_t file_id = parse_uint(rd, tok, "a label id");
            const auto it = id_map.find(file_id);
            if (it == id_map.end()) rd.fail("label id " + tok + " was not declared");
            data.state_labels[s].push_back(it->second);
        }
    }
}

void parse_rew(std::istream& in, MarkovChain::Data& data, const std::string& source) {
    LineReader rd{in, source};
    data.rewards.assign(data.n_states, 0.0);
    std::vector<bool> seen(data.n_states, false);
    while (const auto line = rd.next()) {
        const auto toks = split_ws(*line);
        if (toks.size() != 2) rd.fail("expected 'state reward'");
        const StateId s = parse_state(rd, toks[0], data.n_states);
        if (seen[s]) rd.fail("state " + std::to_string(s) + " has two rewards");
        seen[s] = true;
        data.rewards[s] = parse_double(rd, toks[1], "a reward");
    }
}

void parse_init(std::istream& in, MarkovChain::Data& data, const std::string& source) {
    LineReader rd{in, source};
    while (const auto line = rd.next()) {
        const auto toks = split_ws(*line);
        if (toks.size() != 2) rd.fail("expected 'state prob'");
        const StateId s = parse_state(rd, toks[0], data.n_states);
        data.initial.emplace_back(s, parse_double(rd, toks[1], "a probability"));
    }
    if (data.initial.empty()) rd.fail("initial distribution is empty");
}

MarkovChain load_chain(const ChainFiles& files, double declared_pmin) {
    const auto open = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ValidationError("cannot open '" + path + "'");
        return in;
    };
    auto tra = open(files.tra);
    MarkovChain::Data data = parse_tra(tra, files.tra);
    auto lab = open(files.lab);
    parse_lab(lab, data, files.lab);
    if (files.rew) {
        auto rew = open(*files.rew);
        parse_rew(rew, data, *files.rew);
    }
    if (files.init) {
        auto init = open(*files.init);
        parse_init(init, data, *files.init);
    }
    data.declared_pmin = declared_pmin;
    return MarkovChain(std::move(data));
}

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

void write_tra(std::ostream& out, const MarkovChain& chain) {
    out << chain.num_states() << ' ' << chain.num_transitions() << '\n';
    for (StateId s = 0; s < chain.num_states(); ++s) {
        const auto targets = chain.row_targets(s);
        const auto probs = chain.row_probs(s);
        for (std::size_t i = 0; i < targets.size(); ++i)
            out << s << ' ' << targets[i] << ' ' << format_double(probs[i]) << '\n';
    }
}

void write_lab(std::ostream& out, const MarkovChain& chain) {
    const auto& names = chain.label_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        out << (i ? " " : "") << i << "=\"" << names[i] << '"';
    out << '\n';
    for (StateId s = 0; s < chain.num_states(); ++s) {
        const auto labels = chain.labels_of(s);
        if (labels.empty()) continue;
        out << s << ':';
        for (const LabelId l : labels) out << ' ' << l;
        out << '\n';
    }
}

void write_rew(std::ostream& out, const MarkovChain& chain) {
    for (StateId s = 0; s < chain.num_states(); ++s)
        if (chain.reward(s) != 0.0) out << s << ' ' << format_double(chain.reward(s)) << '\n';
}

void write_init(std::ostream& out, const MarkovChain& chain) {
    for (const auto& [s, p] : chain.initial()) out << s << ' ' << format_double(p) << '\n';
}

void save_chain(const std::string& prefix, const MarkovChain& chain) {
    const auto save = [&](const char* ext, auto writer) {
        const std::string path = prefix + ext;
        std::ofstream out(path);
        if (!out) throw ValidationError("cannot write '" + path + "'");
        writer(out, chain);
    };
    save(".tra", write_tra);
    save(".lab", write_lab);
    if (chain.has_rewards()) save(".rew", write_rew);
    const auto init = chain.initial();
    if (init.size() != 1 || init[0].first != 0) save(".init", write_init);
}

// --- HOA subset -----------------------------------------------------------

namespace {

// Recursive-descent guard parser; precedence ! over & over |.
struct GuardParser {
    const LineReader& rd;
    const std::string& text;
    std::size_t pos = 0;
    std::uint32_t n_aps;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    LabelExpr parse() {
        LabelExpr e = parse_or();
        skip_ws();
        if (pos != text.size()) rd.fail("trailing characters in guard '" + text + "'");
        return e;
    }

    LabelExpr parse_or() {
        LabelExpr e = parse_and();
        while (eat('|')) e = LabelExpr::combine(LabelExpr::Kind::Or, std::move(e), parse_and());
        return e;
    }

    LabelExpr parse_and() {
        LabelExpr e = parse_unary();
        while (eat('&')) e = LabelExpr::combine(LabelExpr::Kind::And, std::move(e), parse_unary());
        return e;
    }

    LabelExpr parse_unary() {
        if (eat('!')) return LabelExpr::negate(parse_unary());
        if (eat('(')) {
            LabelExpr e = parse_or();
            if (!eat(')')) rd.fail("missing ')' in guard '" + text + "'");
            return e;
        }
        skip_ws();
        if (pos < text.size() && (text[pos] == 't' || text[pos] == 'f'))
            return LabelExpr::constant(text[pos++] == 't');
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) rd.fail("expected proposition index in guard '" + text + "'");
        const std::uint64_t ap = std::stoull(text.substr(start, pos - start));
        if (ap >= n_aps)
            rd.fail("guard references proposition " + std::to_string(ap) + ", automaton has " +
                    std::to_string(n_aps));
        return LabelExpr::atom(static_cast<std::uint32_t>(ap));
    }
};

// Rabin acceptance condition: pairs "(Fin(2i) & Inf(2i+1))" joined by '|',
// parentheses around a pair optional.
std::uint32_t parse_acceptance_pairs(const LineReader& rd, const std::string& text) {
    std::size_t pos = 0;
    const auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    const auto expect = [&](const std::string& word) {
        skip_ws();
        if (text.compare(pos, word.size(), word) != 0)
            rd.fail("expected '" + word + "' at position " + std::to_string(pos + 1) +
                    " of acceptance condition '" + text + "'");
        pos += word.size();
    };
    const auto expect_int = [&](std::uint64_t want) {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start || std::stoull(text.substr(start, pos - start)) != want)
            rd.fail("acceptance sets must come as Fin(2i) & Inf(2i+1) in order, expected " +
                    std::to_string(want) + " in '" + text + "'");
    };

    std::uint32_t pairs = 0;
    while (true) {
        skip_ws();
        const bool parens = pos < text.size() && text[pos] == '(';
        if (parens) ++pos;
        expect("Fin(");
        expect_int(2 * pairs);
        expect(")");
        expect("&");
        expect("Inf(");
        expect_int(2 * pairs + 1);
        expect(")");
        if (parens) expect(")");
        ++pairs;
        skip_ws();
        if (pos == text.size()) return pairs;
        expect("|");
    }
}

} // namespace

RabinAutomaton parse_hoa(std::istream& in, const std::string& source) {
    LineReader rd{in, source};
    const auto first = rd.next();
    if (!first || split_ws(*first) != std::vector<std::string>{"HOA:", "v1"})
        rd.fail("expected 'HOA: v1'");

    RabinAutomaton::Data data;
    std::optional<std::uint32_t> n_states, start, n_aps, n_sets, acc_pairs, accname_pairs;

    std::string line;
    while (true) {
        const auto next = rd.next();
        if (!next) rd.fail("missing '--BODY--'");
        line = *next;
        if (line == "--BODY--") break;
        const auto colon = line.find(':');
        if (colon == std::string::npos) rd.fail("expected a 'header: value' line");
        const std::string key = line.substr(0, colon);
        const std::string rest = line.substr(colon + 1);
        const auto toks = split_ws(rest);
        if (key == "States") {
            if (n_states) rd.fail("duplicate States:");
            if (toks.size() != 1) rd.fail("States: takes one integer");
            n_states = static_cast<std::uint32_t>(parse_uint(rd, toks[0], "the state count"));
        } else if (key == "Start") {
            if (start) rd.fail("only a single start state is supported");
            if (toks.size() != 1) rd.fail("Start: takes one integer");
            start = static_cast<std::uint32_t>(parse_uint(rd, toks[0], "the start state"));
        } else if (key == "AP") {
            if (n_aps) rd.fail("duplicate AP:");
            if (toks.empty()) rd.fail("AP: takes a count and quoted names");
            n_aps = static_cast<std::uint32_t>(parse_uint(rd, toks[0], "the proposition count"));
            if (*n_aps > kMaxAps)
                rd.fail("at most " + std::to_string(kMaxAps) + " propositions are supported");
            if (toks.size() != *n_aps + 1)
                rd.fail("AP: declares " + toks[0] + " names, found " +
                        std::to_string(toks.size() - 1));
            for (std::size_t i = 1; i < toks.size(); ++i) {
                const auto& t = toks[i];
                if (t.size() < 2 || t.front() != '"' || t.back() != '"')
                    rd.fail("proposition names must be quoted, got " + t);
                data.ap_names.push_back(t.substr(1, t.size() - 2));
            }
        } else if (key == "Acceptance") {
            if (acc_pairs) rd.fail("duplicate Acceptance:");
            if (toks.empty()) rd.fail("Acceptance: takes a set count and a condition");
            n_sets = static_cast<std::uint32_t>(parse_uint(rd, toks[0], "the set count"));
            const auto cond_at = rest.find(toks[0]) + toks[0].size();
            acc_pairs = parse_acceptance_pairs(rd, rest.substr(cond_at));
            if (*n_sets != 2 * *acc_pairs)
                rd.fail("Acceptance: declares " + std::to_string(*n_sets) + " sets but the condition uses " +
                        std::to_string(2 * *acc_pairs));
        } else if (key == "acc-name") {
            if (toks.size() != 2 || toks[0] != "Rabin")
                rd.fail("only 'acc-name: Rabin <k>' is supported");
            accname_pairs = static_cast<std::uint32_t>(parse_uint(rd, toks[1], "the pair count"));
        } else if (key == "name" || key == "tool" || key == "properties") {
            // informational, ignored
        } else {
            rd.fail("unsupported header '" + key + ":'");
        }
    }

    if (!n_states) rd.fail("missing States:");
    if (!start) rd.fail("missing Start:");
    if (!n_aps) rd.fail("missing AP:");
    if (!acc_pairs) rd.fail("missing Acceptance:");
    if (accname_pairs && *accname_pairs != *acc_pairs)
        rd.fail("acc-name: Rabin " + std::to_string(*accname_pairs) +
                " contradicts the Acceptance: condition");

    data.n_states = *n_states;
    data.start = *start;
    data.n_pairs = *acc_pairs;
    data.state_sets.assign(data.n_states, 0);
    data.edges.resize(data.n_states);

    std::vector<bool> declared(data.n_states, false);
    std::int64_t current = -1;
    bool ended = false;
    while (const auto next = rd.next()) {
        line = *next;
        if (line == "--END--") {
            ended = true;
            break;
        }
        if (line.rfind("State:", 0) == 0) {
            auto rest = line.substr(6);
            std::uint32_t sets = 0;
            const auto brace = rest.find('{');
            if (brace != std::string::npos) {
                const auto close = rest.find('}', brace);
                if (close == std::string::npos) rd.fail("missing '}'");
                for (const auto& tok : split_ws(rest.substr(brace + 1, close - brace - 1))) {
                    const auto set = parse_uint(rd, tok, "an acceptance set");
                    if (set >= 2 * data.n_pairs)
                        rd.fail("acceptance set " + tok + " out of range");
                    sets |= 1u << set;
                }
                rest = rest.substr(0, brace);
            }
            const auto toks = split_ws(rest);
            if (toks.size() != 1) rd.fail("expected 'State: <id>'");
            const auto q = parse_uint(rd, toks[0], "a state id");
            if (q >= data.n_states) rd.fail("state " + toks[0] + " out of range");
            if (declared[q]) rd.fail("state " + toks[0] + " declared twice");
            declared[q] = true;
            current = static_cast<std::int64_t>(q);
            data.state_sets[q] = sets;
        } else if (!line.empty() && line.find('[') != std::string::npos) {
            if (current < 0) rd.fail("edge before any 'State:' line");
            const auto open = line.find('[');
            const auto close = line.find(']', open);
            if (close == std::string::npos) rd.fail("missing ']'");
            const std::string guard_text = line.substr(open + 1, close - open - 1);
            GuardParser gp{rd, guard_text, 0, *n_aps};
            LabelExpr guard = gp.parse();
            const auto toks = split_ws(line.substr(close + 1));
            if (toks.size() != 1) rd.fail("expected '[guard] <dst>'");
            const auto dst = parse_uint(rd, toks[0], "a destination state");
            if (dst >= data.n_states) rd.fail("destination " + toks[0] + " out of range");
            data.edges[static_cast<std::size_t>(current)].push_back(
                {std::move(guard), static_cast<std::uint32_t>(dst)});
        } else {
            rd.fail("expected 'State:', an edge, or '--END--'");
        }
    }
    if (!ended) rd.fail("missing '--END--'");
    for (std::uint32_t q = 0; q < data.n_states; ++q)
        if (!declared[q])
            throw ParseError(source, rd.line_no,
                             "state " + std::to_string(q) + " has no 'State:' block");

    try {
        return RabinAutomaton(std::move(data));
    } catch (const ValidationError& e) {
        throw ValidationError(source + ": " + e.what());
    }
}

RabinAutomaton load_hoa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return parse_hoa(in, path);
}

} // namespace smca
