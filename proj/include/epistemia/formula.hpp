#pragma once

#include <cctype>
#include <memory>
#include <unordered_map>

#include "model.hpp"
#include "types.hpp"

namespace epistemia {

enum class FormulaKind { atom, negation, conjunction, disjunction, knows };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable epistemic formula node. false, true, implication and alive(..)
/// are derived forms; the core connectives are atom, ~, &, | and K.
struct Formula {
    FormulaKind kind;
    Atom atom{};         // atom
    Agent agent = -1;    // knows
    FormulaPtr left;     // negation/knows child, binary left
    FormulaPtr right;    // binary right
};

inline FormulaPtr make_atom(Agent a, int v) {
    return std::make_shared<Formula>(Formula{FormulaKind::atom, Atom{a, v}, -1, nullptr, nullptr});
}
inline FormulaPtr make_neg(FormulaPtr f) {
    return std::make_shared<Formula>(Formula{FormulaKind::negation, {}, -1, std::move(f), nullptr});
}
inline FormulaPtr make_and(FormulaPtr l, FormulaPtr r) {
    return std::make_shared<Formula>(
        Formula{FormulaKind::conjunction, {}, -1, std::move(l), std::move(r)});
}
inline FormulaPtr make_or(FormulaPtr l, FormulaPtr r) {
    return std::make_shared<Formula>(
        Formula{FormulaKind::disjunction, {}, -1, std::move(l), std::move(r)});
}
inline FormulaPtr make_knows(Agent a, FormulaPtr f) {
    return std::make_shared<Formula>(Formula{FormulaKind::knows, {}, a, std::move(f), nullptr});
}

/// Canonical contradiction input(0,0) & ~input(0,0).
inline FormulaPtr make_false() {
    static const FormulaPtr f = make_and(make_atom(0, 0), make_neg(make_atom(0, 0)));
    return f;
}
inline FormulaPtr make_true() {
    static const FormulaPtr t = make_neg(make_false());
    return t;
}
/// l -> r as ~l | r.
inline FormulaPtr make_implies(FormulaPtr l, FormulaPtr r) {
    return make_or(make_neg(std::move(l)), std::move(r));
}
/// alive(a): a does not know the contradiction, i.e. ~K a false.
inline FormulaPtr make_alive(Agent a) { return make_neg(make_knows(a, make_false())); }
/// alive(B) for nonempty B: conjunction of alive(a), left-folded.
inline FormulaPtr make_alive(const std::vector<Agent>& agents) {
    if (agents.empty()) throw error("alive(..) needs at least one agent");
    FormulaPtr f = make_alive(agents.front());
    for (std::size_t i = 1; i < agents.size(); ++i) f = make_and(f, make_alive(agents[i]));
    return f;
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
        case FormulaKind::atom: return a->atom == b->atom;
        case FormulaKind::negation: return equal(a->left, b->left);
        case FormulaKind::conjunction:
        case FormulaKind::disjunction: return equal(a->left, b->left) && equal(a->right, b->right);
        case FormulaKind::knows: return a->agent == b->agent && equal(a->left, b->left);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_false_pattern(const FormulaPtr& f) { return equal(f, make_false()); }
inline bool is_true_pattern(const FormulaPtr& f) { return equal(f, make_true()); }

/// Agent of an alive(a) pattern ~K a false, or -1.
inline Agent alive_pattern_agent(const FormulaPtr& f) {
    if (f->kind == FormulaKind::negation && f->left->kind == FormulaKind::knows &&
        is_false_pattern(f->left->left))
        return f->left->agent;
    return -1;
}

/// Grammar level of a node when printed: implication sugar 1, | 2, & 3,
/// atoms and unary forms 4. Sugared forms (false/true/alive) are atomic.
inline int print_level(const FormulaPtr& f) {
    if (is_false_pattern(f) || is_true_pattern(f) || alive_pattern_agent(f) >= 0) return 4;
    switch (f->kind) {
        case FormulaKind::disjunction:
            return (f->left->kind == FormulaKind::negation && !is_true_pattern(f->left)) ? 1 : 2;
        case FormulaKind::conjunction: return 3;
        default: return 4;
    }
}

/// Print with exactly the parentheses needed for parse(print(f)) == f under
/// the grammar: impl := disj ('->' impl)?; disj := conj ('|' impl)?;
/// conj := unary ('&' unary)*.
inline void print_rec(const FormulaPtr& f, int min_level, std::string& out) {
    bool paren = print_level(f) < min_level;
    if (paren) out += "(";
    if (is_false_pattern(f)) {
        out += "false";
    } else if (is_true_pattern(f)) {
        out += "true";
    } else if (Agent a = alive_pattern_agent(f); a >= 0) {
        out += "alive(" + std::to_string(a) + ")";
    } else {
        switch (f->kind) {
            case FormulaKind::atom: out += to_string(f->atom); break;
            case FormulaKind::negation:
                out += "~";
                print_rec(f->left, 4, out);
                break;
            case FormulaKind::knows:
                out += "K " + std::to_string(f->agent) + " ";
                print_rec(f->left, 4, out);
                break;
            case FormulaKind::conjunction:
                print_rec(f->left, 3, out); // left-associative: nested & stays bare
                out += " & ";
                print_rec(f->right, 4, out);
                break;
            case FormulaKind::disjunction:
                if (print_level(f) == 1) {
                    // ~l | r prints as the implication l -> r.
                    print_rec(f->left->left, 3, out);
                    out += " -> ";
                    print_rec(f->right, 1, out);
                } else {
                    print_rec(f->left, 3, out);
                    out += " | ";
                    print_rec(f->right, 1, out); // right operand admits | and ->
                }
                break;
        }
    }
    if (paren) out += ")";
}

} // namespace detail

inline std::string print(const FormulaPtr& f) {
    std::string out;
    detail::print_rec(f, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// Optional agent/value bounds enforced while parsing.
struct ParseLimits {
    int num_agents = -1;              // -1: unchecked
    std::optional<std::vector<int>> values; // sorted; nullopt: unchecked
};

namespace detail {

class Parser {
public:
    Parser(const std::string& text, const ParseLimits& limits) : text_(text), limits_(limits) {}

    FormulaPtr run() {
        FormulaPtr f = implication();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw error("parse error at offset " + std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool eat_word(const std::string& w) {
        skip_ws();
        if (text_.compare(pos_, w.size(), w) == 0) {
            std::size_t end = pos_ + w.size();
            if (end < text_.size() &&
                (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
                return false;
            pos_ = end;
            return true;
        }
        return false;
    }

    int number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a number");
        return std::stoi(text_.substr(start, pos_ - start));
    }

    Agent agent() {
        std::size_t at = pos_;
        int a = number();
        if (limits_.num_agents >= 0 && (a < 0 || a >= limits_.num_agents)) {
            pos_ = at;
            fail("agent " + std::to_string(a) + " out of declared range");
        }
        return a;
    }

    int value() {
        std::size_t at = pos_;
        int v = number();
        if (limits_.values &&
            !std::binary_search(limits_.values->begin(), limits_.values->end(), v)) {
            pos_ = at;
            fail("value " + std::to_string(v) + " outside the declared value set");
        }
        return v;
    }

    // implication := disjunction ('->' implication)?   (right associative)
    FormulaPtr implication() {
        FormulaPtr l = disjunction();
        skip_ws();
        if (text_.compare(pos_, 2, "->") == 0) {
            pos_ += 2;
            return make_implies(std::move(l), implication());
        }
        return l;
    }

    // disjunction := conjunction ('|' implication)?
    // The right operand reaches down to ->, so  a -> b | c -> d  groups as
    // a -> (b | (c -> d)).
    FormulaPtr disjunction() {
        FormulaPtr l = conjunction();
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '|') {
            ++pos_;
            return make_or(std::move(l), implication());
        }
        return l;
    }

    FormulaPtr conjunction() {
        FormulaPtr l = unary();
        while (eat('&')) l = make_and(std::move(l), unary());
        return l;
    }

    FormulaPtr unary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (eat('~')) return make_neg(unary());
        // K may abut its agent ("K0 phi") since whitespace is insignificant;
        // a letter or underscore after K would be a different identifier.
        if (text_[pos_] == 'K' &&
            (pos_ + 1 >= text_.size() ||
             (!std::isalpha(static_cast<unsigned char>(text_[pos_ + 1])) &&
              text_[pos_ + 1] != '_'))) {
            ++pos_;
            Agent a = agent();
            return make_knows(a, unary());
        }
        if (eat_word("true")) return make_true();
        if (eat_word("false")) return make_false();
        if (eat_word("alive")) {
            if (!eat('(')) fail("expected '(' after alive");
            std::vector<Agent> agents{agent()};
            while (eat(',')) agents.push_back(agent());
            if (!eat(')')) fail("expected ')'");
            return make_alive(agents);
        }
        if (eat_word("input")) {
            if (!eat('(')) fail("expected '(' after input");
            Agent a = agent();
            if (!eat(',')) fail("expected ','");
            int v = value();
            if (!eat(')')) fail("expected ')'");
            return make_atom(a, v);
        }
        if (eat('(')) {
            FormulaPtr f = implication();
            if (!eat(')')) fail("expected ')'");
            return f;
        }
        fail("expected a formula");
    }

    const std::string& text_;
    const ParseLimits& limits_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline FormulaPtr parse(const std::string& text, const ParseLimits& limits = {}) {
    return detail::Parser(text, limits).run();
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Model checker with a (world, subformula) memo shared across queries.
/// K a quantifies over the agent's relation block; at worlds where a is dead
/// the block is empty and K a holds vacuously.
class Evaluator {
public:
    explicit Evaluator(const PartialEpistemicModel& m) : m_(m) {}

    bool eval(int world, const FormulaPtr& f) {
        if (world < 0 || world >= m_.num_worlds()) throw error("world index out of range");
        auto key = std::make_pair(world, f.get());
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool v = false;
        switch (f->kind) {
            case FormulaKind::atom:
                v = contains(m_.labels[static_cast<std::size_t>(world)], f->atom);
                break;
            case FormulaKind::negation: v = !eval(world, f->left); break;
            case FormulaKind::conjunction: v = eval(world, f->left) && eval(world, f->right); break;
            case FormulaKind::disjunction: v = eval(world, f->left) || eval(world, f->right); break;
            case FormulaKind::knows: {
                if (f->agent < 0 || f->agent >= m_.num_agents())
                    throw error("K agent out of range");
                v = true;
                for (int w2 : m_.rel.block_of(f->agent, world))
                    if (!eval(w2, f->left)) {
                        v = false;
                        break;
                    }
                break;
            }
        }
        memo_.emplace(key, v);
        return v;
    }

private:
    struct KeyHash {
        std::size_t operator()(const std::pair<int, const Formula*>& k) const {
            return std::hash<const Formula*>()(k.second) * 1000003u ^
                   static_cast<std::size_t>(k.first);
        }
    };
    const PartialEpistemicModel& m_;
    std::unordered_map<std::pair<int, const Formula*>, bool, KeyHash> memo_;
};

inline bool eval(const PartialEpistemicModel& m, int world, const FormulaPtr& f) {
    return Evaluator(m).eval(world, f);
}

struct ValidityResult {
    bool valid = true;
    int witness = -1; // first falsifying world in the model's world order
};

inline ValidityResult is_valid(const PartialEpistemicModel& m, const FormulaPtr& f) {
    Evaluator ev(m);
    for (int w = 0; w < m.num_worlds(); ++w)
        if (!ev.eval(w, f)) return {false, w};
    return {true, -1};
}

// ---------------------------------------------------------------------------
// Guarded positive fragment
// ---------------------------------------------------------------------------

namespace detail {

/// Collect B from a conjunction tree of alive(a) patterns; false on mismatch.
inline bool collect_alive_conj(const FormulaPtr& f, std::vector<Agent>& agents) {
    if (Agent a = alive_pattern_agent(f); a >= 0) {
        agents.push_back(a);
        return true;
    }
    if (f->kind == FormulaKind::conjunction)
        return collect_alive_conj(f->left, agents) && collect_alive_conj(f->right, agents);
    return false;
}

/// Pure propositional formula whose atoms all belong to agents in `agents`.
inline bool is_pure_prop_over(const FormulaPtr& f, const std::vector<Agent>& agents) {
    switch (f->kind) {
        case FormulaKind::atom:
            return std::binary_search(agents.begin(), agents.end(), f->atom.agent);
        case FormulaKind::negation: return is_pure_prop_over(f->left, agents);
        case FormulaKind::conjunction:
        case FormulaKind::disjunction:
            return is_pure_prop_over(f->left, agents) && is_pure_prop_over(f->right, agents);
        case FormulaKind::knows: return false;
    }
    return false;
}

/// alive(B) -> psi with psi pure propositional over the atoms of B.
inline bool is_guarded_implication(const FormulaPtr& f) {
    if (f->kind != FormulaKind::disjunction || f->left->kind != FormulaKind::negation) return false;
    std::vector<Agent> agents;
    if (!collect_alive_conj(f->left->left, agents)) return false;
    normalize_agent_set(agents);
    return is_pure_prop_over(f->right, agents);
}

} // namespace detail

/// Membership in the guarded positive fragment:
///   phi ::= (alive(B) -> psi) | phi & phi | phi | phi | K a phi
/// with psi pure propositional over the atoms of B.
inline bool is_guarded_positive(const FormulaPtr& f) {
    if (detail::is_guarded_implication(f)) return true;
    switch (f->kind) {
        case FormulaKind::conjunction:
        case FormulaKind::disjunction:
            return is_guarded_positive(f->left) && is_guarded_positive(f->right);
        case FormulaKind::knows: return is_guarded_positive(f->left);
        default: return false;
    }
}

/// phi_i: some agent is alive and started with value i (as a disjunction of
/// guarded implications over all agents).
inline FormulaPtr build_phi_disjunct(int n, int i) {
    FormulaPtr f;
    for (Agent a = 0; a < n; ++a) {
        FormulaPtr g = make_implies(make_alive(a), make_atom(a, i));
        f = f ? make_or(std::move(f), std::move(g)) : std::move(g);
    }
    return f;
}

/// Phi_n = OR_i K_{i+2} K_{i+1} K_{i+2} phi_i (indices mod n): the guarded
/// positive obstruction family for consensus. Requires n >= 3.
inline FormulaPtr build_phi(int n) {
    if (n < 3) throw error("build_phi requires n >= 3");
    FormulaPtr f;
    for (int i = 0; i < n; ++i) {
        Agent b = (i + 1) % n, c = (i + 2) % n;
        FormulaPtr g = make_knows(c, make_knows(b, make_knows(c, build_phi_disjunct(n, i))));
        f = f ? make_or(std::move(f), std::move(g)) : std::move(g);
    }
    return f;
}

} // namespace epistemia
