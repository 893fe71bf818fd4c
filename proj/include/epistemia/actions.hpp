#pragma once

#include "complex.hpp"
#include "formula.hpp"

namespace epistemia {

/// A synchronous-round failure pattern: which agents crashed and which alive
/// agents each crashed agent failed to reach. Equivalently a strict partial
/// order of rank <= 1 on agents, with b < a meaning "b crashed and its
/// message to a was lost".
class FailurePattern {
public:
    /// fails: crashed agent -> nonempty set of missed receivers. Receivers
    /// must be alive (not crashed themselves) and at least one agent must
    /// stay alive overall.
    static FailurePattern make(int n, std::vector<std::pair<Agent, std::vector<Agent>>> fails) {
        FailurePattern t;
        t.n_ = n;
        t.fails_ = std::move(fails);
        std::sort(t.fails_.begin(), t.fails_.end());
        std::vector<Agent> dead;
        for (auto& [d, rs] : t.fails_) {
            if (d < 0 || d >= n) throw error("failure pattern agent out of range");
            if (rs.empty()) throw error("crashed agent must miss at least one receiver");
            normalize_agent_set(rs);
            dead.push_back(d);
        }
        for (std::size_t i = 1; i < dead.size(); ++i)
            if (dead[i] == dead[i - 1]) throw error("duplicate crashed agent in failure pattern");
        if (static_cast<int>(dead.size()) == n) throw error("at least one agent must stay alive");
        for (const auto& [d, rs] : t.fails_)
            for (Agent r : rs) {
                if (r < 0 || r >= n) throw error("failure pattern receiver out of range");
                if (std::binary_search(dead.begin(), dead.end(), r))
                    throw error("missed receiver must be an alive agent");
            }
        return t;
    }

    int num_agents() const { return n_; }

    /// Crashed agents, sorted.
    std::vector<Agent> dead() const {
        std::vector<Agent> out;
        for (const auto& [d, rs] : fails_) out.push_back(d);
        return out;
    }

    std::vector<Agent> alive() const {
        std::vector<Agent> out;
        auto d = dead();
        for (Agent a = 0; a < n_; ++a)
            if (!std::binary_search(d.begin(), d.end(), a)) out.push_back(a);
        return out;
    }

    bool is_dead(Agent a) const {
        for (const auto& [d, rs] : fails_)
            if (d == a) return true;
        return false;
    }

    /// send_fail(b, a): b crashed and failed to deliver its message to a.
    bool send_fail(Agent b, Agent a) const {
        for (const auto& [d, rs] : fails_)
            if (d == b) return std::binary_search(rs.begin(), rs.end(), a);
        return false;
    }

    /// Agents whose message toward a was lost, sorted.
    std::vector<Agent> failers_toward(Agent a) const {
        std::vector<Agent> out;
        for (const auto& [d, rs] : fails_)
            if (std::binary_search(rs.begin(), rs.end(), a)) out.push_back(d);
        return out;
    }

    const std::vector<std::pair<Agent, std::vector<Agent>>>& fails() const { return fails_; }

    /// Text form {b<a,b<c,...}; {} is the failure-free pattern.
    std::string key() const {
        std::string out = "{";
        bool first = true;
        for (const auto& [d, rs] : fails_)
            for (Agent r : rs) {
                if (!first) out += ",";
                first = false;
                out += std::to_string(d) + "<" + std::to_string(r);
            }
        return out + "}";
    }

    static FailurePattern parse(const std::string& text, int n) {
        std::string s;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) s += c;
        if (s.size() < 2 || s.front() != '{' || s.back() != '}')
            throw error("failure pattern must look like {a<b,...}: " + text);
        s = s.substr(1, s.size() - 2);
        std::map<Agent, std::vector<Agent>> fails;
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t comma = s.find(',', pos);
            std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            std::size_t lt = item.find('<');
            if (lt == std::string::npos) throw error("expected a<b in failure pattern: " + text);
            fails[std::stoi(item.substr(0, lt))].push_back(std::stoi(item.substr(lt + 1)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        std::vector<std::pair<Agent, std::vector<Agent>>> flat(fails.begin(), fails.end());
        return make(n, std::move(flat));
    }

    /// Canonical order: flattened (crashed, receiver) pair list, lexicographic;
    /// the failure-free pattern comes first.
    friend auto operator<=>(const FailurePattern& a, const FailurePattern& b) {
        return a.flat() <=> b.flat();
    }
    friend bool operator==(const FailurePattern& a, const FailurePattern& b) {
        return a.n_ == b.n_ && a.fails_ == b.fails_;
    }

private:
    std::vector<std::pair<Agent, Agent>> flat() const {
        std::vector<std::pair<Agent, Agent>> out;
        for (const auto& [d, rs] : fails_)
            for (Agent r : rs) out.emplace_back(d, r);
        return out;
    }

    int n_ = 0;
    std::vector<std::pair<Agent, std::vector<Agent>>> fails_;
};

/// All failure patterns for n agents, in canonical order.
inline std::vector<FailurePattern> failure_patterns(int n) {
    if (n <= 0) throw error("need at least one agent");
    std::vector<FailurePattern> out;
    // Enumerate crash sets, then independent nonempty receiver sets per crash.
    for (int crash_mask = 0; crash_mask < (1 << n); ++crash_mask) {
        if (crash_mask == (1 << n) - 1) continue; // someone must survive
        std::vector<Agent> dead, live;
        for (Agent a = 0; a < n; ++a)
            ((crash_mask >> a) & 1 ? dead : live).push_back(a);
        std::vector<int> receiver_masks(dead.size(), 1);
        int full = (1 << static_cast<int>(live.size())) - 1;
        while (true) {
            std::vector<std::pair<Agent, std::vector<Agent>>> fails;
            for (std::size_t i = 0; i < dead.size(); ++i) {
                std::vector<Agent> rs;
                for (std::size_t j = 0; j < live.size(); ++j)
                    if ((receiver_masks[i] >> j) & 1) rs.push_back(live[j]);
                fails.emplace_back(dead[i], std::move(rs));
            }
            out.push_back(FailurePattern::make(n, std::move(fails)));
            if (dead.empty()) break;
            std::size_t i = 0;
            while (i < dead.size() && receiver_masks[i] == full) receiver_masks[i++] = 1;
            if (i == dead.size()) break;
            ++receiver_masks[i];
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Action model: an epistemic frame whose worlds carry precondition formulas
/// instead of labels.
struct ActionModel {
    std::vector<std::string> keys;
    PerRelation rel;
    std::vector<FormulaPtr> pre;

    ActionModel(std::vector<std::string> action_keys, PerRelation relation,
                std::vector<FormulaPtr> preconditions)
        : keys(std::move(action_keys)), rel(std::move(relation)), pre(std::move(preconditions)) {
        if (keys.empty()) throw error("action model must have at least one action");
        if (static_cast<int>(keys.size()) != rel.num_worlds() || pre.size() != keys.size())
            throw error("action model arrays disagree on action count");
        std::set<std::string> seen(keys.begin(), keys.end());
        if (seen.size() != keys.size()) throw error("duplicate action keys");
        for (const FormulaPtr& p : pre)
            if (!p) throw error("every action needs a precondition");
    }

    int num_actions() const { return static_cast<int>(keys.size()); }
    int num_agents() const { return rel.num_agents(); }

    int action_index(const std::string& key) const {
        for (int i = 0; i < num_actions(); ++i)
            if (keys[static_cast<std::size_t>(i)] == key) return i;
        throw error("unknown action key: " + key);
    }

    /// Frame view: the same worlds and relations with empty labels, for
    /// reuse of the model-level frame algorithms.
    PartialEpistemicModel frame() const {
        return PartialEpistemicModel(keys, rel, std::vector<AtomSet>(keys.size()));
    }
};

/// Consensus task over Value = Ag: one action per value v, preconditioned on
/// some agent having input v; distinct decisions are distinguished by every
/// agent and every agent is alive everywhere.
inline ActionModel consensus_task(int n) {
    if (n <= 0) throw error("need at least one agent");
    std::vector<std::string> keys;
    std::vector<FormulaPtr> pre;
    RelationData d = RelationData::empty(n, n);
    for (int v = 0; v < n; ++v) {
        keys.push_back(std::to_string(v));
        FormulaPtr p;
        for (Agent a = 0; a < n; ++a) {
            FormulaPtr atom = make_atom(a, v);
            p = p ? make_or(std::move(p), std::move(atom)) : std::move(atom);
        }
        pre.push_back(std::move(p));
        for (Agent a = 0; a < n; ++a) d.add_edge(a, v, v);
    }
    return ActionModel(std::move(keys), PerRelation::checked(std::move(d)), std::move(pre));
}

/// Inputless one-round message-passing actions: all failure patterns; two
/// patterns look alike to an alive agent iff the same senders failed toward
/// it. Preconditions are all trivially true.
struct Mp0 {
    ActionModel model;
    std::vector<FailurePattern> patterns; // parallel to model.keys
};

inline bool mp0_related(const FailurePattern& t1, const FailurePattern& t2, Agent a) {
    return !t1.is_dead(a) && !t2.is_dead(a) && t1.failers_toward(a) == t2.failers_toward(a);
}

inline Mp0 mp0(int n) {
    std::vector<FailurePattern> pats = failure_patterns(n);
    std::vector<std::string> keys;
    keys.reserve(pats.size());
    for (const FailurePattern& t : pats) keys.push_back(t.key());
    RelationData d = RelationData::empty(n, static_cast<int>(pats.size()));
    for (std::size_t i = 0; i < pats.size(); ++i)
        for (std::size_t j = i; j < pats.size(); ++j)
            for (Agent a = 0; a < n; ++a)
                if (mp0_related(pats[i], pats[j], a))
                    d.add_edge(a, static_cast<int>(i), static_cast<int>(j));
    std::vector<FormulaPtr> pre(pats.size(), make_true());
    ActionModel m(std::move(keys), PerRelation::checked(std::move(d)), std::move(pre));
    return {std::move(m), std::move(pats)};
}

/// Geometric rendering of mp0: one facet per pattern, one vertex per alive
/// agent carrying the set of senders that failed toward it (as a bitmask).
inline Complex mp0_complex(int n) {
    std::vector<FailurePattern> pats = failure_patterns(n);
    std::vector<Simplex> facets;
    std::vector<int> values;
    for (const FailurePattern& t : pats) {
        std::vector<Vertex> vs;
        for (Agent a : t.alive()) {
            int mask = 0;
            for (Agent b : t.failers_toward(a)) mask |= 1 << b;
            vs.push_back({a, mask});
            values.push_back(mask);
        }
        facets.emplace_back(std::move(vs));
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return Complex(n, std::move(values), std::move(facets));
}

/// Sorted facet indices of one input-model equivalence class.
using InputClass = std::vector<int>;

inline std::string class_key(const SimplicialModel& input, const InputClass& cls) {
    std::string out;
    for (std::size_t i = 0; i < cls.size(); ++i) {
        if (i) out += "+";
        out += facet_key(input.complex.facets()[static_cast<std::size_t>(cls[i])]);
    }
    return out;
}

namespace detail {

/// Bitmask of agents on whose vertex facets i and j agree.
inline std::vector<int> facet_agreement_masks(const Complex& c) {
    const auto& fs = c.facets();
    std::size_t m = fs.size();
    std::vector<int> masks(m * m, 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            int mask = 0;
            for (Agent a : chi_shared(fs[i], fs[j])) mask |= 1 << a;
            masks[i * m + j] = masks[j * m + i] = mask;
        }
    return masks;
}

} // namespace detail

/// Facets indistinguishable from facet `x` after one round under pattern t:
/// every alive agent's view (all vertices except the senders that failed
/// toward it) must match. Requires a pure input complex.
inline InputClass class_of(const SimplicialModel& input, const FailurePattern& t, int x) {
    const auto& fs = input.complex.facets();
    if (x < 0 || x >= static_cast<int>(fs.size())) throw error("facet index out of range");
    if (!input.complex.is_pure()) throw error("message-passing actions need a pure input complex");
    std::vector<int> masks = detail::facet_agreement_masks(input.complex);
    std::vector<Agent> alive = t.alive();
    std::vector<int> visible; // per alive agent: mask of senders it heard from
    int full = (1 << input.complex.num_agents()) - 1;
    for (Agent a : alive) {
        int failed = 0;
        for (Agent b : t.failers_toward(a)) failed |= 1 << b;
        visible.push_back(full & ~failed);
    }
    InputClass out;
    std::size_t m = fs.size();
    for (std::size_t y = 0; y < m; ++y) {
        int agree = masks[static_cast<std::size_t>(x) * m + y];
        bool ok = true;
        for (int v : visible)
            if ((v & ~agree) != 0) {
                ok = false;
                break;
            }
        if (ok) out.push_back(static_cast<int>(y));
    }
    return out;
}

/// Synchronous message-passing action model over an input model: actions are
/// (indistinguishability class, pattern) pairs; an alive agent relates two
/// actions when the patterns look alike to it and the classes agree outside
/// the senders it missed; the precondition asserts one of the class members.
struct MpActionModel {
    ActionModel model;
    std::vector<InputClass> classes;      // per action
    std::vector<int> pattern_index;       // per action, into `patterns`
    std::vector<FailurePattern> patterns; // all patterns, canonical order
};

inline MpActionModel mp_full(const SimplicialModel& input) {
    const Complex& c = input.complex;
    const auto& fs = c.facets();
    if (!c.is_pure()) throw error("message-passing actions need a pure input complex");
    int n = c.num_agents();
    std::vector<FailurePattern> pats = failure_patterns(n);
    std::vector<int> masks = detail::facet_agreement_masks(c);
    std::size_t m = fs.size();

    struct Action {
        InputClass cls;
        int pattern;
    };
    std::vector<Action> actions;
    for (std::size_t ti = 0; ti < pats.size(); ++ti) {
        const FailurePattern& t = pats[ti];
        std::vector<Agent> alive = t.alive();
        std::vector<int> visible;
        int full = (1 << n) - 1;
        for (Agent a : alive) {
            int failed = 0;
            for (Agent b : t.failers_toward(a)) failed |= 1 << b;
            visible.push_back(full & ~failed);
        }
        std::vector<bool> seen(m, false);
        for (std::size_t x = 0; x < m; ++x) {
            if (seen[x]) continue;
            InputClass cls;
            for (std::size_t y = 0; y < m; ++y) {
                int agree = masks[x * m + y];
                bool ok = true;
                for (int v : visible)
                    if ((v & ~agree) != 0) {
                        ok = false;
                        break;
                    }
                if (ok) cls.push_back(static_cast<int>(y));
            }
            for (int y : cls) seen[static_cast<std::size_t>(y)] = true;
            actions.push_back({std::move(cls), static_cast<int>(ti)});
        }
    }
    std::sort(actions.begin(), actions.end(), [](const Action& a, const Action& b) {
        return a.pattern != b.pattern ? a.pattern < b.pattern : a.cls < b.cls;
    });

    std::vector<std::string> keys;
    std::vector<FormulaPtr> pre;
    keys.reserve(actions.size());
    for (const Action& act : actions) {
        keys.push_back(class_key(input, act.cls) + "@" + pats[static_cast<std::size_t>(act.pattern)].key());
        FormulaPtr p;
        for (int y : act.cls) {
            FormulaPtr member;
            for (const Atom& at : input.labels[static_cast<std::size_t>(y)]) {
                FormulaPtr atom = make_atom(at.agent, at.value);
                member = member ? make_and(std::move(member), std::move(atom)) : std::move(atom);
            }
            if (!member) member = make_true(); // unlabeled facet: trivially satisfied
            p = p ? make_or(std::move(p), std::move(member)) : std::move(member);
        }
        pre.push_back(std::move(p));
    }

    // Relation via per-agent view keys: an alive agent relates two actions
    // iff it misses the same senders and the class values agree elsewhere.
    RelationData d = RelationData::empty(n, static_cast<int>(actions.size()));
    for (Agent a = 0; a < n; ++a) {
        std::map<std::pair<std::vector<Agent>, std::vector<int>>, std::vector<int>> groups;
        for (std::size_t i = 0; i < actions.size(); ++i) {
            const FailurePattern& t = pats[static_cast<std::size_t>(actions[i].pattern)];
            if (t.is_dead(a)) continue;
            std::vector<Agent> missed = t.failers_toward(a);
            std::vector<int> view;
            const Simplex& rep = fs[static_cast<std::size_t>(actions[i].cls.front())];
            for (Agent b = 0; b < n; ++b)
                if (!std::binary_search(missed.begin(), missed.end(), b))
                    view.push_back(*rep.value_of(b));
            groups[{std::move(missed), std::move(view)}].push_back(static_cast<int>(i));
        }
        for (const auto& [key, members] : groups)
            for (std::size_t i = 0; i < members.size(); ++i)
                for (std::size_t j = i; j < members.size(); ++j)
                    d.add_edge(a, members[i], members[j]);
    }

    MpActionModel out{
        ActionModel(std::move(keys), PerRelation::checked(std::move(d)), std::move(pre)),
        {},
        {},
        std::move(pats)};
    for (Action& act : actions) {
        out.classes.push_back(std::move(act.cls));
        out.pattern_index.push_back(act.pattern);
    }
    return out;
}

} // namespace epistemia
