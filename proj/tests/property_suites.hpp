#pragma once

// Randomized property suites shared by the module tests and the acceptance
// runner. Every suite pairs the library code with an independent oracle
// defined here, returns the number of violations found, and is fully
// deterministic for a fixed seed.

#include <epistemia/epistemia.hpp>

#include <random>
#include <sstream>

namespace epistemia::suites {

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) { // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline bool chance(Rng& rng, double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

struct SuiteResult {
    long long cases = 0;
    long long violations = 0;
    std::string first_failure; // description of the first violation, if any

    void fail(const std::string& what) {
        ++violations;
        if (first_failure.empty()) first_failure = what;
    }
};

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Ground-truth partial-equivalence test: dense matrices, textbook
/// quantifiers. Out-of-range endpoints disqualify the relation.
inline bool oracle_is_per(const RelationData& d) {
    for (int a = 0; a < d.num_agents; ++a) {
        std::vector<std::vector<bool>> rel(
            static_cast<std::size_t>(d.num_worlds),
            std::vector<bool>(static_cast<std::size_t>(d.num_worlds), false));
        for (auto [i, j] : d.edges[static_cast<std::size_t>(a)]) {
            if (i < 0 || j < 0 || i >= d.num_worlds || j >= d.num_worlds) return false;
            rel[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        }
        for (int i = 0; i < d.num_worlds; ++i)
            for (int j = 0; j < d.num_worlds; ++j) {
                if (rel[i][j] && !rel[j][i]) return false;
                for (int k = 0; k < d.num_worlds; ++k)
                    if (rel[i][j] && rel[j][k] && !rel[i][k]) return false;
            }
    }
    return true;
}

/// Ground-truth formula semantics: plain recursion, no sharing, no memo.
/// K_a is a scan over every world of the model.
inline bool oracle_eval(const PartialEpistemicModel& m, int w, const FormulaPtr& f) {
    switch (f->kind) {
        case FormulaKind::atom:
            return contains(m.labels[static_cast<std::size_t>(w)], f->atom);
        case FormulaKind::negation: return !oracle_eval(m, w, f->left);
        case FormulaKind::conjunction:
            return oracle_eval(m, w, f->left) && oracle_eval(m, w, f->right);
        case FormulaKind::disjunction:
            return oracle_eval(m, w, f->left) || oracle_eval(m, w, f->right);
        case FormulaKind::knows:
            for (int u = 0; u < m.num_worlds(); ++u)
                if (m.rel.related(f->agent, w, u) && !oracle_eval(m, u, f->left)) return false;
            return true;
    }
    return false;
}

/// Ground-truth one-round message-passing indistinguishability on input
/// facets: x and y look alike to every survivor of t when each agent whose
/// message got through to some survivor carries the same value in both.
inline bool oracle_same_class(const SimplicialModel& input, const FailurePattern& t, int x,
                              int y) {
    const Simplex& fx = input.complex.facets()[static_cast<std::size_t>(x)];
    const Simplex& fy = input.complex.facets()[static_cast<std::size_t>(y)];
    for (Agent a : t.alive())
        for (Agent b = 0; b < t.num_agents(); ++b) {
            if (t.send_fail(b, a)) continue;
            if (fx.value_of(b) != fy.value_of(b)) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

/// Random partial equivalence built from random blocks: per agent, each world
/// is dead or thrown into one of a few bins; bins become complete blocks.
inline RelationData random_per_data(Rng& rng, int num_agents, int num_worlds) {
    RelationData d = RelationData::empty(num_agents, num_worlds);
    for (Agent a = 0; a < num_agents; ++a) {
        int bins = pick(rng, 1, std::max(1, num_worlds / 2 + 1));
        std::vector<std::vector<int>> members(static_cast<std::size_t>(bins));
        for (int w = 0; w < num_worlds; ++w) {
            if (chance(rng, 0.25)) continue; // dead here
            members[static_cast<std::size_t>(pick(rng, 0, bins - 1))].push_back(w);
        }
        for (const auto& block : members)
            for (std::size_t i = 0; i < block.size(); ++i)
                for (std::size_t j = i; j < block.size(); ++j) d.add_edge(a, block[i], block[j]);
    }
    return d;
}

/// Random labeled model over the given worlds; labels are constant on each
/// agent's blocks so that saturated images agree on their visible atoms.
inline PartialEpistemicModel random_model(Rng& rng, int num_agents, int num_worlds,
                                          int num_values, bool block_uniform_labels) {
    RelationData d = random_per_data(rng, num_agents, num_worlds);
    PerRelation rel = PerRelation::checked(std::move(d));
    std::vector<std::string> keys;
    for (int w = 0; w < num_worlds; ++w) keys.push_back("w" + std::to_string(w));
    std::vector<AtomSet> labels(static_cast<std::size_t>(num_worlds));
    for (Agent a = 0; a < num_agents; ++a) {
        if (block_uniform_labels) {
            std::vector<int> block_value; // lazily grown per block id
            for (int w = 0; w < num_worlds; ++w) {
                if (!rel.in_domain(a, w)) {
                    if (chance(rng, 0.5))
                        labels[static_cast<std::size_t>(w)].push_back({a, pick(rng, 0, num_values - 1)});
                    continue;
                }
                int rep = rel.block_of(a, w).front();
                if (rep == w) block_value.push_back(chance(rng, 0.3) ? -1 : pick(rng, 0, num_values - 1));
            }
            // second pass: copy the representative's choice
            std::map<int, int> rep_choice;
            int next = 0;
            for (int w = 0; w < num_worlds; ++w) {
                if (!rel.in_domain(a, w)) continue;
                int rep = rel.block_of(a, w).front();
                if (rep == w) rep_choice[rep] = block_value[static_cast<std::size_t>(next++)];
            }
            for (int w = 0; w < num_worlds; ++w) {
                if (!rel.in_domain(a, w)) continue;
                int v = rep_choice[rel.block_of(a, w).front()];
                if (v >= 0) labels[static_cast<std::size_t>(w)].push_back({a, v});
            }
        } else {
            for (int w = 0; w < num_worlds; ++w)
                if (chance(rng, 0.5))
                    labels[static_cast<std::size_t>(w)].push_back({a, pick(rng, 0, num_values - 1)});
        }
    }
    for (AtomSet& l : labels) normalize_atom_set(l);
    return PartialEpistemicModel(std::move(keys), std::move(rel), std::move(labels));
}

/// Random formula over num_agents agents and values 0..num_values-1.
inline FormulaPtr random_formula(Rng& rng, int num_agents, int num_values, int depth) {
    if (depth <= 0 || chance(rng, 0.3))
        return make_atom(pick(rng, 0, num_agents - 1), pick(rng, 0, num_values - 1));
    switch (pick(rng, 0, 5)) {
        case 0: return make_neg(random_formula(rng, num_agents, num_values, depth - 1));
        case 1:
            return make_and(random_formula(rng, num_agents, num_values, depth - 1),
                            random_formula(rng, num_agents, num_values, depth - 1));
        case 2:
            return make_or(random_formula(rng, num_agents, num_values, depth - 1),
                           random_formula(rng, num_agents, num_values, depth - 1));
        case 3:
            return make_knows(pick(rng, 0, num_agents - 1),
                              random_formula(rng, num_agents, num_values, depth - 1));
        case 4: return chance(rng, 0.5) ? make_true() : make_false();
        default:
            return make_implies(random_formula(rng, num_agents, num_values, depth - 1),
                                random_formula(rng, num_agents, num_values, depth - 1));
    }
}

/// Random purely propositional formula over the atoms At_B of the agents in B.
inline FormulaPtr random_pure_prop(Rng& rng, const std::vector<Agent>& b, int num_values,
                                   int depth) {
    if (b.empty()) return chance(rng, 0.5) ? make_true() : make_false();
    if (depth <= 0 || chance(rng, 0.4))
        return make_atom(b[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(b.size()) - 1))],
                         pick(rng, 0, num_values - 1));
    switch (pick(rng, 0, 2)) {
        case 0: return make_neg(random_pure_prop(rng, b, num_values, depth - 1));
        case 1:
            return make_and(random_pure_prop(rng, b, num_values, depth - 1),
                            random_pure_prop(rng, b, num_values, depth - 1));
        default:
            return make_or(random_pure_prop(rng, b, num_values, depth - 1),
                           random_pure_prop(rng, b, num_values, depth - 1));
    }
}

/// Random guarded positive formula: alive-guarded propositional facts closed
/// under conjunction, disjunction, and knowledge.
inline FormulaPtr random_guarded_positive(Rng& rng, int num_agents, int num_values, int depth) {
    if (depth <= 0 || chance(rng, 0.35)) {
        std::vector<Agent> b;
        for (Agent a = 0; a < num_agents; ++a)
            if (chance(rng, 0.6)) b.push_back(a);
        if (b.empty()) b.push_back(pick(rng, 0, num_agents - 1));
        return make_implies(make_alive(b), random_pure_prop(rng, b, num_values, 2));
    }
    switch (pick(rng, 0, 2)) {
        case 0:
            return make_and(random_guarded_positive(rng, num_agents, num_values, depth - 1),
                            random_guarded_positive(rng, num_agents, num_values, depth - 1));
        case 1:
            return make_or(random_guarded_positive(rng, num_agents, num_values, depth - 1),
                           random_guarded_positive(rng, num_agents, num_values, depth - 1));
        default:
            return make_knows(pick(rng, 0, num_agents - 1),
                              random_guarded_positive(rng, num_agents, num_values, depth - 1));
    }
}

// ---------------------------------------------------------------------------
// Suite 1: partial-equivalence recognition
// ---------------------------------------------------------------------------

inline SuiteResult per_suite(long long cases, unsigned seed) {
    Rng rng(seed);
    SuiteResult res;
    for (long long c = 0; c < cases; ++c) {
        ++res.cases;
        int na = pick(rng, 1, 3), nw = pick(rng, 1, 7);
        RelationData d;
        if (chance(rng, 0.5)) {
            d = random_per_data(rng, na, nw);
            // Occasionally poke extra random edges into a clean PER.
            if (chance(rng, 0.4))
                for (int k = pick(rng, 1, 3); k-- > 0;)
                    d.add_edge(pick(rng, 0, na - 1), pick(rng, 0, nw - 1), pick(rng, 0, nw - 1));
        } else {
            d = RelationData::empty(na, nw);
            for (int k = pick(rng, 0, 10); k-- > 0;)
                d.add_edge(pick(rng, 0, na - 1), pick(rng, 0, nw - 1), pick(rng, 0, nw - 1));
        }
        bool expected = oracle_is_per(d);
        if (relation_is_per(d) != expected) {
            res.fail("relation_is_per disagrees with the dense oracle (case " +
                     std::to_string(c) + ")");
            continue;
        }
        if (expected) {
            // A valid PER must load, and the loaded blocks must reproduce it.
            PerRelation rel = PerRelation::checked(d);
            std::set<std::pair<int, int>> want[3];
            for (int a = 0; a < na; ++a)
                for (auto [i, j] : d.edges[static_cast<std::size_t>(a)])
                    want[a].insert({std::min(i, j), std::max(i, j)});
            for (int a = 0; a < na && !res.violations; ++a)
                for (int i = 0; i < nw; ++i)
                    for (int j = 0; j < nw; ++j) {
                        bool e = want[a].count({std::min(i, j), std::max(i, j)}) > 0;
                        if (rel.related(a, i, j) != e) {
                            res.fail("PerRelation membership mismatch");
                            break;
                        }
                    }
        } else {
            try {
                PerRelation::checked(d);
                res.fail("PerRelation::checked accepted a non-PER");
            } catch (const error&) {
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Suite 2: message-passing class equivalence and representative independence
// ---------------------------------------------------------------------------

inline SuiteResult class_equivalence_suite(long long cases, unsigned seed) {
    Rng rng(seed);
    SuiteResult res;
    std::vector<SimplicialModel> inputs;
    std::vector<std::vector<FailurePattern>> pats;
    for (int n = 2; n <= 3; ++n) {
        inputs.push_back(input_model(n));
        pats.push_back(failure_patterns(n));
    }
    for (long long c = 0; c < cases; ++c) {
        ++res.cases;
        int which = pick(rng, 0, 1);
        const SimplicialModel& input = inputs[static_cast<std::size_t>(which)];
        const auto& patterns = pats[static_cast<std::size_t>(which)];
        const FailurePattern& t =
            patterns[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(patterns.size()) - 1))];
        int m = static_cast<int>(input.complex.facets().size());
        int x = pick(rng, 0, m - 1);
        InputClass cx = class_of(input, t, x);
        if (!std::binary_search(cx.begin(), cx.end(), x)) {
            res.fail("class_of is not reflexive");
            continue;
        }
        for (int y = 0; y < m; ++y) {
            bool in_class = std::binary_search(cx.begin(), cx.end(), y);
            if (in_class != oracle_same_class(input, t, x, y)) {
                res.fail("class membership disagrees with the visibility oracle");
                break;
            }
            if (in_class && class_of(input, t, y) != cx) {
                res.fail("class_of depends on the representative");
                break;
            }
            // symmetry + transitivity through a third world
            if (in_class) {
                InputClass cy = class_of(input, t, y);
                if (!std::binary_search(cy.begin(), cy.end(), x)) {
                    res.fail("class membership is not symmetric");
                    break;
                }
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Suite 3: product-update relation well-definedness
// ---------------------------------------------------------------------------

inline SuiteResult update_relation_suite(long long cases, unsigned seed) {
    Rng rng(seed);
    SuiteResult res;
    long long c = 0;
    while (c < cases) {
        int na = pick(rng, 1, 3), nw = pick(rng, 2, 6), nv = pick(rng, 1, 2);
        PartialEpistemicModel m = random_model(rng, na, nw, nv, false);
        if (!is_proper(m)) continue;
        // Random action model over the same agents: random PER frame plus
        // shallow random preconditions.
        int nt = pick(rng, 1, 4);
        RelationData ad = random_per_data(rng, na, nt);
        std::vector<std::string> akeys;
        std::vector<FormulaPtr> pre;
        for (int t = 0; t < nt; ++t) {
            akeys.push_back("t" + std::to_string(t));
            if (chance(rng, 0.4))
                pre.push_back(make_true());
            else
                pre.push_back(random_pure_prop(rng, [&] {
                    std::vector<Agent> all;
                    for (Agent a = 0; a < na; ++a) all.push_back(a);
                    return all;
                }(), nv, 2));
        }
        ActionModel actions(std::move(akeys), PerRelation::checked(std::move(ad)),
                            std::move(pre));
        if (!is_proper(actions.frame())) continue;
        std::optional<UpdateModel> maybe_um;
        try {
            maybe_um.emplace(product_update(m, actions));
        } catch (const error&) {
            continue; // nothing applicable anywhere: resample
        }
        UpdateModel& um = *maybe_um;
        ++c;
        ++res.cases;
        if (!check_per(um.model)) {
            res.fail("product update produced a non-PER relation");
            continue;
        }
        if (!is_proper(um.model)) {
            res.fail("product update lost properness");
            continue;
        }
        int uw = um.model.num_worlds();
        for (int i = 0; i < uw && !res.violations; ++i)
            for (int j = 0; j < uw; ++j) {
                const UpdateWorld& wi = um.worlds[static_cast<std::size_t>(i)];
                const UpdateWorld& wj = um.worlds[static_cast<std::size_t>(j)];
                for (Agent a = 0; a < na; ++a) {
                    bool some = false, all = true;
                    for (int x : wi.members)
                        for (int y : wj.members) {
                            if (m.rel.related(a, x, y))
                                some = true;
                            else
                                all = false;
                        }
                    bool act = actions.rel.related(a, wi.action, wj.action);
                    bool expected = act && some;
                    if (expected != (act && all)) {
                        res.fail("update relation depends on representatives");
                        break;
                    }
                    if (um.model.rel.related(a, i, j) != expected) {
                        res.fail("update relation disagrees with the componentwise oracle");
                        break;
                    }
                }
                if (res.violations) break;
            }
        // Labels: intersection over the class.
        for (int i = 0; i < uw && !res.violations; ++i) {
            const UpdateWorld& wi = um.worlds[static_cast<std::size_t>(i)];
            AtomSet want = m.labels[static_cast<std::size_t>(wi.members.front())];
            for (int x : wi.members) want = intersect(want, m.labels[static_cast<std::size_t>(x)]);
            if (want != um.model.labels[static_cast<std::size_t>(i)])
                res.fail("update labels are not the class intersection");
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Suite 4: knowledge gain along verified morphisms
// ---------------------------------------------------------------------------

/// Builds a random verified morphism instance: a destination model, a source
/// whose worlds are saturated destination sets, and the induced maximal
/// relation. Returns false when the sampled data fails the morphism laws
/// (the caller resamples).
struct MorphismInstance {
    PartialEpistemicModel src;
    PartialEpistemicModel dst;
    std::vector<std::vector<int>> images;
};

inline std::optional<MorphismInstance> sample_morphism(Rng& rng, int na, int nv) {
    int nw = pick(rng, 2, 10);
    PartialEpistemicModel dst = random_model(rng, na, nw, nv, true);
    int k = pick(rng, 1, 10);
    std::vector<std::vector<int>> images;
    std::vector<AtomSet> src_labels;
    for (int w = 0; w < k; ++w) {
        int u = pick(rng, 0, nw - 1);
        std::vector<Agent> alive_u = alive_set(dst, u);
        std::vector<Agent> b;
        for (Agent a : alive_u)
            if (chance(rng, 0.6)) b.push_back(a);
        std::vector<int> im = saturation(dst, b, u);
        // Visible-label agreement across the image (At_B only).
        AtomSet base = restrict_to_agents(dst.labels[static_cast<std::size_t>(u)], b);
        bool agree = true;
        for (int v : im)
            if (restrict_to_agents(dst.labels[static_cast<std::size_t>(v)], b) != base) {
                agree = false;
                break;
            }
        if (!agree) return std::nullopt;
        images.push_back(std::move(im));
        AtomSet label = base;
        if (chance(rng, 0.3)) {
            // atoms of agents outside B are invisible to the laws
            for (Agent a = 0; a < dst.num_agents(); ++a)
                if (!std::binary_search(b.begin(), b.end(), a)) {
                    label.push_back({a, pick(rng, 0, nv - 1)});
                    break;
                }
            normalize_atom_set(label);
        }
        src_labels.push_back(std::move(label));
    }
    // Maximal law-compatible source relation.
    RelationData sd = RelationData::empty(na, k);
    for (Agent a = 0; a < na; ++a)
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                bool ok = true;
                for (int x : images[static_cast<std::size_t>(i)]) {
                    for (int y : images[static_cast<std::size_t>(j)])
                        if (!dst.rel.related(a, x, y)) {
                            ok = false;
                            break;
                        }
                    if (!ok) break;
                }
                if (ok) sd.add_edge(a, i, j);
            }
    std::vector<std::string> keys;
    for (int w = 0; w < k; ++w) keys.push_back("s" + std::to_string(w));
    PartialEpistemicModel src(std::move(keys), PerRelation::checked(std::move(sd)),
                              std::move(src_labels));
    MorphismCheck mc = verify_morphism(images, src, dst);
    if (std::holds_alternative<MorphismViolation>(mc)) return std::nullopt;
    return MorphismInstance{std::move(src), std::move(dst), std::move(images)};
}

inline SuiteResult knowledge_gain_suite(long long cases, unsigned seed) {
    Rng rng(seed);
    SuiteResult res;
    long long c = 0;
    long long attempts = 0;
    while (c < cases) {
        if (++attempts > cases * 300) {
            res.fail("could not sample enough verified morphisms");
            break;
        }
        int na = pick(rng, 1, 3), nv = pick(rng, 1, 2);
        std::optional<MorphismInstance> inst = sample_morphism(rng, na, nv);
        if (!inst) continue;
        ++c;
        ++res.cases;
        FormulaPtr phi = random_guarded_positive(rng, na, nv, pick(rng, 1, 4));
        if (!is_guarded_positive(phi)) {
            res.fail("random guarded-positive generator escaped the fragment");
            continue;
        }
        for (int w = 0; w < inst->src.num_worlds(); ++w) {
            bool everywhere = true;
            for (int u : inst->images[static_cast<std::size_t>(w)])
                if (!eval(inst->dst, u, phi)) {
                    everywhere = false;
                    break;
                }
            if (everywhere && !eval(inst->src, w, phi)) {
                res.fail("knowledge gain failed: image satisfies " + print(phi) +
                         " but the source world does not");
                break;
            }
        }
        ValidityResult vd = is_valid(inst->dst, phi);
        if (vd.valid && !is_valid(inst->src, phi).valid)
            res.fail("validity did not transfer along a verified morphism");
    }
    return res;
}

// ---------------------------------------------------------------------------
// Suite 5: evaluator versus the naive oracle
// ---------------------------------------------------------------------------

inline SuiteResult evaluator_suite(long long cases, unsigned seed) {
    Rng rng(seed);
    SuiteResult res;
    for (long long c = 0; c < cases; ++c) {
        ++res.cases;
        int na = pick(rng, 1, 3), nw = pick(rng, 1, 6), nv = pick(rng, 1, 3);
        PartialEpistemicModel m = random_model(rng, na, nw, nv, false);
        FormulaPtr f = random_formula(rng, na, nv, pick(rng, 0, 5));
        Evaluator ev(m);
        for (int w = 0; w < nw; ++w) {
            bool got = ev.eval(w, f);
            if (got != oracle_eval(m, w, f)) {
                res.fail("memoized evaluator disagrees with the naive oracle on " + print(f));
                break;
            }
            if (got != eval(m, w, f)) {
                res.fail("eval() convenience wrapper disagrees with the evaluator");
                break;
            }
        }
        // Validity witness must be the least falsifying world.
        ValidityResult vr = is_valid(m, f);
        int least = -1;
        for (int w = 0; w < nw && least < 0; ++w)
            if (!oracle_eval(m, w, f)) least = w;
        if (vr.valid != (least < 0) || (!vr.valid && vr.witness != least))
            res.fail("is_valid verdict or witness disagrees with the oracle scan");
    }
    return res;
}

} // namespace epistemia::suites
