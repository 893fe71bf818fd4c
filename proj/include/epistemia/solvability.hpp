#pragma once

#include "update.hpp"

#include <functional>

namespace epistemia {

/// A task-solvability problem instance: shared input model, two action
/// models, and their cached partial product updates.
struct SolvabilityInstance {
    SimplicialModel input;
    ActionModel protocol;
    ActionModel task;
    UpdateModel protocol_update;
    UpdateModel task_update;
};

inline SolvabilityInstance make_instance(SimplicialModel input, ActionModel protocol,
                                         ActionModel task) {
    PartialEpistemicModel m = derive_model(input);
    UpdateModel pu = product_update(m, protocol);
    UpdateModel tu = product_update(m, task);
    return {std::move(input), std::move(protocol), std::move(task), std::move(pu), std::move(tu)};
}

/// Outcome of check_solution: either an accepted morphism or the first
/// reason for rejection.
struct SolutionCheck {
    bool accepted = false;
    std::string reason;                         // human-readable rejection cause
    std::optional<MorphismViolation> violation; // failed morphism law, if any
    std::optional<int> uncovered_world;         // protocol world whose class leaks
    std::optional<int> uncovered_member;        // the input world not covered
};

/// A solution must be a morphism from the protocol update to the task update
/// and must cover inputs: every input world in a protocol world's class
/// belongs to the class of some chosen task world.
inline SolutionCheck check_solution(const SolvabilityInstance& inst,
                                    const std::vector<std::vector<int>>& candidate) {
    SolutionCheck out;
    const PartialEpistemicModel& src = inst.protocol_update.model;
    const PartialEpistemicModel& dst = inst.task_update.model;
    MorphismCheck mc = verify_morphism(candidate, src, dst);
    if (const MorphismViolation* v = std::get_if<MorphismViolation>(&mc)) {
        out.reason = describe(*v, src, dst);
        out.violation = *v;
        return out;
    }
    const auto& pw = inst.protocol_update.worlds;
    const auto& tw = inst.task_update.worlds;
    const auto& images = std::get<Morphism>(mc).images();
    for (std::size_t w = 0; w < pw.size(); ++w) {
        for (int member : pw[w].members) {
            bool covered = false;
            for (int u : images[w]) {
                const InputClass& cls = tw[static_cast<std::size_t>(u)].members;
                if (std::binary_search(cls.begin(), cls.end(), member)) {
                    covered = true;
                    break;
                }
            }
            if (!covered) {
                PartialEpistemicModel input_model = derive_model(inst.input);
                out.reason = "input " + input_model.keys[static_cast<std::size_t>(member)] +
                             " of protocol world " + src.keys[w] +
                             " lies outside every image world's class";
                out.uncovered_world = static_cast<int>(w);
                out.uncovered_member = member;
                return out;
            }
        }
    }
    out.accepted = true;
    return out;
}

enum class SearchVerdict { found, unsolvable, budget_exceeded };

inline std::string to_string(SearchVerdict v) {
    switch (v) {
        case SearchVerdict::found: return "solvable";
        case SearchVerdict::unsolvable: return "unsolvable";
        default: return "budget-exceeded";
    }
}

struct SearchResult {
    SearchVerdict verdict = SearchVerdict::unsolvable;
    std::vector<std::vector<int>> morphism; // nonempty only when found
    long long nodes = 0;                    // candidate assignments tried
};

namespace detail {

/// Worlds that must share one image: a maximal set of protocol worlds with a
/// common alive set, mutually related under all of it. The saturation and
/// preservation laws force every member onto the same image block.
struct SearchGroup {
    std::vector<Agent> alive;
    std::vector<int> members;
    std::vector<std::vector<int>> options; // admissible image blocks
};

} // namespace detail

/// Backtracking search for a solution morphism. Protocol worlds are grouped
/// into saturation blocks, admissible image blocks are precomputed per group
/// (alive-compatible targets, label agreement, class coverage), and a
/// depth-first assignment extends while relation preservation holds across
/// groups. The budget caps attempted assignments; exhausting the space
/// without the budget tripping is a definitive negative.
inline SearchResult search_solution(const SolvabilityInstance& inst, long long budget = 1000000) {
    const PartialEpistemicModel& src = inst.protocol_update.model;
    const PartialEpistemicModel& dst = inst.task_update.model;
    const auto& pworlds = inst.protocol_update.worlds;
    const auto& tworlds = inst.task_update.worlds;
    SearchResult res;

    std::vector<detail::SearchGroup> groups;
    std::vector<int> group_of(static_cast<std::size_t>(src.num_worlds()), -1);
    for (int w = 0; w < src.num_worlds(); ++w) {
        if (group_of[static_cast<std::size_t>(w)] >= 0) continue;
        std::vector<Agent> alive = alive_set(src, w);
        detail::SearchGroup g;
        for (int w2 : saturation(src, alive, w))
            if (alive_set(src, w2) == alive) {
                group_of[static_cast<std::size_t>(w2)] = static_cast<int>(groups.size());
                g.members.push_back(w2);
            }
        g.alive = std::move(alive);
        groups.push_back(std::move(g));
    }

    // Assign groups with larger alive sets first; they constrain the rest.
    std::vector<int> order(groups.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
        return groups[static_cast<std::size_t>(i)].alive.size() >
               groups[static_cast<std::size_t>(j)].alive.size();
    });

    for (detail::SearchGroup& g : groups) {
        std::set<std::vector<int>> seen;
        for (int u = 0; u < dst.num_worlds(); ++u) {
            bool alive_ok = true;
            for (Agent ag : g.alive)
                if (!dst.rel.in_domain(ag, u)) {
                    alive_ok = false;
                    break;
                }
            if (!alive_ok) continue;
            std::vector<int> block = saturation(dst, g.alive, u);
            if (!seen.insert(block).second) continue;
            bool ok = true;
            for (std::size_t mi = 0; mi < g.members.size() && ok; ++mi) {
                int w = g.members[mi];
                AtomSet src_lab =
                    restrict_to_agents(src.labels[static_cast<std::size_t>(w)], g.alive);
                for (int u2 : block)
                    if (restrict_to_agents(dst.labels[static_cast<std::size_t>(u2)], g.alive) !=
                        src_lab) {
                        ok = false;
                        break;
                    }
                if (!ok) break;
                for (int member : pworlds[static_cast<std::size_t>(w)].members) {
                    bool covered = false;
                    for (int u2 : block) {
                        const InputClass& cls = tworlds[static_cast<std::size_t>(u2)].members;
                        if (std::binary_search(cls.begin(), cls.end(), member)) {
                            covered = true;
                            break;
                        }
                    }
                    if (!covered) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) g.options.push_back(std::move(block));
        }
        if (g.options.empty()) return res; // some group has no admissible image
    }

    // Cross-group relation edges, keyed to the later-assigned group.
    struct Edge {
        int earlier, later; // positions in the assignment order
        Agent agent;
    };
    std::vector<int> pos(groups.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    std::vector<Edge> edges;
    for (Agent ag = 0; ag < src.num_agents(); ++ag)
        for (auto [w, w2] : src.rel.edges(ag)) {
            int p1 = pos[static_cast<std::size_t>(group_of[static_cast<std::size_t>(w)])];
            int p2 = pos[static_cast<std::size_t>(group_of[static_cast<std::size_t>(w2)])];
            if (p1 == p2) continue; // intra-group edges hold by block structure
            edges.push_back({std::min(p1, p2), std::max(p1, p2), ag});
        }

    std::vector<int> choice(groups.size(), -1);
    bool exceeded = false;

    auto compatible = [&](int depth) {
        const auto& g = groups[static_cast<std::size_t>(order[static_cast<std::size_t>(depth)])];
        const auto& img = g.options[static_cast<std::size_t>(choice[static_cast<std::size_t>(depth)])];
        for (const Edge& e : edges) {
            if (e.later != depth) continue;
            const auto& g1 = groups[static_cast<std::size_t>(order[static_cast<std::size_t>(e.earlier)])];
            const auto& img1 =
                g1.options[static_cast<std::size_t>(choice[static_cast<std::size_t>(e.earlier)])];
            for (int u1 : img1)
                for (int u2 : img)
                    if (!dst.rel.related(e.agent, u1, u2)) return false;
        }
        return true;
    };

    std::function<bool(int)> assign = [&](int depth) -> bool {
        if (depth == static_cast<int>(groups.size())) return true;
        for (std::size_t opt = 0;
             opt < groups[static_cast<std::size_t>(order[static_cast<std::size_t>(depth)])].options.size();
             ++opt) {
            if (++res.nodes > budget) {
                exceeded = true;
                return false;
            }
            choice[static_cast<std::size_t>(depth)] = static_cast<int>(opt);
            if (compatible(depth) && assign(depth + 1)) return true;
            if (exceeded) return false;
        }
        choice[static_cast<std::size_t>(depth)] = -1;
        return false;
    };

    if (assign(0)) {
        std::vector<std::vector<int>> images(static_cast<std::size_t>(src.num_worlds()));
        for (std::size_t d = 0; d < order.size(); ++d) {
            const auto& g = groups[static_cast<std::size_t>(order[d])];
            const auto& img = g.options[static_cast<std::size_t>(choice[d])];
            for (int w : g.members) images[static_cast<std::size_t>(w)] = img;
        }
        if (check_solution(inst, images).accepted) {
            res.verdict = SearchVerdict::found;
            res.morphism = std::move(images);
            return res;
        }
        // Failing independent re-verification would be an internal bug; keep
        // the safe negative verdicts rather than report a bogus witness.
    }
    res.verdict = exceeded ? SearchVerdict::budget_exceeded : SearchVerdict::unsolvable;
    return res;
}

/// Path of worlds refuting a nested-knowledge formula: worlds[0] falsifies
/// the whole formula and step i moves along ~_{agents[i]} to a world
/// falsifying the next knowledge body.
struct FalsificationTrace {
    std::vector<int> worlds;
    std::vector<Agent> agents; // agents.size() == worlds.size() - 1
};

/// Deterministic refutation of a false formula at a world: a false
/// disjunction descends into its (equally false) left branch, and each false
/// K_agent node moves to the least related world falsifying the body.
inline FalsificationTrace falsification_trace(const PartialEpistemicModel& m, const FormulaPtr& f,
                                              int world) {
    Evaluator ev(m);
    if (ev.eval(world, f))
        throw error("falsification trace requires a world where the formula fails");
    FalsificationTrace out;
    out.worlds.push_back(world);
    const Formula* cur = f.get();
    int at = world;
    while (true) {
        if (cur->kind == FormulaKind::disjunction) {
            cur = cur->left.get();
            continue;
        }
        if (cur->kind == FormulaKind::knows && m.rel.in_domain(cur->agent, at)) {
            int next = -1;
            for (int u : m.rel.block_of(cur->agent, at))
                if (!ev.eval(u, cur->left) && (next < 0 || u < next)) next = u;
            if (next < 0) break; // cannot happen for a false K node
            out.worlds.push_back(next);
            out.agents.push_back(cur->agent);
            at = next;
            cur = cur->left.get();
            continue;
        }
        break;
    }
    return out;
}

enum class ObstructionVerdict {
    obstruction,
    not_guarded_positive,
    not_valid_in_task,
    not_invalid_in_protocol
};

inline std::string to_string(ObstructionVerdict v) {
    switch (v) {
        case ObstructionVerdict::obstruction: return "obstruction";
        case ObstructionVerdict::not_guarded_positive: return "not-guarded-positive";
        case ObstructionVerdict::not_valid_in_task: return "not-valid-in-task";
        default: return "not-invalid-in-protocol";
    }
}

struct ObstructionResult {
    ObstructionVerdict verdict = ObstructionVerdict::not_guarded_positive;
    std::optional<int> task_counterexample; // task world refuting validity
    std::optional<int> witness;             // protocol world falsifying phi
    FalsificationTrace trace;               // filled for verdict obstruction
};

/// A logical obstruction is a guarded positive formula valid in the task
/// update but falsified somewhere in the protocol update; its existence
/// refutes solvability.
inline ObstructionResult check_obstruction(const SolvabilityInstance& inst,
                                           const FormulaPtr& phi) {
    ObstructionResult out;
    if (!is_guarded_positive(phi)) {
        out.verdict = ObstructionVerdict::not_guarded_positive;
        return out;
    }
    ValidityResult task_val = is_valid(inst.task_update.model, phi);
    if (!task_val.valid) {
        out.verdict = ObstructionVerdict::not_valid_in_task;
        out.task_counterexample = task_val.witness;
        return out;
    }
    ValidityResult proto_val = is_valid(inst.protocol_update.model, phi);
    if (proto_val.valid) {
        out.verdict = ObstructionVerdict::not_invalid_in_protocol;
        return out;
    }
    out.verdict = ObstructionVerdict::obstruction;
    out.witness = proto_val.witness;
    out.trace = falsification_trace(inst.protocol_update.model, phi, proto_val.witness);
    return out;
}

// ---------------------------------------------------------------------------
// Topological bridge: facet maps, simplicial tasks/protocols, the action
// translation, and the decision-map search.
// ---------------------------------------------------------------------------

/// Carries each source facet to a nonempty set of destination facets,
/// shrinking colors and exhausting the destination.
struct FacetMap {
    std::vector<std::vector<int>> images; // per source facet, sorted dst facet ids
};

inline void validate_facet_map(const Complex& src, const Complex& dst, const FacetMap& fm) {
    if (fm.images.size() != src.facets().size())
        throw error("facet map must cover every source facet");
    std::vector<char> hit(dst.facets().size(), 0);
    for (std::size_t x = 0; x < fm.images.size(); ++x) {
        if (fm.images[x].empty()) throw error("facet map images must be nonempty");
        std::vector<Agent> colors = chi(src.facets()[x]);
        for (int y : fm.images[x]) {
            if (y < 0 || y >= static_cast<int>(dst.facets().size()))
                throw error("facet map image index out of range");
            hit[static_cast<std::size_t>(y)] = 1;
            for (Agent a : chi(dst.facets()[static_cast<std::size_t>(y)]))
                if (!std::binary_search(colors.begin(), colors.end(), a))
                    throw error("facet map must not grow colors: facet " +
                                facet_key(src.facets()[x]));
        }
    }
    for (std::size_t y = 0; y < hit.size(); ++y)
        if (!hit[y]) throw error("facet map misses destination facet " + facet_key(dst.facets()[y]));
}

enum class SimplicialKind { task, protocol };

/// A task or protocol in the topological presentation: input model, output
/// complex, and a facet map from input facets to admissible outputs.
/// Protocols must not lose intersection colors: an agent observing the same
/// output must have been unable to distinguish the inputs.
struct SimplicialTaskOrProtocol {
    SimplicialModel input;
    Complex output;
    FacetMap map;
    SimplicialKind kind = SimplicialKind::task;

    static SimplicialTaskOrProtocol make(SimplicialModel input, Complex output, FacetMap map,
                                         SimplicialKind kind) {
        validate_facet_map(input.complex, output, map);
        if (kind == SimplicialKind::protocol) {
            const auto& in_f = input.complex.facets();
            const auto& out_f = output.facets();
            for (std::size_t x1 = 0; x1 < in_f.size(); ++x1)
                for (std::size_t x2 = 0; x2 < in_f.size(); ++x2) {
                    std::vector<Agent> allowed = chi_shared(in_f[x1], in_f[x2]);
                    for (int y1 : map.images[x1])
                        for (int y2 : map.images[x2])
                            for (Agent a : chi_shared(out_f[static_cast<std::size_t>(y1)],
                                                      out_f[static_cast<std::size_t>(y2)]))
                                if (!std::binary_search(allowed.begin(), allowed.end(), a))
                                    throw error("protocol map lets agent " + std::to_string(a) +
                                                " observe equal outputs on inputs it distinguishes");
                }
        }
        return {std::move(input), std::move(output), std::move(map), kind};
    }
};

/// Action-model translation of a simplicial task or protocol: one action per
/// output facet, related where outputs share colors, preconditioned on the
/// disjunction of the inputs admitting the output.
inline ActionModel kappa(const SimplicialTaskOrProtocol& tp) {
    const auto& out_facets = tp.output.facets();
    int n = tp.output.num_agents();
    std::vector<std::string> keys;
    keys.reserve(out_facets.size());
    for (const Simplex& s : out_facets) keys.push_back(facet_key(s));
    RelationData d = RelationData::empty(n, static_cast<int>(out_facets.size()));
    for (std::size_t i = 0; i < out_facets.size(); ++i)
        for (std::size_t j = i; j < out_facets.size(); ++j)
            for (Agent a : chi_shared(out_facets[i], out_facets[j]))
                d.add_edge(a, static_cast<int>(i), static_cast<int>(j));
    std::vector<FormulaPtr> pre(out_facets.size());
    for (std::size_t x = 0; x < tp.map.images.size(); ++x) {
        FormulaPtr member;
        for (const Atom& at : tp.input.labels[x]) {
            FormulaPtr atom = make_atom(at.agent, at.value);
            member = member ? make_and(std::move(member), std::move(atom)) : std::move(atom);
        }
        if (!member) member = make_true();
        for (int y : tp.map.images[x]) {
            auto& slot = pre[static_cast<std::size_t>(y)];
            slot = slot ? make_or(std::move(slot), member) : member;
        }
    }
    for (auto& p : pre)
        if (!p) p = make_false(); // unreachable when the map is surjective
    return ActionModel(std::move(keys), PerRelation::checked(std::move(d)), std::move(pre));
}

struct DecisionMapResult {
    bool found = false;
    std::map<Vertex, Vertex> map; // protocol-output vertex -> task-output vertex
};

/// Exhaustive search for a color-preserving simplicial decision map from the
/// protocol's outputs to the task's outputs such that every admissible
/// protocol output for an input lands inside an admissible task output for
/// the same input.
inline DecisionMapResult search_decision_map(const SimplicialTaskOrProtocol& protocol,
                                             const SimplicialTaskOrProtocol& task) {
    if (protocol.input.complex.facets() != task.input.complex.facets())
        throw error("decision map search requires a shared input complex");
    const Complex& pc = protocol.output;
    const Complex& tc = task.output;
    std::vector<Vertex> pverts = pc.vertices();
    std::vector<Vertex> tverts = tc.vertices();

    std::vector<std::vector<Vertex>> candidates(pverts.size());
    for (std::size_t i = 0; i < pverts.size(); ++i)
        for (const Vertex& tv : tverts)
            if (tv.agent == pverts[i].agent) candidates[i].push_back(tv);

    std::map<Vertex, int> vertex_slot;
    for (std::size_t i = 0; i < pverts.size(); ++i) vertex_slot[pverts[i]] = static_cast<int>(i);

    // Constraints (one per admissible protocol output of each input facet),
    // keyed by the last vertex slot they mention for early pruning.
    struct Constraint {
        std::vector<int> slots;
        std::vector<int> task_facets;
    };
    std::vector<std::vector<Constraint>> by_last_slot(pverts.size());
    const auto& in_facets = protocol.input.complex.facets();
    for (std::size_t x = 0; x < in_facets.size(); ++x)
        for (int y : protocol.map.images[x]) {
            Constraint c;
            int last = 0;
            for (const Vertex& v : pc.facets()[static_cast<std::size_t>(y)].vertices()) {
                int slot = vertex_slot.at(v);
                c.slots.push_back(slot);
                last = std::max(last, slot);
            }
            c.task_facets = task.map.images[x];
            by_last_slot[static_cast<std::size_t>(last)].push_back(std::move(c));
        }

    std::vector<int> pick(pverts.size(), -1);
    auto satisfied = [&](const Constraint& c) {
        for (int z : c.task_facets) {
            const Simplex& target = tc.facets()[static_cast<std::size_t>(z)];
            bool inside = true;
            for (int slot : c.slots) {
                const Vertex& img =
                    candidates[static_cast<std::size_t>(slot)]
                              [static_cast<std::size_t>(pick[static_cast<std::size_t>(slot)])];
                if (!target.contains(img)) {
                    inside = false;
                    break;
                }
            }
            if (inside) return true;
        }
        return false;
    };

    std::function<bool(std::size_t)> assign = [&](std::size_t slot) -> bool {
        if (slot == pverts.size()) return true;
        for (std::size_t k = 0; k < candidates[slot].size(); ++k) {
            pick[slot] = static_cast<int>(k);
            bool ok = true;
            for (const Constraint& c : by_last_slot[slot])
                if (!satisfied(c)) {
                    ok = false;
                    break;
                }
            if (ok && assign(slot + 1)) return true;
        }
        pick[slot] = -1;
        return false;
    };

    DecisionMapResult res;
    if (!assign(0)) return res;
    res.found = true;
    for (std::size_t i = 0; i < pverts.size(); ++i)
        res.map[pverts[i]] = candidates[i][static_cast<std::size_t>(pick[i])];
    return res;
}

/// Agreement check between the two solvability characterizations on one
/// instance: the topological decision-map search and the morphism search
/// over the translated action models must reach the same verdict.
struct ProbeReport {
    bool topological_exists = false;
    bool logical_exists = false;
    bool definitive = false; // false only if the morphism search hit its budget
    bool agree = false;
    DecisionMapResult decision_map;
    SearchResult morphism_search;
};

inline ProbeReport equivalence_probe(const SimplicialTaskOrProtocol& protocol,
                                     const SimplicialTaskOrProtocol& task,
                                     long long budget = 1000000) {
    ProbeReport rep;
    rep.decision_map = search_decision_map(protocol, task);
    rep.topological_exists = rep.decision_map.found;
    SolvabilityInstance inst = make_instance(protocol.input, kappa(protocol), kappa(task));
    rep.morphism_search = search_solution(inst, budget);
    rep.definitive = rep.morphism_search.verdict != SearchVerdict::budget_exceeded;
    rep.logical_exists = rep.morphism_search.verdict == SearchVerdict::found;
    rep.agree = rep.definitive && rep.topological_exists == rep.logical_exists;
    return rep;
}

// ---------------------------------------------------------------------------
// Builders for the concrete tasks and protocols of interest.
// ---------------------------------------------------------------------------

/// Output complex of consensus: one disjoint full facet per value, every
/// agent decorated with the common decision.
inline Complex consensus_output_complex(int n) {
    if (n <= 0) throw error("need at least one agent");
    std::vector<int> values;
    std::vector<Simplex> facets;
    for (int v = 0; v < n; ++v) {
        values.push_back(v);
        std::vector<Vertex> vs;
        for (Agent a = 0; a < n; ++a) vs.push_back({a, v});
        facets.emplace_back(std::move(vs));
    }
    return Complex(n, std::move(values), std::move(facets));
}

/// Consensus as a simplicial task: from input facet X, any decision value
/// held by some agent in X is admissible.
inline SimplicialTaskOrProtocol consensus_simplicial_task(int n) {
    SimplicialModel input = input_model(n);
    Complex output = consensus_output_complex(n);
    FacetMap fm;
    fm.images.resize(input.complex.facets().size());
    for (std::size_t x = 0; x < input.complex.facets().size(); ++x) {
        std::set<int> vals;
        for (const Vertex& v : input.complex.facets()[x].vertices()) vals.insert(v.value);
        fm.images[x].assign(vals.begin(), vals.end()); // output facet v has index v
    }
    return SimplicialTaskOrProtocol::make(std::move(input), std::move(output), std::move(fm),
                                          SimplicialKind::task);
}

/// The no-communication protocol: every process outputs its own input view.
inline SimplicialTaskOrProtocol identity_protocol(const SimplicialModel& input,
                                                  SimplicialKind kind = SimplicialKind::protocol) {
    FacetMap fm;
    fm.images.resize(input.complex.facets().size());
    for (std::size_t x = 0; x < fm.images.size(); ++x) fm.images[x] = {static_cast<int>(x)};
    return SimplicialTaskOrProtocol::make(input, input.complex, std::move(fm), kind);
}

/// One-round synchronous message passing as a simplicial protocol. Each
/// surviving agent's vertex carries its view, encoded in base |Value|+1:
/// digit b is 0 when b's message was lost and 1+index(value of b) otherwise.
inline SimplicialTaskOrProtocol mp_protocol(const SimplicialModel& input) {
    const Complex& c = input.complex;
    if (!c.is_pure()) throw error("message passing needs a pure input complex");
    int n = c.num_agents();
    const std::vector<int>& vals = c.values();
    long long base = static_cast<long long>(vals.size()) + 1;
    auto value_index = [&](int v) {
        return static_cast<int>(std::lower_bound(vals.begin(), vals.end(), v) - vals.begin());
    };

    std::vector<FailurePattern> pats = failure_patterns(n);
    std::map<Simplex, int> facet_ids;
    std::vector<Simplex> staged;
    std::vector<std::vector<int>> images(c.facets().size());
    for (std::size_t x = 0; x < c.facets().size(); ++x) {
        const Simplex& X = c.facets()[x];
        for (const FailurePattern& t : pats) {
            std::vector<Vertex> vs;
            for (Agent a : t.alive()) {
                long long code = 0;
                long long scale = 1;
                for (Agent b = 0; b < n; ++b, scale *= base) {
                    if (t.send_fail(b, a)) continue;
                    code += scale * (1 + value_index(*X.value_of(b)));
                }
                vs.push_back({a, static_cast<int>(code)});
            }
            Simplex s(std::move(vs));
            auto [it, fresh] = facet_ids.try_emplace(s, static_cast<int>(staged.size()));
            if (fresh) staged.push_back(s);
            images[x].push_back(it->second);
        }
    }
    std::vector<int> out_values;
    for (const Simplex& s : staged)
        for (const Vertex& v : s.vertices()) out_values.push_back(v.value);
    std::sort(out_values.begin(), out_values.end());
    out_values.erase(std::unique(out_values.begin(), out_values.end()), out_values.end());
    Complex output(n, std::move(out_values), staged);
    // Complex construction orders facets canonically; remap image indices.
    std::vector<int> remap(staged.size());
    for (std::size_t i = 0; i < staged.size(); ++i) remap[i] = output.facet_index(staged[i]);
    FacetMap fm;
    fm.images.resize(images.size());
    for (std::size_t x = 0; x < images.size(); ++x) {
        for (int y : images[x]) fm.images[x].push_back(remap[static_cast<std::size_t>(y)]);
        std::sort(fm.images[x].begin(), fm.images[x].end());
        fm.images[x].erase(std::unique(fm.images[x].begin(), fm.images[x].end()),
                           fm.images[x].end());
    }
    return SimplicialTaskOrProtocol::make(input, std::move(output), std::move(fm),
                                          SimplicialKind::protocol);
}

} // namespace epistemia
