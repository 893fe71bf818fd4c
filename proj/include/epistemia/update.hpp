#pragma once

#include "actions.hpp"

namespace epistemia {

/// One world of a partial product update: the set of source worlds that the
/// applied action cannot tell apart (all satisfying its precondition), plus
/// the action itself.
struct UpdateWorld {
    InputClass members; // sorted source-world indices
    int action;
};

/// A partial product update model together with its world-formation data.
struct UpdateModel {
    PartialEpistemicModel model;
    std::vector<UpdateWorld> worlds; // parallel to model.keys
};

/// The precondition-filtered class of source world x under action t:
/// all worlds that satisfy pre(t) and are related to x under every agent
/// alive in t. Requires pre(t) to hold at x and Alive(t) ⊆ Alive(x).
inline InputClass pre_class(const PartialEpistemicModel& m, const ActionModel& a, int t, int x) {
    if (t < 0 || t >= a.num_actions()) throw error("action index out of range");
    if (x < 0 || x >= m.num_worlds()) throw error("world index out of range");
    if (m.num_agents() != a.num_agents())
        throw error("model and action model disagree on agent count");
    Evaluator ev(m);
    const FormulaPtr& pre = a.pre[static_cast<std::size_t>(t)];
    if (!ev.eval(x, pre))
        throw error("precondition of action " + a.keys[static_cast<std::size_t>(t)] +
                    " is false at world " + m.keys[static_cast<std::size_t>(x)]);
    std::vector<Agent> alive_t;
    for (Agent ag = 0; ag < a.num_agents(); ++ag)
        if (a.rel.in_domain(ag, t)) alive_t.push_back(ag);
    for (Agent ag : alive_t)
        if (!m.rel.in_domain(ag, x))
            throw error("agent " + std::to_string(ag) + " is alive in action " +
                        a.keys[static_cast<std::size_t>(t)] + " but not at world " +
                        m.keys[static_cast<std::size_t>(x)]);
    InputClass out;
    if (alive_t.empty()) {
        for (int y = 0; y < m.num_worlds(); ++y)
            if (ev.eval(y, pre)) out.push_back(y);
        return out;
    }
    for (int y : m.rel.block_of(alive_t.front(), x)) {
        bool ok = true;
        for (std::size_t i = 1; i < alive_t.size(); ++i)
            if (!m.rel.related(alive_t[i], x, y)) {
                ok = false;
                break;
            }
        if (ok && ev.eval(y, pre)) out.push_back(y);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

/// All update worlds in canonical order: actions in model order, classes by
/// their least member. Shared by product_update and world_count_report.
inline std::vector<UpdateWorld> enumerate_update_worlds(const PartialEpistemicModel& m,
                                                        const ActionModel& a) {
    if (m.num_agents() != a.num_agents())
        throw error("model and action model disagree on agent count");
    std::vector<UpdateWorld> out;
    Evaluator ev(m);
    for (int t = 0; t < a.num_actions(); ++t) {
        const FormulaPtr& pre = a.pre[static_cast<std::size_t>(t)];
        std::vector<Agent> alive_t;
        for (Agent ag = 0; ag < a.num_agents(); ++ag)
            if (a.rel.in_domain(ag, t)) alive_t.push_back(ag);
        std::vector<char> taken(static_cast<std::size_t>(m.num_worlds()), 0);
        for (int x = 0; x < m.num_worlds(); ++x) {
            if (taken[static_cast<std::size_t>(x)] || !ev.eval(x, pre)) continue;
            bool alive_ok = true;
            for (Agent ag : alive_t)
                if (!m.rel.in_domain(ag, x)) {
                    alive_ok = false;
                    break;
                }
            if (!alive_ok) continue;
            InputClass cls = pre_class(m, a, t, x);
            for (int y : cls) taken[static_cast<std::size_t>(y)] = 1;
            out.push_back({std::move(cls), t});
        }
    }
    return out;
}

} // namespace detail

inline std::string update_world_key(const PartialEpistemicModel& m, const ActionModel& a,
                                    const UpdateWorld& w) {
    std::string out;
    for (std::size_t i = 0; i < w.members.size(); ++i) {
        if (i) out += "+";
        out += m.keys[static_cast<std::size_t>(w.members[i])];
    }
    return out + "@" + a.keys[static_cast<std::size_t>(w.action)];
}

/// Partial product update m{a}. Both frames must be proper; the result has
/// one world per distinct (precondition class, action) pair, componentwise
/// relations, and intersection labels.
inline UpdateModel product_update(const PartialEpistemicModel& m, const ActionModel& a) {
    if (!is_proper(m)) throw error("product update requires a proper source model");
    if (!is_proper(a.frame())) throw error("product update requires a proper action model");
    std::vector<UpdateWorld> worlds = detail::enumerate_update_worlds(m, a);
    if (worlds.empty()) throw error("partial product update is empty: no action applies anywhere");

    std::vector<std::string> keys;
    std::vector<AtomSet> labels;
    keys.reserve(worlds.size());
    labels.reserve(worlds.size());
    for (const UpdateWorld& w : worlds) {
        keys.push_back(update_world_key(m, a, w));
        AtomSet lab = m.labels[static_cast<std::size_t>(w.members.front())];
        for (std::size_t i = 1; i < w.members.size(); ++i)
            lab = intersect(lab, m.labels[static_cast<std::size_t>(w.members[i])]);
        labels.push_back(std::move(lab));
    }

    // (c,t) ~_ag (c',s) iff t ~ s in the action model and representatives are
    // related in the source model; grouping by the two block ids makes the
    // blocks of the result exactly the groups.
    int n = m.num_agents();
    RelationData d = RelationData::empty(n, static_cast<int>(worlds.size()));
    for (Agent ag = 0; ag < n; ++ag) {
        std::map<std::pair<int, int>, std::vector<int>> groups;
        for (std::size_t i = 0; i < worlds.size(); ++i) {
            int t = worlds[i].action;
            if (!a.rel.in_domain(ag, t)) continue;
            int x = worlds[i].members.front();
            groups[{a.rel.block_of(ag, t).front(), m.rel.block_of(ag, x).front()}].push_back(
                static_cast<int>(i));
        }
        for (const auto& [key, members] : groups)
            for (std::size_t i = 0; i < members.size(); ++i)
                for (std::size_t j = i; j < members.size(); ++j)
                    d.add_edge(ag, members[i], members[j]);
    }

    PartialEpistemicModel model(std::move(keys), PerRelation::checked(std::move(d)),
                                std::move(labels));
    return {std::move(model), std::move(worlds)};
}

/// Size summary of a would-be product update, tolerating the empty case.
struct WorldCountReport {
    int total = 0;
    std::vector<std::pair<std::string, int>> per_action;          // action key -> world count
    std::vector<std::pair<std::vector<Agent>, int>> alive_counts; // alive set -> world count
};

inline WorldCountReport world_count_report(const PartialEpistemicModel& m, const ActionModel& a) {
    std::vector<UpdateWorld> worlds = detail::enumerate_update_worlds(m, a);
    WorldCountReport rep;
    rep.total = static_cast<int>(worlds.size());
    std::vector<int> per_action(static_cast<std::size_t>(a.num_actions()), 0);
    std::map<std::vector<Agent>, int> alive;
    for (const UpdateWorld& w : worlds) {
        ++per_action[static_cast<std::size_t>(w.action)];
        std::vector<Agent> alive_t;
        for (Agent ag = 0; ag < a.num_agents(); ++ag)
            if (a.rel.in_domain(ag, w.action)) alive_t.push_back(ag);
        ++alive[alive_t];
    }
    for (int t = 0; t < a.num_actions(); ++t)
        rep.per_action.emplace_back(a.keys[static_cast<std::size_t>(t)],
                                    per_action[static_cast<std::size_t>(t)]);
    for (auto& [set, count] : alive) rep.alive_counts.emplace_back(set, count);
    return rep;
}

} // namespace epistemia
