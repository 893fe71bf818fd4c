#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <variant>

#include "types.hpp"

namespace epistemia {

/// Raw per-agent edge lists over world indices. Plain data; may violate the
/// partial-equivalence laws and is validated before use.
struct RelationData {
    int num_agents = 0;
    int num_worlds = 0;
    std::vector<std::vector<std::pair<int, int>>> edges; // one list per agent

    static RelationData empty(int agents, int worlds) {
        RelationData d;
        d.num_agents = agents;
        d.num_worlds = worlds;
        d.edges.resize(static_cast<std::size_t>(agents));
        return d;
    }

    /// Insert w ~a w' together with its symmetric twin.
    void add_edge(Agent a, int w, int w2) {
        edges[static_cast<std::size_t>(a)].emplace_back(w, w2);
        if (w != w2) edges[static_cast<std::size_t>(a)].emplace_back(w2, w);
    }
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(b)] = a;
    }
};

} // namespace detail

/// True iff every per-agent relation in `d` is symmetric and transitive.
/// Reflexivity is not required globally: a world related to anything must be
/// related to itself (that much transitivity already forces).
inline bool relation_is_per(const RelationData& d) {
    for (int a = 0; a < d.num_agents; ++a) {
        std::set<std::pair<int, int>> es(d.edges[static_cast<std::size_t>(a)].begin(),
                                         d.edges[static_cast<std::size_t>(a)].end());
        for (auto [i, j] : es) {
            if (i < 0 || j < 0 || i >= d.num_worlds || j >= d.num_worlds) return false;
            if (!es.count({j, i})) return false; // symmetry
        }
        // Transitivity: connected components must be complete (self-loops included).
        detail::UnionFind uf(d.num_worlds);
        for (auto [i, j] : es) uf.unite(i, j);
        std::map<int, long long> block_size, block_edges;
        for (auto [i, j] : es)
            if (i <= j) block_edges[uf.find(i)]++;
        std::vector<bool> in_domain(static_cast<std::size_t>(d.num_worlds), false);
        for (auto [i, j] : es) in_domain[static_cast<std::size_t>(i)] = true;
        for (int w = 0; w < d.num_worlds; ++w)
            if (in_domain[static_cast<std::size_t>(w)]) block_size[uf.find(w)]++;
        for (auto [root, sz] : block_size)
            if (block_edges[root] != sz * (sz + 1) / 2) return false;
    }
    return true;
}

/// Validated partial equivalence relation per agent, stored as sorted edge
/// sets plus a per-agent block index for O(1) membership tests.
class PerRelation {
public:
    static PerRelation checked(RelationData d) {
        if (!relation_is_per(d))
            throw error("relation is not a partial equivalence (symmetric + transitive)");
        PerRelation r;
        r.num_agents_ = d.num_agents;
        r.num_worlds_ = d.num_worlds;
        r.edges_.resize(static_cast<std::size_t>(d.num_agents));
        r.block_.assign(static_cast<std::size_t>(d.num_agents),
                        std::vector<int>(static_cast<std::size_t>(d.num_worlds), -1));
        r.block_members_.resize(static_cast<std::size_t>(d.num_agents));
        for (int a = 0; a < d.num_agents; ++a) {
            auto& es = r.edges_[static_cast<std::size_t>(a)];
            for (auto [i, j] : d.edges[static_cast<std::size_t>(a)])
                if (i <= j) es.emplace_back(i, j);
            std::sort(es.begin(), es.end());
            es.erase(std::unique(es.begin(), es.end()), es.end());
            detail::UnionFind uf(d.num_worlds);
            for (auto [i, j] : es) uf.unite(i, j);
            std::map<int, int> root_to_block;
            auto& blocks = r.block_members_[static_cast<std::size_t>(a)];
            for (int w = 0; w < d.num_worlds; ++w) {
                bool in_domain = std::binary_search(es.begin(), es.end(), std::make_pair(w, w));
                if (!in_domain) continue;
                int root = uf.find(w);
                auto [it, fresh] = root_to_block.emplace(root, static_cast<int>(blocks.size()));
                if (fresh) blocks.emplace_back();
                r.block_[static_cast<std::size_t>(a)][static_cast<std::size_t>(w)] = it->second;
                blocks[static_cast<std::size_t>(it->second)].push_back(w);
            }
        }
        return r;
    }

    int num_agents() const { return num_agents_; }
    int num_worlds() const { return num_worlds_; }

    bool related(Agent a, int w, int w2) const {
        int b = block_[static_cast<std::size_t>(a)][static_cast<std::size_t>(w)];
        return b != -1 && b == block_[static_cast<std::size_t>(a)][static_cast<std::size_t>(w2)];
    }

    bool in_domain(Agent a, int w) const {
        return block_[static_cast<std::size_t>(a)][static_cast<std::size_t>(w)] != -1;
    }

    /// Worlds related to w under agent a (the whole block), or empty.
    const std::vector<int>& block_of(Agent a, int w) const {
        static const std::vector<int> none;
        int b = block_[static_cast<std::size_t>(a)][static_cast<std::size_t>(w)];
        if (b == -1) return none;
        return block_members_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }

    /// Normalized (i <= j) sorted edge list for one agent.
    const std::vector<std::pair<int, int>>& edges(Agent a) const {
        return edges_[static_cast<std::size_t>(a)];
    }

    RelationData data() const {
        RelationData d = RelationData::empty(num_agents_, num_worlds_);
        for (int a = 0; a < num_agents_; ++a)
            for (auto [i, j] : edges_[static_cast<std::size_t>(a)]) d.add_edge(a, i, j);
        return d;
    }

private:
    int num_agents_ = 0;
    int num_worlds_ = 0;
    std::vector<std::vector<std::pair<int, int>>> edges_;
    std::vector<std::vector<int>> block_;                   // agent -> world -> block id
    std::vector<std::vector<std::vector<int>>> block_members_; // agent -> block -> worlds
};

/// Partial epistemic model: finite world set, one partial equivalence per
/// agent, and an atomic labeling. Worlds carry canonical string keys.
struct PartialEpistemicModel {
    std::vector<std::string> keys;
    PerRelation rel;
    std::vector<AtomSet> labels;

    PartialEpistemicModel(std::vector<std::string> world_keys, PerRelation relation,
                          std::vector<AtomSet> world_labels)
        : keys(std::move(world_keys)), rel(std::move(relation)), labels(std::move(world_labels)) {
        if (keys.empty()) throw error("model must have at least one world");
        if (static_cast<int>(keys.size()) != rel.num_worlds() || labels.size() != keys.size())
            throw error("model arrays disagree on world count");
        std::set<std::string> seen(keys.begin(), keys.end());
        if (seen.size() != keys.size()) throw error("duplicate world keys");
        for (AtomSet& l : labels) normalize_atom_set(l);
    }

    int num_worlds() const { return static_cast<int>(keys.size()); }
    int num_agents() const { return rel.num_agents(); }

    int world_index(const std::string& key) const {
        for (int i = 0; i < num_worlds(); ++i)
            if (keys[static_cast<std::size_t>(i)] == key) return i;
        throw error("unknown world key: " + key);
    }
};

/// Re-validates the stored relations (true for any constructed model).
inline bool check_per(const PartialEpistemicModel& m) { return relation_is_per(m.rel.data()); }

/// Agents alive at w: those whose relation relates w to itself.
inline std::vector<Agent> alive_set(const PartialEpistemicModel& m, int w) {
    if (w < 0 || w >= m.num_worlds()) throw error("world index out of range");
    std::vector<Agent> out;
    for (Agent a = 0; a < m.num_agents(); ++a)
        if (m.rel.in_domain(a, w)) out.push_back(a);
    return out;
}

/// No two distinct worlds are related under every agent.
inline bool is_proper(const PartialEpistemicModel& m) {
    for (int w = 0; w < m.num_worlds(); ++w) {
        for (Agent a = 0; a < m.num_agents(); ++a) {
            if (!m.rel.in_domain(a, w)) continue;
            for (int w2 : m.rel.block_of(a, w)) {
                if (w2 <= w) continue;
                bool all = true;
                for (Agent b = 0; b < m.num_agents() && all; ++b)
                    all = m.rel.related(b, w, w2);
                if (all) return false;
            }
            break; // one alive agent's block suffices as candidate pool
        }
    }
    return true;
}

///// sat_U(v): worlds related to v under every agent in U. sat_{}(v) is the
/// whole world set (the empty conjunction of constraints).
inline std::vector<int> saturation(const PartialEpistemicModel& m, const std::vector<Agent>& agents,
                                   int v) {
    if (v < 0 || v >= m.num_worlds()) throw error("world index out of range");
    for (Agent a : agents)
        if (a < 0 || a >= m.num_agents()) throw error("agent out of range");
    if (agents.empty()) {
        std::vector<int> all(static_cast<std::size_t>(m.num_worlds()));
        std::iota(all.begin(), all.end(), 0);
        return all;
    }
    std::vector<int> out;
    for (int w : m.rel.block_of(agents.front(), v)) {
        bool ok = true;
        for (std::size_t i = 1; i < agents.size() && ok; ++i)
            ok = m.rel.related(agents[i], v, w);
        if (ok) out.push_back(w);
    }
    return out; // empty unless agents ⊆ Alive(v)
}

// ---------------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------------

enum class MorphismLaw { relation_preservation, saturation, atom_preservation };

inline const char* to_string(MorphismLaw law) {
    switch (law) {
        case MorphismLaw::relation_preservation: return "relation-preservation";
        case MorphismLaw::saturation: return "saturation";
        case MorphismLaw::atom_preservation: return "atom-preservation";
    }
    return "?";
}

struct MorphismViolation {
    MorphismLaw law{};
    Agent agent = -1;     // for relation-preservation
    int world = -1;       // source-side witness
    int other_world = -1; // second source world, if relevant
    int image_world = -1; // target-side witness
    int image_other = -1;
};

class Morphism;
using MorphismCheck = std::variant<Morphism, MorphismViolation>;

inline std::string describe(const MorphismViolation& v, const PartialEpistemicModel& src,
                            const PartialEpistemicModel& dst) {
    auto sk = [&](int w) { return w >= 0 ? src.keys[static_cast<std::size_t>(w)] : std::string("?"); };
    auto dk = [&](int u) { return u >= 0 ? dst.keys[static_cast<std::size_t>(u)] : std::string("?"); };
    switch (v.law) {
        case MorphismLaw::relation_preservation:
            return "relation preservation fails for agent " + std::to_string(v.agent) + ": " +
                   sk(v.world) + " ~ " + sk(v.other_world) + " but images " + dk(v.image_world) +
                   " and " + dk(v.image_other) + " are unrelated";
        case MorphismLaw::saturation:
            return "image of " + sk(v.world) + " is not a saturation block of the target";
        case MorphismLaw::atom_preservation:
            return "labels of " + sk(v.world) + " and image " + dk(v.image_world) +
                   " disagree on live agents' atoms";
    }
    return "morphism law violated";
}

/// A verified set-valued map between partial epistemic models. Instances are
/// only produced by verify_morphism, so holding one certifies the three laws.
class Morphism {
public:
    const PartialEpistemicModel& source() const { return *src_; }
    const PartialEpistemicModel& target() const { return *dst_; }
    const std::vector<std::vector<int>>& images() const { return image_; }

private:
    friend MorphismCheck verify_morphism(const std::vector<std::vector<int>>&,
                                         const PartialEpistemicModel&,
                                         const PartialEpistemicModel&);
    Morphism(const PartialEpistemicModel* src, const PartialEpistemicModel* dst,
             std::vector<std::vector<int>> image)
        : src_(src), dst_(dst), image_(std::move(image)) {}

    const PartialEpistemicModel* src_;
    const PartialEpistemicModel* dst_;
    std::vector<std::vector<int>> image_;
};

/// Check the three morphism laws for a candidate image assignment:
///   (i)  w ~a w' implies u ~a u' for all image members u, u';
///   (ii) every image equals the target saturation sat_{Alive(w)}(u) of one
///        of its members;
///   (iii) source and image labels agree on atoms of agents alive at w.
/// The first violated law (checked in that order) is reported with witnesses.
/// A partial or empty-image candidate is a hard error, not a violation.
inline MorphismCheck verify_morphism(const std::vector<std::vector<int>>& candidate,
                                     const PartialEpistemicModel& src,
                                     const PartialEpistemicModel& dst) {
    if (static_cast<int>(candidate.size()) != src.num_worlds())
        throw error("candidate must assign an image to every source world");
    if (src.num_agents() != dst.num_agents())
        throw error("source and target disagree on the agent set");
    std::vector<std::vector<int>> image = candidate;
    for (auto& im : image) {
        if (im.empty()) throw error("morphism images must be nonempty");
        std::sort(im.begin(), im.end());
        im.erase(std::unique(im.begin(), im.end()), im.end());
        for (int u : im)
            if (u < 0 || u >= dst.num_worlds()) throw error("image world index out of range");
    }

    // (i) relation preservation
    for (Agent a = 0; a < src.num_agents(); ++a) {
        for (auto [w, w2] : src.rel.edges(a)) {
            for (int u : image[static_cast<std::size_t>(w)])
                for (int u2 : image[static_cast<std::size_t>(w2)])
                    if (!dst.rel.related(a, u, u2))
                        return MorphismViolation{MorphismLaw::relation_preservation, a, w, w2, u, u2};
        }
    }
    // (ii) images are target saturations at the source world's alive set
    for (int w = 0; w < src.num_worlds(); ++w) {
        std::vector<Agent> alive = alive_set(src, w);
        const auto& im = image[static_cast<std::size_t>(w)];
        bool found = false;
        for (int u : im) {
            if (saturation(dst, alive, u) == im) {
                found = true;
                break;
            }
        }
        if (!found)
            return MorphismViolation{MorphismLaw::saturation, -1, w, -1,
                                     im.empty() ? -1 : im.front(), -1};
    }
    // (iii) atom preservation over alive agents
    for (int w = 0; w < src.num_worlds(); ++w) {
        std::vector<Agent> alive = alive_set(src, w);
        AtomSet here = restrict_to_agents(src.labels[static_cast<std::size_t>(w)], alive);
        for (int u : image[static_cast<std::size_t>(w)]) {
            AtomSet there = restrict_to_agents(dst.labels[static_cast<std::size_t>(u)], alive);
            if (here != there)
                return MorphismViolation{MorphismLaw::atom_preservation, -1, w, -1, u, -1};
        }
    }
    return Morphism(&src, &dst, std::move(image));
}

// ---------------------------------------------------------------------------
// Frame isomorphism
// ---------------------------------------------------------------------------

namespace detail {

/// Iterated color refinement over the multi-relation frame; returns stable
/// per-world color ids (isomorphism-invariant).
inline std::vector<int> refine_colors(const PartialEpistemicModel& m) {
    int n = m.num_worlds();
    std::vector<int> color(static_cast<std::size_t>(n), 0);
    // Initial color: per-agent (alive, block size) signature.
    {
        std::map<std::vector<std::pair<int, int>>, int> ids;
        std::vector<std::vector<std::pair<int, int>>> sigs(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w)
            for (Agent a = 0; a < m.num_agents(); ++a)
                sigs[static_cast<std::size_t>(w)].emplace_back(
                    m.rel.in_domain(a, w) ? 1 : 0,
                    static_cast<int>(m.rel.block_of(a, w).size()));
        for (int w = 0; w < n; ++w)
            color[static_cast<std::size_t>(w)] =
                ids.emplace(sigs[static_cast<std::size_t>(w)], static_cast<int>(ids.size())).first->second;
    }
    for (int round = 0; round < n; ++round) {
        std::map<std::pair<int, std::vector<std::vector<int>>>, int> ids;
        std::vector<int> next(static_cast<std::size_t>(n));
        for (int w = 0; w < n; ++w) {
            std::vector<std::vector<int>> nbr(static_cast<std::size_t>(m.num_agents()));
            for (Agent a = 0; a < m.num_agents(); ++a) {
                for (int w2 : m.rel.block_of(a, w))
                    nbr[static_cast<std::size_t>(a)].push_back(color[static_cast<std::size_t>(w2)]);
                std::sort(nbr[static_cast<std::size_t>(a)].begin(), nbr[static_cast<std::size_t>(a)].end());
            }
            next[static_cast<std::size_t>(w)] =
                ids.emplace(std::make_pair(color[static_cast<std::size_t>(w)], std::move(nbr)),
                            static_cast<int>(ids.size()))
                    .first->second;
        }
        if (next == color) break;
        color = std::move(next);
    }
    return color;
}

inline bool extend_isomorphism(const PartialEpistemicModel& m1, const PartialEpistemicModel& m2,
                               const std::vector<int>& order, std::size_t pos,
                               const std::vector<std::vector<int>>& candidates,
                               std::vector<int>& map, std::vector<bool>& used) {
    if (pos == order.size()) return true;
    int w = order[pos];
    for (int u : candidates[static_cast<std::size_t>(w)]) {
        if (used[static_cast<std::size_t>(u)]) continue;
        bool ok = true;
        for (std::size_t k = 0; k < pos && ok; ++k) {
            int w2 = order[k];
            int u2 = map[static_cast<std::size_t>(w2)];
            for (Agent a = 0; a < m1.num_agents() && ok; ++a)
                ok = m1.rel.related(a, w, w2) == m2.rel.related(a, u, u2);
        }
        if (!ok) continue;
        map[static_cast<std::size_t>(w)] = u;
        used[static_cast<std::size_t>(u)] = true;
        if (extend_isomorphism(m1, m2, order, pos + 1, candidates, map, used)) return true;
        used[static_cast<std::size_t>(u)] = false;
        map[static_cast<std::size_t>(w)] = -1;
    }
    return false;
}

} // namespace detail

/// Search for a bijection preserving every agent relation in both directions
/// (labels are ignored: this compares frames). Returns the world mapping of
/// the first isomorphism found, or nullopt after exhausting the search space.
inline std::optional<std::vector<int>> frame_isomorphic(const PartialEpistemicModel& m1,
                                                        const PartialEpistemicModel& m2) {
    if (m1.num_worlds() != m2.num_worlds() || m1.num_agents() != m2.num_agents())
        return std::nullopt;
    int n = m1.num_worlds();
    std::vector<int> c1, c2;
    // Refine colors over the disjoint union so ids are comparable across the
    // two frames; a world can only map to a world of equal color.
    {
        RelationData d = RelationData::empty(m1.num_agents(), 2 * n);
        for (Agent a = 0; a < m1.num_agents(); ++a) {
            for (auto [i, j] : m1.rel.edges(a)) d.add_edge(a, i, j);
            for (auto [i, j] : m2.rel.edges(a)) d.add_edge(a, i + n, j + n);
        }
        std::vector<std::string> keys;
        std::vector<AtomSet> labels(static_cast<std::size_t>(2 * n));
        keys.reserve(static_cast<std::size_t>(2 * n));
        for (int i = 0; i < 2 * n; ++i) keys.push_back("u" + std::to_string(i));
        PartialEpistemicModel joint(std::move(keys), PerRelation::checked(std::move(d)),
                                    std::move(labels));
        std::vector<int> c = detail::refine_colors(joint);
        c1.assign(c.begin(), c.begin() + n);
        c2.assign(c.begin() + n, c.end());
    }
    std::map<int, int> count1, count2;
    for (int x : c1) count1[x]++;
    for (int x : c2) count2[x]++;
    if (count1 != count2) return std::nullopt;

    std::vector<std::vector<int>> candidates(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w)
        for (int u = 0; u < n; ++u)
            if (c1[static_cast<std::size_t>(w)] == c2[static_cast<std::size_t>(u)])
                candidates[static_cast<std::size_t>(w)].push_back(u);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        auto sx = candidates[static_cast<std::size_t>(x)].size();
        auto sy = candidates[static_cast<std::size_t>(y)].size();
        return sx != sy ? sx < sy : x < y;
    });
    std::vector<int> map(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    if (!detail::extend_isomorphism(m1, m2, order, 0, candidates, map, used)) return std::nullopt;
    return map;
}

} // namespace epistemia
