#pragma once

#include <map>

#include "model.hpp"
#include "types.hpp"

namespace epistemia {

/// A colored vertex: the color is the agent, the payload its input value.
struct Vertex {
    Agent agent = 0;
    int value = 0;

    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

/// Nonempty properly-colored simplex: at most one vertex per agent.
class Simplex {
public:
    explicit Simplex(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
        if (vertices_.empty()) throw error("simplex must be nonempty");
        std::sort(vertices_.begin(), vertices_.end());
        for (std::size_t i = 1; i < vertices_.size(); ++i)
            if (vertices_[i].agent == vertices_[i - 1].agent)
                throw error("simplex is not properly colored: duplicate agent " +
                            std::to_string(vertices_[i].agent));
    }

    const std::vector<Vertex>& vertices() const { return vertices_; }
    int dimension() const { return static_cast<int>(vertices_.size()) - 1; }

    bool contains(const Vertex& v) const {
        return std::binary_search(vertices_.begin(), vertices_.end(), v);
    }

    bool subset_of(const Simplex& other) const {
        return std::includes(other.vertices_.begin(), other.vertices_.end(), vertices_.begin(),
                             vertices_.end());
    }

    /// Value of the given agent's vertex, if present.
    std::optional<int> value_of(Agent a) const {
        for (const Vertex& v : vertices_)
            if (v.agent == a) return v.value;
        return std::nullopt;
    }

    friend auto operator<=>(const Simplex&, const Simplex&) = default;

private:
    std::vector<Vertex> vertices_;
};

/// Colors (agents) used by a simplex.
inline std::vector<Agent> chi(const Simplex& s) {
    std::vector<Agent> out;
    out.reserve(s.vertices().size());
    for (const Vertex& v : s.vertices()) out.push_back(v.agent);
    return out;
}

/// Shared vertices of two simplexes (possibly empty, hence not a Simplex).
inline std::vector<Vertex> intersection(const Simplex& a, const Simplex& b) {
    std::vector<Vertex> out;
    std::set_intersection(a.vertices().begin(), a.vertices().end(), b.vertices().begin(),
                          b.vertices().end(), std::back_inserter(out));
    return out;
}

/// Colors of the shared face of two simplexes.
inline std::vector<Agent> chi_shared(const Simplex& a, const Simplex& b) {
    std::vector<Agent> out;
    for (const Vertex& v : intersection(a, b)) out.push_back(v.agent);
    return out;
}

inline std::string facet_key(const Simplex& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.vertices().size(); ++i) {
        if (i) out += ",";
        out += "(" + std::to_string(s.vertices()[i].agent) + "," +
               std::to_string(s.vertices()[i].value) + ")";
    }
    return out + "}";
}

/// Chromatic simplicial complex given by its facets (maximal simplexes).
/// Pure iff every facet uses all n colors.
class Complex {
public:
    Complex(int num_agents, std::vector<int> values, std::vector<Simplex> facets)
        : num_agents_(num_agents), values_(std::move(values)), facets_(std::move(facets)) {
        if (num_agents_ <= 0) throw error("complex needs at least one agent");
        if (facets_.empty()) throw error("complex must have at least one facet");
        std::sort(values_.begin(), values_.end());
        values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
        std::sort(facets_.begin(), facets_.end());
        facets_.erase(std::unique(facets_.begin(), facets_.end()), facets_.end());
        for (const Simplex& f : facets_)
            for (const Vertex& v : f.vertices()) {
                if (v.agent < 0 || v.agent >= num_agents_)
                    throw error("facet uses agent outside 0.." + std::to_string(num_agents_ - 1));
                if (!std::binary_search(values_.begin(), values_.end(), v.value))
                    throw error("facet uses value " + std::to_string(v.value) +
                                " outside the declared value set");
            }
        for (std::size_t i = 0; i < facets_.size(); ++i)
            for (std::size_t j = 0; j < facets_.size(); ++j)
                if (i != j && facets_[i].subset_of(facets_[j]))
                    throw error("facet " + facet_key(facets_[i]) +
                                " is contained in facet " + facet_key(facets_[j]));
    }

    int num_agents() const { return num_agents_; }
    const std::vector<int>& values() const { return values_; }
    const std::vector<Simplex>& facets() const { return facets_; }

    bool is_pure() const {
        for (const Simplex& f : facets_)
            if (f.dimension() + 1 != num_agents_) return false;
        return true;
    }

    /// All vertices appearing in some facet, sorted.
    std::vector<Vertex> vertices() const {
        std::vector<Vertex> out;
        for (const Simplex& f : facets_)
            out.insert(out.end(), f.vertices().begin(), f.vertices().end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    int facet_index(const Simplex& s) const {
        auto it = std::lower_bound(facets_.begin(), facets_.end(), s);
        if (it == facets_.end() || !(*it == s)) throw error("unknown facet " + facet_key(s));
        return static_cast<int>(it - facets_.begin());
    }

    /// True iff the vertex set spans a simplex of the complex (lies in a facet).
    bool has_simplex(const Simplex& s) const {
        for (const Simplex& f : facets_)
            if (s.subset_of(f)) return true;
        return false;
    }

private:
    int num_agents_;
    std::vector<int> values_;
    std::vector<Simplex> facets_;
};

inline const std::vector<Simplex>& facets(const Complex& c) { return c.facets(); }

/// Vertex map check: total on source vertices, color preserving, and every
/// facet image spans a simplex of the target.
inline bool is_simplicial_map(const std::map<Vertex, Vertex>& f, const Complex& src,
                              const Complex& dst) {
    for (const Vertex& v : src.vertices()) {
        auto it = f.find(v);
        if (it == f.end()) return false;
        if (it->second.agent != v.agent) return false; // chromatic: colors preserved
    }
    for (const Simplex& facet : src.facets()) {
        std::vector<Vertex> image;
        for (const Vertex& v : facet.vertices()) image.push_back(f.at(v));
        std::sort(image.begin(), image.end());
        image.erase(std::unique(image.begin(), image.end()), image.end());
        if (!dst.has_simplex(Simplex(image))) return false;
    }
    return true;
}

/// Simplicial model: complex plus an atomic labeling of each facet.
/// Labels are stored in facet order.
struct SimplicialModel {
    Complex complex;
    std::vector<AtomSet> labels;

    SimplicialModel(Complex c, std::vector<AtomSet> facet_labels)
        : complex(std::move(c)), labels(std::move(facet_labels)) {
        if (labels.size() != complex.facets().size())
            throw error("one label set per facet required");
        for (AtomSet& l : labels) normalize_atom_set(l);
    }
};

/// Input model: one facet per assignment of a value to each agent, labeled
/// with the corresponding input atoms. Values default to the agent ids.
inline SimplicialModel input_model(int n, std::vector<int> values = {}) {
    if (n <= 0) throw error("input model needs at least one agent");
    if (values.empty()) {
        values.resize(static_cast<std::size_t>(n));
        std::iota(values.begin(), values.end(), 0);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<Simplex> facets;
    std::vector<std::size_t> pick(static_cast<std::size_t>(n), 0);
    while (true) {
        std::vector<Vertex> vs;
        for (int a = 0; a < n; ++a) vs.push_back({a, values[pick[static_cast<std::size_t>(a)]]});
        facets.emplace_back(std::move(vs));
        int a = n - 1;
        while (a >= 0 && ++pick[static_cast<std::size_t>(a)] == values.size()) {
            pick[static_cast<std::size_t>(a)] = 0;
            --a;
        }
        if (a < 0) break;
    }
    Complex c(n, values, std::move(facets));
    std::vector<AtomSet> labels;
    for (const Simplex& f : c.facets()) {
        AtomSet l;
        for (const Vertex& v : f.vertices()) l.push_back({v.agent, v.value});
        labels.push_back(std::move(l));
    }
    return SimplicialModel(std::move(c), std::move(labels));
}

/// Kripke companion of a simplicial model: worlds are facets, w ~a w' iff the
/// two facets share their agent-a vertex, labels carried over.
inline PartialEpistemicModel derive_model(const SimplicialModel& sm) {
    const auto& fs = sm.complex.facets();
    int n = sm.complex.num_agents();
    RelationData d = RelationData::empty(n, static_cast<int>(fs.size()));
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i; j < fs.size(); ++j)
            for (Agent a : chi_shared(fs[i], fs[j]))
                d.add_edge(a, static_cast<int>(i), static_cast<int>(j));
    std::vector<std::string> keys;
    keys.reserve(fs.size());
    for (const Simplex& f : fs) keys.push_back(facet_key(f));
    return PartialEpistemicModel(std::move(keys), PerRelation::checked(std::move(d)), sm.labels);
}

} // namespace epistemia
