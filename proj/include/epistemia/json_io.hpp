#pragma once

#include "solvability.hpp"

#include <json.hpp>

namespace epistemia {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

inline Atom atom_from_string(const std::string& text) {
    FormulaPtr f = parse(text);
    if (f->kind != FormulaKind::atom) throw error("expected an atom: " + text);
    return f->atom;
}

inline json atoms_to_json(const AtomSet& atoms) {
    json arr = json::array();
    for (const Atom& a : atoms) arr.push_back(to_string(a));
    return arr;
}

inline AtomSet atoms_from_json(const json& arr) {
    AtomSet out;
    for (const auto& item : arr) out.push_back(atom_from_string(item.get<std::string>()));
    normalize_atom_set(out);
    return out;
}

// ---------------------------------------------------------------------------
// Simplicial models
// ---------------------------------------------------------------------------

inline json complex_to_json(const SimplicialModel& sm) {
    json j;
    j["n"] = sm.complex.num_agents();
    j["values"] = sm.complex.values();
    json facets = json::array();
    for (const Simplex& f : sm.complex.facets()) {
        json fj = json::array();
        for (const Vertex& v : f.vertices()) fj.push_back(json::array({v.agent, v.value}));
        facets.push_back(std::move(fj));
    }
    j["facets"] = std::move(facets);
    json labels = json::object();
    for (std::size_t i = 0; i < sm.labels.size(); ++i)
        labels[std::to_string(i)] = atoms_to_json(sm.labels[i]);
    j["labels"] = std::move(labels);
    return j;
}

inline SimplicialModel complex_from_json(const json& j) {
    if (!j.contains("n") || !j.contains("facets"))
        throw error("complex JSON needs \"n\" and \"facets\"");
    int n = j.at("n").get<int>();
    std::vector<int> values;
    if (j.contains("values")) values = j.at("values").get<std::vector<int>>();
    std::vector<Simplex> facets;
    for (const auto& fj : j.at("facets")) {
        std::vector<Vertex> vs;
        for (const auto& vj : fj) {
            if (!vj.is_array() || vj.size() != 2)
                throw error("facet vertex must be an [agent, value] pair");
            vs.push_back({vj[0].get<Agent>(), vj[1].get<int>()});
        }
        facets.emplace_back(std::move(vs));
    }
    if (values.empty()) {
        for (const Simplex& f : facets)
            for (const Vertex& v : f.vertices()) values.push_back(v.value);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
    }
    Complex c(n, std::move(values), std::move(facets));
    std::vector<AtomSet> labels(c.facets().size());
    if (j.contains("labels"))
        for (const auto& [key, arr] : j.at("labels").items()) {
            int idx = std::stoi(key);
            if (idx < 0 || idx >= static_cast<int>(labels.size()))
                throw error("label index out of range: " + key);
            labels[static_cast<std::size_t>(idx)] = atoms_from_json(arr);
        }
    return SimplicialModel(std::move(c), std::move(labels));
}

// ---------------------------------------------------------------------------
// Partial epistemic models (plain, action, update)
// ---------------------------------------------------------------------------

namespace detail {

inline json relation_to_json(const PerRelation& rel) {
    json out = json::object();
    for (Agent a = 0; a < rel.num_agents(); ++a) {
        json pairs = json::array();
        for (auto [i, j] : rel.edges(a)) pairs.push_back(json::array({i, j}));
        out[std::to_string(a)] = std::move(pairs);
    }
    return out;
}

inline PerRelation relation_from_json(const json& j, int num_agents, int num_worlds) {
    RelationData d = RelationData::empty(num_agents, num_worlds);
    for (const auto& [key, pairs] : j.items()) {
        int a = std::stoi(key);
        if (a < 0 || a >= num_agents) throw error("relation agent out of range: " + key);
        for (const auto& p : pairs) {
            if (!p.is_array() || p.size() != 2) throw error("relation entry must be a pair");
            int i = p[0].get<int>(), k = p[1].get<int>();
            if (i < 0 || i >= num_worlds || k < 0 || k >= num_worlds)
                throw error("relation world index out of range");
            d.add_edge(a, i, k);
        }
    }
    return PerRelation::checked(std::move(d));
}

} // namespace detail

inline json model_to_json(const PartialEpistemicModel& m) {
    json j;
    j["worlds"] = m.keys;
    j["rel"] = detail::relation_to_json(m.rel);
    json labels = json::object();
    for (int w = 0; w < m.num_worlds(); ++w)
        labels[m.keys[static_cast<std::size_t>(w)]] =
            atoms_to_json(m.labels[static_cast<std::size_t>(w)]);
    j["labels"] = std::move(labels);
    return j;
}

/// Reads the standard model JSON. World entries may be strings or update
/// world objects {"class": [...], "action": key}, whose key is derived.
inline PartialEpistemicModel model_from_json(const json& j, int num_agents) {
    if (!j.contains("worlds") || !j.contains("rel"))
        throw error("model JSON needs \"worlds\" and \"rel\"");
    std::vector<std::string> keys;
    for (const auto& wj : j.at("worlds")) {
        if (wj.is_string()) {
            keys.push_back(wj.get<std::string>());
        } else if (wj.is_object()) {
            std::string key;
            for (const auto& part : wj.at("class")) {
                if (!key.empty()) key += "+";
                key += part.get<std::string>();
            }
            keys.push_back(key + "@" + wj.at("action").get<std::string>());
        } else {
            throw error("world entry must be a key or an update-world object");
        }
    }
    int num_worlds = static_cast<int>(keys.size());
    PerRelation rel = detail::relation_from_json(j.at("rel"), num_agents, num_worlds);
    std::vector<AtomSet> labels(keys.size());
    if (j.contains("labels"))
        for (const auto& [key, arr] : j.at("labels").items()) {
            auto it = std::find(keys.begin(), keys.end(), key);
            if (it == keys.end()) throw error("label for unknown world key: " + key);
            labels[static_cast<std::size_t>(it - keys.begin())] = atoms_from_json(arr);
        }
    return PartialEpistemicModel(std::move(keys), std::move(rel), std::move(labels));
}

inline json action_model_to_json(const ActionModel& a) {
    json j;
    j["worlds"] = a.keys;
    j["rel"] = detail::relation_to_json(a.rel);
    json pre = json::object();
    for (int t = 0; t < a.num_actions(); ++t)
        pre[a.keys[static_cast<std::size_t>(t)]] = print(a.pre[static_cast<std::size_t>(t)]);
    j["pre"] = std::move(pre);
    return j;
}

inline ActionModel action_model_from_json(const json& j, int num_agents,
                                          ParseLimits limits = {}) {
    if (!j.contains("worlds") || !j.contains("rel") || !j.contains("pre"))
        throw error("action model JSON needs \"worlds\", \"rel\" and \"pre\"");
    std::vector<std::string> keys = j.at("worlds").get<std::vector<std::string>>();
    PerRelation rel =
        detail::relation_from_json(j.at("rel"), num_agents, static_cast<int>(keys.size()));
    std::vector<FormulaPtr> pre(keys.size());
    for (const auto& [key, text] : j.at("pre").items()) {
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) throw error("precondition for unknown action key: " + key);
        pre[static_cast<std::size_t>(it - keys.begin())] =
            parse(text.get<std::string>(), limits);
    }
    for (std::size_t t = 0; t < pre.size(); ++t)
        if (!pre[t]) throw error("missing precondition for action " + keys[t]);
    return ActionModel(std::move(keys), std::move(rel), std::move(pre));
}

/// Update models serialize as the standard model JSON with structured world
/// entries; the source-model keys name the class members.
inline json update_model_to_json(const UpdateModel& um, const PartialEpistemicModel& source,
                                 const ActionModel& actions) {
    json j = model_to_json(um.model);
    json worlds = json::array();
    for (const UpdateWorld& w : um.worlds) {
        json wj;
        json cls = json::array();
        for (int member : w.members)
            cls.push_back(source.keys[static_cast<std::size_t>(member)]);
        wj["class"] = std::move(cls);
        wj["action"] = actions.keys[static_cast<std::size_t>(w.action)];
        worlds.push_back(std::move(wj));
    }
    j["worlds"] = std::move(worlds);
    return j;
}

// ---------------------------------------------------------------------------
// Failure patterns and facet maps
// ---------------------------------------------------------------------------

inline json pattern_to_json(const FailurePattern& t) {
    json fails = json::object();
    for (const auto& [dead, receivers] : t.fails()) fails[std::to_string(dead)] = receivers;
    return json{{"fails", std::move(fails)}};
}

inline FailurePattern pattern_from_json(const json& j, int n) {
    std::vector<std::pair<Agent, std::vector<Agent>>> fails;
    if (j.contains("fails"))
        for (const auto& [dead, receivers] : j.at("fails").items())
            fails.emplace_back(std::stoi(dead), receivers.get<std::vector<Agent>>());
    return FailurePattern::make(n, std::move(fails));
}

inline json facet_map_to_json(const FacetMap& fm, const Complex& src, const Complex& dst) {
    json map = json::object();
    for (std::size_t x = 0; x < fm.images.size(); ++x) {
        json arr = json::array();
        for (int y : fm.images[x]) arr.push_back(facet_key(dst.facets()[static_cast<std::size_t>(y)]));
        map[facet_key(src.facets()[x])] = std::move(arr);
    }
    return json{{"map", std::move(map)}};
}

inline FacetMap facet_map_from_json(const json& j, const Complex& src, const Complex& dst) {
    FacetMap fm;
    fm.images.resize(src.facets().size());
    std::map<std::string, int> src_ids, dst_ids;
    for (std::size_t i = 0; i < src.facets().size(); ++i)
        src_ids[facet_key(src.facets()[i])] = static_cast<int>(i);
    for (std::size_t i = 0; i < dst.facets().size(); ++i)
        dst_ids[facet_key(dst.facets()[i])] = static_cast<int>(i);
    for (const auto& [key, arr] : j.at("map").items()) {
        auto sit = src_ids.find(key);
        if (sit == src_ids.end()) throw error("facet map key is not a source facet: " + key);
        for (const auto& dj : arr) {
            auto dit = dst_ids.find(dj.get<std::string>());
            if (dit == dst_ids.end())
                throw error("facet map image is not a destination facet: " +
                            dj.get<std::string>());
            fm.images[static_cast<std::size_t>(sit->second)].push_back(dit->second);
        }
    }
    for (auto& im : fm.images) std::sort(im.begin(), im.end());
    validate_facet_map(src, dst, fm);
    return fm;
}

} // namespace epistemia
