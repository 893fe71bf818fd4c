#pragma once

#include "complex.hpp"
#include "model.hpp"

#include <sstream>

namespace epistemia {

/// Edge colors keyed by agent id: 0 = gray, 1 = red, 2 = blue, then cycling.
inline const char* agent_color(Agent a) {
    static const char* palette[] = {"gray", "red", "blue"};
    return palette[a % 3];
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

} // namespace detail

/// One node per facet (labeled with its vertex list), one edge per pair of
/// facets per shared color.
inline std::string to_dot(const Complex& c) {
    std::ostringstream out;
    out << "graph complex {\n";
    out << "  node [shape=box];\n";
    const auto& fs = c.facets();
    for (std::size_t i = 0; i < fs.size(); ++i)
        out << "  f" << i << " [label=\"" << detail::dot_escape(facet_key(fs[i])) << "\"];\n";
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j)
            for (Agent a : chi_shared(fs[i], fs[j]))
                out << "  f" << i << " -- f" << j << " [label=\"" << a << "\", color=\""
                    << agent_color(a) << "\"];\n";
    out << "}\n";
    return out.str();
}

/// One node per world (key plus label atoms), one edge per agent per related
/// pair of distinct worlds. Self-loops are folded into the node label as the
/// set of alive agents.
inline std::string to_dot(const PartialEpistemicModel& m) {
    std::ostringstream out;
    out << "graph model {\n";
    out << "  node [shape=box];\n";
    for (int w = 0; w < m.num_worlds(); ++w) {
        std::string label = detail::dot_escape(m.keys[static_cast<std::size_t>(w)]);
        const AtomSet& atoms = m.labels[static_cast<std::size_t>(w)];
        if (!atoms.empty()) {
            label += "\\n";
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (i) label += ", ";
                label += detail::dot_escape(to_string(atoms[i]));
            }
        }
        std::vector<Agent> alive = alive_set(m, w);
        label += "\\nalive: ";
        if (alive.empty()) label += "none";
        for (std::size_t i = 0; i < alive.size(); ++i) {
            if (i) label += ", ";
            label += std::to_string(alive[i]);
        }
        out << "  w" << w << " [label=\"" << label << "\"];\n";
    }
    for (Agent a = 0; a < m.num_agents(); ++a)
        for (auto [i, j] : m.rel.edges(a))
            if (i != j)
                out << "  w" << i << " -- w" << j << " [label=\"" << a << "\", color=\""
                    << agent_color(a) << "\"];\n";
    out << "}\n";
    return out.str();
}

} // namespace epistemia
