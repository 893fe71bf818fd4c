#pragma once

#include <algorithm>
#include <compare>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace epistemia {

using Agent = int;

/// Error type for construction and precondition failures.
class error : public std::runtime_error {
public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Atomic proposition input_a(v): agent a received input value v.
struct Atom {
    Agent agent = 0;
    int value = 0;

    friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// Sorted duplicate-free set of atoms.
using AtomSet = std::vector<Atom>;

inline void normalize_atom_set(AtomSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline bool contains(const AtomSet& s, const Atom& a) {
    return std::binary_search(s.begin(), s.end(), a);
}

inline AtomSet intersect(const AtomSet& a, const AtomSet& b) {
    AtomSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// Atoms of `s` whose agent lies in the sorted agent set `agents`.
inline AtomSet restrict_to_agents(const AtomSet& s, const std::vector<Agent>& agents) {
    AtomSet out;
    for (const Atom& a : s)
        if (std::binary_search(agents.begin(), agents.end(), a.agent)) out.push_back(a);
    return out;
}

inline std::string to_string(const Atom& a) {
    return "input(" + std::to_string(a.agent) + "," + std::to_string(a.value) + ")";
}

/// Sorted duplicate-free agent set helper.
inline void normalize_agent_set(std::vector<Agent>& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline bool is_subset(const std::vector<Agent>& a, const std::vector<Agent>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Worker count honoring the EPISTEMIA_THREADS cap (>= 1).
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("EPISTEMIA_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1 && static_cast<unsigned>(v) < hw) return static_cast<unsigned>(v);
        if (v >= 1) return static_cast<unsigned>(v) > hw ? hw : static_cast<unsigned>(v);
    }
    return hw;
}

/// Run fn(i) for i in [0,n) on up to worker_count() threads.
/// fn must only write to per-index slots; results are deterministic.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = worker_count();
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace epistemia
