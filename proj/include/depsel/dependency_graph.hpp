#pragma once
// Signed fuzzy value-dependency graphs, precedence graphs, and propagation
// of dependency strengths along paths.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "depsel/matrix.hpp"

namespace depsel {

// Qualitative sign of a dependency. `unspecified` is the absorbing "+-".
enum class Quality { positive, negative, unspecified };

// Serial composition of qualities along a path.
constexpr Quality compose(Quality a, Quality b) noexcept {
    if (a == Quality::unspecified || b == Quality::unspecified) return Quality::unspecified;
    return a == b ? Quality::positive : Quality::negative;
}

char quality_symbol(Quality q) noexcept;

struct DependencyEdge {
    double strength = 0.0; // (0, 1]
    Quality quality = Quality::positive;

    friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

// Edge (i, j) says the value of requirement i depends on whether j is
// selected. A missing pair means strength 0 with unspecified quality.
class ValueDependencyGraph {
public:
    explicit ValueDependencyGraph(std::size_t n = 0) : n_(n) {}

    std::size_t size() const noexcept { return n_; }

    // Replaces any existing edge. Rejects self-edges, out-of-range nodes,
    // strengths outside (0, 1] and unspecified quality.
    void set_edge(std::size_t from, std::size_t to, double strength, Quality quality);
    void remove_edge(std::size_t from, std::size_t to);

    std::optional<DependencyEdge> edge(std::size_t from, std::size_t to) const;
    const std::map<std::pair<std::size_t, std::size_t>, DependencyEdge>& edges() const noexcept { return edges_; }

    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t negative_edge_count() const noexcept;

    friend bool operator==(const ValueDependencyGraph&, const ValueDependencyGraph&) = default;

private:
    std::size_t n_;
    std::map<std::pair<std::size_t, std::size_t>, DependencyEdge> edges_;
};

enum class PrecedenceKind { requires_all, requires_any, conflicts, exactly_one };

// requires_all: source needs target (one record per target).
// requires_any: source needs at least one of targets.
// conflicts:    source and targets[0] are mutually exclusive (unordered).
// exactly_one:  exactly one of targets is selected; source unused.
struct PrecedenceConstraint {
    PrecedenceKind kind;
    std::size_t source = 0;
    std::vector<std::size_t> targets;

    friend bool operator==(const PrecedenceConstraint&, const PrecedenceConstraint&) = default;
};

class PrecedenceGraph {
public:
    explicit PrecedenceGraph(std::size_t n = 0) : n_(n) {}

    std::size_t size() const noexcept { return n_; }

    void add_requires(std::size_t source, std::size_t target);
    void add_requires_any(std::size_t source, std::vector<std::size_t> targets);
    void add_conflict(std::size_t a, std::size_t b);
    void add_exactly_one(std::vector<std::size_t> members);
    // Validates and appends any record.
    void add(PrecedenceConstraint c);

    const std::vector<PrecedenceConstraint>& constraints() const noexcept { return constraints_; }
    bool empty() const noexcept { return constraints_.empty(); }

    friend bool operator==(const PrecedenceGraph&, const PrecedenceGraph&) = default;

private:
    void check_node(std::size_t i) const;

    std::size_t n_;
    std::vector<PrecedenceConstraint> constraints_;
};

// pos/neg hold the strongest positive/negative dependency strengths between
// every ordered pair; influence = pos - neg. Diagonals are zero.
struct InfluenceMatrix {
    RealMatrix pos;
    RealMatrix neg;
    RealMatrix influence;

    std::size_t size() const noexcept { return influence.rows(); }
    static InfluenceMatrix zero(std::size_t n);
    static InfluenceMatrix from_components(RealMatrix pos, RealMatrix neg);

    friend bool operator==(const InfluenceMatrix&, const InfluenceMatrix&) = default;
};

struct PathStrength {
    Quality quality = Quality::unspecified;
    double strength = 0.0;
};

// Weakest-link strength and serial quality of a node sequence. A missing
// edge anywhere yields (unspecified, 0). Throws ArgumentError for paths
// with fewer than two nodes or out-of-range nodes.
PathStrength path_strength(const ValueDependencyGraph& g, std::span<const std::size_t> path);

enum class ClosureMethod {
    automatic,      // widest_path for sparse graphs, floyd_warshall otherwise
    floyd_warshall, // O(n^3) with the SIMD row-update kernel
    widest_path,    // per-source bottleneck search, O(n E log n)
};

// Max-min closure over the (node, sign) state graph. Exact for walks of any
// length; every method returns identical matrices.
InfluenceMatrix propagate_strengths(const ValueDependencyGraph& g, ClosureMethod method = ClosureMethod::automatic);

// Single-pass modified Floyd-Warshall over the n x n positive/negative
// matrices, in the update order of the published algorithm. Kept as a
// reference; it can miss strengths when positive and negative paths feed
// each other across intermediate nodes (see tests).
InfluenceMatrix propagate_strengths_single_pass(const ValueDependencyGraph& g);

// Exhaustive enumeration of sign-labelled walks with at most max_len edges
// that never repeat a (node, sign) state. Refuses graphs with n > 10.
InfluenceMatrix brute_force_influence(const ValueDependencyGraph& g, std::size_t max_len);

struct DependencyLevels {
    double level = 0.0;               // edges / (n (n - 1))
    std::optional<double> negative;   // negative edges / edges; absent without edges
};

// VDL / NVDL. Throws ArgumentError for n < 2.
DependencyLevels vdl_nvdl(const ValueDependencyGraph& g);

// PDL / NPDL over pairwise records: requires_all and conflicts count once,
// requires_any once per target, exactly_one once per unordered member pair
// (counted as negative, since members exclude one another).
DependencyLevels pdl_npdl(const PrecedenceGraph& p);

} // namespace depsel
