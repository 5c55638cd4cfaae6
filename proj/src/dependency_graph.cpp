#include "depsel/dependency_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "depsel/errors.hpp"
#include "depsel/kernels/kernels.hpp"

namespace depsel {

char quality_symbol(Quality q) noexcept {
    switch (q) {
    case Quality::positive: return '+';
    case Quality::negative: return '-';
    case Quality::unspecified: return '~';
    }
    return '~';
}

void ValueDependencyGraph::set_edge(std::size_t from, std::size_t to, double strength, Quality quality) {
    if (from >= n_ || to >= n_) throw ArgumentError("value dependency references a node out of range");
    if (from == to) throw ArgumentError("value dependency graph cannot hold self-edges");
    if (!(strength > 0.0 && strength <= 1.0)) throw ArgumentError("dependency strength must lie in (0, 1]");
    if (quality == Quality::unspecified) throw ArgumentError("explicit dependencies need a + or - quality");
    edges_[{from, to}] = DependencyEdge{strength, quality};
}

void ValueDependencyGraph::remove_edge(std::size_t from, std::size_t to) { edges_.erase({from, to}); }

std::optional<DependencyEdge> ValueDependencyGraph::edge(std::size_t from, std::size_t to) const {
    const auto it = edges_.find({from, to});
    if (it == edges_.end()) return std::nullopt;
    return it->second;
}

std::size_t ValueDependencyGraph::negative_edge_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const auto& kv) {
        return kv.second.quality == Quality::negative;
    }));
}

void PrecedenceGraph::check_node(std::size_t i) const {
    if (i >= n_) throw ArgumentError("precedence constraint references a node out of range");
}

void PrecedenceGraph::add(PrecedenceConstraint c) {
    switch (c.kind) {
    case PrecedenceKind::requires_all:
    case PrecedenceKind::conflicts:
        check_node(c.source);
        if (c.targets.size() != 1) throw ArgumentError("requires/conflicts records take exactly one target");
        check_node(c.targets.front());
        if (c.targets.front() == c.source) throw ArgumentError("precedence record relates a node to itself");
        break;
    case PrecedenceKind::requires_any:
        check_node(c.source);
        if (c.targets.empty()) throw ArgumentError("requires_any needs a non-empty target set");
        for (std::size_t t : c.targets) {
            check_node(t);
            if (t == c.source) throw ArgumentError("requires_any lists its own source as a target");
        }
        break;
    case PrecedenceKind::exactly_one: {
        if (c.targets.size() < 2) throw ArgumentError("exactly_one needs at least two members");
        std::set<std::size_t> unique;
        for (std::size_t t : c.targets) {
            check_node(t);
            if (!unique.insert(t).second) throw ArgumentError("exactly_one lists a member twice");
        }
        c.source = 0;
        break;
    }
    }
    constraints_.push_back(std::move(c));
}

void PrecedenceGraph::add_requires(std::size_t source, std::size_t target) {
    add({PrecedenceKind::requires_all, source, {target}});
}

void PrecedenceGraph::add_requires_any(std::size_t source, std::vector<std::size_t> targets) {
    add({PrecedenceKind::requires_any, source, std::move(targets)});
}

void PrecedenceGraph::add_conflict(std::size_t a, std::size_t b) { add({PrecedenceKind::conflicts, a, {b}}); }

void PrecedenceGraph::add_exactly_one(std::vector<std::size_t> members) {
    add({PrecedenceKind::exactly_one, 0, std::move(members)});
}

InfluenceMatrix InfluenceMatrix::zero(std::size_t n) {
    return InfluenceMatrix{RealMatrix(n, n), RealMatrix(n, n), RealMatrix(n, n)};
}

InfluenceMatrix InfluenceMatrix::from_components(RealMatrix pos, RealMatrix neg) {
    if (pos.rows() != pos.cols() || neg.rows() != pos.rows() || neg.cols() != pos.cols())
        throw ArgumentError("influence components must be square and of equal size");
    const std::size_t n = pos.rows();
    RealMatrix influence(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        pos(i, i) = 0.0;
        neg(i, i) = 0.0;
        for (std::size_t j = 0; j < n; ++j) influence(i, j) = pos(i, j) - neg(i, j);
    }
    return InfluenceMatrix{std::move(pos), std::move(neg), std::move(influence)};
}

PathStrength path_strength(const ValueDependencyGraph& g, std::span<const std::size_t> path) {
    if (path.size() < 2) throw ArgumentError("a dependency path needs at least two nodes");
    for (std::size_t v : path)
        if (v >= g.size()) throw ArgumentError("dependency path references a node out of range");

    PathStrength result{Quality::positive, 1.0};
    for (std::size_t h = 1; h < path.size(); ++h) {
        const auto e = g.edge(path[h - 1], path[h]);
        if (!e) return PathStrength{Quality::unspecified, 0.0};
        result.strength = std::min(result.strength, e->strength);
        result.quality = compose(result.quality, e->quality);
    }
    return result;
}

namespace {

RealMatrix floyd_warshall_closure(const ValueDependencyGraph& g) {
    const std::size_t n = g.size();
    const std::size_t states = 2 * n; // state s * n + v: at node v with accumulated sign s (0 = +, 1 = -)
    RealMatrix closure(states, states);
    for (const auto& [pair, e] : g.edges()) {
        const auto [from, to] = pair;
        const std::size_t flip = e.quality == Quality::negative ? 1 : 0;
        for (std::size_t s = 0; s < 2; ++s) {
            double& cell = closure(s * n + from, (s ^ flip) * n + to);
            cell = std::max(cell, e.strength);
        }
    }

    const auto& kernel = kernels::active();
    for (std::size_t k = 0; k < states; ++k) {
        const double* via = closure.row(k).data();
        for (std::size_t i = 0; i < states; ++i) {
            const double a = closure(i, k);
            if (a > 0.0) kernel.maxmin_update(closure.row(i).data(), via, a, states);
        }
    }
    return closure;
}

// Rows 0..n-1 of the state closure via a bottleneck Dijkstra per source.
RealMatrix widest_path_closure(const ValueDependencyGraph& g) {
    const std::size_t n = g.size();
    const std::size_t states = 2 * n;
    std::vector<std::vector<std::pair<std::size_t, double>>> out(states);
    for (const auto& [pair, e] : g.edges()) {
        const std::size_t flip = e.quality == Quality::negative ? 1 : 0;
        for (std::size_t s = 0; s < 2; ++s) out[s * n + pair.first].emplace_back((s ^ flip) * n + pair.second, e.strength);
    }
    RealMatrix closure(n, states);
    std::vector<double> best(states);
    std::vector<std::uint8_t> done(states);
    std::vector<std::pair<double, std::size_t>> heap;
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(best.begin(), best.end(), 0.0);
        std::fill(done.begin(), done.end(), 0);
        heap.clear();
        // the source itself is only reachable again through a cycle
        for (const auto& [to, w] : out[src]) {
            if (w > best[to]) {
                best[to] = w;
                heap.emplace_back(w, to);
                std::push_heap(heap.begin(), heap.end());
            }
        }
        while (!heap.empty()) {
            std::pop_heap(heap.begin(), heap.end());
            const auto [w, v] = heap.back();
            heap.pop_back();
            if (done[v] || w < best[v]) continue;
            done[v] = 1;
            for (const auto& [to, ew] : out[v]) {
                const double cand = std::min(w, ew);
                if (cand > best[to]) {
                    best[to] = cand;
                    heap.emplace_back(cand, to);
                    std::push_heap(heap.begin(), heap.end());
                }
            }
        }
        std::copy(best.begin(), best.end(), closure.row(src).begin());
    }
    return closure;
}

} // namespace

InfluenceMatrix propagate_strengths(const ValueDependencyGraph& g, ClosureMethod method) {
    const std::size_t n = g.size();
    if (method == ClosureMethod::automatic)
        method = g.edge_count() * 16 < n * n ? ClosureMethod::widest_path : ClosureMethod::floyd_warshall;
    const RealMatrix closure = method == ClosureMethod::widest_path ? widest_path_closure(g) : floyd_warshall_closure(g);

    RealMatrix pos(n, n);
    RealMatrix neg(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            pos(i, j) = closure(i, j);
            neg(i, j) = closure(i, n + j);
        }
    }
    return InfluenceMatrix::from_components(std::move(pos), std::move(neg));
}

InfluenceMatrix propagate_strengths_single_pass(const ValueDependencyGraph& g) {
    const std::size_t n = g.size();
    RealMatrix pos(n, n);
    RealMatrix neg(n, n);
    for (const auto& [pair, e] : g.edges()) {
        if (e.quality == Quality::positive)
            pos(pair.first, pair.second) = e.strength;
        else
            neg(pair.first, pair.second) = e.strength;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (const double v = std::min(pos(i, k), pos(k, j)); v > pos(i, j)) pos(i, j) = v;
                if (const double v = std::min(neg(i, k), neg(k, j)); v > pos(i, j)) pos(i, j) = v;
                if (const double v = std::min(pos(i, k), neg(k, j)); v > neg(i, j)) neg(i, j) = v;
                if (const double v = std::min(neg(i, k), pos(k, j)); v > neg(i, j)) neg(i, j) = v;
            }
        }
    }
    return InfluenceMatrix::from_components(std::move(pos), std::move(neg));
}

namespace {

struct WalkSearch {
    const ValueDependencyGraph& g;
    std::size_t n;
    std::size_t max_len;
    std::size_t source;
    std::vector<std::vector<std::pair<std::size_t, DependencyEdge>>> out;
    std::vector<std::uint8_t> visited; // per (sign, node) state
    RealMatrix* pos;
    RealMatrix* neg;

    void walk(std::size_t node, std::size_t sign, double strength, std::size_t length) {
        if (node != source) {
            RealMatrix& target = sign == 0 ? *pos : *neg;
            target(source, node) = std::max(target(source, node), strength);
        }
        if (length == max_len) return;
        for (const auto& [next, e] : out[node]) {
            const std::size_t next_sign = e.quality == Quality::negative ? sign ^ 1 : sign;
            const std::size_t state = next_sign * n + next;
            if (visited[state]) continue;
            visited[state] = 1;
            walk(next, next_sign, std::min(strength, e.strength), length + 1);
            visited[state] = 0;
        }
    }
};

} // namespace

InfluenceMatrix brute_force_influence(const ValueDependencyGraph& g, std::size_t max_len) {
    const std::size_t n = g.size();
    if (n > 10) throw ArgumentError("brute_force_influence refuses graphs with more than 10 nodes");
    RealMatrix pos(n, n);
    RealMatrix neg(n, n);
    WalkSearch search{g, n, max_len, 0, {}, {}, &pos, &neg};
    search.out.resize(n);
    for (const auto& [pair, e] : g.edges()) search.out[pair.first].emplace_back(pair.second, e);
    for (std::size_t i = 0; i < n; ++i) {
        search.source = i;
        search.visited.assign(2 * n, 0);
        search.visited[i] = 1;
        search.walk(i, 0, 1.0, 0);
    }
    return InfluenceMatrix::from_components(std::move(pos), std::move(neg));
}

DependencyLevels vdl_nvdl(const ValueDependencyGraph& g) {
    const std::size_t n = g.size();
    if (n < 2) throw ArgumentError("value dependency level needs at least two requirements");
    DependencyLevels levels;
    const std::size_t k = g.edge_count();
    levels.level = static_cast<double>(k) / static_cast<double>(n * (n - 1));
    if (k > 0) levels.negative = static_cast<double>(g.negative_edge_count()) / static_cast<double>(k);
    return levels;
}

DependencyLevels pdl_npdl(const PrecedenceGraph& p) {
    const std::size_t n = p.size();
    if (n < 2) throw ArgumentError("precedence dependency level needs at least two requirements");
    std::size_t total = 0;
    std::size_t negative = 0;
    for (const auto& c : p.constraints()) {
        switch (c.kind) {
        case PrecedenceKind::requires_all: total += 1; break;
        case PrecedenceKind::requires_any: total += c.targets.size(); break;
        case PrecedenceKind::conflicts:
            total += 1;
            negative += 1;
            break;
        case PrecedenceKind::exactly_one: {
            const std::size_t m = c.targets.size();
            total += m * (m - 1) / 2;
            negative += m * (m - 1) / 2;
            break;
        }
        }
    }
    DependencyLevels levels;
    levels.level = static_cast<double>(total) / static_cast<double>(n * (n - 1));
    if (total > 0) levels.negative = static_cast<double>(negative) / static_cast<double>(total);
    return levels;
}

} // namespace depsel
