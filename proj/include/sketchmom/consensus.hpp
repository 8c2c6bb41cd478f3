#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sketchmom/linalg.hpp"
#include "sketchmom/solvers.hpp"

namespace sketchmom {

enum class Topology { Line, Cycle, RandomGeometric };

struct GraphSpec {
    Topology topology = Topology::Line;
    int n = 2;
    double radius = 0.0;  // RGG only; 0 -> sqrt(log n / n)
    std::uint64_t seed = 0;
};

struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // u < v, no duplicates
    int m() const { return static_cast<int>(edges.size()); }
};

/// Line: edges (i, i+1). Cycle: line plus (n-1, 0). RandomGeometric: nodes
/// uniform in the unit square, edge when distance < radius; redrawn until
/// connected (at most 100 retries).
Graph build_graph(const GraphSpec& spec);

bool is_connected(const Graph& g);

/// Incidence-matrix system A x = 0: one row per edge (u,v) with +1 at u and
/// -1 at v. rank(A) = n-1 and every row has squared norm 2.
LinearSystem incidence_matrix(const Graph& g);

/// Graph Laplacian built from degrees and adjacency (independent of A^T A).
Matrix laplacian(const Graph& g);

/// Smallest nonzero eigenvalue of L = A^T A.
double algebraic_connectivity(const Graph& g);

/// Closed forms: line 2(1 - cos(pi/n)), cycle 2(1 - cos(2 pi/n)).
double algebraic_connectivity_closed_form(Topology topology, int n);

/// Momentum pairwise gossip: randomized Kaczmarz on the incidence system with
/// x0 = c and uniform edge sampling.
IterateTrace run_gossip(const Graph& g, const Vector& c, const SolverConfig& cfg,
                        const RunOptions& opts = {});

/// Edge-list text format: header "n m", then one "u v" pair per line, 0-based.
void write_edge_list(std::ostream& out, const Graph& g);
Graph read_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);
void save_edge_list(const std::string& path, const Graph& g);

} // namespace sketchmom
