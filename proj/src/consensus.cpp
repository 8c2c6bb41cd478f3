#include "sketchmom/consensus.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sketchmom/rng.hpp"

namespace sketchmom {

bool is_connected(const Graph& g) {
    if (g.n <= 0) return false;
    std::vector<std::vector<int>> adj(g.n);
    for (auto [u, v] : g.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::vector<char> seen(g.n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == g.n;
}

Graph build_graph(const GraphSpec& spec) {
    if (spec.n < 2) throw std::invalid_argument("build_graph: need n >= 2");
    Graph g;
    g.n = spec.n;
    switch (spec.topology) {
        case Topology::Line:
            for (int i = 0; i + 1 < spec.n; ++i) g.edges.emplace_back(i, i + 1);
            return g;
        case Topology::Cycle:
            for (int i = 0; i + 1 < spec.n; ++i) g.edges.emplace_back(i, i + 1);
            g.edges.emplace_back(0, spec.n - 1);
            return g;
        case Topology::RandomGeometric: {
            double r = spec.radius > 0.0
                           ? spec.radius
                           : std::sqrt(std::log(static_cast<double>(spec.n)) / spec.n);
            if (r > std::numbers::sqrt2)
                throw std::invalid_argument("build_graph: RGG radius must be <= sqrt(2)");
            std::mt19937_64 rng = make_rng(spec.seed);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (int attempt = 0; attempt < 100; ++attempt) {
                std::vector<double> px(spec.n), py(spec.n);
                for (int i = 0; i < spec.n; ++i) {
                    px[i] = unif(rng);
                    py[i] = unif(rng);
                }
                g.edges.clear();
                for (int u = 0; u < spec.n; ++u)
                    for (int v = u + 1; v < spec.n; ++v) {
                        double dx = px[u] - px[v], dy = py[u] - py[v];
                        if (std::sqrt(dx * dx + dy * dy) < r) g.edges.emplace_back(u, v);
                    }
                if (is_connected(g)) return g;
            }
            throw std::runtime_error("build_graph: RGG connectivity failed after 100 retries");
        }
    }
    throw std::logic_error("unreachable");
}

LinearSystem incidence_matrix(const Graph& g) {
    if (!is_connected(g)) throw std::invalid_argument("incidence_matrix: graph must be connected");
    Matrix a = Matrix::Zero(g.m(), g.n);
    for (int e = 0; e < g.m(); ++e) {
        a(e, g.edges[e].first) = 1.0;
        a(e, g.edges[e].second) = -1.0;
    }
    return LinearSystem(std::move(a), Vector::Zero(g.m()));
}

Matrix laplacian(const Graph& g) {
    Matrix l = Matrix::Zero(g.n, g.n);
    for (auto [u, v] : g.edges) {
        l(u, u) += 1.0;
        l(v, v) += 1.0;
        l(u, v) -= 1.0;
        l(v, u) -= 1.0;
    }
    return l;
}

double algebraic_connectivity(const Graph& g) {
    if (!is_connected(g))
        throw std::invalid_argument("algebraic_connectivity: graph must be connected");
    Eigen::SelfAdjointEigenSolver<Matrix> es(laplacian(g), Eigen::EigenvaluesOnly);
    // connected graph: exactly one zero eigenvalue
    return es.eigenvalues()(1);
}

double algebraic_connectivity_closed_form(Topology topology, int n) {
    switch (topology) {
        case Topology::Line:
            return 2.0 * (1.0 - std::cos(std::numbers::pi / n));
        case Topology::Cycle:
            return 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi / n));
        default:
            throw std::invalid_argument("no closed form for random geometric graphs");
    }
}

IterateTrace run_gossip(const Graph& g, const Vector& c, const SolverConfig& cfg,
                        const RunOptions& opts) {
    if (c.size() != g.n) throw std::invalid_argument("run_gossip: |c| must equal node count");
    LinearSystem sys = incidence_matrix(g);
    MetricSpec metric = MetricSpec::identity(g.n);
    Sketcher sk = Sketcher::mrk(sys);  // rows all have squared norm 2: uniform over edges
    RunOptions local = opts;
    if (!local.x_star) {
        // projection of c onto span(1) along Null(A)-perp: the all-mean vector
        local.x_star = Vector::Constant(g.n, c.mean());
    }
    return run(cfg, sys, metric, sk, c, local);
}

void write_edge_list(std::ostream& out, const Graph& g) {
    out << g.n << " " << g.m() << "\n";
    for (auto [u, v] : g.edges) out << u << " " << v << "\n";
}

Graph read_edge_list(std::istream& in) {
    Graph g;
    int m = 0;
    if (!(in >> g.n >> m)) throw std::runtime_error("read_edge_list: malformed header");
    for (int e = 0; e < m; ++e) {
        int u, v;
        if (!(in >> u >> v)) throw std::runtime_error("read_edge_list: truncated edge list");
        if (u == v || u < 0 || v < 0 || u >= g.n || v >= g.n)
            throw std::runtime_error("read_edge_list: invalid edge");
        if (u > v) std::swap(u, v);
        g.edges.emplace_back(u, v);
    }
    return g;
}

Graph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);
    return read_edge_list(in);
}

void save_edge_list(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_edge_list: cannot open " + path);
    write_edge_list(out, g);
}

} // namespace sketchmom
