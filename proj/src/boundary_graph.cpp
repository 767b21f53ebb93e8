#include "visualmetrics/boundary_cc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace visualmetrics {

namespace {

double edge_gk(const DefiningFunction& phi, const CVec& a, const CVec& b, double k) {
    const CVec mid = snap_to_boundary(phi, 0.5 * (a + b));
    const LeviData L = levi_data(phi, mid);
    CVec d = b - a;
    d -= L.nu * herm(d, L.nu).real();
    const cplx c = herm(d, L.nu);
    const CVec dH = d - L.nu * c;
    const double lev = std::max(0.0, (dH.transpose() * L.levi * dH.conjugate())(0, 0).real());
    return std::sqrt(lev + k * k * std::norm(c));
}

struct CellKey {
    std::uint64_t operator()(const std::vector<int>& c) const {
        std::uint64_t h = 1469598103934665603ull;
        for (int v : c) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
            h *= 1099511628211ull;
        }
        return h;
    }
};

std::vector<int> cell_of(const CVec& v, double cell) {
    const RVec x = to_real(v);
    std::vector<int> c(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) c[i] = static_cast<int>(std::floor(x[i] / cell));
    return c;
}

}  // namespace

void BoundaryGraph::build_adjacency() {
    const int V = static_cast<int>(vertices.size());
    std::vector<int> deg(V, 0);
    for (const auto& e : edges) {
        ++deg[e.i];
        ++deg[e.j];
    }
    off.assign(V + 1, 0);
    for (int v = 0; v < V; ++v) off[v + 1] = off[v] + deg[v];
    adj.assign(off[V], 0);
    std::vector<int> fill(off.begin(), off.end() - 1);
    for (int id = 0; id < static_cast<int>(edges.size()); ++id) {
        adj[fill[edges[id].i]++] = id;
        adj[fill[edges[id].j]++] = id;
    }
}

double BoundaryGraph::mean_degree() const {
    return vertices.empty() ? 0.0 : 2.0 * static_cast<double>(edges.size()) / static_cast<double>(vertices.size());
}

BoundaryGraph build_boundary_graph(const DefiningFunction& phi, int V, std::uint64_t seed, const GraphOptions& opts) {
    if (V < 2) throw Error(ErrorCode::InvalidArgument, "graph needs at least two vertices");
    BoundaryGraph G;
    G.n = phi.dimension();
    G.seed = seed;
    std::mt19937_64 rng(seed);
    G.vertices.reserve(V);
    for (int i = 0; i < V; ++i) G.vertices.push_back(sample_boundary_point(phi, rng));

    // Edge radius from the mean target_degree-th neighbor distance over probe vertices.
    const int probes = std::min(V, 400);
    const int kth = std::min(opts.target_degree, V - 1);
    double acc = 0.0;
    std::vector<double> d(V);
    for (int s = 0; s < probes; ++s) {
        const int i = static_cast<int>((static_cast<long long>(s) * V) / probes);
        for (int j = 0; j < V; ++j) d[j] = (G.vertices[i] - G.vertices[j]).norm();
        std::nth_element(d.begin(), d.begin() + kth, d.end());
        acc += d[kth];
    }
    G.rho_edge = acc / probes;

    std::unordered_map<std::uint64_t, std::vector<int>> grid;
    std::vector<std::vector<int>> cells(V);
    for (int i = 0; i < V; ++i) {
        cells[i] = cell_of(G.vertices[i], G.rho_edge);
        grid[CellKey{}(cells[i])].push_back(i);
    }
    const int m = 2 * G.n;
    int combos = 1;
    for (int a = 0; a < m; ++a) combos *= 3;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < V; ++i) {
        std::vector<int> c(m);
        for (int t = 0; t < combos; ++t) {
            int r = t;
            for (int a = 0; a < m; ++a) {
                c[a] = cells[i][a] + (r % 3) - 1;
                r /= 3;
            }
            auto it = grid.find(CellKey{}(c));
            if (it == grid.end()) continue;
            for (int j : it->second)
                if (j > i && cells[j] == c && (G.vertices[i] - G.vertices[j]).norm() < G.rho_edge) pairs.emplace_back(i, j);
        }
    }
    std::sort(pairs.begin(), pairs.end());

    int j1 = opts.j1;
    if (j1 < 0) j1 = static_cast<int>(std::floor(std::log2(1.0 / G.rho_edge)));
    j1 = std::max(j1, opts.j0);
    for (int j = opts.j0; j <= j1; ++j) G.k_values.push_back(std::ldexp(1.0, j));

    G.edges.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        BoundaryGraphEdge e;
        e.i = i;
        e.j = j;
        for (double k : G.k_values) e.length.push_back(edge_gk(phi, G.vertices[i], G.vertices[j], k));
        G.edges.push_back(std::move(e));
    }
    G.build_adjacency();

    std::vector<char> seen(V, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int p = G.off[v]; p < G.off[v + 1]; ++p) {
            const auto& e = G.edges[G.adj[p]];
            const int w = e.i == v ? e.j : e.i;
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
        }
    }
    if (count != V) throw Error(ErrorCode::GraphDisconnected, "boundary graph is not connected");
    return G;
}

void write_boundary_graph(const BoundaryGraph& G, std::ostream& os) {
    char buf[64];
    os << G.vertices.size() << ' ' << G.edges.size() << ' ' << G.k_values.size() << ' ' << G.seed << '\n';
    for (const CVec& v : G.vertices) {
        const RVec x = to_real(v);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", x[i]);
            os << (i ? " " : "") << buf;
        }
        os << '\n';
    }
    for (const auto& e : G.edges) {
        os << e.i << ' ' << e.j;
        for (double l : e.length) {
            std::snprintf(buf, sizeof buf, "%.17g", l);
            os << ' ' << buf;
        }
        os << '\n';
    }
}

BoundaryGraph read_boundary_graph(std::istream& is, int j0) {
    BoundaryGraph G;
    std::size_t V = 0, E = 0, K = 0;
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, "empty graph file");
    {
        std::istringstream hs(line);
        if (!(hs >> V >> E >> K >> G.seed)) throw Error(ErrorCode::InvalidArgument, "bad graph header");
    }
    for (std::size_t k = 0; k < K; ++k) G.k_values.push_back(std::ldexp(1.0, j0 + static_cast<int>(k)));
    for (std::size_t v = 0; v < V; ++v) {
        if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, "truncated vertex list");
        std::istringstream ls(line);
        std::vector<double> xs;
        double x;
        while (ls >> x) xs.push_back(x);
        if (xs.size() % 2 != 0 || xs.size() < 4) throw Error(ErrorCode::InvalidArgument, "bad vertex line");
        RVec r(static_cast<Eigen::Index>(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) r[static_cast<Eigen::Index>(i)] = xs[i];
        G.vertices.push_back(to_complex(r));
        G.n = static_cast<int>(xs.size() / 2);
    }
    for (std::size_t e = 0; e < E; ++e) {
        if (!std::getline(is, line)) throw Error(ErrorCode::InvalidArgument, "truncated edge list");
        std::istringstream ls(line);
        BoundaryGraphEdge ed;
        ls >> ed.i >> ed.j;
        ed.length.resize(K);
        for (std::size_t k = 0; k < K; ++k) ls >> ed.length[k];
        if (!ls) throw Error(ErrorCode::InvalidArgument, "bad edge line");
        G.rho_edge = std::max(G.rho_edge, (G.vertices[ed.i] - G.vertices[ed.j]).norm());
        G.edges.push_back(std::move(ed));
    }
    G.build_adjacency();
    return G;
}

GraphPath graph_shortest_path(const DefiningFunction& phi, const BoundaryGraph& G, const CVec& p, const CVec& q,
                              int k_index) {
    const int V = static_cast<int>(G.vertices.size());
    const double k = G.k_values.at(k_index);
    const int src = V, dst = V + 1;
    // Temporary attachments of p and q.
    std::vector<std::pair<int, double>> att_p, att_q;
    for (int v = 0; v < V; ++v) {
        if ((G.vertices[v] - p).norm() < G.rho_edge) att_p.emplace_back(v, edge_gk(phi, p, G.vertices[v], k));
        if ((G.vertices[v] - q).norm() < G.rho_edge) att_q.emplace_back(v, edge_gk(phi, G.vertices[v], q, k));
    }
    std::vector<double> dist(V + 2, std::numeric_limits<double>::infinity());
    std::vector<int> prev(V + 2, -1);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0.0;
    pq.emplace(0.0, src);
    std::vector<double> to_dst(V, -1.0);
    for (const auto& [v, l] : att_q) to_dst[v] = l;
    if ((p - q).norm() < G.rho_edge) {
        dist[dst] = edge_gk(phi, p, q, k);
        prev[dst] = src;
        pq.emplace(dist[dst], dst);
    }
    while (!pq.empty()) {
        const auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        if (v == dst) break;
        auto relax = [&](int w, double l) {
            if (d + l < dist[w]) {
                dist[w] = d + l;
                prev[w] = v;
                pq.emplace(dist[w], w);
            }
        };
        if (v == src) {
            for (const auto& [w, l] : att_p) relax(w, l);
            continue;
        }
        for (int a = G.off[v]; a < G.off[v + 1]; ++a) {
            const auto& e = G.edges[G.adj[a]];
            relax(e.i == v ? e.j : e.i, e.length[k_index]);
        }
        if (to_dst[v] >= 0.0) relax(dst, to_dst[v]);
    }
    if (!std::isfinite(dist[dst])) throw Error(ErrorCode::GraphDisconnected, "target not reachable in the boundary graph");
    GraphPath gp;
    gp.length = dist[dst];
    std::vector<CVec> rev;
    for (int v = dst; v != -1; v = prev[v]) rev.push_back(v == src ? p : (v == dst ? q : G.vertices[v]));
    gp.nodes.assign(rev.rbegin(), rev.rend());
    return gp;
}

}  // namespace visualmetrics
