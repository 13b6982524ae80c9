#include "mtwlab/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "mtwlab/error.hpp"

namespace mtw {

namespace {

class Simplex {
 public:
  explicit Simplex(const TransportProblem& p) : n_(static_cast<int>(p.supply.size())), m_(static_cast<int>(p.demand.size())) {
    const int real = static_cast<int>(p.arcs.size());
    nodes_ = n_ + m_ + 1;
    root_ = n_ + m_;
    double maxabs = 0.0;
    for (const auto& a : p.arcs) maxabs = std::max(maxabs, std::abs(a.cost));
    art_cost_ = (maxabs + 1.0) * nodes_;
    eps_ = 1e-11 * (1.0 + maxabs);
    const int total = real + n_ + m_;
    src_.resize(total);
    tgt_.resize(total);
    cost_.resize(total);
    flow_.assign(total, 0.0);
    basic_.assign(total, 0);
    for (int e = 0; e < real; ++e) {
      src_[e] = p.arcs[e].source;
      tgt_[e] = n_ + p.arcs[e].sink;
      cost_[e] = p.arcs[e].cost;
    }
    real_ = real;
    parent_.assign(nodes_, root_);
    pred_.assign(nodes_, -1);
    up_.assign(nodes_, 0);
    depth_.assign(nodes_, 1);
    pi_.assign(nodes_, 0.0);
    children_.assign(nodes_, {});
    parent_[root_] = -1;
    depth_[root_] = 0;
    for (int v = 0; v < n_ + m_; ++v) {
      const int e = real + v;
      const double amount = v < n_ ? p.supply[v] : p.demand[v - n_];
      cost_[e] = art_cost_;
      if (v < n_ || amount <= 0.0) {
        src_[e] = v;
        tgt_[e] = root_;
        up_[v] = 1;
        pi_[v] = -art_cost_;
      } else {
        src_[e] = root_;
        tgt_[e] = v;
        up_[v] = 0;
        pi_[v] = art_cost_;
      }
      flow_[e] = std::max(0.0, amount);
      pred_[v] = e;
      basic_[e] = 1;
      children_[root_].push_back(v);
    }
    block_ = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(total))));
  }

  TransportSolution run() {
    TransportSolution sol;
    const long max_pivots = 100L * static_cast<long>(src_.size()) + 1000000L;
    for (;;) {
      const int e = price();
      if (e < 0) break;
      pivot(e);
      if (++sol.pivots > max_pivots) throw Error("network simplex: pivot limit exceeded");
    }
    double art = 0.0;
    for (std::size_t e = real_; e < src_.size(); ++e) art += flow_[e];
    sol.feasible = art <= 1e-9;
    sol.flow.assign(flow_.begin(), flow_.begin() + real_);
    sol.u.resize(n_);
    sol.v.resize(m_);
    for (int i = 0; i < n_; ++i) sol.u[i] = -pi_[i];
    for (int j = 0; j < m_; ++j) sol.v[j] = pi_[n_ + j];
    for (int e = 0; e < real_; ++e) sol.value += flow_[e] * cost_[e];
    return sol;
  }

 private:
  double reduced(int e) const { return cost_[e] + pi_[src_[e]] - pi_[tgt_[e]]; }

  int price() {
    const int total = static_cast<int>(src_.size());
    int best = -1;
    double best_rc = -eps_;
    int count = block_;
    int e = next_;
    for (int k = 0; k < total; ++k, e = (e + 1 == total ? 0 : e + 1)) {
      if (!basic_[e]) {
        const double rc = reduced(e);
        if (rc < best_rc) {
          best_rc = rc;
          best = e;
        }
      }
      if (--count == 0) {
        if (best >= 0) break;
        count = block_;
      }
    }
    next_ = e;
    return best;
  }

  void remove_child(int p, int c) {
    auto& ch = children_[p];
    ch.erase(std::find(ch.begin(), ch.end(), c));
  }

  void pivot(int e) {
    const int first = src_[e];
    const int second = tgt_[e];
    int a = first, b = second;
    while (a != b) {
      if (depth_[a] > depth_[b]) {
        a = parent_[a];
      } else if (depth_[b] > depth_[a]) {
        b = parent_[b];
      } else {
        a = parent_[a];
        b = parent_[b];
      }
    }
    const int join = a;
    double delta = std::numeric_limits<double>::infinity();
    int out = -1;
    int side = 0;
    for (int w = first; w != join; w = parent_[w])
      if (up_[w] && flow_[pred_[w]] < delta) {
        delta = flow_[pred_[w]];
        out = w;
        side = 1;
      }
    for (int w = second; w != join; w = parent_[w])
      if (!up_[w] && flow_[pred_[w]] <= delta) {
        delta = flow_[pred_[w]];
        out = w;
        side = 2;
      }
    if (side == 0) throw Error("network simplex: unbounded cycle");

    if (delta > 0.0) {
      flow_[e] += delta;
      for (int w = first; w != join; w = parent_[w]) flow_[pred_[w]] += up_[w] ? -delta : delta;
      for (int w = second; w != join; w = parent_[w]) flow_[pred_[w]] += up_[w] ? delta : -delta;
    }
    const int leaving = pred_[out];
    flow_[leaving] = 0.0;
    basic_[leaving] = 0;
    basic_[e] = 1;

    const int in_child = side == 1 ? first : second;
    const int in_parent = side == 1 ? second : first;
    path_.clear();
    for (int w = in_child;; w = parent_[w]) {
      path_.push_back(w);
      if (w == out) break;
    }
    remove_child(parent_[out], out);
    for (std::size_t k = path_.size() - 1; k >= 1; --k) {
      const int w = path_[k];
      const int c = path_[k - 1];
      remove_child(w, c);
      children_[c].push_back(w);
      parent_[w] = c;
      pred_[w] = pred_[c];
      up_[w] = !up_[c];
    }
    parent_[in_child] = in_parent;
    pred_[in_child] = e;
    up_[in_child] = src_[e] == in_child;
    children_[in_parent].push_back(in_child);

    stack_.assign(1, in_child);
    while (!stack_.empty()) {
      const int w = stack_.back();
      stack_.pop_back();
      const int p = parent_[w];
      depth_[w] = depth_[p] + 1;
      pi_[w] = up_[w] ? pi_[p] - cost_[pred_[w]] : pi_[p] + cost_[pred_[w]];
      for (int c : children_[w]) stack_.push_back(c);
    }
  }

  int n_, m_, nodes_ = 0, root_ = 0, real_ = 0;
  double art_cost_ = 0.0, eps_ = 0.0;
  int block_ = 10, next_ = 0;
  std::vector<int> src_, tgt_;
  std::vector<double> cost_, flow_;
  std::vector<char> basic_;
  std::vector<int> parent_, pred_, depth_;
  std::vector<char> up_;
  std::vector<double> pi_;
  std::vector<std::vector<int>> children_;
  std::vector<int> path_, stack_;
};

}  // namespace

TransportSolution solve_transport(const TransportProblem& problem) {
  for (const auto& a : problem.arcs)
    if (a.source < 0 || a.source >= static_cast<int>(problem.supply.size()) || a.sink < 0 ||
        a.sink >= static_cast<int>(problem.demand.size()) || !std::isfinite(a.cost))
      throw ConfigError("solve_transport: malformed arc");
  const double sa = std::accumulate(problem.supply.begin(), problem.supply.end(), 0.0);
  const double sb = std::accumulate(problem.demand.begin(), problem.demand.end(), 0.0);
  if (std::abs(sa - sb) > 1e-9 * std::max(1.0, sa)) throw ConfigError("solve_transport: unbalanced masses");
  TransportProblem balanced = problem;
  if (sb > 0.0)
    for (double& d : balanced.demand) d *= sa / sb;
  Simplex s(balanced);
  return s.run();
}

MaxFlowResult bipartite_max_flow(const TransportProblem& p) {
  const int n = static_cast<int>(p.supply.size());
  const int m = static_cast<int>(p.demand.size());
  const int S = n + m, T = n + m + 1, N = n + m + 2;
  struct Edge {
    int to;
    double cap;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adj(N);
  auto add = [&](int a, int b, double cap) {
    adj[a].push_back(static_cast<int>(edges.size()));
    edges.push_back({b, cap});
    adj[b].push_back(static_cast<int>(edges.size()));
    edges.push_back({a, 0.0});
  };
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    add(S, i, p.supply[i]);
    total += p.supply[i];
  }
  for (int j = 0; j < m; ++j) add(n + j, T, p.demand[j]);
  const std::size_t arc_base = edges.size();
  const double big = 2.0 * total + 1.0;
  for (const auto& a : p.arcs) add(a.source, n + a.sink, big);

  constexpr double tiny = 1e-15;
  std::vector<int> level(N), it(N);
  auto bfs = [&] {
    std::fill(level.begin(), level.end(), -1);
    std::queue<int> q;
    level[S] = 0;
    q.push(S);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int id : adj[v])
        if (edges[id].cap > tiny && level[edges[id].to] < 0) {
          level[edges[id].to] = level[v] + 1;
          q.push(edges[id].to);
        }
    }
    return level[T] >= 0;
  };
  // Iterative blocking-flow search along level graph.
  auto dfs = [&](auto&& self, int v, double f) -> double {
    if (v == T) return f;
    for (int& k = it[v]; k < static_cast<int>(adj[v].size()); ++k) {
      const int id = adj[v][k];
      Edge& ed = edges[id];
      if (ed.cap > tiny && level[ed.to] == level[v] + 1) {
        const double pushed = self(self, ed.to, std::min(f, ed.cap));
        if (pushed > tiny) {
          ed.cap -= pushed;
          edges[id ^ 1].cap += pushed;
          return pushed;
        }
      }
    }
    return 0.0;
  };
  MaxFlowResult r;
  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (double f; (f = dfs(dfs, S, big)) > tiny;) r.value += f;
  }
  r.flow.resize(p.arcs.size());
  for (std::size_t a = 0; a < p.arcs.size(); ++a) r.flow[a] = edges[arc_base + 2 * a + 1].cap;
  r.source_side.assign(n, 0);
  r.sink_side.assign(m, 0);
  for (int i = 0; i < n; ++i) r.source_side[i] = level[i] >= 0;
  for (int j = 0; j < m; ++j) r.sink_side[j] = level[n + j] >= 0;
  return r;
}

}  // namespace mtw
