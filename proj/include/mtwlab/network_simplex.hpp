#pragma once

#include <vector>

namespace mtw {

/// Uncapacitated transportation problem on a sparse bipartite arc set.
struct TransportProblem {
  struct Arc {
    int source;
    int sink;
    double cost;
  };
  std::vector<double> supply;  // one entry per source, >= 0
  std::vector<double> demand;  // one entry per sink, >= 0, same total as supply
  std::vector<Arc> arcs;       // absent arcs are forbidden
};

struct TransportSolution {
  bool feasible = false;
  std::vector<double> flow;  // per arc of the problem
  std::vector<double> u;     // source duals
  std::vector<double> v;     // sink duals, u_i + v_j <= cost on arcs
  double value = 0.0;
  long pivots = 0;
};

/// Primal network simplex with a strongly feasible spanning tree (artificial root,
/// block-search pricing, Cunningham leaving-arc rule).
[[nodiscard]] TransportSolution solve_transport(const TransportProblem& problem);

/// Maximum flow source -> sources -> sinks -> sink restricted to the problem's arcs (Dinic).
struct MaxFlowResult {
  double value = 0.0;
  std::vector<double> flow;       // per arc of the problem
  std::vector<char> source_side;  // residual reachability of sources / sinks (min-cut side)
  std::vector<char> sink_side;
};
[[nodiscard]] MaxFlowResult bipartite_max_flow(const TransportProblem& problem);

}  // namespace mtw
