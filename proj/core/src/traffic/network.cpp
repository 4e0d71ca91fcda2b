#include "dtm/traffic/network.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>

#include <fmt/format.h>

#include "dtm/error.hpp"

namespace dtm::traffic {
namespace {

Side opposite(Side s) {
  switch (s) {
    case Side::north: return Side::south;
    case Side::south: return Side::north;
    case Side::east: return Side::west;
    case Side::west: return Side::east;
  }
  return s;
}

}  // namespace

const DirectedLink& RoadNetwork::link(LinkId id) const {
  if (!has_link(id)) throw Error(Errc::unknown_link, fmt::format("link {}", id.value));
  return links_[id.index()];
}

std::optional<std::size_t> RoadNetwork::downstream_intersection(LinkId id) const {
  const auto& l = link(id);
  if (!is_intersection(l.to_node)) return std::nullopt;
  return l.to_node.index();
}

std::optional<Side> RoadNetwork::boundary_side(NodeId n) const {
  if (n.index() >= boundary_side_.size()) return std::nullopt;
  return boundary_side_[n.index()];
}

std::vector<LinkId> RoadNetwork::route_from(LinkId entry) const {
  const auto& first = link(entry);
  auto start_side = boundary_side(first.from_node);
  if (!first.is_entry || !start_side) throw Error(Errc::invalid_argument, fmt::format("link {} is not an entry", entry.value));
  const Side target = opposite(*start_side);

  // Dijkstra over nodes carrying (distance, link sequence); the sequence
  // comparison gives the lowest-link-id tie break. Grids here are small.
  using Label = std::pair<double, std::vector<LinkId>>;
  std::vector<std::optional<Label>> best(node_count_);
  auto cmp = [](const Label& a, const Label& b) { return a > b; };
  std::priority_queue<Label, std::vector<Label>, decltype(cmp)> open(cmp);

  Label init{first.length_m, {entry}};
  best[first.to_node.index()] = init;
  open.push(init);

  std::optional<Label> answer;
  while (!open.empty()) {
    Label cur = open.top();
    open.pop();
    const NodeId at = links_[cur.second.back().index()].to_node;
    if (best[at.index()] && *best[at.index()] < cur) continue;
    if (answer && answer->first < cur.first) break;

    const auto& last = links_[cur.second.back().index()];
    if (last.is_exit) {
      if (boundary_side(last.to_node) == target && (!answer || cur < *answer)) answer = cur;
      continue;
    }
    for (LinkId next : outgoing_[at.index()]) {
      const auto& nl = links_[next.index()];
      // Never leave through a side other than the target.
      if (nl.is_exit && boundary_side(nl.to_node) != target) continue;
      Label cand{cur.first + nl.length_m, cur.second};
      cand.second.push_back(next);
      auto& slot = best[nl.to_node.index()];
      if (!slot || cand < *slot) {
        slot = cand;
        open.push(std::move(cand));
      }
    }
  }
  if (!answer) throw Error(Errc::invalid_scenario, fmt::format("no route from entry {}", entry.value));
  return answer->second;
}

void RoadNetwork::validate() const {
  for (const auto& l : links_) {
    if (!(l.length_m > 0.0) || l.lanes < 1 || !(l.free_speed_mps > 0.0))
      throw Error(Errc::invalid_scenario, fmt::format("link {} has non-positive geometry", l.id.value));
  }
  for (const auto& in : intersections_) {
    const auto total = in.approaches[0].size() + in.approaches[1].size();
    if (total < 2 || in.approaches[0].empty() || in.approaches[1].empty())
      throw Error(Errc::invalid_scenario, fmt::format("intersection {} lacks two phase groups", in.node.value));
  }
  // Every exit reachable from every entry.
  for (LinkId e : entries_) {
    std::vector<bool> seen(links_.size(), false);
    std::vector<LinkId> stack{e};
    seen[e.index()] = true;
    while (!stack.empty()) {
      LinkId cur = stack.back();
      stack.pop_back();
      for (LinkId n : outgoing_[links_[cur.index()].to_node.index()]) {
        if (!seen[n.index()]) {
          seen[n.index()] = true;
          stack.push_back(n);
        }
      }
    }
    for (LinkId x : exits_) {
      if (!seen[x.index()])
        throw Error(Errc::invalid_scenario, fmt::format("exit {} unreachable from entry {}", x.value, e.value));
    }
  }
}

RoadNetwork build_grid(int rows, int cols, double link_length_m, int lanes, double free_speed_mps) {
  if (rows <= 0 || cols <= 0 || !(link_length_m > 0.0) || lanes <= 0 || !(free_speed_mps > 0.0))
    throw Error(Errc::invalid_scenario,
                fmt::format("grid {}x{} length {} lanes {} speed {}", rows, cols, link_length_m, lanes, free_speed_mps));

  RoadNetwork net;
  net.rows_ = rows;
  net.cols_ = cols;
  const auto inter = static_cast<std::uint32_t>(rows * cols);
  auto node_at = [cols](int r, int c) { return NodeId{static_cast<std::uint32_t>(r * cols + c)}; };

  // Boundary terminals: north row, then east column, south row, west column.
  std::map<std::tuple<int, int, Side>, NodeId> terminal;
  std::uint32_t next_node = inter;
  net.boundary_side_.assign(inter, std::nullopt);
  auto add_terminal = [&](int r, int c, Side s) {
    terminal[{r, c, s}] = NodeId{next_node++};
    net.boundary_side_.push_back(s);
  };
  for (int c = 0; c < cols; ++c) add_terminal(0, c, Side::north);
  for (int r = 0; r < rows; ++r) add_terminal(r, cols - 1, Side::east);
  for (int c = 0; c < cols; ++c) add_terminal(rows - 1, c, Side::south);
  for (int r = 0; r < rows; ++r) add_terminal(r, 0, Side::west);
  net.node_count_ = next_node;
  net.outgoing_.assign(net.node_count_, {});

  // Neighbour of (r, c) in a direction: an intersection or a boundary terminal.
  struct Dir {
    Side side;
    int dr, dc;
    Heading inbound;  // heading of traffic arriving from this direction
  };
  const std::array<Dir, 4> dirs{{{Side::north, -1, 0, Heading::south},
                                 {Side::east, 0, 1, Heading::west},
                                 {Side::south, 1, 0, Heading::north},
                                 {Side::west, 0, -1, Heading::east}}};
  auto neighbour = [&](int r, int c, const Dir& d) -> std::pair<NodeId, bool> {
    int nr = r + d.dr, nc = c + d.dc;
    if (nr >= 0 && nr < rows && nc >= 0 && nc < cols) return {node_at(nr, nc), false};
    return {terminal.at({r, c, d.side}), true};
  };
  auto reverse = [](Heading h) {
    switch (h) {
      case Heading::north: return Heading::south;
      case Heading::south: return Heading::north;
      case Heading::east: return Heading::west;
      case Heading::west: return Heading::east;
    }
    return h;
  };

  auto add_link = [&](NodeId from, NodeId to, Heading h, bool entry, bool exit) {
    DirectedLink l{LinkId{static_cast<std::uint32_t>(net.links_.size())},
                   from, to, link_length_m, lanes, free_speed_mps, h, entry, exit};
    net.links_.push_back(l);
    net.outgoing_[from.index()].push_back(l.id);
    if (entry) net.entries_.push_back(l.id);
    if (exit) net.exits_.push_back(l.id);
    return l.id;
  };

  net.intersections_.resize(inter);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      auto& in = net.intersections_[node_at(r, c).index()];
      in.node = node_at(r, c);
      in.row = r;
      in.col = c;
      for (const auto& d : dirs) {
        auto [from, is_terminal] = neighbour(r, c, d);
        LinkId id = add_link(from, in.node, d.inbound, is_terminal, false);
        in.approaches[static_cast<int>(phase_of(d.inbound))].push_back(id);
      }
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (const auto& d : dirs) {
        auto [to, is_terminal] = neighbour(r, c, d);
        if (is_terminal) add_link(node_at(r, c), to, reverse(d.inbound), false, true);
      }
    }
  }
  // Keep adjacency deterministic (ascending link id).
  for (auto& out : net.outgoing_) std::sort(out.begin(), out.end());
  return net;
}

}  // namespace dtm::traffic
