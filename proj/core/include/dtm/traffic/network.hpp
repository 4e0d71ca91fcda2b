#pragma once

#include <array>
#include <optional>
#include <vector>

#include "dtm/ids.hpp"

namespace dtm::traffic {

/// Direction of travel along a link; north is decreasing row index.
enum class Heading { north, east, south, west };

/// Boundary side a terminal node sits on.
enum class Side { north, east, south, west };

enum class PhaseGroup { ns = 0, ew = 1 };

inline PhaseGroup phase_of(Heading h) {
  return (h == Heading::north || h == Heading::south) ? PhaseGroup::ns : PhaseGroup::ew;
}

struct DirectedLink {
  LinkId id;
  NodeId from_node;
  NodeId to_node;
  double length_m = 0.0;
  int lanes = 0;
  double free_speed_mps = 0.0;
  Heading heading = Heading::north;
  bool is_entry = false;  // starts on the boundary
  bool is_exit = false;   // ends on the boundary
};

struct Intersection {
  NodeId node;
  int row = 0;
  int col = 0;
  /// Incoming approaches, indexed by PhaseGroup.
  std::array<std::vector<LinkId>, 2> approaches;
};

/// Grid road network. Intersections occupy node ids [0, rows*cols) in row-major
/// order; boundary terminals follow.
class RoadNetwork {
 public:
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t node_count() const { return node_count_; }

  const std::vector<DirectedLink>& links() const { return links_; }
  const std::vector<LinkId>& entries() const { return entries_; }
  const std::vector<LinkId>& exits() const { return exits_; }
  const std::vector<Intersection>& intersections() const { return intersections_; }

  bool has_link(LinkId id) const { return id.index() < links_.size(); }
  /// Throws UnknownLink.
  const DirectedLink& link(LinkId id) const;

  bool is_intersection(NodeId n) const { return n.index() < intersections_.size(); }
  /// Index of the intersection a link feeds, if any.
  std::optional<std::size_t> downstream_intersection(LinkId id) const;
  std::optional<Side> boundary_side(NodeId n) const;
  const std::vector<LinkId>& outgoing(NodeId n) const { return outgoing_[n.index()]; }

  /// Shortest route from an entry link to any exit on the opposite boundary,
  /// ties broken by the lexicographically smallest link id sequence.
  std::vector<LinkId> route_from(LinkId entry) const;

  /// Throws InvalidScenario when a structural invariant does not hold.
  void validate() const;

 private:
  friend RoadNetwork build_grid(int rows, int cols, double link_length_m, int lanes, double free_speed_mps);

  int rows_ = 0;
  int cols_ = 0;
  std::size_t node_count_ = 0;
  std::vector<DirectedLink> links_;
  std::vector<LinkId> entries_;
  std::vector<LinkId> exits_;
  std::vector<Intersection> intersections_;
  std::vector<std::optional<Side>> boundary_side_;
  std::vector<std::vector<LinkId>> outgoing_;
};

inline constexpr double kDefaultFreeSpeedMps = 13.9;

/// Bidirectional links on every grid edge plus one boundary stub per side
/// position. Link ids: first every link that ends at an intersection
/// (intersections row-major, approaches from N, E, S, W), then every exit link
/// in the same order. Throws InvalidScenario on non-positive arguments.
RoadNetwork build_grid(int rows, int cols, double link_length_m, int lanes,
                       double free_speed_mps = kDefaultFreeSpeedMps);

}  // namespace dtm::traffic
