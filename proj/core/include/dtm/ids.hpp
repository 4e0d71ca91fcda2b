#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace dtm {

template <class Tag, class Rep = std::uint32_t>
struct Id {
  Rep value{};

  constexpr std::size_t index() const { return static_cast<std::size_t>(value); }
  constexpr auto operator<=>(const Id&) const = default;
};

using NodeId = Id<struct NodeTag>;
using LinkId = Id<struct LinkTag>;
using VehicleId = Id<struct VehicleTag>;
using ProposalId = Id<struct ProposalTag, std::uint64_t>;

}  // namespace dtm

template <class Tag, class Rep>
struct std::hash<dtm::Id<Tag, Rep>> {
  std::size_t operator()(const dtm::Id<Tag, Rep>& id) const noexcept { return std::hash<Rep>{}(id.value); }
};
