#pragma once

#include "dtm/ids.hpp"

namespace dtm {

/// A tradable accident observation made by a connected vehicle.
struct DataProduct {
  LinkId link_id;
  double position_m = 0.0;
  double observed_at_s = 0.0;
  double severity = 0.0;
  double observed_flow_vph = 0.0;

  bool operator==(const DataProduct&) const = default;
};

/// What a buyer sees before settlement: where and when, but not how bad.
struct ProductDigest {
  LinkId link_id;
  double observed_at_s = 0.0;

  bool operator==(const ProductDigest&) const = default;
};

inline ProductDigest digest_of(const DataProduct& p) { return {p.link_id, p.observed_at_s}; }

}  // namespace dtm
