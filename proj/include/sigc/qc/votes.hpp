#pragma once

#include <map>
#include <string>

#include "sigc/common/dimension.hpp"
#include "sigc/common/time.hpp"

namespace sigc::qc {

// One participant's ratings of one clip.
struct VoteRecord {
  std::string participant_id;
  std::string clip_ref;
  std::map<Dimension, int> votes;  // each in 1..5
  bool listen_complete = false;
  Timestamp submitted_at{};
  std::string package_id;

  // Throws ValidationError on a vote outside 1..5 or, when
  // `require_all_dimensions`, a missing scale.
  void validate(bool require_all_dimensions) const;
};

}  // namespace sigc::qc
