#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sigc::session {

enum class ItemKind { kRating, kGold, kTrapping };

std::string_view to_string(ItemKind k);
ItemKind item_kind_from_string(std::string_view s);

struct PackageItem {
  std::string clip_ref;
  ItemKind kind = ItemKind::kRating;

  friend bool operator==(const PackageItem&, const PackageItem&) = default;
};

// One rating page: distinct rating clips interleaved with control items.
struct TestPackage {
  std::string id;
  std::vector<PackageItem> items;  // presentation order

  std::vector<std::string> rating_clips() const;
  std::size_t count(ItemKind kind) const;

  friend bool operator==(const TestPackage&, const TestPackage&) = default;
};

struct PackageLayout {
  int rating_per_package = 10;
  int gold_per_package = 1;
  int trapping_per_package = 1;
};

// Campaign package plan. Every clip is referenced votes_per_clip times across
// the plan, never twice in the same package. When
// clips.size() * votes_per_clip is not a multiple of the page size, the
// remaining slots of the last page are padded with seeded extra picks.
// Control items are placed uniformly at random, never at the first
// position. Deterministic for a given seed.
//
// Throws ConfigurationError when clips are fewer than a page, a pool is
// empty, or votes_per_clip < 1.
std::vector<TestPackage> build_packages(const std::vector<std::string>& clips,
                                        const std::vector<std::string>& gold_pool,
                                        const std::vector<std::string>& trap_pool,
                                        int votes_per_clip, std::uint64_t seed,
                                        const PackageLayout& layout = {});

}  // namespace sigc::session
