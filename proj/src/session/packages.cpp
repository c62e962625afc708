#include "sigc/session/packages.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <set>

#include "sigc/common/errors.hpp"
#include "sigc/common/rng.hpp"

namespace sigc::session {

std::string_view to_string(ItemKind k) {
  switch (k) {
    case ItemKind::kRating: return "rating";
    case ItemKind::kGold: return "gold";
    case ItemKind::kTrapping: return "trapping";
  }
  return "rating";
}

ItemKind item_kind_from_string(std::string_view s) {
  if (s == "rating") return ItemKind::kRating;
  if (s == "gold") return ItemKind::kGold;
  if (s == "trapping") return ItemKind::kTrapping;
  throw ValidationError("unknown package item kind '" + std::string(s) + "'");
}

std::vector<std::string> TestPackage::rating_clips() const {
  std::vector<std::string> out;
  for (const auto& item : items) {
    if (item.kind == ItemKind::kRating) out.push_back(item.clip_ref);
  }
  return out;
}

std::size_t TestPackage::count(ItemKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(), [&](const auto& i) { return i.kind == kind; }));
}

namespace {

std::vector<std::string> pick_distinct(const std::vector<std::string>& pool, int count, Rng& rng) {
  std::vector<std::string> shuffled = pool;
  rng.shuffle(shuffled);
  shuffled.resize(static_cast<std::size_t>(count));
  return shuffled;
}

std::string package_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pkg-%04zu", index + 1);
  return buf;
}

}  // namespace

std::vector<TestPackage> build_packages(const std::vector<std::string>& clips,
                                        const std::vector<std::string>& gold_pool,
                                        const std::vector<std::string>& trap_pool,
                                        int votes_per_clip, std::uint64_t seed,
                                        const PackageLayout& layout) {
  const auto page = static_cast<std::size_t>(layout.rating_per_package);
  if (layout.rating_per_package < 1 || layout.gold_per_package < 0 ||
      layout.trapping_per_package < 0) {
    throw ConfigurationError("invalid package layout");
  }
  if (votes_per_clip < 1) throw ConfigurationError("votes_per_clip must be >= 1");
  if (std::set<std::string>(clips.begin(), clips.end()).size() != clips.size()) {
    throw ConfigurationError("duplicate clip ids in package input");
  }
  if (clips.size() < page) {
    throw ConfigurationError("need at least " + std::to_string(page) + " rating clips, got " +
                             std::to_string(clips.size()));
  }
  if (gold_pool.empty() || trap_pool.empty()) {
    throw ConfigurationError("gold and trapping pools must be non-empty");
  }
  if (gold_pool.size() < static_cast<std::size_t>(layout.gold_per_package) ||
      trap_pool.size() < static_cast<std::size_t>(layout.trapping_per_package)) {
    throw ConfigurationError("control pool smaller than the per-package control count");
  }

  Rng rng(seed);
  std::deque<std::string> queue;
  for (int round = 0; round < votes_per_clip; ++round) {
    std::vector<std::string> order = clips;
    rng.shuffle(order);
    queue.insert(queue.end(), order.begin(), order.end());
  }

  const std::size_t controls =
      static_cast<std::size_t>(layout.gold_per_package + layout.trapping_per_package);
  std::vector<TestPackage> plan;
  while (!queue.empty()) {
    std::vector<std::string> chosen;
    std::set<std::string> in_page;
    // Take the next clips not already on this page; skipped ones keep their
    // place in the queue so per-clip multiplicity is preserved.
    for (auto it = queue.begin(); it != queue.end() && chosen.size() < page;) {
      if (in_page.insert(*it).second) {
        chosen.push_back(*it);
        it = queue.erase(it);
      } else {
        ++it;
      }
    }
    while (chosen.size() < page) {
      const std::string& extra = clips[rng.uniform_index(clips.size())];
      if (in_page.insert(extra).second) chosen.push_back(extra);
    }

    std::vector<PackageItem> control_items;
    for (const auto& g : pick_distinct(gold_pool, layout.gold_per_package, rng)) {
      control_items.push_back({g, ItemKind::kGold});
    }
    for (const auto& t : pick_distinct(trap_pool, layout.trapping_per_package, rng)) {
      control_items.push_back({t, ItemKind::kTrapping});
    }

    const std::size_t total = page + controls;
    std::vector<std::size_t> slots;
    for (std::size_t i = 1; i < total; ++i) slots.push_back(i);
    rng.shuffle(slots);
    slots.resize(controls);

    TestPackage pkg;
    pkg.id = package_id(plan.size());
    pkg.items.resize(total);
    std::vector<bool> taken(total, false);
    for (std::size_t c = 0; c < controls; ++c) {
      pkg.items[slots[c]] = control_items[c];
      taken[slots[c]] = true;
    }
    std::size_t next = 0;
    for (std::size_t i = 0; i < total; ++i) {
      if (!taken[i]) pkg.items[i] = {chosen[next++], ItemKind::kRating};
    }
    plan.push_back(std::move(pkg));
  }
  return plan;
}

}  // namespace sigc::session
