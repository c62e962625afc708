#include "sigc/common/dimension.hpp"

#include <algorithm>
#include <cctype>

#include "sigc/common/errors.hpp"

namespace sigc {

namespace {

constexpr std::array<std::string_view, kNumDimensions> kWireNames = {
    "noisiness", "coloration", "discontinuity", "loudness",
    "reverberation", "signal", "overall",
};

constexpr std::array<std::string_view, kNumDimensions> kDisplayNames = {
    "Noisiness", "Coloration", "Discontinuity", "Loudness",
    "Reverberation", "Signal", "Overall",
};

}  // namespace

std::string_view to_string(Dimension d) { return kWireNames[index_of(d)]; }

std::string_view display_name(Dimension d) {
  return kDisplayNames[index_of(d)];
}

std::optional<Dimension> parse_dimension(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  // Common P.835 aliases.
  if (lower == "sig") return Dimension::kSignal;
  if (lower == "bak" || lower == "background") return Dimension::kNoisiness;
  if (lower == "ovrl") return Dimension::kOverall;
  for (std::size_t i = 0; i < kWireNames.size(); ++i) {
    if (kWireNames[i] == lower) return kAllDimensions[i];
  }
  return std::nullopt;
}

Dimension dimension_from_string(std::string_view name) {
  auto d = parse_dimension(name);
  if (!d) throw ValidationError("unknown dimension '" + std::string(name) + "'");
  return *d;
}

}  // namespace sigc
