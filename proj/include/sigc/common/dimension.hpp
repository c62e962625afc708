#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace sigc {

// The seven rated scales: the four P.804 listening dimensions, reverberation,
// and the P.835 signal / overall scales. Noisiness doubles as BAK.
enum class Dimension {
  kNoisiness,
  kColoration,
  kDiscontinuity,
  kLoudness,
  kReverberation,
  kSignal,
  kOverall,
};

inline constexpr std::size_t kNumDimensions = 7;

inline constexpr std::array<Dimension, kNumDimensions> kAllDimensions = {
    Dimension::kNoisiness,     Dimension::kColoration, Dimension::kDiscontinuity,
    Dimension::kLoudness,      Dimension::kReverberation,
    Dimension::kSignal,        Dimension::kOverall,
};

// Dimensions that are shuffled per participant; Signal and Overall always
// follow them.
inline constexpr std::array<Dimension, 5> kSubDimensions = {
    Dimension::kNoisiness, Dimension::kColoration, Dimension::kDiscontinuity,
    Dimension::kLoudness, Dimension::kReverberation,
};

inline constexpr std::size_t index_of(Dimension d) {
  return static_cast<std::size_t>(d);
}

// Lowercase wire name: "noisiness", "signal", ...
std::string_view to_string(Dimension d);

// Display name used in text reports: "Noisiness", "Signal", ...
std::string_view display_name(Dimension d);

std::optional<Dimension> parse_dimension(std::string_view name);

// Throws ValidationError on unknown names.
Dimension dimension_from_string(std::string_view name);

}  // namespace sigc
