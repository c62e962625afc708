#pragma once

#include <chrono>
#include <optional>
#include <string_view>

#include "sigc/common/time.hpp"

namespace sigc::session {

enum class CertificateKind { kQualification, kSetup, kTraining };

std::string_view to_string(CertificateKind k);
CertificateKind certificate_kind_from_string(std::string_view s);

inline constexpr Duration kSetupTtl = std::chrono::hours(2);
inline constexpr Duration kTrainingTtl = std::chrono::hours(1);

// Timed credential for a passed protocol section. Qualification never
// expires within a campaign.
struct Certificate {
  CertificateKind kind = CertificateKind::kQualification;
  Timestamp issued_at{};
  std::optional<Duration> ttl;

  // Valid on [issued_at, issued_at + ttl).
  bool valid_at(Timestamp now) const;

  static Certificate issue(CertificateKind kind, Timestamp now);
};

}  // namespace sigc::session
