#include "sigc/session/certificate.hpp"

#include <string>

#include "sigc/common/errors.hpp"

namespace sigc::session {

std::string_view to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::kQualification: return "qualification";
    case CertificateKind::kSetup: return "setup";
    case CertificateKind::kTraining: return "training";
  }
  return "qualification";
}

CertificateKind certificate_kind_from_string(std::string_view s) {
  if (s == "qualification") return CertificateKind::kQualification;
  if (s == "setup") return CertificateKind::kSetup;
  if (s == "training") return CertificateKind::kTraining;
  throw ValidationError("unknown certificate kind '" + std::string(s) + "'");
}

bool Certificate::valid_at(Timestamp now) const {
  if (now < issued_at) return false;
  if (!ttl) return true;
  return now < issued_at + *ttl;
}

Certificate Certificate::issue(CertificateKind kind, Timestamp now) {
  Certificate c;
  c.kind = kind;
  c.issued_at = now;
  switch (kind) {
    case CertificateKind::kQualification: break;
    case CertificateKind::kSetup: c.ttl = kSetupTtl; break;
    case CertificateKind::kTraining: c.ttl = kTrainingTtl; break;
  }
  return c;
}

}  // namespace sigc::session
