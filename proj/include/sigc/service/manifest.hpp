#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sigc/session/packages.hpp"
#include "sigc/session/session.hpp"

namespace sigc::service {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr int kRequiredSampleRate = 48000;

struct MediaItem {
  std::string ref;
  std::string file;  // as written in the manifest, relative to media_root
};

struct ManifestClip {
  std::string model_id;
  std::string clip_id;  // source clip id, shared across models
  std::string file;

  std::string ref() const { return model_id + "/" + clip_id; }
};

// Campaign manifest, schema_version 1:
// {
//   "schema_version": 1, "campaign_id": "...", "media_root": "media",
//   "seed": 2023, "votes_per_clip": 5, "required_bandwidth": "fullband",
//   "baseline_model": "noisy",                                     (optional)
//   "clips":      [{"model_id", "clip_id", "file"}],
//   "gold":       [{"id", "file", "expected": {"noisiness": 1}, "tolerance": 1}],
//   "trapping":   [{"id", "file", "target": "best" | "worst"}],
//   "hearing":    [{"id", "file", "answer": "364"}], "hearing_pass_fraction": 0.8,
//   "bandwidth":  [{"id", "file", "has_noise", "band": [low, high] | null}],  (5)
//   "jnd":        [{"id_a", "file_a", "id_b", "file_b", "better": "a" | "b"}],
//   "instructions": [{"id", "file"}],
//   "loudness":   {"id", "file"},
//   "training":   [{"id", "file", "expected_ranges": {"overall": [2, 4]}}]
// }
struct Manifest {
  std::string campaign_id;
  std::string media_root;  // resolved against the manifest's directory
  std::uint64_t seed = 2023;
  int votes_per_clip = 5;
  std::optional<std::string> baseline_model;
  nlohmann::json document;  // the validated source document

  std::vector<ManifestClip> clips;
  session::ProtocolMaterials materials;
  // Every referenced audio file by ref, for validation and serving.
  std::map<std::string, std::string> media;

  const ManifestClip* clip(const std::string& ref) const;
};

// Schema-level parsing. Collects every problem and throws one
// ValidationError listing them. Does not touch the file system.
Manifest parse_manifest(const nlohmann::json& doc, const std::string& base_dir);

// Checks that every media file exists and is 48 kHz 16-bit mono PCM.
// Returns itemized problems (empty when all good).
std::vector<std::string> check_media(const Manifest& manifest);

// Reads, parses and validates media; throws ValidationError with all issues.
Manifest ingest_manifest_file(const std::string& path);

std::string media_path(const Manifest& manifest, const std::string& ref);

// Package plan for the manifest's rating clips and control pools.
std::vector<session::TestPackage> plan_packages(const Manifest& manifest);

}  // namespace sigc::service
