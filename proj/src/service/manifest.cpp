#include "sigc/service/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sigc/common/errors.hpp"
#include "sigc/stimulus/wav.hpp"

namespace sigc::service {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Reader {
 public:
  std::vector<std::string> issues;

  const json* field(const json& obj, const char* key, const std::string& where, bool required = true) {
    if (!obj.is_object()) {
      issues.push_back(where + ": expected an object");
      return nullptr;
    }
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
      if (required) issues.push_back(where + ": missing '" + key + "'");
      return nullptr;
    }
    return &*it;
  }

  std::string str(const json& obj, const char* key, const std::string& where) {
    const json* v = field(obj, key, where);
    if (!v) return {};
    if (!v->is_string() || v->get<std::string>().empty()) {
      issues.push_back(where + ": '" + key + "' must be a non-empty string");
      return {};
    }
    return v->get<std::string>();
  }

  const json& array(const json& obj, const char* key, const std::string& where) {
    static const json empty = json::array();
    const json* v = field(obj, key, where);
    if (!v) return empty;
    if (!v->is_array()) {
      issues.push_back(where + ": '" + key + "' must be an array");
      return empty;
    }
    return *v;
  }

  // Registers a media item, catching duplicate refs.
  void media(Manifest& m, const std::string& ref, const std::string& file, const std::string& where) {
    if (ref.empty() || file.empty()) return;
    if (!m.media.emplace(ref, file).second) issues.push_back(where + ": duplicate id '" + ref + "'");
  }
};

std::string item_where(const char* section, std::size_t i) {
  return std::string(section) + "[" + std::to_string(i) + "]";
}

}  // namespace

const ManifestClip* Manifest::clip(const std::string& ref) const {
  for (const auto& c : clips) {
    if (c.ref() == ref) return &c;
  }
  return nullptr;
}

Manifest parse_manifest(const json& doc, const std::string& base_dir) {
  Reader rd;
  Manifest m;
  if (!doc.is_object()) throw ValidationError("manifest must be a JSON object");
  m.document = doc;

  const json* version = rd.field(doc, "schema_version", "manifest");
  if (version && (!version->is_number_integer() || version->get<int>() != kManifestSchemaVersion)) {
    rd.issues.push_back("manifest: unsupported schema_version (expected " +
                        std::to_string(kManifestSchemaVersion) + ")");
  }
  m.campaign_id = rd.str(doc, "campaign_id", "manifest");
  if (m.campaign_id.find('/') != std::string::npos) {
    rd.issues.push_back("manifest: campaign_id must not contain '/'");
  }
  std::string root = ".";
  if (const json* r = rd.field(doc, "media_root", "manifest", false)) {
    if (r->is_string()) {
      root = r->get<std::string>();
    } else {
      rd.issues.push_back("manifest: 'media_root' must be a string");
    }
  }
  m.media_root = (fs::path(base_dir) / root).lexically_normal().string();
  if (const json* s = rd.field(doc, "seed", "manifest", false)) {
    if (s->is_number_unsigned()) {
      m.seed = s->get<std::uint64_t>();
    } else {
      rd.issues.push_back("manifest: 'seed' must be a non-negative integer");
    }
  }
  if (const json* v = rd.field(doc, "votes_per_clip", "manifest", false)) {
    if (v->is_number_integer() && v->get<int>() >= 1) {
      m.votes_per_clip = v->get<int>();
    } else {
      rd.issues.push_back("manifest: 'votes_per_clip' must be a positive integer");
    }
  }

  auto& mat = m.materials;
  mat.seed = m.seed;
  if (const json* b = rd.field(doc, "required_bandwidth", "manifest", false)) {
    try {
      mat.required_bandwidth = qc::bandwidth_verdict_from_string(b->get<std::string>());
      if (mat.required_bandwidth == qc::BandwidthVerdict::kFail) throw ValidationError("fail");
    } catch (const std::exception&) {
      rd.issues.push_back("manifest: 'required_bandwidth' must be wideband, superwideband or fullband");
    }
  }

  // Rating clips.
  const json& clips = rd.array(doc, "clips", "manifest");
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const std::string w = item_where("clips", i);
    ManifestClip c{rd.str(clips[i], "model_id", w), rd.str(clips[i], "clip_id", w),
                   rd.str(clips[i], "file", w)};
    if (c.model_id.find('/') != std::string::npos) rd.issues.push_back(w + ": model_id must not contain '/'");
    rd.media(m, c.ref(), c.file, w);
    m.clips.push_back(std::move(c));
  }

  const json& gold = rd.array(doc, "gold", "manifest");
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const std::string w = item_where("gold", i);
    qc::GoldSpec spec;
    spec.clip_ref = rd.str(gold[i], "id", w);
    rd.media(m, spec.clip_ref, rd.str(gold[i], "file", w), w);
    if (const json* e = rd.field(gold[i], "expected", w)) {
      if (!e->is_object() || e->empty()) {
        rd.issues.push_back(w + ": 'expected' must be a non-empty object");
      } else {
        for (const auto& [name, val] : e->items()) {
          auto d = parse_dimension(name);
          if (!d || !val.is_number_integer()) {
            rd.issues.push_back(w + ": bad expected entry '" + name + "'");
            continue;
          }
          spec.expected[*d] = val.get<int>();
        }
      }
    }
    if (const json* t = rd.field(gold[i], "tolerance", w, false)) {
      if (t->is_number_integer() && t->get<int>() >= 0) {
        spec.tolerance = t->get<int>();
      } else {
        rd.issues.push_back(w + ": 'tolerance' must be a non-negative integer");
      }
    }
    try {
      if (!spec.expected.empty()) spec.validate();
    } catch (const ValidationError& e) {
      rd.issues.push_back(w + ": " + e.what());
    }
    if (!spec.clip_ref.empty()) mat.controls.gold[spec.clip_ref] = spec;
  }

  const json& trapping = rd.array(doc, "trapping", "manifest");
  for (std::size_t i = 0; i < trapping.size(); ++i) {
    const std::string w = item_where("trapping", i);
    const std::string id = rd.str(trapping[i], "id", w);
    rd.media(m, id, rd.str(trapping[i], "file", w), w);
    const std::string target = rd.str(trapping[i], "target", w);
    try {
      if (!target.empty() && !id.empty()) mat.controls.trapping[id] = stimulus::trap_target_from_string(target);
    } catch (const ValidationError& e) {
      rd.issues.push_back(w + ": " + e.what());
    }
  }

  const json& hearing = rd.array(doc, "hearing", "manifest");
  if (hearing.empty()) rd.issues.push_back("hearing: at least one stimulus required");
  for (std::size_t i = 0; i < hearing.size(); ++i) {
    const std::string w = item_where("hearing", i);
    session::HearingStimulus h{rd.str(hearing[i], "id", w), rd.str(hearing[i], "answer", w)};
    rd.media(m, h.ref, rd.str(hearing[i], "file", w), w);
    mat.hearing.push_back(std::move(h));
  }
  if (const json* f = rd.field(doc, "hearing_pass_fraction", "manifest", false)) {
    if (f->is_number() && f->get<double>() > 0.0 && f->get<double>() <= 1.0) {
      mat.hearing_pass_fraction = f->get<double>();
    } else {
      rd.issues.push_back("manifest: 'hearing_pass_fraction' must be in (0, 1]");
    }
  }

  const json& bandwidth = rd.array(doc, "bandwidth", "manifest");
  if (bandwidth.size() != 5) rd.issues.push_back("bandwidth: exactly 5 samples required");
  for (std::size_t i = 0; i < bandwidth.size(); ++i) {
    const std::string w = item_where("bandwidth", i);
    const std::string id = rd.str(bandwidth[i], "id", w);
    rd.media(m, id, rd.str(bandwidth[i], "file", w), w);
    qc::BandwidthKey key;
    if (const json* n = rd.field(bandwidth[i], "has_noise", w); n && n->is_boolean()) {
      key.has_noise = n->get<bool>();
    } else if (n) {
      rd.issues.push_back(w + ": 'has_noise' must be a boolean");
    }
    if (const json* band = rd.field(bandwidth[i], "band", w, false)) {
      if (band->is_array() && band->size() == 2 && (*band)[0].is_number() && (*band)[1].is_number()) {
        key.band = stimulus::BandSpec{(*band)[0].get<double>(), (*band)[1].get<double>()};
        try {
          key.band->validate(kRequiredSampleRate);
        } catch (const ValidationError& e) {
          rd.issues.push_back(w + ": " + e.what());
        }
      } else {
        rd.issues.push_back(w + ": 'band' must be [low_hz, high_hz] or null");
      }
    }
    if (key.has_noise != key.band.has_value()) {
      rd.issues.push_back(w + ": noisy samples need a band and clean samples none");
    }
    mat.bandwidth_refs.push_back(id);
    mat.bandwidth_key.push_back(key);
  }

  const json& jnd = rd.array(doc, "jnd", "manifest");
  for (std::size_t i = 0; i < jnd.size(); ++i) {
    const std::string w = item_where("jnd", i);
    session::JndPair p;
    p.ref_a = rd.str(jnd[i], "id_a", w);
    p.ref_b = rd.str(jnd[i], "id_b", w);
    rd.media(m, p.ref_a, rd.str(jnd[i], "file_a", w), w);
    rd.media(m, p.ref_b, rd.str(jnd[i], "file_b", w), w);
    const std::string better = rd.str(jnd[i], "better", w);
    if (better == "a" || better == "b") {
      p.better = better[0];
    } else if (!better.empty()) {
      rd.issues.push_back(w + ": 'better' must be \"a\" or \"b\"");
    }
    mat.jnd.push_back(std::move(p));
  }
  if (static_cast<int>(mat.jnd.size()) < mat.jnd_pass_count) {
    rd.issues.push_back("jnd: at least " + std::to_string(mat.jnd_pass_count) + " pairs required");
  }

  const json& instr = rd.array(doc, "instructions", "manifest");
  if (instr.empty()) rd.issues.push_back("instructions: at least one sample required");
  for (std::size_t i = 0; i < instr.size(); ++i) {
    const std::string w = item_where("instructions", i);
    const std::string id = rd.str(instr[i], "id", w);
    rd.media(m, id, rd.str(instr[i], "file", w), w);
    mat.instruction_refs.push_back(id);
  }

  if (const json* loud = rd.field(doc, "loudness", "manifest")) {
    mat.loudness_ref = rd.str(*loud, "id", "loudness");
    rd.media(m, mat.loudness_ref, rd.str(*loud, "file", "loudness"), "loudness");
  }

  const json& training = rd.array(doc, "training", "manifest");
  if (static_cast<int>(training.size()) < mat.training_clip_count) {
    rd.issues.push_back("training: at least " + std::to_string(mat.training_clip_count) +
                        " clips required");
  }
  for (std::size_t i = 0; i < training.size(); ++i) {
    const std::string w = item_where("training", i);
    session::TrainingClip t;
    t.ref = rd.str(training[i], "id", w);
    rd.media(m, t.ref, rd.str(training[i], "file", w), w);
    if (const json* er = rd.field(training[i], "expected_ranges", w, false)) {
      for (const auto& [name, range] : er->items()) {
        auto d = parse_dimension(name);
        if (!d || !range.is_array() || range.size() != 2 || !range[0].is_number_integer() ||
            !range[1].is_number_integer()) {
          rd.issues.push_back(w + ": bad expected range '" + name + "'");
          continue;
        }
        const int lo = range[0].get<int>(), hi = range[1].get<int>();
        if (lo < 1 || hi > 5 || lo > hi) {
          rd.issues.push_back(w + ": range for '" + name + "' must lie within 1..5");
          continue;
        }
        t.expected_ranges[*d] = {lo, hi};
      }
    }
    mat.training.push_back(std::move(t));
  }

  if (const json* b = rd.field(doc, "baseline_model", "manifest", false)) {
    if (!b->is_string()) {
      rd.issues.push_back("manifest: 'baseline_model' must be a string");
    } else {
      m.baseline_model = b->get<std::string>();
      bool found = false;
      for (const auto& c : m.clips) found = found || c.model_id == *m.baseline_model;
      if (!found) rd.issues.push_back("manifest: baseline_model '" + *m.baseline_model + "' has no clips");
    }
  }

  if (mat.controls.gold.empty()) rd.issues.push_back("gold: at least one gold clip required");
  if (mat.controls.trapping.empty()) rd.issues.push_back("trapping: at least one trapping clip required");
  if (m.clips.size() < 10) rd.issues.push_back("clips: at least 10 rating clips required");

  if (!rd.issues.empty()) throw ValidationError("invalid manifest", rd.issues);
  return m;
}

std::string media_path(const Manifest& manifest, const std::string& ref) {
  auto it = manifest.media.find(ref);
  if (it == manifest.media.end()) throw NotFoundError("unknown media ref '" + ref + "'");
  return (fs::path(manifest.media_root) / it->second).string();
}

std::vector<std::string> check_media(const Manifest& manifest) {
  std::vector<std::string> issues;
  for (const auto& [ref, file] : manifest.media) {
    const std::string path = media_path(manifest, ref);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
      issues.push_back(ref + ": missing audio file '" + path + "'");
      continue;
    }
    try {
      const auto info = stimulus::probe_wav(path);
      if (info.sample_rate != kRequiredSampleRate) {
        issues.push_back(ref + ": '" + path + "' has sample rate " + std::to_string(info.sample_rate) +
                         " Hz, expected 48000 Hz");
      }
    } catch (const ValidationError& e) {
      issues.push_back(ref + ": '" + path + "': " + e.what());
    }
  }
  return issues;
}

Manifest ingest_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m = parse_manifest(doc, fs::path(path).parent_path().string());
  const auto issues = check_media(m);
  if (!issues.empty()) throw ValidationError("manifest media check failed", issues);
  return m;
}

std::vector<session::TestPackage> plan_packages(const Manifest& manifest) {
  std::vector<std::string> clips, gold, trap;
  for (const auto& c : manifest.clips) clips.push_back(c.ref());
  for (const auto& [ref, spec] : manifest.materials.controls.gold) gold.push_back(ref);
  for (const auto& [ref, t] : manifest.materials.controls.trapping) trap.push_back(ref);
  return session::build_packages(clips, gold, trap, manifest.votes_per_clip, manifest.seed);
}

}  // namespace sigc::service
