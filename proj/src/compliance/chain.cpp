#include "sigc/compliance/chain.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sigc/common/errors.hpp"

namespace sigc::compliance {

namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Rational ms_field(const json& stage, const char* key, std::vector<std::string>& issues,
                  const std::string& where) {
  if (!stage.contains(key)) {
    issues.push_back(where + ": missing '" + key + "'");
    return Rational(0);
  }
  const json& v = stage.at(key);
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_number_float()) return Rational::from_double(v.get<double>());
    if (v.is_string()) return Rational::parse(v.get<std::string>());
  } catch (const ValidationError& e) {
    issues.push_back(where + ": '" + key + "': " + e.what());
    return Rational(0);
  }
  issues.push_back(where + ": '" + key + "' must be a number");
  return Rational(0);
}

int int_field(const json& stage, const char* key, int fallback, bool required,
              std::vector<std::string>& issues, const std::string& where) {
  if (!stage.contains(key)) {
    if (required) issues.push_back(where + ": missing '" + key + "'");
    return fallback;
  }
  const json& v = stage.at(key);
  if (!v.is_number_integer()) {
    issues.push_back(where + ": '" + key + "' must be an integer");
    return fallback;
  }
  return v.get<int>();
}

}  // namespace

std::string stage_name(const ProcessingStage& stage) {
  return std::visit(overloaded{[](const StftStage&) { return std::string("stft"); },
                               [](const ConvStage&) { return std::string("conv"); },
                               [](const OverlapSaveStage&) { return std::string("overlap_save"); },
                               [](const PassthroughStage&) { return std::string("passthrough"); }},
                    stage);
}

void ProcessingChain::validate() const {
  std::vector<std::string> issues;
  if (sample_rate <= 0) issues.push_back("sample_rate must be positive");
  if (stages.empty()) issues.push_back("chain has no stages");
  if (declared_rtf && !(*declared_rtf >= 0.0)) issues.push_back("declared_rtf must be >= 0");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const std::string where = "stage " + std::to_string(i) + " (" + stage_name(stages[i]) + ")";
    std::visit(overloaded{
                   [&](const StftStage& s) {
                     if (!(s.hop_ms > Rational(0))) issues.push_back(where + ": hop must be > 0");
                     if (s.window_ms < s.hop_ms) issues.push_back(where + ": window shorter than hop");
                     if (s.lookahead_frames < 0) issues.push_back(where + ": negative lookahead");
                   },
                   [&](const ConvStage& s) {
                     if (s.kernel_samples < 1) issues.push_back(where + ": kernel must be >= 1");
                     if (s.stride_samples < 1) issues.push_back(where + ": stride must be >= 1");
                     if (s.left_pad_samples < 0 || s.left_pad_samples > s.kernel_samples - 1) {
                       issues.push_back(where + ": left_pad must be in [0, kernel - 1]");
                     }
                   },
                   [&](const OverlapSaveStage& s) {
                     if (!(s.frame_ms > Rational(0))) issues.push_back(where + ": frame must be > 0");
                   },
                   [](const PassthroughStage&) {}},
               stages[i]);
  }
  if (!issues.empty()) throw ValidationError("invalid processing chain", issues);
}

ProcessingChain parse_chain_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("chain descriptor is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("chain descriptor must be a JSON object");
  std::vector<std::string> issues;
  ProcessingChain chain;
  chain.sample_rate = int_field(doc, "sample_rate", 48000, false, issues, "chain");
  if (doc.contains("declared_rtf")) {
    if (doc["declared_rtf"].is_number()) {
      chain.declared_rtf = doc["declared_rtf"].get<double>();
    } else if (!doc["declared_rtf"].is_null()) {
      issues.push_back("chain: 'declared_rtf' must be a number");
    }
  }
  if (!doc.contains("stages") || !doc["stages"].is_array()) {
    issues.push_back("chain: 'stages' must be an array");
  } else {
    const auto& stages = doc["stages"];
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const json& s = stages[i];
      const std::string where = "stage " + std::to_string(i);
      if (!s.is_object() || !s.contains("type") || !s["type"].is_string()) {
        issues.push_back(where + ": needs a string 'type'");
        continue;
      }
      const std::string type = s["type"].get<std::string>();
      if (type == "stft") {
        StftStage st;
        st.window_ms = ms_field(s, "window_ms", issues, where);
        st.hop_ms = ms_field(s, "hop_ms", issues, where);
        st.lookahead_frames = int_field(s, "lookahead_frames", 0, false, issues, where);
        chain.stages.push_back(st);
      } else if (type == "conv") {
        ConvStage st;
        st.kernel_samples = int_field(s, "kernel_samples", 1, true, issues, where);
        st.stride_samples = int_field(s, "stride_samples", 1, false, issues, where);
        st.left_pad_samples = int_field(s, "left_pad_samples", 0, false, issues, where);
        chain.stages.push_back(st);
      } else if (type == "overlap_save") {
        chain.stages.push_back(OverlapSaveStage{ms_field(s, "frame_ms", issues, where)});
      } else if (type == "passthrough") {
        chain.stages.push_back(PassthroughStage{});
      } else {
        issues.push_back(where + ": unknown type '" + type + "'");
      }
    }
  }
  if (!issues.empty()) throw ValidationError("invalid chain descriptor", issues);
  chain.validate();
  return chain;
}

ProcessingChain read_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open chain descriptor '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_chain_json(ss.str());
}

}  // namespace sigc::compliance
