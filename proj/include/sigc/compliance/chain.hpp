#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sigc/compliance/rational.hpp"

namespace sigc::compliance {

struct StftStage {
  Rational window_ms;
  Rational hop_ms;
  int lookahead_frames = 0;
};

struct ConvStage {
  int kernel_samples = 1;
  int stride_samples = 1;
  int left_pad_samples = 0;
};

struct OverlapSaveStage {
  Rational frame_ms;
};

struct PassthroughStage {};

using ProcessingStage = std::variant<StftStage, ConvStage, OverlapSaveStage, PassthroughStage>;

struct ProcessingChain {
  std::vector<ProcessingStage> stages;
  int sample_rate = 48000;
  std::optional<double> declared_rtf;

  // Throws ValidationError listing every broken stage invariant.
  void validate() const;
};

std::string stage_name(const ProcessingStage& stage);

// Descriptor JSON:
//   {"sample_rate": 48000, "declared_rtf": 0.3,
//    "stages": [{"type": "stft", "window_ms": 20, "hop_ms": 10, "lookahead_frames": 0},
//               {"type": "conv", "kernel_samples": 16, "stride_samples": 1, "left_pad_samples": 0},
//               {"type": "overlap_save", "frame_ms": 16},
//               {"type": "passthrough"}]}
// Millisecond fields may also be strings such as "1/48" for exact values.
ProcessingChain parse_chain_json(const std::string& text);
ProcessingChain read_chain_file(const std::string& path);

}  // namespace sigc::compliance
