#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace sigc::analytics {

// Lowercases ASCII, drops ASCII punctuation and splits on whitespace.
std::vector<std::string> normalize_words(std::string_view text);

struct WerCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_words = 0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
  // errors / reference_words; may exceed 1.
  double rate() const;

  WerCounts& operator+=(const WerCounts& other);
};

// Minimum edit-distance alignment of already tokenized sequences. When
// several alignments share the minimum, substitutions are preferred over
// deletions over insertions during the backtrace.
WerCounts align_words(const std::vector<std::string>& reference,
                      const std::vector<std::string>& hypothesis);

// Throws ValidationError when the reference is empty.
double wer(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis);

double wer_text(std::string_view reference, std::string_view hypothesis);

}  // namespace sigc::analytics
