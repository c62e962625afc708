#include "sigc/stimulus/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sigc/common/errors.hpp"

namespace sigc::stimulus {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Parsed {
  WavInfo info;
  std::size_t data_offset = 0;
};

std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("wav: cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Parsed parse_header(const std::vector<unsigned char>& bytes, const std::string& path) {
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError("wav: " + path + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw fail("not a RIFF/WAVE file");
  }
  Parsed parsed;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw fail("truncated fmt chunk");
      std::uint16_t format = le16(bytes.data() + body);
      if (format == kFormatExtensible && size >= 40) {
        // The sub-format GUID starts with the actual format tag.
        format = le16(bytes.data() + body + 24);
      }
      if (format != kFormatPcm) throw fail("not PCM (format tag " + std::to_string(format) + ")");
      parsed.info.channels = le16(bytes.data() + body + 2);
      parsed.info.sample_rate = static_cast<int>(le32(bytes.data() + body + 4));
      parsed.info.bits_per_sample = le16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw fail("data chunk precedes fmt chunk");
      if (parsed.info.channels != 1) {
        throw fail(std::to_string(parsed.info.channels) + " channels, expected mono");
      }
      if (parsed.info.bits_per_sample != 16) {
        throw fail(std::to_string(parsed.info.bits_per_sample) + "-bit samples, expected 16");
      }
      if (parsed.info.sample_rate <= 0) throw fail("invalid sample rate");
      if (body + size > bytes.size()) throw fail("truncated data chunk");
      if (size % 2 != 0) throw fail("odd data chunk size");
      parsed.info.frames = size / 2;
      parsed.data_offset = body;
      return parsed;
    }
    pos = body + size + (size & 1);
  }
  throw fail(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

}  // namespace

WavInfo probe_wav(const std::string& path) {
  return parse_header(slurp(path), path).info;
}

AudioBuffer read_wav(const std::string& path) {
  const auto bytes = slurp(path);
  const Parsed parsed = parse_header(bytes, path);
  AudioBuffer buf;
  buf.sample_rate = parsed.info.sample_rate;
  buf.samples.resize(parsed.info.frames);
  const unsigned char* p = bytes.data() + parsed.data_offset;
  for (std::size_t i = 0; i < parsed.info.frames; ++i) {
    const auto s = static_cast<std::int16_t>(le16(p + 2 * i));
    buf.samples[i] = static_cast<double>(s) / 32768.0;
  }
  return buf;
}

void write_wav(const AudioBuffer& buffer, const std::string& path) {
  buffer.validate();
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(buffer.samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, static_cast<std::uint32_t>(buffer.sample_rate));
  put32(out, static_cast<std::uint32_t>(buffer.sample_rate) * 2);
  put16(out, 2);
  put16(out, 16);
  out += "data";
  put32(out, data_bytes);
  for (double s : buffer.samples) {
    const double clamped = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
    put16(out, static_cast<std::uint16_t>(q));
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("wav: cannot write '" + path + "'");
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw Error("wav: write failed for '" + path + "'");
}

}  // namespace sigc::stimulus
