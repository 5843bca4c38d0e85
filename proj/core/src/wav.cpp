#include "morphsep/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "morphsep/formats.hpp"

namespace morphsep {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u16(std::vector<char>& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

int bytes_per_sample(SampleFormat f) {
  switch (f) {
    case SampleFormat::pcm16: return 2;
    case SampleFormat::pcm24: return 3;
    case SampleFormat::pcm32: return 4;
    case SampleFormat::float32: return 4;
    case SampleFormat::float64: return 8;
  }
  return 2;
}

double decode_sample(const unsigned char* p, SampleFormat f) {
  switch (f) {
    case SampleFormat::pcm16:
      return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case SampleFormat::pcm24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    case SampleFormat::pcm32:
      return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
    case SampleFormat::float32: {
      const std::uint32_t bits = read_u32(p);
      float v;
      std::memcpy(&v, &bits, sizeof v);
      return v;
    }
    case SampleFormat::float64: {
      std::uint64_t bits = static_cast<std::uint64_t>(read_u32(p)) |
                           (static_cast<std::uint64_t>(read_u32(p + 4)) << 32);
      double v;
      std::memcpy(&v, &bits, sizeof v);
      return v;
    }
  }
  return 0.0;
}

void encode_sample(std::vector<char>& out, double v, SampleFormat f) {
  auto quantize = [](double x, double scale, double lo, double hi) {
    return static_cast<std::int64_t>(std::clamp(std::round(x * scale), lo, hi));
  };
  switch (f) {
    case SampleFormat::pcm16:
      put_u16(out, static_cast<std::uint16_t>(quantize(v, 32768.0, -32768.0, 32767.0)));
      break;
    case SampleFormat::pcm24: {
      const auto q = static_cast<std::uint32_t>(quantize(v, 8388608.0, -8388608.0, 8388607.0));
      for (int i = 0; i < 3; ++i) out.push_back(static_cast<char>((q >> (8 * i)) & 0xFF));
      break;
    }
    case SampleFormat::pcm32:
      put_u32(out, static_cast<std::uint32_t>(quantize(v, 2147483648.0, -2147483648.0, 2147483647.0)));
      break;
    case SampleFormat::float32: {
      const auto fv = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &fv, sizeof bits);
      put_u32(out, bits);
      break;
    }
    case SampleFormat::float64: {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      put_u32(out, static_cast<std::uint32_t>(bits & 0xFFFFFFFFu));
      put_u32(out, static_cast<std::uint32_t>(bits >> 32));
      break;
    }
  }
}

}  // namespace

std::vector<std::vector<double>> load_wav_channels(const std::filesystem::path& path, WavInfo* info) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open WAV file " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(name + ": not a RIFF/WAVE file");

  WavInfo meta;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw Error(name + ": truncated fmt chunk");
      std::uint16_t tag = read_u16(bytes.data() + body);
      meta.channels = read_u16(bytes.data() + body + 2);
      meta.sample_rate = read_u32(bytes.data() + body + 4);
      const std::uint16_t bits = read_u16(bytes.data() + body + 14);
      if (tag == kFormatExtensible) {
        if (size < 40) throw Error(name + ": truncated extensible fmt chunk");
        tag = read_u16(bytes.data() + body + 24);  // first two bytes of the subformat GUID
      }
      if (tag == kFormatPcm && bits == 16) meta.format = SampleFormat::pcm16;
      else if (tag == kFormatPcm && bits == 24) meta.format = SampleFormat::pcm24;
      else if (tag == kFormatPcm && bits == 32) meta.format = SampleFormat::pcm32;
      else if (tag == kFormatFloat && bits == 32) meta.format = SampleFormat::float32;
      else if (tag == kFormatFloat && bits == 64) meta.format = SampleFormat::float64;
      else
        throw Error(name + ": unsupported codec (format tag " + std::to_string(tag) + ", " +
                    std::to_string(bits) + " bits)");
      if (meta.channels < 1) throw Error(name + ": no audio channels");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (body + size > bytes.size()) throw Error(name + ": truncated data chunk");
      data = bytes.data() + body;
      data_size = size;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw Error(name + ": missing fmt chunk");
  if (!data) throw Error(name + ": missing data chunk");

  const auto width = static_cast<std::size_t>(bytes_per_sample(meta.format));
  const auto channels = static_cast<std::size_t>(meta.channels);
  meta.frames = data_size / (width * channels);
  std::vector<std::vector<double>> out(channels, std::vector<double>(meta.frames));
  for (std::size_t i = 0; i < meta.frames; ++i)
    for (std::size_t c = 0; c < channels; ++c)
      out[c][i] = decode_sample(data + (i * channels + c) * width, meta.format);
  if (info) *info = meta;
  return out;
}

AudioSignal load_wav(const std::filesystem::path& path, WavInfo* info) {
  WavInfo meta;
  const auto channels = load_wav_channels(path, &meta);
  AudioSignal x(std::vector<double>(meta.frames, 0.0), meta.sample_rate);
  for (const auto& ch : channels)
    for (std::size_t i = 0; i < meta.frames; ++i) x.samples[i] += ch[i];
  const double scale = 1.0 / static_cast<double>(channels.size());
  for (auto& v : x.samples) v *= scale;
  if (info) *info = meta;
  return x;
}

std::vector<char> encode_wav(const std::vector<std::vector<double>>& channels, double sample_rate,
                             SampleFormat format) {
  if (channels.empty()) throw Error("cannot encode a WAV file without channels");
  const std::size_t frames = channels.front().size();
  for (const auto& ch : channels)
    if (ch.size() != frames) throw Error("WAV channels differ in length");

  const auto width = static_cast<std::uint32_t>(bytes_per_sample(format));
  const auto count = static_cast<std::uint16_t>(channels.size());
  const bool is_float = format == SampleFormat::float32 || format == SampleFormat::float64;
  const auto data_size = static_cast<std::uint32_t>(frames * count * width);

  std::vector<char> out;
  out.reserve(44 + data_size);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_size);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, count);
  put_u32(out, static_cast<std::uint32_t>(std::lround(sample_rate)));
  put_u32(out, static_cast<std::uint32_t>(std::lround(sample_rate)) * count * width);
  put_u16(out, static_cast<std::uint16_t>(count * width));
  put_u16(out, static_cast<std::uint16_t>(width * 8));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_size);
  for (std::size_t i = 0; i < frames; ++i)
    for (const auto& ch : channels) encode_sample(out, ch[i], format);
  return out;
}

void write_wav(const std::filesystem::path& path, const std::vector<std::vector<double>>& channels,
               double sample_rate, SampleFormat format) {
  const auto bytes = encode_wav(channels, sample_rate, format);
  atomic_write(path, std::string_view(bytes.data(), bytes.size()));
}

void write_wav(const std::filesystem::path& path, const AudioSignal& x, SampleFormat format) {
  write_wav(path, std::vector<std::vector<double>>{x.samples}, x.sample_rate, format);
}

}  // namespace morphsep
