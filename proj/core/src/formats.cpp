#include "morphsep/formats.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace morphsep {

using nlohmann::json;

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

double parse_double(std::string_view s, const char* what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error(std::string("malformed ") + what + " value '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = line.find(sep, pos);
    out.push_back(line.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

// Shortest representation that reads back to the same double.
std::string exact(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

json score_json(const SeparationScore& s) {
  return {{"rqf_db", s.rqf_db}, {"sdr_db", s.sdr_db}, {"sir_db", s.sir_db}, {"sar_db", s.sar_db}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

void atomic_write(const std::filesystem::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string kernel_to_json(const Kernel& k) {
  k.validate();
  json j;
  j["label"] = std::string(to_string(k.label));
  j["h"] = k.h();
  j["w"] = k.w();
  j["threshold"] = k.threshold ? json(*k.threshold) : json(nullptr);
  j["kind"] = k.binary ? "binary" : "real";
  json values = json::array();
  for (Eigen::Index r = 0; r < k.h(); ++r)
    for (Eigen::Index c = 0; c < k.w(); ++c)
      values.push_back(k.binary ? json(static_cast<int>(k.values(r, c))) : json(k.values(r, c)));
  j["values"] = std::move(values);
  return j.dump();
}

Kernel kernel_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed kernel record: ") + e.what());
  }
  try {
    Kernel k;
    k.label = role_from_string(j.at("label").get<std::string>());
    const auto h = j.at("h").get<Eigen::Index>();
    const auto w = j.at("w").get<Eigen::Index>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "binary" && kind != "real") throw Error("kernel kind must be 'binary' or 'real'");
    k.binary = kind == "binary";
    if (j.contains("threshold") && !j["threshold"].is_null()) k.threshold = j["threshold"].get<double>();
    const auto& values = j.at("values");
    if (h <= 0 || w <= 0 || static_cast<Eigen::Index>(values.size()) != h * w)
      throw Error("kernel value count does not equal h * w");
    k.values.resize(h, w);
    for (Eigen::Index r = 0; r < h; ++r)
      for (Eigen::Index c = 0; c < w; ++c) k.values(r, c) = values[static_cast<std::size_t>(r * w + c)].get<double>();
    k.validate();
    return k;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed kernel record: ") + e.what());
  }
}

void write_kernel_file(const std::filesystem::path& path, const std::vector<Kernel>& kernels) {
  std::string text;
  for (const auto& k : kernels) text += kernel_to_json(k) + "\n";
  atomic_write(path, text);
}

std::vector<Kernel> read_kernel_file(const std::filesystem::path& path) {
  std::vector<Kernel> out;
  const std::string text = read_text(path);
  for (auto line : split_lines(text))
    if (!skippable(line)) out.push_back(kernel_from_json(line));
  if (out.empty()) throw Error(path.string() + ": no kernels found");
  return out;
}

std::string detection_to_csv(const DetectionLattice& lattice) {
  std::string out = "center_time_s,energy,vtmr,decision\n";
  for (const auto& f : lattice.frames)
    out += exact(f.center_time) + "," + exact(f.energy) + "," + exact(f.vtmr) + "," +
           (f.decision ? "1" : "0") + "\n";
  return out;
}

DetectionLattice detection_from_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines.front()) != "center_time_s,energy,vtmr,decision")
    throw Error("detection CSV is missing its header");
  DetectionLattice lattice;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (skippable(lines[i])) continue;
    const auto fields = split(lines[i], ',');
    if (fields.size() != 4) throw Error("detection CSV row " + std::to_string(i) + " needs 4 fields");
    DetectionFrame f;
    f.center_time = parse_double(fields[0], "center_time_s");
    f.energy = parse_double(fields[1], "energy");
    f.vtmr = parse_double(fields[2], "vtmr");
    const auto d = trim(fields[3]);
    if (d != "0" && d != "1") throw Error("detection decision must be 0 or 1");
    f.decision = d == "1";
    lattice.frames.push_back(f);
  }
  return lattice;
}

std::string segments_to_text(const std::vector<Segment>& segments) {
  std::string out;
  for (const auto& s : segments) out += exact(s.start) + "\t" + exact(s.end) + "\n";
  return out;
}

std::vector<Segment> segments_from_text(std::string_view text) {
  std::vector<Segment> out;
  for (auto line : split_lines(text)) {
    if (skippable(line)) continue;
    line = trim(line);
    auto fields = split(line, '\t');
    if (fields.size() != 2) {
      // tolerate space-separated annotations
      const auto sp = line.find_first_of(' ');
      if (sp == std::string_view::npos) throw Error("segment line needs start and end times");
      fields = {line.substr(0, sp), line.substr(sp + 1)};
    }
    Segment s{parse_double(fields[0], "segment start"), parse_double(fields[1], "segment end")};
    if (s.end < s.start) throw Error("segment ends before it starts");
    out.push_back(s);
  }
  return out;
}

std::vector<bool> truth_from_segments(const DetectionLattice& lattice,
                                      const std::vector<Segment>& segments) {
  std::vector<bool> truth(lattice.size(), false);
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const double t = lattice.frames[i].center_time;
    for (const auto& s : segments)
      if (t >= s.start && t < s.end) {
        truth[i] = true;
        break;
      }
  }
  return truth;
}

std::string scores_to_json(const std::vector<ScoreRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) {
    json j = score_json(r.score);
    j["estimate"] = r.estimate;
    j["reference"] = r.reference;
    arr.push_back(std::move(j));
  }
  return json{{"sentinel_db", kSentinelDb}, {"sources", std::move(arr)}}.dump(2) + "\n";
}

std::vector<ScoreRecord> scores_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    std::vector<ScoreRecord> out;
    for (const auto& s : j.at("sources")) {
      ScoreRecord r;
      r.estimate = s.at("estimate").get<std::string>();
      r.reference = s.at("reference").get<std::string>();
      r.score = {s.at("rqf_db").get<double>(), s.at("sdr_db").get<double>(),
                 s.at("sir_db").get<double>(), s.at("sar_db").get<double>()};
      out.push_back(std::move(r));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed score JSON: ") + e.what());
  }
}

std::string detection_score_to_json(const DetectionScore& s, std::size_t frames) {
  json j{{"frames", frames},
         {"av_rec", s.av_rec},
         {"av_prec", s.av_prec},
         {"f_meas", s.f_meas},
         {"voice", {{"recall", optional_json(s.voice.recall)}, {"precision", optional_json(s.voice.precision)}}},
         {"music", {{"recall", optional_json(s.music.recall)}, {"precision", optional_json(s.music.precision)}}},
         {"note", "null per-class values are undefined and excluded from the averages"}};
  return j.dump(2) + "\n";
}

DetectionScore detection_score_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    DetectionScore s;
    s.av_rec = j.at("av_rec").get<double>();
    s.av_prec = j.at("av_prec").get<double>();
    s.f_meas = j.at("f_meas").get<double>();
    s.voice = {optional_from(j.at("voice").at("recall")), optional_from(j.at("voice").at("precision"))};
    s.music = {optional_from(j.at("music").at("recall")), optional_from(j.at("music").at("precision"))};
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed detection score JSON: ") + e.what());
  }
}

std::string format_score_table(const std::vector<ScoreRecord>& records) {
  std::size_t width = std::string_view("estimate").size();
  for (const auto& r : records) width = std::max(width, r.estimate.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "estimate" << std::right;
  for (const char* h : {"RQF", "SDR", "SIR", "SAR"}) out << std::setw(10) << h;
  out << "\n" << std::fixed << std::setprecision(2);
  for (const auto& r : records) {
    out << std::left << std::setw(static_cast<int>(width)) << r.estimate << std::right;
    for (double v : {r.score.rqf_db, r.score.sdr_db, r.score.sir_db, r.score.sar_db}) out << std::setw(10) << v;
    out << "\n";
  }
  return out.str();
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  const auto base = path.parent_path();
  auto resolve = [&](std::string_view p) {
    std::filesystem::path fp{std::string(trim(p))};
    if (fp.is_relative()) fp = base / fp;
    if (!std::filesystem::exists(fp)) throw Error("manifest entry refers to missing file " + fp.string());
    return fp;
  };

  std::vector<ManifestEntry> out;
  for (auto line : split_lines(text)) {
    if (skippable(line)) continue;
    const auto fields = split(trim(line), '\t');
    ManifestEntry e;
    e.mixture = resolve(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto f = trim(fields[i]);
      if (f.empty()) continue;
      if (f.starts_with("ref=")) e.references.push_back(resolve(f.substr(4)));
      else if (f.starts_with("segments=")) e.segments = resolve(f.substr(9));
      else throw Error("unknown manifest field '" + std::string(f) + "'");
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace morphsep
