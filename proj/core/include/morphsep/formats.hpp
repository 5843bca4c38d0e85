#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "morphsep/kam.hpp"
#include "morphsep/metrics.hpp"
#include "morphsep/vad.hpp"

namespace morphsep {

/// Write to a sibling temporary file, then rename over `path`.
void atomic_write(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

// Kernel files: one JSON object per line,
//   {"label":"voice","h":3,"w":5,"threshold":0.54,"kind":"binary","values":[...]}
// with h * w values in row-major order (rows are frequency offsets).
std::string kernel_to_json(const Kernel& k);
Kernel kernel_from_json(std::string_view line);
void write_kernel_file(const std::filesystem::path& path, const std::vector<Kernel>& kernels);
std::vector<Kernel> read_kernel_file(const std::filesystem::path& path);

// Detection CSV: header "center_time_s,energy,vtmr,decision", one row per frame.
std::string detection_to_csv(const DetectionLattice& lattice);
DetectionLattice detection_from_csv(std::string_view text);

/// Voice-active span in seconds, [start, end).
struct Segment {
  double start = 0.0;
  double end = 0.0;
};

/// "start<TAB>end" per line; blank lines and lines starting with '#' are
/// skipped.
std::string segments_to_text(const std::vector<Segment>& segments);
std::vector<Segment> segments_from_text(std::string_view text);
/// True for frames whose center time falls inside a segment.
std::vector<bool> truth_from_segments(const DetectionLattice& lattice,
                                      const std::vector<Segment>& segments);

struct ScoreRecord {
  std::string estimate;
  std::string reference;
  SeparationScore score;
};

std::string scores_to_json(const std::vector<ScoreRecord>& records);
std::vector<ScoreRecord> scores_from_json(std::string_view text);
std::string detection_score_to_json(const DetectionScore& score, std::size_t frames);
DetectionScore detection_score_from_json(std::string_view text);
/// Column-aligned plain text rendering of separation scores.
std::string format_score_table(const std::vector<ScoreRecord>& records);

struct ManifestEntry {
  std::filesystem::path mixture;
  std::vector<std::filesystem::path> references;
  std::optional<std::filesystem::path> segments;
};

/// Tab-separated lines: mixture path, then optional "ref=<path>" and
/// "segments=<path>" fields. Relative paths resolve against the manifest's
/// directory; every referenced file must exist.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

}  // namespace morphsep
