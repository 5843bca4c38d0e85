#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace morphsep {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Raised for malformed inputs, inconsistent dimensions and unreadable files.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mono sample sequence. Samples are full-scale normalized ([-1, 1]) when
/// they come from load_wav.
struct AudioSignal {
  std::vector<double> samples;
  double sample_rate = 0.0;

  AudioSignal() = default;
  AudioSignal(std::vector<double> s, double rate)
      : samples(std::move(s)), sample_rate(rate) {}

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

enum class SourceRole { voice, harmonic, percussive, accompaniment, other };

std::string_view to_string(SourceRole role);
SourceRole role_from_string(std::string_view name);

double energy(const AudioSignal& x);
double energy(const std::vector<double>& x);

// Element-wise helpers used across the separators.
AudioSignal operator+(const AudioSignal& a, const AudioSignal& b);
AudioSignal scaled(const AudioSignal& x, double gain);

}  // namespace morphsep
