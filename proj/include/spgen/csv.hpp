#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "spgen/drive.hpp"

namespace spgen {

/// Deterministic CSV body builder: fixed %.12g number formatting so identical
/// inputs emit identical bytes.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& headers);
  void add(double v);
  void add(std::string_view v);
  void end_row();
  const std::string& body() const { return body_; }

 private:
  std::string body_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

std::string format_cell(double v);

std::uint64_t fnv1a64(std::string_view bytes);

struct OutputRecord {
  std::string name;
  std::uint64_t bytes;
  std::string digest;
};

/// Write body to dir/name and return its manifest record.
OutputRecord write_output(const std::filesystem::path& dir, const std::string& name,
                          const std::string& body);

/// Emit manifest.json describing a finished run: command, resolved
/// parameters, tool version, timestamp, and output digests.
void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& parameters,
                    const std::vector<OutputRecord>& outputs);

/// Drive waveform export with explicit magnitude/phase and re/im columns.
std::string drive_to_csv(const DriveWaveform& d, bool gamma_units, double gamma);

/// Read a sampled waveform: two columns (t, value) or three (t, re, im),
/// comma-separated, '#' comments allowed.
WaveformSamples read_waveform_csv(const std::filesystem::path& path);

}  // namespace spgen
