#include "spgen/csv.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "spgen/version.hpp"

namespace spgen {

std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& headers)
    : columns_(headers.size()) {
  for (std::size_t i = 0; i < headers.size(); ++i) {
    if (i) body_ += ',';
    body_ += headers[i];
  }
  body_ += '\n';
}

void CsvBuilder::add(double v) { add(std::string_view(format_cell(v))); }

void CsvBuilder::add(std::string_view v) {
  if (in_row_) body_ += ',';
  body_ += v;
  ++in_row_;
}

void CsvBuilder::end_row() {
  if (in_row_ != columns_)
    throw std::logic_error("CsvBuilder: row has " + std::to_string(in_row_) +
                           " cells, expected " + std::to_string(columns_));
  body_ += '\n';
  in_row_ = 0;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

OutputRecord write_output(const std::filesystem::path& dir, const std::string& name,
                          const std::string& body) {
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << body;
  out.close();
  char digest[24];
  std::snprintf(digest, sizeof digest, "%016llx",
                static_cast<unsigned long long>(fnv1a64(body)));
  return {name, body.size(), digest};
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& parameters,
                    const std::vector<OutputRecord>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : parameters) params[k] = v;
  j["parameters"] = params;
  j["tool_version"] = kVersion;
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  j["timestamp"] = stamp;
  nlohmann::ordered_json outs = nlohmann::ordered_json::array();
  for (const auto& o : outputs)
    outs.push_back({{"file", o.name}, {"bytes", o.bytes}, {"fnv1a64", o.digest}});
  j["outputs"] = outs;

  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest.json");
  out << j.dump(2) << '\n';
}

std::string drive_to_csv(const DriveWaveform& d, bool gamma_units, double gamma) {
  const std::string tu = gamma_units ? "[1/gamma]" : "[time]";
  const std::string ru = gamma_units ? "[gamma]" : "[rate]";
  CsvBuilder csv({"t" + tu, "omega_mag" + ru, "omega_phase[rad]", "re_omega" + ru,
                  "im_omega" + ru});
  const double ts = gamma_units ? gamma : 1.0;
  const double rs = gamma_units ? 1.0 / gamma : 1.0;
  const Eigen::ArrayXcd omega = d.omega();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    csv.add(d.grid[i] * ts);
    csv.add(d.omega_mag[i] * rs);
    csv.add(d.omega_phase[i]);
    csv.add(omega[i].real() * rs);
    csv.add(omega[i].imag() * rs);
    csv.end_row();
  }
  return csv.body();
}

WaveformSamples read_waveform_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open waveform file '" + path.string() + "'");
  std::vector<double> t, re, im;
  std::string line;
  int lineno = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r\n,") == std::string::npos) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        cells.push_back(v);
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (!header_skipped && t.empty()) { header_skipped = true; continue; }
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected numeric columns");
    }
    if (cells.size() != 2 && cells.size() != 3)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected 2 or 3 columns");
    t.push_back(cells[0]);
    re.push_back(cells[1]);
    im.push_back(cells.size() == 3 ? cells[2] : 0.0);
  }
  if (t.size() < 2) throw std::runtime_error(path.string() + ": no samples");
  WaveformSamples w;
  w.t = Eigen::Map<Eigen::ArrayXd>(t.data(), static_cast<Eigen::Index>(t.size()));
  w.value.resize(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i)
    w.value[static_cast<Eigen::Index>(i)] = {re[i], im[i]};
  return w;
}

}  // namespace spgen
