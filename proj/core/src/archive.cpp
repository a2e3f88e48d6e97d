#include "fiaplab/archive.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fiaplab {

const char* observable_kind_name(ObservableKind kind) {
  switch (kind) {
    case ObservableKind::state:
      return "state";
    case ObservableKind::arrival:
      return "arrival";
    case ObservableKind::activation:
      return "activation";
    case ObservableKind::endogenous:
      return "endogenous";
    case ObservableKind::udraw:
      return "udraw";
  }
  return "?";
}

ObservableKind observable_kind_from_name(const std::string& name) {
  for (auto kind : {ObservableKind::state, ObservableKind::arrival, ObservableKind::activation,
                    ObservableKind::endogenous, ObservableKind::udraw}) {
    if (name == observable_kind_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown observable kind: " + name);
}

std::vector<double> Archive::select(std::int32_t step, std::int32_t replica,
                                    std::int32_t node, ObservableKind kind) const {
  std::vector<double> values;
  for (const auto& r : records) {
    if (step >= 0 && r.step != step) continue;
    if (replica >= 0 && r.replica != replica) continue;
    if (node >= 0 && r.node != node) continue;
    if (r.kind != kind) continue;
    values.push_back(r.value);
  }
  return values;
}

std::vector<std::int64_t> Archive::select_int(std::int32_t step, std::int32_t replica,
                                              std::int32_t node, ObservableKind kind) const {
  std::vector<std::int64_t> values;
  for (const auto& r : records) {
    if (step >= 0 && r.step != step) continue;
    if (replica >= 0 && r.replica != replica) continue;
    if (node >= 0 && r.node != node) continue;
    if (r.kind != kind) continue;
    values.push_back(static_cast<std::int64_t>(r.value));
  }
  return values;
}

void write_archive_csv(const Archive& archive, std::ostream& out) {
  out << "run,step,replica,node,kind,value\n";
  char buf[64];
  for (const auto& r : archive.records) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.value);
    out << r.run << ',' << r.step << ',' << r.replica << ',' << r.node << ','
        << observable_kind_name(r.kind) << ',' << buf << '\n';
  }
}

std::string archive_csv_string(const Archive& archive) {
  std::ostringstream out;
  write_archive_csv(archive, out);
  return out.str();
}

Archive read_archive_csv(std::istream& in) {
  Archive archive;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("archive csv: empty input");
  if (line != "run,step,replica,node,kind,value") {
    throw std::runtime_error("archive csv: unexpected header: " + line);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    Record r{};
    try {
      std::getline(row, field, ',');
      r.run = std::stoi(field);
      std::getline(row, field, ',');
      r.step = std::stoi(field);
      std::getline(row, field, ',');
      r.replica = std::stoi(field);
      std::getline(row, field, ',');
      r.node = std::stoi(field);
      std::getline(row, field, ',');
      r.kind = observable_kind_from_name(field);
      std::getline(row, field, ',');
      r.value = std::stod(field);
    } catch (const std::exception& e) {
      throw std::runtime_error("archive csv: bad row at line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    archive.records.push_back(r);
  }
  return archive;
}

void write_archive_files(const Archive& archive, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) {
    throw std::runtime_error("archive: cannot create output directory " + directory + ": " +
                             ec.message());
  }
  {
    std::ofstream csv(fs::path(directory) / "archive.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("archive: cannot open archive.csv for writing");
    write_archive_csv(archive, csv);
    if (!csv.good()) throw std::runtime_error("archive: failed writing archive.csv");
  }
  {
    std::ofstream manifest(fs::path(directory) / "manifest.json", std::ios::binary);
    if (!manifest) throw std::runtime_error("archive: cannot open manifest.json for writing");
    manifest << archive.manifest.dump(2) << '\n';
    if (!manifest.good()) throw std::runtime_error("archive: failed writing manifest.json");
  }
}

}  // namespace fiaplab
