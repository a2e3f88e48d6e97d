#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace fiaplab {

enum class ObservableKind : std::uint8_t {
  state = 0,
  arrival = 1,
  activation = 2,
  endogenous = 3,
  udraw = 4,
};

const char* observable_kind_name(ObservableKind kind);
ObservableKind observable_kind_from_name(const std::string& name);

// One recorded observable. Integer-valued kinds carry the value exactly in
// the double; `udraw` carries the activation uniform itself.
struct Record {
  std::int32_t run;
  std::int32_t step;
  std::int32_t replica;
  std::int32_t node;
  ObservableKind kind;
  double value;

  bool operator==(const Record&) const = default;
};

// A campaign archive: a manifest echoing the full configuration plus the
// flat list of recorded observables, ordered by run.
struct Archive {
  nlohmann::json manifest;
  std::vector<Record> records;

  // Values matching the filter (any negative filter field matches all),
  // in record order.
  std::vector<double> select(std::int32_t step, std::int32_t replica, std::int32_t node,
                             ObservableKind kind) const;
  std::vector<std::int64_t> select_int(std::int32_t step, std::int32_t replica,
                                       std::int32_t node, ObservableKind kind) const;
};

// Columnar CSV with header "run,step,replica,node,kind,value"; the value
// column is printed with %.17g so round-trips are exact.
void write_archive_csv(const Archive& archive, std::ostream& out);
std::string archive_csv_string(const Archive& archive);
Archive read_archive_csv(std::istream& in);

void write_archive_files(const Archive& archive, const std::string& directory);

}  // namespace fiaplab
