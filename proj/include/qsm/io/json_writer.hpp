#pragma once

#include <cmath>
#include <ostream>

#include "qsm/io/table.hpp"
#include "qsm/version.hpp"

namespace qsm::io {

/// Schema:
///   { "command": str, "config": {flag: value},
///     "columns": {name: [number | null]},
///     "metadata": { "version": str, "excised": [[lo, hi]], "singularities": [t],
///                   "notes": {key: str} } }
/// Non-finite values become null.
inline nlohmann::ordered_json to_json(const Table& t) {
  using nlohmann::ordered_json;
  auto number = [](double v) -> ordered_json { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };

  ordered_json j;
  j["command"] = t.command;
  j["config"] = t.config;
  ordered_json columns = ordered_json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    ordered_json values = ordered_json::array();
    for (double v : t.columns[c]) values.push_back(number(v));
    columns[t.names[c]] = std::move(values);
  }
  j["columns"] = std::move(columns);

  ordered_json meta;
  meta["version"] = QSM_VERSION;
  meta["excised"] = ordered_json::array();
  for (const auto& x : t.excised) meta["excised"].push_back({x.lo, x.hi});
  meta["singularities"] = ordered_json::array();
  for (double s : t.singularities) meta["singularities"].push_back(number(s));
  meta["notes"] = ordered_json::object();
  for (const auto& [key, value] : t.notes) meta["notes"][key] = value;
  j["metadata"] = std::move(meta);
  return j;
}

inline void write_json(std::ostream& os, const Table& t) {
  // Doubles round-trip at 17 digits; round to the CSV precision first so
  // both formats carry the same numbers.
  auto j = to_json(t);
  for (auto& [name, values] : j["columns"].items())
    for (auto& v : values)
      if (v.is_number_float()) v = std::stod(format_number(v.get<double>()));
  os << j.dump(2) << '\n';
}

}  // namespace qsm::io
