#pragma once

#include <ostream>
#include <sstream>
#include <string>

#include "qsm/io/table.hpp"
#include "qsm/version.hpp"

namespace qsm::io {

namespace detail {

inline std::string scalar_text(const nlohmann::ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return format_number(v.get<double>());
  return v.dump();
}

}  // namespace detail

/// `#`-prefixed metadata, one header row, then one line per row.
inline void write_csv(std::ostream& os, const Table& t) {
  os << "# qsm " << QSM_VERSION << '\n';
  os << "# command: " << t.command << '\n';
  for (const auto& [key, value] : t.config.items()) os << "# config." << key << ": " << detail::scalar_text(value) << '\n';
  for (const auto& [key, value] : t.notes) os << "# " << key << ": " << value << '\n';
  if (!t.singularities.empty()) os << "# singularities: " << format_list(t.singularities) << '\n';
  if (!t.excised.empty()) os << "# excised: " << format_intervals(t.excised) << '\n';

  for (std::size_t c = 0; c < t.names.size(); ++c) os << (c ? "," : "") << t.names[c];
  os << '\n';
  for (std::size_t r = 0; r < t.rows(); ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << format_number(t.columns[c][r]);
    os << '\n';
  }
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace qsm::io
