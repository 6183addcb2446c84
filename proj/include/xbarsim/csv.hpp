/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

#include "xbarsim/common.hpp"

namespace xbarsim {

/// Shortest round-trip decimal form; locale-free and reproducible.
inline std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Line-oriented CSV writer. Lines starting with '#' are informational
/// comments; the body is reproducible byte for byte given the same seed.
class CsvWriter {
public:
  explicit CsvWriter(const std::string &path) : out_(path) {
    if (!out_) {
      throw Error("csv: cannot open '" + path + "' for writing");
    }
  }

  void comment(const std::string &text) { out_ << "# " << text << "\n"; }

  void row(const std::vector<std::string> &cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) {
        out_ << ",";
      }
      out_ << cells[i];
    }
    out_ << "\n";
  }

private:
  std::ofstream out_;
};

} // namespace xbarsim
