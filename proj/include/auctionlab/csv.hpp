#pragma once

// CSV emission at full double precision, for plotting and golden-file
// regression of experiment outputs.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace auctionlab {

inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
  }

  using Cell = std::variant<double, long long, std::string>;

  void row(std::initializer_list<Cell> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) out_ << ',';
      first = false;
      if (std::holds_alternative<double>(c)) out_ << format_full(std::get<double>(c));
      else if (std::holds_alternative<long long>(c)) out_ << std::get<long long>(c);
      else out_ << std::get<std::string>(c);
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

}  // namespace auctionlab
