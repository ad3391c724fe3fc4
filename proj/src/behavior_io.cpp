#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "bellrand/behaviors.hpp"

namespace bellrand::bell {

namespace {

// Shortest form that round-trips; never more than 17 significant digits.
std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("format_double: conversion failed");
  return std::string(buf, ptr);
}

}  // namespace

void write_behavior(std::ostream& os, const Behavior& b) {
  const Scenario& s = b.scenario();
  os << "scenario " << s.parties() << ' ' << s.inputs() << ' ' << s.outputs() << '\n';
  for (std::size_t x = 0; x < s.setting_count(); ++x) {
    const auto xs = s.settings_of(x);
    for (std::size_t a = 0; a < s.outcome_count(); ++a) {
      for (int v : xs) os << v << ' ';
      for (int v : s.outcomes_of(a)) os << v << ' ';
      os << format_double(b(x, a)) << '\n';
    }
  }
}

Behavior read_behavior(std::istream& is) {
  std::string line;
  auto next_line = [&]() {
    while (std::getline(is, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') return true;
    }
    return false;
  };
  if (!next_line()) throw IoError("read_behavior: missing header");
  std::istringstream header(line);
  std::string tag;
  int n = 0, m = 0, d = 0;
  if (!(header >> tag >> n >> m >> d) || tag != "scenario")
    throw IoError("read_behavior: expected 'scenario n m d'");
  const Scenario s(n, m, d);
  Eigen::VectorXd table(static_cast<Eigen::Index>(s.cells()));
  std::vector<bool> seen(s.cells(), false);
  std::vector<int> x(static_cast<std::size_t>(n)), a(static_cast<std::size_t>(n));
  std::size_t rows = 0;
  while (next_line()) {
    std::istringstream row(line);
    for (auto& v : x)
      if (!(row >> v)) throw IoError("read_behavior: malformed row: " + line);
    for (auto& v : a)
      if (!(row >> v)) throw IoError("read_behavior: malformed row: " + line);
    std::string ptext;
    if (!(row >> ptext)) throw IoError("read_behavior: missing probability: " + line);
    double p = 0.0;
    const auto res = std::from_chars(ptext.data(), ptext.data() + ptext.size(), p);
    if (res.ec != std::errc() || res.ptr != ptext.data() + ptext.size())
      throw IoError("read_behavior: bad probability: " + ptext);
    std::size_t cell = 0;
    try {
      cell = s.setting_index(x) * s.outcome_count() + s.outcome_index(a);
    } catch (const Error&) {
      throw IoError("read_behavior: index out of range: " + line);
    }
    if (seen[cell]) throw IoError("read_behavior: duplicate cell: " + line);
    seen[cell] = true;
    table(static_cast<Eigen::Index>(cell)) = p;
    ++rows;
  }
  if (rows != s.cells()) throw IoError("read_behavior: table incomplete");
  return Behavior(s, std::move(table));
}

}  // namespace bellrand::bell
