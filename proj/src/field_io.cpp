#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "polyext/radial_field.hpp"
#include "polyext/specfun.hpp"

namespace polyext {

namespace {

constexpr const char* kMagic = "# polyext-field";
constexpr const char* kVersion = "v1";

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError("bad number '" + s + "'", line);
  return v;
}

int parse_int(const std::string& s, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'", line);
  return v;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

ParseError::ParseError(const std::string& what, int line)
    : std::runtime_error("field file line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw DomainError("format_double: conversion failed");
  return std::string(buf, ptr);
}

void dump_field(const FieldData& d, const std::string& path) {
  if (d.values.size() != d.x.size() * d.y.size()) throw DomainError("dump_field: value count mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dump_field: cannot open " + path);
  const bool spectral = d.kind == FieldKind::spectral;
  out << kMagic << ' ' << kVersion << " kind=" << (spectral ? "spectral" : "physical") << " n=" << d.n
      << " alpha=" << format_double(d.alpha) << " b=" << format_double(d.b) << '\n';
  out << (spectral ? "rho,y,value" : "r,y,value") << '\n';
  for (std::size_t i = 0; i < d.x.size(); ++i)
    for (std::size_t j = 0; j < d.y.size(); ++j)
      out << format_double(d.x[i]) << ',' << format_double(d.y[j]) << ',' << format_double(d.values[i * d.y.size() + j])
          << '\n';
  out << "# end rows=" << d.values.size() << '\n';
  if (!out) throw std::runtime_error("dump_field: write failed for " + path);
}

void dump_field(const ExtensionField& field, double b, const std::string& path) {
  FieldData d;
  d.kind = FieldKind::spectral;
  d.n = field.n();
  d.alpha = field.alpha();
  d.b = b;
  d.x = field.grid().nodes;
  d.y = field.y();
  d.values = field.values();
  dump_field(d, path);
}

void dump_field(const PhysicalField& field, double alpha, double b, const std::string& path) {
  FieldData d;
  d.kind = FieldKind::physical;
  d.n = field.n();
  d.alpha = alpha;
  d.b = b;
  d.x = field.r();
  d.y = field.y();
  d.values = field.values();
  dump_field(d, path);
}

FieldData load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_field: cannot open " + path);
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) throw ParseError("empty file", lineno);
  line = strip_cr(line);

  FieldData d;
  {
    std::istringstream hs(line);
    std::string hash, magic, version;
    hs >> hash >> magic >> version;
    if (hash + " " + magic != kMagic) throw ParseError("missing polyext-field header", lineno);
    if (version != kVersion) throw ParseError("unsupported version '" + version + "'", lineno);
    std::map<std::string, std::string> kv;
    std::string tok;
    while (hs >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError("malformed header token '" + tok + "'", lineno);
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    for (const char* key : {"kind", "n", "alpha", "b"})
      if (!kv.count(key)) throw ParseError(std::string("header lacks '") + key + "'", lineno);
    if (kv["kind"] == "spectral") {
      d.kind = FieldKind::spectral;
    } else if (kv["kind"] == "physical") {
      d.kind = FieldKind::physical;
    } else {
      throw ParseError("unknown kind '" + kv["kind"] + "'", lineno);
    }
    d.n = parse_int(kv["n"], lineno);
    d.alpha = parse_double(kv["alpha"], lineno);
    d.b = parse_double(kv["b"], lineno);
  }

  ++lineno;
  if (!std::getline(in, line)) throw ParseError("missing column line", lineno);
  line = strip_cr(line);
  const std::string expected_cols = d.kind == FieldKind::spectral ? "rho,y,value" : "r,y,value";
  if (line != expected_cols) throw ParseError("expected columns '" + expected_cols + "'", lineno);

  std::vector<double> xs, ys;
  bool ended = false;
  std::size_t declared = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (ended) throw ParseError("data after end marker", lineno);
    if (line.rfind("# end rows=", 0) == 0) {
      declared = static_cast<std::size_t>(parse_int(line.substr(11), lineno));
      ended = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw ParseError("expected three columns", lineno);
    xs.push_back(parse_double(line.substr(0, c1), lineno));
    ys.push_back(parse_double(line.substr(c1 + 1, c2 - c1 - 1), lineno));
    d.values.push_back(parse_double(line.substr(c2 + 1), lineno));
  }
  if (!ended) throw ParseError("truncated file (no end marker)", lineno);
  if (declared != d.values.size()) throw ParseError("row count does not match end marker", lineno);
  if (d.values.empty()) return d;

  // Recover the lattice: the first x block fixes the y axis.
  std::size_t ny = 0;
  while (ny < xs.size() && xs[ny] == xs[0]) ++ny;
  if (xs.size() % ny != 0) throw ParseError("rows do not form a lattice", lineno);
  d.y.assign(ys.begin(), ys.begin() + static_cast<long>(ny));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (ys[k] != d.y[k % ny] || xs[k] != xs[k - k % ny]) throw ParseError("rows do not form a lattice", 3 + static_cast<int>(k));
    if (k % ny == 0) d.x.push_back(xs[k]);
  }
  return d;
}

}  // namespace polyext
