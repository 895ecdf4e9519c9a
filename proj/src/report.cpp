#include "polyext/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "polyext/radial_field.hpp"

namespace polyext {

using nlohmann::json;

namespace {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_num(const json& v) { return v.is_null() ? std::nan("") : v.get<double>(); }

Compare parse_compare(const std::string& s) {
  for (Compare c : {Compare::absolute, Compare::relative, Compare::at_most, Compare::at_least})
    if (compare_name(c) == s) return c;
  throw std::runtime_error("unknown comparison " + s);
}

std::string cell(double v) { return std::isnan(v) ? "-" : format_double(v); }

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "text") return ReportFormat::text;
  throw std::invalid_argument("unknown format " + name + " (json, text)");
}

json to_json(const CheckValue& c) {
  json params = json::object();
  json order = json::array();
  for (const auto& [k, v] : c.params) {
    params[k] = v;
    order.push_back(k);
  }
  json j{{"name", c.name},
         {"params", params},
         {"param_order", order},
         {"measured", num(c.measured)},
         {"expected", c.expected ? num(*c.expected) : json(nullptr)},
         {"abs_err", num(c.abs_err())},
         {"rel_err", num(c.rel_err())},
         {"tol", c.tol},
         {"compare", compare_name(c.compare)},
         {"pass", c.pass}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json to_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  json groups = json::object();
  for (const auto& [g, t] : r.group_seconds) groups[g] = t;
  return {{"version", r.version},
          {"config", r.config},
          {"checks", checks},
          {"summary", {{"total", r.total()}, {"passed", r.passed()}, {"failed", r.failed()}}},
          {"timing", {{"generated_at", r.generated_at}, {"group_seconds", groups}}}};
}

VerificationReport report_from_json(const json& doc) {
  try {
    VerificationReport r;
    r.version = doc.at("version").get<std::string>();
    r.config = doc.at("config");
    for (const auto& j : doc.at("checks")) {
      CheckValue c;
      c.name = j.at("name").get<std::string>();
      const auto& p = j.at("params");
      if (j.contains("param_order")) {
        for (const auto& k : j["param_order"]) c.params.emplace_back(k.get<std::string>(), p.at(k.get<std::string>()));
      } else {
        for (const auto& [k, v] : p.items()) c.params.emplace_back(k, v.get<std::string>());
      }
      c.measured = from_num(j.at("measured"));
      if (!j.at("expected").is_null()) c.expected = j["expected"].get<double>();
      c.tol = j.at("tol").get<double>();
      c.compare = parse_compare(j.at("compare").get<std::string>());
      c.pass = j.at("pass").get<bool>();
      if (j.contains("note")) c.note = j["note"].get<std::string>();
      r.checks.push_back(std::move(c));
    }
    if (doc.contains("timing")) {
      const auto& t = doc["timing"];
      r.generated_at = t.value("generated_at", "");
      if (t.contains("group_seconds"))
        for (const auto& [g, s] : t["group_seconds"].items()) r.group_seconds.emplace_back(g, s.get<double>());
    }
    return r;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed report: ") + e.what());
  }
}

std::string format_text(const VerificationReport& r) {
  struct Row {
    std::string status, name, params, measured, expected, tol, note;
  };
  std::vector<Row> rows;
  rows.push_back({"", "check", "params", "measured", "expected", "tol", ""});
  for (const auto& c : r.checks) {
    std::string params;
    for (const auto& [k, v] : c.params) params += (params.empty() ? "" : " ") + k + "=" + v;
    rows.push_back({c.pass ? "ok" : "FAIL", c.name, params, cell(c.measured), c.expected ? cell(*c.expected) : "-",
                    compare_name(c.compare) + " " + format_double(c.tol), c.note});
  }
  std::size_t w[6] = {4, 0, 0, 0, 0, 0};
  for (const auto& row : rows) {
    w[1] = std::max(w[1], row.name.size());
    w[2] = std::max(w[2], row.params.size());
    w[3] = std::max(w[3], row.measured.size());
    w[4] = std::max(w[4], row.expected.size());
    w[5] = std::max(w[5], row.tol.size());
  }
  std::ostringstream os;
  auto pad = [&](const std::string& s, std::size_t n) { os << s << std::string(n - s.size() + 2, ' '); };
  for (const auto& row : rows) {
    pad(row.status, w[0]);
    pad(row.name, w[1]);
    pad(row.params, w[2]);
    pad(row.measured, w[3]);
    pad(row.expected, w[4]);
    os << row.tol;
    if (!row.note.empty()) os << "  # " << row.note;
    os << '\n';
  }
  os << "polyext " << r.version << ": " << r.passed() << "/" << r.total() << " checks passed";
  if (r.failed()) os << ", " << r.failed() << " FAILED";
  os << '\n';
  return os.str();
}

void write_report(const VerificationReport& r, ReportFormat f, std::ostream& out) {
  if (f == ReportFormat::json)
    out << to_json(r).dump(2) << '\n';
  else
    out << format_text(r);
}

void write_report(const VerificationReport& r, ReportFormat f, const std::string& path) {
  if (path.empty() || path == "-") {
    write_report(r, f, std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_report(r, f, out);
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace polyext
