// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "narrowcap/errors.hpp"
#include "narrowcap/io.hpp"

namespace narrowcap {

namespace {

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<size_t>(indent * (depth + 1)), ' ') : "";
  const std::string end_pad = indent > 0 ? std::string(static_cast<size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{" << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << "," << nl;
        first = false;
        os << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        write(os, it.value(), indent, depth + 1);
      }
      os << nl << end_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (flat || indent == 0) {
        os << "[";
        for (size_t k = 0; k < j.size(); ++k) {
          if (k) os << (indent > 0 ? ", " : ",");
          write(os, j[k], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[" << nl;
      for (size_t k = 0; k < j.size(); ++k) {
        if (k) os << "," << nl;
        os << pad;
        write(os, j[k], indent, depth + 1);
      }
      os << nl << end_pad << "]";
      return;
    }
    case Json::value_t::number_float:
      os << number(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  write(os, j, indent, 0);
  return os.str();
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  for (size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << "\n";
  for (const auto& r : rows) {
    for (size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << (std::isfinite(r[k]) ? number(r[k]) : "nan");
    out << "\n";
  }
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

Json report_to_json(const ScalingReport& r) {
  Json j;
  j["quantity"] = r.quantity;
  j["eps"] = r.eps;
  j["values"] = r.values;
  j["exponent"] = r.exponent;
  j["target_exponent"] = r.target_exponent;
  j["band"] = Json::array({r.band_lo, r.band_hi});
  j["r_squared"] = r.r_squared;
  for (const auto& [name, v] : r.series) j[name] = v;
  for (const auto& [name, v] : r.scalars) j[name] = v;
  j["inconclusive"] = r.inconclusive;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json regular_part_to_json(const RegularPartEstimate& r) {
  Json j;
  j["value"] = r.value;
  j["extrapolation_error"] = r.extrapolation_error;
  j["difference_exponent"] = r.difference_exponent;
  Json lad = Json::array();
  for (const auto& [d, v] : r.ladder) lad.push_back(Json::array({d, v}));
  j["ladder"] = lad;
  j["level1"] = r.level1;
  j["level2"] = r.level2;
  return j;
}

}  // namespace narrowcap
