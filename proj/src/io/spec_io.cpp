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
#include <fstream>
#include <sstream>

#include "narrowcap/errors.hpp"
#include "narrowcap/io.hpp"

namespace narrowcap {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw ConfigError("expected an object holding '" + std::string(key) + "'");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(std::string("missing key '") + key + "'");
  return *it;
}

std::string get_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

double get_number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

double get_number(const Json& j, const char* key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get_number(j, key);
}

int get_int(const Json& j, const char* key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

std::vector<double> get_numbers(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_array()) throw ConfigError(std::string("'") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(std::string("'") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

ConformalFactor phi_from_json(const Json& j) {
  const std::string kind = get_string(j, "kind");
  if (kind == "zero") return ConformalFactor::zero();
  if (kind == "cosine_bump") {
    std::vector<double> mode = {1.0, 0.0};
    if (j.contains("mode")) mode = get_numbers(j, "mode");
    if (mode.size() != 2 || mode[0] != std::floor(mode[0]) || mode[1] != std::floor(mode[1]))
      throw ConfigError("'mode' must be two integers");
    return ConformalFactor::cosine_bump(get_number(j, "amplitude"),
                                        static_cast<int>(mode[0]),
                                        static_cast<int>(mode[1]));
  }
  if (kind == "gaussian_bump") {
    const auto c = get_numbers(j, "center");
    if (c.size() != 2) throw ConfigError("'center' must have two entries");
    const double w = get_number(j, "width");
    if (!(w > 0.0)) throw ConfigError("'width' must be positive");
    return ConformalFactor::gaussian_bump({c[0], c[1]}, w, get_number(j, "amplitude"));
  }
  if (kind == "grid") {
    auto v = get_numbers(j, "values");
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    if (n < 4 || n * n != static_cast<int>(v.size()))
      throw ConfigError("'values' must hold n*n samples, n >= 4");
    return ConformalFactor::grid(n, std::move(v));
  }
  throw ConfigError("unknown phi kind '" + kind + "'");
}

Json phi_to_json(const ConformalFactor& phi) {
  Json j;
  switch (phi.kind()) {
    case ConformalFactor::Kind::Zero:
      j["kind"] = "zero";
      break;
    case ConformalFactor::Kind::CosineBump:
      j["kind"] = "cosine_bump";
      j["amplitude"] = phi.amplitude();
      j["mode"] = Json::array({phi.mode()[0], phi.mode()[1]});
      break;
    case ConformalFactor::Kind::GaussianBump:
      j["kind"] = "gaussian_bump";
      j["center"] = Json::array({phi.center()[0], phi.center()[1]});
      j["width"] = phi.width();
      j["amplitude"] = phi.amplitude();
      break;
    case ConformalFactor::Kind::Grid:
      j["kind"] = "grid";
      j["values"] = phi.grid_values();
      break;
  }
  return j;
}

SurfaceSpec surface_from_json(const Json& j) {
  const std::string fam = get_string(j, "family");
  SurfaceSpec s;
  if (fam == "round_sphere" || fam == "sphere") {
    s = SurfaceSpec::round_sphere(get_number(j, "radius", 1.0));
  } else if (fam == "flat_torus") {
    s = SurfaceSpec::flat_torus(get_number(j, "L1", 1.0), get_number(j, "L2", 1.0));
  } else if (fam == "conformal_torus") {
    const ConformalFactor phi = j.contains("phi") ? phi_from_json(j.at("phi"))
                                                  : ConformalFactor::zero();
    s = SurfaceSpec::conformal_torus(get_number(j, "L1", 1.0), get_number(j, "L2", 1.0),
                                     phi, get_int(j, "grid", 256));
    if (j.contains("rho")) s.rho_override = get_number(j, "rho");
  } else if (fam == "unit_disk" || fam == "disk") {
    s = SurfaceSpec::unit_disk();
  } else {
    throw ConfigError("unknown surface family '" + fam + "'");
  }
  s.validate();
  return s;
}

Json surface_to_json(const SurfaceSpec& s) {
  Json j;
  j["family"] = family_name(s.family);
  switch (s.family) {
    case Family::RoundSphere:
      j["radius"] = s.sphere_radius;
      break;
    case Family::ConformalTorus:
      j["L1"] = s.L1;
      j["L2"] = s.L2;
      j["phi"] = phi_to_json(s.phi);
      j["grid"] = s.grid_n;
      if (s.rho_override) j["rho"] = *s.rho_override;
      break;
    case Family::FlatTorus:
      j["L1"] = s.L1;
      j["L2"] = s.L2;
      break;
    case Family::FlatUnitDisk:
      break;
  }
  return j;
}

SurfacePoint point_from_json(const Surface& s, const Json& j) {
  if (s.family() == Family::RoundSphere && j.is_object())
    return s.point(get_number(j, "polar"), get_number(j, "azimuth"));
  if (!j.is_array()) throw ConfigError("a point must be an array of numbers");
  std::vector<double> v;
  for (const auto& e : j) {
    if (!e.is_number()) throw ConfigError("a point must be an array of numbers");
    v.push_back(e.get<double>());
  }
  try {
    if (s.family() == Family::RoundSphere) {
      if (v.size() != 3) throw ConfigError("sphere points need three coordinates");
      return s.point(Eigen::Vector3d(v[0], v[1], v[2]));
    }
    if (v.size() != 2) throw ConfigError("points need two coordinates");
    return s.point(v[0], v[1]);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid point: ") + e.what());
  }
}

Json point_to_json(const SurfacePoint& p) {
  if (p.family == Family::RoundSphere)
    return Json::array({p.coords[0], p.coords[1], p.coords[2]});
  return Json::array({p.coords[0], p.coords[1]});
}

TrapSpec trap_from_json(const Surface& s, const Json& j) {
  TrapSpec t{point_from_json(s, require(j, "center")), get_number(j, "eps")};
  try {
    validate_trap(s, t);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid trap: ") + e.what());
  }
  return t;
}

MCConfig mc_from_json(const Surface& s, const Json& j, MCConfig c) {
  if (!j.is_object()) throw ConfigError("'mc' must be an object");
  c.n_paths = get_int(j, "n_paths", c.n_paths);
  c.base_dt = get_number(j, "base_dt", c.base_dt);
  c.dt_floor = get_number(j, "dt_floor", c.dt_floor);
  c.max_time = get_number(j, "max_time", c.max_time);
  c.step_variance_factor = get_number(j, "step_variance_factor", c.step_variance_factor);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("start")) {
    const Json& st = j.at("start");
    if (st.is_string()) {
      if (st.get<std::string>() != "uniform") throw ConfigError("'start' must be \"uniform\" or a point");
      c.start.reset();
    } else {
      c.start = point_from_json(s, st);
    }
  }
  c.validate();
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace narrowcap
