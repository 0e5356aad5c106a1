#pragma once

// File formats: domain specification JSON, bound report JSON with a
// provenance block, and CSV emitters for fields, level profiles, and
// spectrum tables. Writers are deterministic: fixed field order, shortest
// round-trip float formatting, no timestamps.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "magbound/bound.hpp"
#include "magbound/disk_spectrum.hpp"
#include "magbound/fem.hpp"
#include "magbound/geometry.hpp"
#include "magbound/level_set.hpp"

namespace magbound {

inline constexpr const char* kVersion = "0.1.0";

inline DomainSpec domain_from_json(const nlohmann::json& j) {
  try {
    std::string kind = j.at("kind").get<std::string>();
    Vec2 center{0, 0};
    if (j.contains("center")) {
      center.x = j.at("center").at(0).get<double>();
      center.y = j.at("center").at(1).get<double>();
    }
    if (kind == "disk") return DomainSpec::disk(j.at("radius").get<double>(), center);
    if (kind == "ellipse")
      return DomainSpec::ellipse(j.at("alpha").get<double>(), j.at("beta").get<double>(),
                                 center);
    if (kind == "superellipse")
      return DomainSpec::superellipse(j.at("power").get<int>(),
                                      j.at("half_width").get<double>(), center);
    if (kind == "radial") {
      std::vector<std::pair<double, double>> samples;
      for (const auto& s : j.at("samples"))
        samples.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
      return DomainSpec::radial_curve(std::move(samples), center);
    }
    throw ParameterError("unknown domain kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed domain file: ") + e.what());
  }
}

inline nlohmann::json domain_to_json(const DomainSpec& spec) {
  nlohmann::json j;
  j["kind"] = kind_name(spec.kind);
  switch (spec.kind) {
    case DomainKind::Disk:
      j["radius"] = spec.radius;
      break;
    case DomainKind::Ellipse:
      j["alpha"] = spec.alpha;
      j["beta"] = spec.beta;
      break;
    case DomainKind::Superellipse:
      j["power"] = spec.power;
      j["half_width"] = spec.half_width;
      break;
    case DomainKind::RadialCurve: {
      nlohmann::json samples = nlohmann::json::array();
      for (auto& [t, r] : spec.samples) samples.push_back({t, r});
      j["samples"] = samples;
      break;
    }
  }
  if (spec.center.x != 0 || spec.center.y != 0) j["center"] = {spec.center.x, spec.center.y};
  return j;
}

inline DomainSpec load_domain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read domain file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("malformed domain file: ") + e.what());
  }
  return domain_from_json(j);
}

// Units convention carried by every report: lengths are dimensionless,
// eigenvalues scale as 1/length^2.
inline nlohmann::json report_to_json(const BoundReport& rep) {
  nlohmann::json j;
  j["domain"] = domain_to_json(rep.domain);
  j["b"] = rep.b;
  j["admissible"] = rep.admissible;
  if (!rep.admissible) j["guarantee"] = "NOT-GUARANTEED";
  j["area"] = rep.area_value;
  j["max_v"] = rep.max_v;
  j["F"] = rep.F;
  j["G"] = rep.G;
  j["C_factor"] = rep.C_factor;
  j["rho"] = rep.rho;
  j["same_area_radius"] = rep.same_area_radius;
  j["mu_disk_rho"] = rep.mu_disk_rho;
  j["mu_disk_R"] = rep.mu_disk_R;
  j["bound_value"] = rep.bound_value;
  j["simplified_bound"] = rep.simplified_bound;
  if (rep.mu_direct) j["mu_direct"] = *rep.mu_direct;
  if (rep.conjecture_margin) j["conjecture_margin"] = *rep.conjecture_margin;
  j["units"] = {{"lengths", "dimensionless"}, {"eigenvalues", "1/length^2"}};
  j["provenance"] = {
      {"version", kVersion},
      {"closed_form", rep.closed_form},
      {"mesh_h", rep.mesh_h},
      {"r_grid", {{"min", rep.r_grid_min}, {"max", rep.r_grid_max}, {"n", rep.r_grid_n}}},
      {"radial_n", rep.radial_n},
      {"torsion_residual_tol", 1e-12},
      {"eigen_residual_tol", 1e-8},
      {"cross_tol", kCrossTol},
  };
  return j;
}

namespace detail {
inline void write_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + tmp + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace detail

inline std::string field_csv(const ScalarField& field) {
  std::ostringstream os;
  os << "x,y,v\n";
  for (int d = 0; d < field.space->num_dofs(); d++) {
    Vec2 p = field.space->dof_point(d);
    os << detail::fmt(p.x) << ',' << detail::fmt(p.y) << ',' << detail::fmt(field.nodal[d])
       << '\n';
  }
  return os.str();
}

inline std::string profile_csv(const LevelProfile& prof) {
  std::ostringstream os;
  os << "r,area,length,inv_grad_integral,grad_over_r2_integral\n";
  for (size_t i = 0; i < prof.r_grid.size(); i++) {
    os << detail::fmt(prof.r_grid[i]) << ',' << detail::fmt(prof.superlevel_area[i]) << ','
       << detail::fmt(prof.level_length[i]) << ',' << detail::fmt(prof.inv_grad_integral[i])
       << ',' << detail::fmt(prof.grad_over_r2_integral[i]) << '\n';
  }
  return os.str();
}

inline std::string eigenvector_csv(const P2Space& space, const EigenResult& res) {
  std::ostringstream os;
  os << "x,y,re_u,im_u,abs_u\n";
  for (int d = 0; d < space.num_dofs(); d++) {
    Vec2 p = space.dof_point(d);
    const auto& u = res.eigenvector[d];
    os << detail::fmt(p.x) << ',' << detail::fmt(p.y) << ',' << detail::fmt(u.real()) << ','
       << detail::fmt(u.imag()) << ',' << detail::fmt(std::abs(u)) << '\n';
  }
  return os.str();
}

inline std::string mode_table_csv(const DiskSpectrum& spec) {
  std::ostringstream os;
  os << "m,mu1\n";
  for (auto& [m, mu] : spec.per_mode) os << m << ',' << detail::fmt(mu) << '\n';
  return os.str();
}

inline std::string scan_R_csv(const std::vector<double>& Rs, const std::vector<double>& mus) {
  std::ostringstream os;
  os << "R,mu1\n";
  for (size_t i = 0; i < Rs.size(); i++)
    os << detail::fmt(Rs[i]) << ',' << detail::fmt(mus[i]) << '\n';
  return os.str();
}

inline std::string scan_b_csv(const std::vector<double>& bs, const std::vector<double>& mus) {
  std::ostringstream os;
  os << "b,mu1,mu1_over_b2\n";
  for (size_t i = 0; i < bs.size(); i++)
    os << detail::fmt(bs[i]) << ',' << detail::fmt(mus[i]) << ','
       << detail::fmt(mus[i] / (bs[i] * bs[i])) << '\n';
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  detail::write_atomic(path, content);
}

}  // namespace magbound
