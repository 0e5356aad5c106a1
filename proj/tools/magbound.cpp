// Command-line front end: parses domain files and flags, orchestrates the
// torsion / spectrum / bound pipelines, and emits JSON reports and CSV data
// files. All outputs are deterministic for identical inputs unless a
// timestamp is requested explicitly.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "magbound/io.hpp"
#include "magbound/pipeline.hpp"

namespace fs = std::filesystem;
using namespace magbound;
using nlohmann::json;

namespace {

struct RangeSpec {
  double lo = 0, hi = 0;
  int n = 1;
};

RangeSpec parse_range(const std::string& text, const char* what) {
  RangeSpec r;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &r.lo, &r.hi, &r.n) != 3)
    throw ParameterError(std::string(what) + " must have the form lo:hi:n");
  if (r.n < 1 || r.hi < r.lo)
    throw ParameterError(std::string(what) + " must be non-empty and increasing");
  return r;
}

std::vector<double> range_values(const RangeSpec& r) {
  std::vector<double> v(r.n);
  for (int i = 0; i < r.n; i++)
    v[i] = r.n == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (r.n - 1.0);
  return v;
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const ParameterError*>(&e)) return "parameter";
  if (dynamic_cast<const MeshError*>(&e)) return "mesh";
  if (dynamic_cast<const LevelSetError*>(&e)) return "level_set";
  if (dynamic_cast<const ModeScanError*>(&e)) return "mode_scan";
  if (dynamic_cast<const SolverError*>(&e)) return "solver";
  if (dynamic_cast<const ArgumentError*>(&e)) return "argument";
  if (dynamic_cast<const InternalError*>(&e)) return "internal";
  return "unknown";
}

struct CommonOpts {
  std::string domain_path;
  std::optional<double> b;
  std::optional<std::string> b_range;
  std::optional<std::string> family;  // param:lo:hi:n domain-family sweep
  double mesh_h = 0.02;
  std::string r_grid = "0.02:0.995:400";
  int radial_n = 4096;
  std::string out_dir = ".";
  bool direct = false;
  std::string format = "json";
  int jobs = 1;
  bool timestamp = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_domain) {
  auto* dflag = cmd->add_option("--domain", o.domain_path, "domain specification file (JSON)");
  if (needs_domain) dflag->required();
  cmd->add_option("--b", o.b, "field intensity");
  cmd->add_option("--b-range", o.b_range, "field intensity range lo:hi:n");
  cmd->add_option("--family", o.family, "domain family sweep param:lo:hi:n");
  cmd->add_option("--mesh-h", o.mesh_h, "target mesh size")->check(CLI::PositiveNumber);
  cmd->add_option("--r-grid", o.r_grid, "level-set grid lo:hi:n");
  cmd->add_option("--radial-n", o.radial_n, "radial grid size for disk fibers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_flag("--direct", o.direct, "run the two-dimensional eigensolver");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--jobs", o.jobs, "worker count for sweeps")->check(CLI::PositiveNumber);
  cmd->add_flag("--timestamp", o.timestamp, "add a timestamp field to JSON reports");
}

RGrid parse_rgrid(const std::string& text) {
  RangeSpec r = parse_range(text, "--r-grid");
  return RGrid{r.lo, r.hi, r.n};
}

void stamp(json& j, const CommonOpts& o) {
  if (o.timestamp) j["timestamp"] = (long long)std::time(nullptr);
}

void ensure_out(const CommonOpts& o) { fs::create_directories(o.out_dir); }

std::string out_path(const CommonOpts& o, const std::string& name) {
  return (fs::path(o.out_dir) / name).string();
}

int cmd_torsion(const CommonOpts& o) {
  ensure_out(o);
  DomainSpec spec = load_domain_file(o.domain_path);
  auto p = run_torsion_pipeline(spec, o.mesh_h, parse_rgrid(o.r_grid));
  write_file(out_path(o, "torsion_field.csv"), field_csv(p.v));
  write_file(out_path(o, "level_profile.csv"), profile_csv(p.prof));
  json j;
  j["domain"] = domain_to_json(spec);
  j["mesh"] = {{"target_h", o.mesh_h},
               {"vertices", p.mesh->num_vertices()},
               {"triangles", p.mesh->num_triangles()},
               {"area", p.mesh->total_area()},
               {"min_angle_deg", p.mesh->min_angle_deg()}};
  j["max_v"] = p.mp.value;
  j["maximizer"] = {p.mp.location.x, p.mp.location.y};
  j["hessian"] = {{"xx", p.mp.hxx}, {"xy", p.mp.hxy}, {"yy", p.mp.hyy}};
  j["hessian_det"] = p.mp.hessian_det;
  j["hessian_trace"] = p.mp.hessian_trace;
  j["F"] = p.prof.F_value;
  j["G"] = p.prof.G_value;
  j["limits"] = {{"F_r0", p.prof.f_limit_r0},
                 {"G_r0", p.prof.g_limit_r0},
                 {"G_r1", p.prof.g_limit_r1}};
  auto alt = level_profile_via_areas(p.prof, p.mp);
  j["F_alt"] = alt.F_alt;
  j["G_alt"] = alt.G_alt;
  j["cross_method_gap"] = {{"F", alt.f_rel_gap}, {"G", alt.g_rel_gap}};
  j["dihedral_symmetry"] = has_dihedral_symmetry(spec);
  j["units"] = {{"lengths", "dimensionless"}, {"eigenvalues", "1/length^2"}};
  stamp(j, o);
  write_file(out_path(o, "torsion.json"), j.dump(2) + "\n");
  if (o.format == "csv")
    std::cout << profile_csv(p.prof);
  else
    std::cout << j.dump(2) << std::endl;
  return 0;
}

int cmd_spectrum(const CommonOpts& o, double R) {
  ensure_out(o);
  if (o.b_range) {
    auto bs = range_values(parse_range(*o.b_range, "--b-range"));
    std::vector<double> mus(bs.size());
    for (size_t i = 0; i < bs.size(); i++) mus[i] = disk_mu1(bs[i], R, o.radial_n).mu1;
    write_file(out_path(o, "spectrum_scan.csv"), scan_b_csv(bs, mus));
    json j;
    j["R"] = R;
    j["b"] = bs;
    j["mu1"] = mus;
    j["units"] = {{"lengths", "dimensionless"}, {"eigenvalues", "1/length^2"}};
    stamp(j, o);
    write_file(out_path(o, "spectrum.json"), j.dump(2) + "\n");
    if (o.format == "csv")
      std::cout << scan_b_csv(bs, mus);
    else
      std::cout << j.dump(2) << std::endl;
    return 0;
  }
  double b = o.b.value_or(0.0);
  DiskSpectrum spec = disk_mu1(b, R, o.radial_n);
  write_file(out_path(o, "spectrum_modes.csv"), mode_table_csv(spec));
  json j;
  j["R"] = R;
  j["b"] = b;
  j["mu1"] = spec.mu1;
  j["minimizing_mode"] = spec.minimizing_mode;
  json modes = json::object();
  for (auto& [m, mu] : spec.per_mode) modes[std::to_string(m)] = mu;
  j["per_mode"] = modes;
  j["units"] = {{"lengths", "dimensionless"}, {"eigenvalues", "1/length^2"}};
  stamp(j, o);
  write_file(out_path(o, "spectrum.json"), j.dump(2) + "\n");
  if (o.format == "csv")
    std::cout << mode_table_csv(spec);
  else
    std::cout << j.dump(2) << std::endl;
  return 0;
}

BoundReport run_bound(const DomainSpec& spec, double b, const CommonOpts& o, bool direct,
                      const std::string& eigvec_path = {}) {
  auto p = run_torsion_pipeline(spec, o.mesh_h, parse_rgrid(o.r_grid));
  BoundOptions opt;
  opt.radial_n = o.radial_n;
  opt.with_direct = direct;
  EigenResult direct_res;
  if (direct && !eigvec_path.empty()) opt.direct_out = &direct_res;
  BoundReport rep = assemble_bound(spec, b, p.v, p.mp, p.prof, opt);
  if (opt.direct_out && !direct_res.eigenvector.empty())
    write_file(eigvec_path, eigenvector_csv(*p.v.space, direct_res));
  return rep;
}

std::string report_csv(const BoundReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "b,admissible,max_v,F,G,C_factor,rho,same_area_radius,mu_disk_rho,mu_disk_R,"
        "bound_value,simplified_bound,mu_direct,conjecture_margin\n";
  os << r.b << ',' << (r.admissible ? 1 : 0) << ',' << r.max_v << ',' << r.F << ',' << r.G
     << ',' << r.C_factor << ',' << r.rho << ',' << r.same_area_radius << ','
     << r.mu_disk_rho << ',' << r.mu_disk_R << ',' << r.bound_value << ','
     << r.simplified_bound << ',';
  if (r.mu_direct) os << *r.mu_direct;
  os << ',';
  if (r.conjecture_margin) os << *r.conjecture_margin;
  os << '\n';
  return os.str();
}

int cmd_bound(const CommonOpts& o, bool compare_mode) {
  ensure_out(o);
  DomainSpec spec = load_domain_file(o.domain_path);
  if (!o.b) throw ArgumentError("--b is required for this command");
  bool direct = o.direct || compare_mode;
  BoundReport rep =
      run_bound(spec, *o.b, o, direct, direct ? out_path(o, "eigenvector.csv") : "");
  json j = report_to_json(rep);
  stamp(j, o);
  if (compare_mode) {
    auto margins = conjecture_compare(rep);
    j["compare"] = {{"mu_disk_R", margins.mu_disk_R},
                    {"conjecture_margin", margins.conjecture_margin},
                    {"bound_slack", margins.bound_slack}};
  }
  write_file(out_path(o, compare_mode ? "compare.json" : "bound.json"), j.dump(2) + "\n");
  if (o.format == "csv")
    std::cout << report_csv(rep);
  else
    std::cout << j.dump(2) << std::endl;
  return 0;
}

// apply a family parameter to a base domain
DomainSpec family_member(const DomainSpec& base, const std::string& param, double value) {
  DomainSpec spec = base;
  if (param == "radius") spec.radius = value;
  else if (param == "alpha") spec.alpha = value;
  else if (param == "beta") spec.beta = value;
  else if (param == "half_width") spec.half_width = value;
  else throw ParameterError("unknown family parameter '" + param + "'");
  spec.validate();
  return spec;
}

int cmd_sweep(const CommonOpts& o) {
  ensure_out(o);
  DomainSpec base = load_domain_file(o.domain_path);
  if (!o.b_range && !o.family)
    throw ArgumentError("sweep needs --b-range or --family param:lo:hi:n");
  if (o.b_range && o.family)
    throw ArgumentError("sweep takes either --b-range or --family, not both");

  std::string family_param;
  std::vector<double> grid;
  std::vector<DomainSpec> specs;
  std::vector<double> bs;
  if (o.b_range) {
    grid = range_values(parse_range(*o.b_range, "--b-range"));
    for (double b : grid) {
      specs.push_back(base);
      bs.push_back(b);
    }
  } else {
    char name[64];
    RangeSpec r;
    if (std::sscanf(o.family->c_str(), "%63[a-z_]:%lf:%lf:%d", name, &r.lo, &r.hi, &r.n) != 4)
      throw ParameterError("--family must have the form param:lo:hi:n");
    if (r.n < 1 || r.hi < r.lo) throw ParameterError("--family range must be increasing");
    if (!o.b) throw ArgumentError("--b is required for a family sweep");
    family_param = name;
    grid = range_values(r);
    for (double value : grid) {
      specs.push_back(family_member(base, family_param, value));
      bs.push_back(*o.b);
    }
  }

  std::vector<BoundReport> reports(grid.size());
  int jobs = std::max(1, o.jobs);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      reports[i] = run_bound(specs[i], bs[i], o, o.direct);
      json j = report_to_json(reports[i]);
      write_file(out_path(o, "bound_" + std::to_string(i) + ".json"), j.dump(2) + "\n");
    }
  };
  std::vector<std::future<void>> pool;
  for (int w = 0; w < jobs - 1; w++) pool.push_back(std::async(std::launch::async, worker));
  worker();
  for (auto& f : pool) f.get();

  std::ostringstream csv;
  csv.precision(17);
  csv << (family_param.empty() ? "b" : family_param)
      << ",admissible,C_factor,rho,mu_disk_rho,mu_disk_R,bound_value,simplified_bound";
  if (o.direct) csv << ",mu_direct,conjecture_margin";
  csv << "\n";
  for (size_t i = 0; i < grid.size(); i++) {
    const auto& r = reports[i];
    csv << grid[i] << ',' << (r.admissible ? 1 : 0) << ',' << r.C_factor << ',' << r.rho << ','
        << r.mu_disk_rho << ',' << r.mu_disk_R << ',' << r.bound_value << ','
        << r.simplified_bound;
    if (o.direct)
      csv << ',' << (r.mu_direct ? *r.mu_direct : 0.0) << ','
          << (r.conjecture_margin ? *r.conjecture_margin : 0.0);
    csv << '\n';
  }
  write_file(out_path(o, "sweep.csv"), csv.str());
  std::cout << "wrote " << out_path(o, "sweep.csv") << " (" << grid.size() << " rows)"
            << std::endl;
  return 0;
}

int cmd_validate(const CommonOpts& o) {
  auto checks = validate_builtin(o.mesh_h, parse_rgrid(o.r_grid), o.radial_n, o.direct,
                                 [](const std::string& s) { std::cerr << "... " << s << "\n"; });
  int failed = 0;
  std::printf("%-14s %-44s %14s %14s  %s\n", "domain", "property", "measured", "threshold",
              "status");
  for (const auto& c : checks) {
    if (!c.pass) failed++;
    std::printf("%-14s %-44s %14.6g %14.6g  %s\n", c.domain.c_str(), c.property.c_str(),
                c.measured, c.threshold, c.pass ? "PASS" : "FAIL");
  }
  std::printf("%d/%zu properties passed\n", (int)checks.size() - failed, checks.size());
  if (!o.direct)
    std::printf("(direct eigensolver checks skipped; pass --direct to include them)\n");
  return failed == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torsion-function bounds on the lowest magnetic Neumann eigenvalue"};
  app.require_subcommand(1);

  CommonOpts o;
  double spectrum_R = 1.0;

  auto* torsion = app.add_subcommand("torsion", "solve the torsion problem and level profile");
  add_common(torsion, o, true);
  auto* spectrum = app.add_subcommand("spectrum", "disk fiber spectrum");
  add_common(spectrum, o, false);
  spectrum->add_option("--R", spectrum_R, "disk radius")->check(CLI::PositiveNumber);
  auto* bound = app.add_subcommand("bound", "assemble the eigenvalue bound report");
  add_common(bound, o, true);
  auto* compare = app.add_subcommand("compare", "bound plus direct solve and margins");
  add_common(compare, o, true);
  auto* sweep = app.add_subcommand("sweep", "bound reports over a b range");
  add_common(sweep, o, true);
  auto* validate = app.add_subcommand("validate", "run the property suite on builtin domains");
  add_common(validate, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (torsion->parsed()) return cmd_torsion(o);
    if (spectrum->parsed()) return cmd_spectrum(o, spectrum_R);
    if (bound->parsed()) return cmd_bound(o, false);
    if (compare->parsed()) return cmd_bound(o, true);
    if (sweep->parsed()) return cmd_sweep(o);
    if (validate->parsed()) return cmd_validate(o);
  } catch (const ParameterError& e) {
    json err{{"error", {{"kind", error_kind(e)}, {"message", e.what()}}}};
    std::cout << err.dump(2) << std::endl;
    return 2;
  } catch (const Error& e) {
    json err{{"error", {{"kind", error_kind(e)}, {"message", e.what()}}}};
    std::cout << err.dump(2) << std::endl;
    return 1;
  } catch (const std::exception& e) {
    json err{{"error", {{"kind", "unknown"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << std::endl;
    return 1;
  }
  return 2;
}
