#include "lsr/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "lsr/errors.hpp"

namespace lsr {

namespace {

Json base(const char* kind) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = kind;
  return j;
}

}  // namespace

Json to_json(const IdentityReport& rep) {
  Json j = base("identities");
  j["max_rel_error"] = rep.max_rel_error;
  Json rows = Json::array();
  for (const auto& r : rep.results) {
    rows.push_back({{"name", r.name},
                    {"computed", r.computed},
                    {"exact", r.exact},
                    {"rel_error", r.rel_error}});
  }
  j["identities"] = rows;
  return j;
}

Json to_json(const LSSolution& sol) {
  Json j = base("solution");
  j["xi"] = {sol.xi.x, sol.xi.y, sol.xi.z};
  j["lambda"] = sol.lambda;
  j["r"] = sol.r;
  j["area"] = sol.area;
  j["H_residual"] = sol.H_residual;
  j["volume_error"] = sol.volume_error;
  j["iterations"] = sol.iterations;
  j["sup_u"] = sol.sup_u;
  j["sup_grad_u"] = sol.sup_grad_u;
  j["sup_hess_u"] = sol.sup_hess_u;
  return j;
}

Json to_json(const ExpansionReport& rep) {
  Json j = base("expansion");
  j["lambda"] = rep.lambda;
  j["xi_norm"] = rep.xi_norm;
  j["measured"] = rep.measured;
  j["term_sphere"] = rep.term_sphere;
  j["term_R"] = rep.term_R;
  j["term_lap_R"] = rep.term_lap_R;
  j["term_xi6"] = rep.term_xi6;
  j["predicted"] = rep.predicted;
  j["residual"] = rep.residual;
  return j;
}

Json to_json(const ScanResult& res) {
  Json j = base("scan");
  j["metric"] = res.metric;
  j["lambda"] = res.lambda;
  j["A_used"] = res.A_used;
  Json rows = Json::array();
  for (const auto& p : res.points) {
    rows.push_back({{"t", p.t},
                    {"reduced_area", p.reduced_area},
                    {"fd_derivative", p.fd_derivative},
                    {"fd_noise", p.fd_noise},
                    {"predicted_derivative", p.predicted_derivative}});
  }
  j["points"] = rows;
  Json crit = Json::array();
  for (const auto& c : res.critical_points) {
    crit.push_back({{"t_star", c.t_star},
                    {"second_difference", c.second_difference},
                    {"stable", c.stable}});
  }
  j["critical_points"] = crit;
  if (res.t_star) j["t_star"] = *res.t_star;
  j["hessian_eigenvalues"] = res.hessian_eigenvalues;
  j["hessian_psd"] = res.hessian_psd;
  j["verdict"] = res.verdict;
  j["notes"] = res.notes;
  return j;
}

Json to_json(const BEFitResult& res) {
  Json j = base("be_fit");
  j["c_F0"] = res.c_F0;
  if (res.c_Fsigma) j["c_Fsigma"] = *res.c_Fsigma;
  j["c_F0_per_xi"] = res.c_F0_per_xi;
  j["spread"] = res.spread;
  j["residual_by_lambda"] = res.residual_by_lambda;
  j["condition_number"] = res.condition_number;
  j["ill_conditioned"] = res.ill_conditioned;
  j["supported_constant"] = res.supported_constant;
  j["xi_values"] = res.xi_values;
  j["lambda_values"] = res.lambda_values;
  j["samples"] = res.samples;
  j["reference"] = {{"2pi", 2.0 * kPi}, {"pi/2", kPi / 2.0}};
  return j;
}

Json to_json(const Cor16Report& rep) {
  Json j = base("cor16");
  Json rows = Json::array();
  for (const auto& g : rep.grid) {
    rows.push_back({{"r", g.r},
                    {"R", g.R},
                    {"radial_convexity", g.radial_convexity}});
  }
  j["grid"] = rows;
  j["convexity_violated"] = rep.convexity_violated;
  j["dr_R_at_xi"] = rep.dr_R_at_xi;
  j["reference_scale"] = rep.reference_scale;
  j["ratio"] = rep.ratio;
  return j;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

std::string num(const Json& v) {
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v.get<double>());
    return buf;
  }
  return v.dump();
}

}  // namespace

std::string to_csv(const Json& report) {
  std::string out;
  // tabular sections first
  for (const auto& [key, val] : report.items()) {
    if (!val.is_array() || val.empty() || !val.front().is_object()) continue;
    out += "# " + key + "\n";
    std::string header;
    for (const auto& [col, cell] : val.front().items()) {
      if (!header.empty()) header += ",";
      header += csv_escape(col);
    }
    out += header + "\n";
    for (const auto& row : val) {
      std::string line;
      for (const auto& [col, cell] : row.items()) {
        if (!line.empty()) line += ",";
        line += cell.is_string() ? csv_escape(cell.get<std::string>()) : num(cell);
      }
      out += line + "\n";
    }
  }
  out += "# scalars\nkey,value\n";
  for (const auto& [key, val] : report.items()) {
    if (val.is_array() && !val.empty() && val.front().is_object()) continue;
    out += csv_escape(key) + "," +
           (val.is_string() ? csv_escape(val.get<std::string>()) : num(val)) +
           "\n";
  }
  return out;
}

void write_report(const Json& report, const RunConfig& cfg) {
  std::string text =
      cfg.format == "csv" ? to_csv(report) : report.dump(2) + "\n";
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out_path);
    if (!out) throw ConfigError("cannot write " + cfg.out_path);
    out << text;
  }
}

void write_plot_dat(const ScanResult& res, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "# t reduced_area fd_derivative predicted_derivative\n";
  char buf[160];
  for (const auto& p : res.points) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g\n", p.t,
                  p.reduced_area, p.fd_derivative, p.predicted_derivative);
    out << buf;
  }
}

}  // namespace lsr
