#include "lsr/config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsr/errors.hpp"

namespace lsr {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(v[i]);
  }
  return s;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& section) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line, current;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      current = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value', got: " + line);
    if (!section.empty() && current != section) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string canonical_serialize(const RunConfig& c) {
  std::map<std::string, std::string> kv;
  kv["subcommand"] = c.subcommand;
  kv["metric"] = c.metric;
  kv["L"] = std::to_string(c.L);
  kv["degree"] = std::to_string(c.degree);
  kv["tol_h_factor"] = fmt_double(c.tol_H_factor);
  kv["tol_v"] = fmt_double(c.tol_V);
  kv["max_iter"] = std::to_string(c.max_iter);
  kv["n_radial"] = std::to_string(c.n_radial);
  kv["fd_step"] = fmt_double(c.fd_step);
  kv["format"] = c.format;
  kv["out"] = c.out_path;
  kv["seed"] = std::to_string(c.seed);
  kv["threads"] = std::to_string(c.threads);
  kv["dry_run"] = c.dry_run ? "1" : "0";
  kv["plot"] = c.plot ? "1" : "0";
  kv["xi"] = fmt_list({c.xi_x, c.xi_y, c.xi_z});
  kv["lambda"] = fmt_double(c.lambda);
  kv["j"] = std::to_string(c.j);
  kv["k"] = std::to_string(c.k);
  kv["A"] = fmt_double(c.A);
  kv["t_min"] = fmt_double(c.t_min);
  kv["t_max"] = fmt_double(c.t_max);
  kv["points_per_unit"] = fmt_double(c.points_per_unit);
  kv["xis"] = fmt_list(c.xis);
  kv["lambdas"] = fmt_list(c.lambdas);
  std::string out = "[run]\n";
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  auto kv = parse_key_values(text, "run");
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("subcommand")) c.subcommand = *v;
  if (auto v = get("metric")) c.metric = *v;
  if (auto v = get("L")) c.L = std::stoi(*v);
  if (auto v = get("degree")) c.degree = std::stoi(*v);
  if (auto v = get("tol_h_factor")) c.tol_H_factor = std::stod(*v);
  if (auto v = get("tol_v")) c.tol_V = std::stod(*v);
  if (auto v = get("max_iter")) c.max_iter = std::stoi(*v);
  if (auto v = get("n_radial")) c.n_radial = std::stoi(*v);
  if (auto v = get("fd_step")) c.fd_step = std::stod(*v);
  if (auto v = get("format")) c.format = *v;
  if (auto v = get("out")) c.out_path = *v;
  if (auto v = get("seed")) c.seed = std::stoull(*v);
  if (auto v = get("threads")) c.threads = std::stoi(*v);
  if (auto v = get("dry_run")) c.dry_run = (*v == "1" || *v == "true");
  if (auto v = get("plot")) c.plot = (*v == "1" || *v == "true");
  if (auto v = get("xi")) {
    auto xs = parse_list(*v);
    if (xs.size() != 3) throw ConfigError("config: xi needs three components");
    c.xi_x = xs[0];
    c.xi_y = xs[1];
    c.xi_z = xs[2];
  }
  if (auto v = get("lambda")) c.lambda = std::stod(*v);
  if (auto v = get("j")) c.j = std::stoi(*v);
  if (auto v = get("k")) c.k = std::stoi(*v);
  if (auto v = get("A")) c.A = std::stod(*v);
  if (auto v = get("t_min")) c.t_min = std::stod(*v);
  if (auto v = get("t_max")) c.t_max = std::stod(*v);
  if (auto v = get("points_per_unit")) c.points_per_unit = std::stod(*v);
  if (auto v = get("xis")) c.xis = parse_list(*v);
  if (auto v = get("lambdas")) c.lambdas = parse_list(*v);
  return c;
}

MetricSpec metric_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("metric config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto kv = parse_key_values(buf.str(), "metric");
  auto get = [&](const char* key, const std::string& def) {
    auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
  };
  std::string kind = get("kind", "");
  if (kind == "builtin" || kv.count("builtin"))
    return MetricSpec::builtin(get("builtin", get("name", "schwarzschild")));
  if (kind == "flat") return MetricSpec::flat();
  double mass = std::stod(get("mass", "2.0"));
  if (kind == "schwarzschild") return MetricSpec::schwarzschild(mass);
  if (kind == "radial_conformal") {
    std::string profile = get("profile", "thm13");
    double r_min = std::stod(get("r_min", profile == "thm17" ? "6.5" : "2.0"));
    if (profile == "thm13") {
      double A = std::stod(get("A", "8.0"));
      int k_max = std::stoi(get("k_max", "8"));
      return MetricSpec::radial_conformal(mass, pulse_S_thm13(A, k_max), r_min,
                                          "thm13");
    }
    if (profile == "thm17") {
      int k_max = std::stoi(get("k_max", "6"));
      return MetricSpec::radial_conformal(mass, pulse_S_thm17(k_max), r_min,
                                          "thm17");
    }
    throw ConfigError("metric config: unknown profile " + profile);
  }
  throw ConfigError("metric config: unknown kind '" + kind + "'");
}

MetricSpec resolve_metric(const std::string& arg) {
  if (std::filesystem::exists(arg) && !std::filesystem::is_directory(arg))
    return metric_from_file(arg);
  return MetricSpec::builtin(arg);
}

std::string metric_to_config(const MetricSpec& spec) {
  std::string out = "[metric]\n";
  switch (spec.kind) {
    case MetricKind::Flat:
      out += "kind = flat\n";
      break;
    case MetricKind::Schwarzschild:
      out += "kind = schwarzschild\nmass = " + fmt_double(spec.mass) + "\n";
      break;
    case MetricKind::RadialConformal:
      out += "kind = radial_conformal\nmass = " + fmt_double(spec.mass) +
             "\nprofile = " + spec.name +
             "\nr_min = " + fmt_double(spec.r_min) + "\n";
      break;
    case MetricKind::GeneralSigma:
      out += "kind = general_sigma  # programmatic only\n";
      break;
  }
  return out;
}

}  // namespace lsr
