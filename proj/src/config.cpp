#include "mpetdg/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mpetdg {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry>;

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& path, const Entry& e, const std::string& key) {
  try {
    size_t pos = 0;
    double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(path, e.line, "key '" + key + "': cannot parse number '" + e.value + "'");
  }
}

int to_int(const std::string& path, const Entry& e, const std::string& key) {
  try {
    size_t pos = 0;
    int v = std::stoi(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    fail(path, e.line, "key '" + key + "': cannot parse integer '" + e.value + "'");
  }
}

std::vector<int> to_int_list(const std::string& path, const Entry& e, const std::string& key) {
  std::istringstream iss(e.value);
  std::vector<int> out;
  int v;
  while (iss >> v) out.push_back(v);
  if (!iss.eof()) fail(path, e.line, "key '" + key + "': cannot parse integer list");
  return out;
}

std::vector<double> to_double_list(const std::string& path, const Entry& e,
                                   const std::string& key) {
  std::istringstream iss(e.value);
  std::vector<double> out;
  double v;
  while (iss >> v) out.push_back(v);
  if (!iss.eof()) fail(path, e.line, "key '" + key + "': cannot parse number list");
  return out;
}

class Ini {
public:
  Ini(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(path_, lineno, "malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) fail(path_, lineno, "empty section name");
        sections_[section]; // create even if empty
        section_line_[section] = lineno;
        continue;
      }
      size_t eq = line.find('=');
      if (eq == std::string::npos) fail(path_, lineno, "expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(path_, lineno, "empty key");
      if (section.empty()) fail(path_, lineno, "key '" + key + "' outside any section");
      if (sections_[section].count(key))
        fail(path_, lineno, "duplicate key '" + key + "' in [" + section + "]");
      sections_[section][key] = {value, lineno, false};
    }
  }

  bool has(const std::string& sec, const std::string& key) {
    auto s = sections_.find(sec);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  Entry& get(const std::string& sec, const std::string& key) {
    auto& e = sections_.at(sec).at(key);
    e.used = true;
    return e;
  }

  Entry& require(const std::string& sec, const std::string& key) {
    if (!has(sec, key))
      throw std::runtime_error(path_ + ": missing required key '" + key + "' in section [" +
                               sec + "]");
    return get(sec, key);
  }

  void check_sections(const std::set<std::string>& known) {
    for (const auto& [name, _] : sections_)
      if (!known.count(name))
        fail(path_, section_line_.at(name), "unknown section [" + name + "]");
  }

  void check_unused() {
    for (const auto& [sec, entries] : sections_)
      for (const auto& [key, e] : entries)
        if (!e.used) fail(path_, e.line, "unknown key '" + key + "' in section [" + sec + "]");
  }

  const std::string& path() const { return path_; }

private:
  std::string path_;
  std::map<std::string, Section> sections_;
  std::map<std::string, int> section_line_;
};

MpetParameters parse_physics(Ini& ini) {
  MpetParameters p;
  p.dim = to_int(ini.path(), ini.require("physics", "dim"), "dim");
  p.rho = to_double(ini.path(), ini.require("physics", "rho"), "rho");
  p.lambda = to_double(ini.path(), ini.require("physics", "lambda"), "lambda");
  p.mu = to_double(ini.path(), ini.require("physics", "mu"), "mu");
  int J = to_int(ini.path(), ini.require("physics", "networks"), "networks");
  if (J < 1) throw std::runtime_error(ini.path() + ": networks must be >= 1");
  p.networks.resize(J);
  p.beta = Eigen::MatrixXd::Zero(J, J);
  auto per_net = [&](const std::string& key, bool required, double fallback) {
    std::vector<double> v(J, fallback);
    if (ini.has("physics", key)) {
      v = to_double_list(ini.path(), ini.get("physics", key), key);
      if (static_cast<int>(v.size()) == 1) v.assign(J, v[0]);
      if (static_cast<int>(v.size()) != J)
        throw std::runtime_error(ini.path() + ": key '" + key + "' needs 1 or " +
                                 std::to_string(J) + " values");
    } else if (required) {
      ini.require("physics", key);
    }
    return v;
  };
  auto alpha = per_net("alpha", true, 0.0);
  auto storage = per_net("c", true, 0.0);
  auto perm = per_net("k", true, 0.0);
  auto visc = per_net("nu", true, 0.0);
  auto beta_e = per_net("beta_e", false, 0.0);
  for (int j = 0; j < J; ++j) {
    p.networks[j].alpha = alpha[j];
    p.networks[j].storage = storage[j];
    p.networks[j].permeability = perm[j] * Eigen::Matrix3d::Identity();
    p.networks[j].viscosity = visc[j];
    p.networks[j].beta_external = beta_e[j];
  }
  for (int j = 0; j < J; ++j)
    for (int k = j + 1; k < J; ++k) {
      std::string key = "beta_" + std::to_string(j + 1) + "_" + std::to_string(k + 1);
      if (ini.has("physics", key)) {
        double b = to_double(ini.path(), ini.get("physics", key), key);
        p.beta(j, k) = p.beta(k, j) = b;
      }
    }
  return p;
}

} // namespace

RunConfig parse_config(const std::string& path) {
  Ini ini(path);
  ini.check_sections({"case", "mesh", "space", "penalty", "time", "output", "physics"});

  RunConfig cfg;
  cfg.test_case = ini.require("case", "test_case").value;
  if (cfg.test_case == "tc1_3d") {
    cfg.params = tc1_parameters();
  } else if (cfg.test_case == "tc2_2d") {
    cfg.params = tc2_parameters();
  } else if (cfg.test_case == "custom") {
    cfg.params = parse_physics(ini);
  } else {
    fail(path, ini.get("case", "test_case").line,
         "test_case must be tc1_3d, tc2_2d or custom");
  }

  if (ini.has("mesh", "divisions"))
    cfg.divisions = to_int_list(path, ini.get("mesh", "divisions"), "divisions");
  if (ini.has("mesh", "file")) cfg.mesh_file = ini.get("mesh", "file").value;
  if (ini.has("mesh", "agglomerate"))
    cfg.agglomerate = to_int(path, ini.get("mesh", "agglomerate"), "agglomerate");
  if (ini.has("mesh", "seed"))
    cfg.seed = static_cast<unsigned>(to_int(path, ini.get("mesh", "seed"), "seed"));
  if (cfg.divisions.empty() && cfg.mesh_file.empty())
    throw std::runtime_error(path + ": section [mesh] needs 'divisions' or 'file'");
  for (int dv : cfg.divisions)
    if (dv < 1) throw std::runtime_error(path + ": divisions entries must be >= 1");

  cfg.degree_u = to_int(path, ini.require("space", "degree_u"), "degree_u");
  cfg.degree_p = to_int(path, ini.require("space", "degree_p"), "degree_p");
  if (ini.has("space", "degree_sweep"))
    cfg.degree_sweep = to_int_list(path, ini.get("space", "degree_sweep"), "degree_sweep");
  auto check_degree = [&](int dg) {
    if (dg < 1 || dg > kMaxDegree)
      throw std::runtime_error(path + ": degrees must be in [1, " +
                               std::to_string(kMaxDegree) + "]");
  };
  check_degree(cfg.degree_u);
  check_degree(cfg.degree_p);
  for (int dg : cfg.degree_sweep) check_degree(dg);

  if (ini.has("penalty", "eta0"))
    cfg.penalty.eta0 = to_double(path, ini.get("penalty", "eta0"), "eta0");
  if (ini.has("penalty", "z"))
    cfg.penalty.z = to_double_list(path, ini.get("penalty", "z"), "z");

  cfg.time.dt = to_double(path, ini.require("time", "dt"), "dt");
  cfg.time.t_end = to_double(path, ini.require("time", "t_end"), "t_end");
  if (ini.has("time", "beta")) cfg.time.beta = to_double(path, ini.get("time", "beta"), "beta");
  if (ini.has("time", "gamma"))
    cfg.time.gamma = to_double(path, ini.get("time", "gamma"), "gamma");
  if (ini.has("time", "theta"))
    cfg.time.theta = to_double(path, ini.get("time", "theta"), "theta");
  if (ini.has("time", "alt_history_sign"))
    cfg.time.alt_history_sign =
        to_int(path, ini.get("time", "alt_history_sign"), "alt_history_sign") != 0;

  if (ini.has("output", "dir")) cfg.output_dir = ini.get("output", "dir").value;
  if (ini.has("output", "csv")) cfg.csv_name = ini.get("output", "csv").value;
  if (ini.has("output", "observer_stride"))
    cfg.observer_stride = to_int(path, ini.get("output", "observer_stride"), "observer_stride");
  if (ini.has("output", "fields_stride"))
    cfg.fields_stride = to_int(path, ini.get("output", "fields_stride"), "fields_stride");

  ini.check_unused();
  validate_parameters(cfg.params);
  if (!(cfg.time.dt > 0.0)) throw std::runtime_error(path + ": dt must be > 0");
  if (cfg.time.t_end < 0.0) throw std::runtime_error(path + ": t_end must be >= 0");
  return cfg;
}

} // namespace mpetdg
