#include "kahler/config.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "kahler/container.hpp"
#include "kahler/manifold.hpp"

namespace kahler {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Line of "key =" inside [section], 0 when absent.
int find_line(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream is(text);
  std::string line, current;
  int no = 0, section_line = 0;
  while (std::getline(is, line)) {
    ++no;
    std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      if (current == section) section_line = no;
      continue;
    }
    if (current != section) continue;
    auto eq = t.find('=');
    if (eq != std::string::npos && trim(t.substr(0, eq)) == key) return no;
  }
  return key.empty() ? section_line : 0;
}

struct Reader {
  const std::string& text;
  const std::string& origin;

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
    throw ConfigError(origin, find_line(text, section, key), key.empty() ? section : section + "." + key, msg);
  }

  double to_double(const std::string& section, const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      double d = std::stod(v, &pos);
      if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    fail(section, key, "expected a number, got '" + v + "'");
  }

  long long to_int(const std::string& section, const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      long long d = std::stoll(v, &pos);
      if (trim(v.substr(pos)).empty()) return d;
    } catch (const std::exception&) {
    }
    fail(section, key, "expected an integer, got '" + v + "'");
  }

  std::vector<std::string> tokens(const std::string& v) const {
    std::string s = v;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string t; is >> t;) out.push_back(t);
    return out;
  }

  std::vector<double> doubles(const std::string& section, const std::string& key, const std::string& v) const {
    std::vector<double> out;
    for (const auto& t : tokens(v)) out.push_back(to_double(section, key, t));
    return out;
  }
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"experiment", {"name", "t", "out", "workers", "seed"}},
      {"manifold", {"kind", "m", "n", "n_polar", "n_azimuth", "radius"}},
      {"metric", {"kind", "file", "amplitude", "max_mode"}},
      {"tolerances", {}},
      {"flow", {"h", "max_steps", "s_tol", "step_tol", "max_rejections"}},
      {"kernel", {"expected_dim"}},
      {"kempf_ness", {"group", "weights", "spins", "budget"}},
  };
  return k;
}

}  // namespace

LinearAction KempfNessScenario::action() const {
  if (group == "torus") return LinearAction::torus(weights);
  return LinearAction::su2(twice_spins);
}

double ExperimentConfig::tol(const std::string& key, double fallback) const {
  auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::string origin = "--t";
  Reader r{s, origin};
  return r.doubles("", "t", s);
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  pt::ptree tree;
  std::istringstream is(text);
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin, int(e.line()), "", e.message());
  }
  Reader r{text, origin};
  ExperimentConfig cfg;
  cfg.origin = origin;

  for (const auto& [section, body] : tree) {
    bool start = section.rfind("start.", 0) == 0;
    auto it = known_keys().find(section);
    if (!start && it == known_keys().end()) r.fail(section, "", "unknown section");
    for (const auto& [key, val] : body) {
      if (start) {
        if (key != "re" && key != "im" && key != "expect") r.fail(section, key, "unknown key");
      } else if (section != "tolerances" && !it->second.count(key)) {
        r.fail(section, key, "unknown key");
      }
    }
  }

  auto get = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    auto v = tree.get_optional<std::string>(pt::ptree::path_type(section + "." + key, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  };
  // section names may contain dots ("start.a"), so look those up by child
  auto child_value = [&](const pt::ptree& body, const std::string& key) -> std::optional<std::string> {
    auto c = body.get_child_optional(pt::ptree::path_type(key, '/'));
    if (!c) return std::nullopt;
    return trim(c->data());
  };

  if (auto v = get("experiment", "name")) cfg.experiment = *v;
  if (auto v = get("experiment", "t")) {
    cfg.ts = r.doubles("experiment", "t", *v);
    if (cfg.ts.empty()) r.fail("experiment", "t", "empty t list");
  }
  if (auto v = get("experiment", "out")) cfg.out_dir = *v;
  if (auto v = get("experiment", "workers")) {
    cfg.workers = int(r.to_int("experiment", "workers", *v));
    if (cfg.workers < 1) r.fail("experiment", "workers", "worker count must be at least 1");
  }
  if (auto v = get("experiment", "seed")) {
    long long s = r.to_int("experiment", "seed", *v);
    if (s < 0) r.fail("experiment", "seed", "seed must be non-negative");
    cfg.seed = std::uint64_t(s);
  }

  auto& M = cfg.manifold;
  if (auto v = get("manifold", "kind")) M.kind = *v;
  if (M.kind != "torus" && M.kind != "cp1" && M.kind != "cp2-analytic")
    r.fail("manifold", "kind", "expected torus, cp1 or cp2-analytic, got '" + M.kind + "'");
  if (auto v = get("manifold", "m")) M.m = int(r.to_int("manifold", "m", *v));
  if (M.kind == "torus" && M.m != 1 && M.m != 2) r.fail("manifold", "m", "torus dimension must be 1 or 2");
  if (M.kind == "cp1") M.m = 1;
  if (M.kind == "cp2-analytic") M.m = 2;
  if (auto v = get("manifold", "n")) M.n = int(r.to_int("manifold", "n", *v));
  if (M.n < 4) r.fail("manifold", "n", "need at least 4 points per axis");
  if (auto v = get("manifold", "n_polar")) M.n_polar = int(r.to_int("manifold", "n_polar", *v));
  if (auto v = get("manifold", "n_azimuth")) M.n_azimuth = int(r.to_int("manifold", "n_azimuth", *v));
  if (M.n_polar < 4 || M.n_azimuth < 1) r.fail("manifold", "n_polar", "grid too small");
  if (auto v = get("manifold", "radius")) M.radius = r.to_double("manifold", "radius", *v);
  if (M.radius < 0) r.fail("manifold", "radius", "radius must be positive (0 = full sphere)");

  auto& G = cfg.metric;
  if (auto v = get("metric", "kind")) G.kind = *v;
  if (G.kind == "flat" || G.kind == "fs") G.kind = "reference";
  if (G.kind != "reference" && G.kind != "potential" && G.kind != "random")
    r.fail("metric", "kind", "expected flat, fs, potential or random, got '" + G.kind + "'");
  if (auto v = get("metric", "file")) {
    std::filesystem::path p(*v);
    if (p.is_relative() && origin.front() != '<') p = std::filesystem::path(origin).parent_path() / p;
    G.file = p.string();
  }
  if (G.kind == "potential" && G.file.empty()) r.fail("metric", "file", "potential metrics need a file");
  if (G.kind == "potential" && !std::filesystem::exists(G.file))
    r.fail("metric", "file", "no such file: " + G.file);
  if (auto v = get("metric", "amplitude")) G.amplitude = r.to_double("metric", "amplitude", *v);
  if (auto v = get("metric", "max_mode")) G.max_mode = int(r.to_int("metric", "max_mode", *v));
  if (G.kind == "random" && M.kind == "cp2-analytic")
    r.fail("metric", "kind", "cp2-analytic supports only the Fubini-Study metric");

  if (auto tol = tree.get_child_optional("tolerances"))
    for (const auto& [key, val] : *tol) cfg.tolerances[key] = r.to_double("tolerances", key, trim(val.data()));

  auto& F = cfg.flow;
  if (auto v = get("flow", "h")) F.h = r.to_double("flow", "h", *v);
  if (!(F.h > 0)) r.fail("flow", "h", "step must be positive");
  if (auto v = get("flow", "max_steps")) F.max_steps = int(r.to_int("flow", "max_steps", *v));
  if (auto v = get("flow", "s_tol")) F.s_tol = r.to_double("flow", "s_tol", *v);
  if (auto v = get("flow", "step_tol")) F.step_tol = r.to_double("flow", "step_tol", *v);
  if (auto v = get("flow", "max_rejections")) F.max_rejections = int(r.to_int("flow", "max_rejections", *v));

  if (auto v = get("kernel", "expected_dim")) cfg.expected_kernel_dim = int(r.to_int("kernel", "expected_dim", *v));

  auto& K = cfg.kempf_ness;
  if (auto v = get("kempf_ness", "group")) K.group = *v;
  if (K.group != "torus" && K.group != "su2") r.fail("kempf_ness", "group", "expected torus or su2");
  if (auto v = get("kempf_ness", "weights")) {
    std::vector<std::vector<long long>> rows;
    std::istringstream rs(*v);
    for (std::string row; std::getline(rs, row, ';');) {
      std::vector<long long> w;
      for (const auto& t : r.tokens(row)) w.push_back(r.to_int("kempf_ness", "weights", t));
      if (!w.empty()) rows.push_back(w);
    }
    if (rows.empty()) r.fail("kempf_ness", "weights", "empty weight matrix");
    K.weights.resize(int(rows.size()), int(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows[0].size()) r.fail("kempf_ness", "weights", "weight rows differ in length");
      for (std::size_t j = 0; j < rows[i].size(); ++j) K.weights(int(i), int(j)) = int(rows[i][j]);
    }
  }
  if (auto v = get("kempf_ness", "spins"))
    for (const auto& t : r.tokens(*v)) K.twice_spins.push_back(int(r.to_int("kempf_ness", "spins", t)));
  if (auto v = get("kempf_ness", "budget")) K.budget = int(r.to_int("kempf_ness", "budget", *v));

  bool any_start = false;
  for (const auto& [section, body] : tree) {
    if (section.rfind("start.", 0) != 0) continue;
    any_start = true;
    KempfNessStart s;
    s.name = section.substr(6);
    auto re = child_value(body, "re");
    if (!re) r.fail(section, "re", "start point needs re");
    std::vector<double> x = r.doubles(section, "re", *re), y(x.size(), 0.0);
    if (auto im = child_value(body, "im")) {
      y = r.doubles(section, "im", *im);
      if (y.size() != x.size()) r.fail(section, "im", "re and im differ in length");
    }
    s.x.resize(int(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) s.x[int(i)] = cxd(x[i], y[i]);
    if (auto e = child_value(body, "expect")) {
      s.expect = *e;
      if (s.expect != "polystable" && s.expect != "unstable" && s.expect != "budget")
        r.fail(section, "expect", "expected polystable, unstable or budget");
    }
    K.starts.push_back(s);
  }
  if (any_start) {
    LinearAction act = [&] {
      try {
        return K.action();
      } catch (const InvalidInput& e) {
        r.fail("kempf_ness", K.group == "torus" ? "weights" : "spins", e.what());
      }
    }();
    for (const auto& s : K.starts) {
      if (s.x.size() != act.ambient())
        r.fail("start." + s.name, "re",
               "point has " + std::to_string(s.x.size()) + " entries, action needs " + std::to_string(act.ambient()));
      if (s.x.norm() == 0) r.fail("start." + s.name, "re", "start point must be nonzero");
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, 0, "", "cannot open config file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path);
}

Grid make_grid(const ManifoldSpec& s) {
  if (s.kind == "torus") return Grid::torus(s.m, s.n);
  if (s.kind == "cp1")
    return Grid::cp1(s.n_polar, s.n_azimuth, s.radius > 0 ? s.radius : std::numeric_limits<double>::infinity());
  return Grid::cp2_analytic(s.n_polar, s.n_azimuth);
}

MetricField reference_metric(const Grid& g) {
  return g.kind() == ManifoldKind::Torus ? MetricField::flat(g) : MetricField::fubini_study(g);
}

ScalarField configured_potential(const ExperimentConfig& cfg, const Grid& g) {
  const auto& m = cfg.metric;
  if (m.kind == "random") return random_potential(g, cfg.seed, m.amplitude, m.max_mode);
  if (m.kind == "potential") return read_field(m.file, g);
  return ScalarField(g, true);
}

}  // namespace kahler
