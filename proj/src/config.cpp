#include "tikrules/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tikrules {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

// strip a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

TomlValue parse_scalar(const std::string& tok, const std::string& where) {
  TomlValue v;
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    v.kind = TomlValue::Kind::Str;
    v.str = tok.substr(1, tok.size() - 2);
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.kind = TomlValue::Kind::Bool;
    v.boolean = tok == "true";
    return v;
  }
  try {
    std::size_t used = 0;
    v.num = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    v.kind = TomlValue::Kind::Num;
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": cannot parse value: " + tok);
  }
}

TomlValue parse_value(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError(where + ": missing value");
  if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError(where + ": unterminated array");
    TomlValue v;
    v.kind = TomlValue::Kind::Arr;
    const std::string body = s.substr(1, s.size() - 2);
    std::string item;
    bool in_str = false;
    for (char c : body) {
      if (c == '"') in_str = !in_str;
      if (c == ',' && !in_str) {
        if (!trim(item).empty()) v.arr.push_back(parse_scalar(trim(item), where));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!trim(item).empty()) v.arr.push_back(parse_scalar(trim(item), where));
    return v;
  }
  return parse_scalar(s, where);
}

}  // namespace

TomlTable parse_toml(const std::string& text, const std::string& whence) {
  TomlTable table;
  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = whence + ":" + std::to_string(lineno);
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      table[section];  // may legitimately stay empty
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (section.empty()) throw ConfigError(where + ": key outside any [section]");
    if (table[section].count(key)) throw ConfigError(where + ": duplicate key " + key);
    table[section][key] = parse_value(s.substr(eq + 1), where);
  }
  return table;
}

namespace {

class SectionReader {
 public:
  SectionReader(const TomlTable& t, const std::string& name, const std::string& whence)
      : whence_(whence + " [" + name + "]") {
    auto it = t.find(name);
    if (it != t.end()) sec_ = &it->second;
  }

  bool present() const { return sec_ != nullptr; }

  std::optional<double> num(const std::string& key) {
    const TomlValue* v = get(key);
    if (!v) return std::nullopt;
    if (v->kind != TomlValue::Kind::Num)
      throw ConfigError(whence_ + " " + key + ": expected a number");
    return v->num;
  }

  std::optional<std::string> str(const std::string& key) {
    const TomlValue* v = get(key);
    if (!v) return std::nullopt;
    if (v->kind != TomlValue::Kind::Str)
      throw ConfigError(whence_ + " " + key + ": expected a string");
    return v->str;
  }

  std::optional<bool> boolean(const std::string& key) {
    const TomlValue* v = get(key);
    if (!v) return std::nullopt;
    if (v->kind != TomlValue::Kind::Bool)
      throw ConfigError(whence_ + " " + key + ": expected true/false");
    return v->boolean;
  }

  std::optional<std::vector<std::string>> str_array(const std::string& key) {
    const TomlValue* v = get(key);
    if (!v) return std::nullopt;
    if (v->kind != TomlValue::Kind::Arr)
      throw ConfigError(whence_ + " " + key + ": expected an array");
    std::vector<std::string> out;
    for (const auto& e : v->arr) {
      if (e.kind != TomlValue::Kind::Str)
        throw ConfigError(whence_ + " " + key + ": expected an array of strings");
      out.push_back(e.str);
    }
    return out;
  }

  int integer(const std::string& key, int dflt) {
    auto v = num(key);
    if (!v) return dflt;
    if (*v != std::floor(*v))
      throw ConfigError(whence_ + " " + key + ": expected an integer");
    return int(*v);
  }

  void done() const {
    if (!sec_) return;
    for (const auto& [k, v] : *sec_)
      if (!seen_.count(k)) throw ConfigError(whence_ + ": unknown key " + k);
  }

 private:
  const TomlValue* get(const std::string& key) {
    seen_.insert(key);
    if (!sec_) return nullptr;
    auto it = sec_->find(key);
    return it == sec_->end() ? nullptr : &it->second;
  }

  const TomlSection* sec_ = nullptr;
  std::string whence_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_toml(const TomlTable& t, const std::string& whence) {
  static const std::set<std::string> known_sections{"problem", "regularizer", "noise",
                                                    "grid", "rules", "output"};
  for (const auto& [name, _] : t)
    if (!known_sections.count(name))
      throw ConfigError(whence + ": unknown section [" + name + "]");

  ExperimentConfig cfg;

  SectionReader prob(t, "problem", whence);
  const std::string kind = prob.str("kind").value_or("diagonal");
  if (kind == "diagonal") {
    DiagonalProblemSpec d;
    d.n = prob.integer("n", d.n);
    d.beta = prob.num("beta").value_or(d.beta);
    d.nu = prob.num("nu").value_or(d.nu);
    if (auto s = prob.num("sign_seed")) d.sign_seed = std::uint64_t(*s);
    d.scale_A = prob.num("scale_A").value_or(d.scale_A);
    d.scale_x = prob.num("scale_x").value_or(d.scale_x);
    if (d.n < 1) throw ConfigError(whence + ": problem.n must be >= 1");
    cfg.problem = d;
    // reject dense-only keys so typos do not pass silently
    if (prob.str("matrix") || prob.str("x_dagger"))
      throw ConfigError(whence + ": matrix/x_dagger are dense-problem keys");
  } else if (kind == "dense") {
    DenseProblemSpec d;
    auto mp = prob.str("matrix");
    auto xp = prob.str("x_dagger");
    if (!mp || !xp)
      throw ConfigError(whence + ": dense problem needs matrix and x_dagger paths");
    d.matrix_path = *mp;
    d.x_dagger_path = *xp;
    cfg.problem = d;
  } else {
    throw ConfigError(whence + ": problem.kind must be diagonal or dense");
  }
  prob.done();

  SectionReader reg(t, "regularizer", whence);
  const std::string rkind = reg.str("kind").value_or("lq");
  if (rkind == "lq") {
    auto q = reg.num("q");
    if (!q) throw ConfigError(whence + ": regularizer.q required for kind = lq");
    cfg.reg = RegularizerSpec::power_lq(*q);
  } else if (rkind == "l1") {
    cfg.reg = RegularizerSpec::l1();
  } else if (rkind == "tv1d") {
    cfg.reg = RegularizerSpec::tv1d();
  } else {
    throw ConfigError(whence + ": regularizer.kind must be lq, l1 or tv1d");
  }
  reg.done();

  SectionReader noise(t, "noise", whence);
  cfg.delta_min = noise.num("delta_min").value_or(cfg.delta_min);
  cfg.delta_max = noise.num("delta_max").value_or(cfg.delta_max);
  cfg.levels = noise.integer("levels", cfg.levels);
  if (auto k = noise.num("kappa")) cfg.noise_kappa = *k;
  if (auto s = noise.num("seed")) cfg.seed = std::uint64_t(*s);
  cfg.absolute = noise.boolean("absolute").value_or(false);
  cfg.repeats = noise.integer("repeats", 1);
  noise.done();
  if (!(cfg.delta_min > 0.0) || !(cfg.delta_max > cfg.delta_min))
    throw ConfigError(whence + ": need 0 < delta_min < delta_max");
  if (cfg.levels < 1 || cfg.repeats < 1)
    throw ConfigError(whence + ": levels and repeats must be >= 1");

  SectionReader grid(t, "grid", whence);
  cfg.points_per_decade = grid.integer("points_per_decade", cfg.points_per_decade);
  if (auto a = grid.num("alpha_min")) cfg.alpha_min = *a;
  if (auto a = grid.num("alpha_max")) cfg.alpha_max = *a;
  cfg.solve_max_iters = grid.integer("solve_max_iters", cfg.solve_max_iters);
  cfg.solve_tol = grid.num("solve_tol").value_or(cfg.solve_tol);
  grid.done();

  SectionReader rules(t, "rules", whence);
  if (auto use = rules.str_array("use")) {
    cfg.rules.clear();
    for (const auto& name : *use) cfg.rules.push_back(rule_from_name(name));
    if (cfg.rules.empty()) throw ConfigError(whence + ": rules.use is empty");
  }
  rules.done();

  SectionReader output(t, "output", whence);
  cfg.output_dir = output.str("dir").value_or(cfg.output_dir);
  output.done();

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_toml(parse_toml(buf.str(), path), path);
}

}  // namespace tikrules
