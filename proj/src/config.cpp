#include "erw/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace erw {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_beta_grid(const std::vector<double>& grid) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) s += ",";
    s += fmt_g17(grid[i]);
  }
  return s;
}

std::vector<double> parse_beta_grid(const std::string& text) {
  std::vector<double> grid;
  std::string field;
  std::stringstream ss(text);
  while (std::getline(ss, field, ',')) {
    if (!field.empty()) grid.push_back(std::stod(field));
  }
  if (grid.empty()) throw std::invalid_argument("empty beta grid");
  return grid;
}

namespace {

std::string m_to_text(int m) { return m == kInfiniteCookies ? "inf" : std::to_string(m); }
int m_from_text(const std::string& s) { return s == "inf" ? kInfiniteCookies : std::stoi(s); }

void validate(const ExperimentConfig& c) {
  if (c.d < 1) throw std::invalid_argument("config: d >= 1 required");
  if (c.m < 1) throw std::invalid_argument("config: m >= 1 (or inf) required");
  if (c.horizon < 1) throw std::invalid_argument("config: horizon >= 1 required");
  if (c.window.past < 0 || c.window.future < 1) throw std::invalid_argument("config: bad window");
  if (c.replicates < 1) throw std::invalid_argument("config: replicates >= 1 required");
  if (!(c.beta >= -1.0 && c.beta <= 1.0)) throw std::invalid_argument("config: beta outside [-1,1]");
  for (double b : c.beta_grid)
    if (!(b >= -1.0 && b <= 1.0)) throw std::invalid_argument("config: grid beta outside [-1,1]");
  if (!(c.t >= 0.0 && c.t <= 1.0)) throw std::invalid_argument("config: t outside [0,1]");
  if (!(c.eps > 0.0 && c.eps <= 1.0)) throw std::invalid_argument("config: eps outside (0,1]");
  if (c.threads < 1) throw std::invalid_argument("config: threads >= 1 required");
  if (c.max_rejection_attempts < 1) throw std::invalid_argument("config: bad rejection budget");
  CookieEnvironment::parse(c.env);  // throws on malformed spec
}

}  // namespace

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> kv;
  kv["experiment"] = experiment;
  kv["d"] = std::to_string(d);
  kv["m"] = m_to_text(m);
  kv["env"] = env;
  kv["horizon"] = std::to_string(horizon);
  kv["window_past"] = std::to_string(window.past);
  kv["window_future"] = std::to_string(window.future);
  kv["replicates"] = std::to_string(replicates);
  kv["env_draws"] = std::to_string(env_draws);
  kv["replicates_per_env"] = std::to_string(replicates_per_env);
  kv["beta_grid"] = format_beta_grid(beta_grid);
  kv["beta"] = fmt_g17(beta);
  kv["t"] = fmt_g17(t);
  kv["eps"] = fmt_g17(eps);
  kv["dim"] = std::to_string(dim);
  kv["n"] = std::to_string(n);
  kv["seed"] = std::to_string(seed);
  kv["stream0"] = std::to_string(stream0);
  kv["threads"] = std::to_string(threads);
  kv["out"] = out_dir;
  kv["max_rejection_attempts"] = std::to_string(max_rejection_attempts);
  kv["ess_warn_fraction"] = fmt_g17(ess_warn_fraction);
  kv["mechanism"] = mechanism;
  kv["mode"] = mode;
  return kv;
}

ExperimentConfig ExperimentConfig::from_map(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  auto get = [&kv](const std::string& key, auto&& apply) {
    auto it = kv.find(key);
    if (it != kv.end()) apply(it->second);
  };
  get("experiment", [&](const std::string& v) { c.experiment = v; });
  get("d", [&](const std::string& v) { c.d = std::stoi(v); });
  get("m", [&](const std::string& v) { c.m = m_from_text(v); });
  get("env", [&](const std::string& v) { c.env = v; });
  get("horizon", [&](const std::string& v) { c.horizon = std::stoll(v); });
  get("window_past", [&](const std::string& v) { c.window.past = std::stoll(v); });
  get("window_future", [&](const std::string& v) { c.window.future = std::stoll(v); });
  get("replicates", [&](const std::string& v) { c.replicates = std::stoll(v); });
  get("env_draws", [&](const std::string& v) { c.env_draws = std::stoll(v); });
  get("replicates_per_env", [&](const std::string& v) { c.replicates_per_env = std::stoll(v); });
  get("beta_grid", [&](const std::string& v) { c.beta_grid = parse_beta_grid(v); });
  get("beta", [&](const std::string& v) { c.beta = std::stod(v); });
  get("t", [&](const std::string& v) { c.t = std::stod(v); });
  get("eps", [&](const std::string& v) { c.eps = std::stod(v); });
  get("dim", [&](const std::string& v) { c.dim = std::stoi(v); });
  get("n", [&](const std::string& v) { c.n = std::stoi(v); });
  get("seed", [&](const std::string& v) { c.seed = std::stoull(v); });
  get("stream0", [&](const std::string& v) { c.stream0 = std::stoull(v); });
  get("threads", [&](const std::string& v) { c.threads = std::stoi(v); });
  get("out", [&](const std::string& v) { c.out_dir = v; });
  get("max_rejection_attempts", [&](const std::string& v) { c.max_rejection_attempts = std::stoll(v); });
  get("ess_warn_fraction", [&](const std::string& v) { c.ess_warn_fraction = std::stod(v); });
  get("mechanism", [&](const std::string& v) { c.mechanism = v; });
  get("mode", [&](const std::string& v) { c.mode = v; });
  for (const auto& [key, value] : kv) {
    static const std::map<std::string, std::string> probe = ExperimentConfig{}.to_map();
    if (!probe.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
    (void)value;
  }
  validate(c);
  return c;
}

std::string ExperimentConfig::emit() const {
  std::string text;
  for (const auto& [key, value] : to_map()) text += key + " = " + value + "\n";
  return text;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: expected 'key = value': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!kv.emplace(key, value).second)
      throw std::invalid_argument("config: duplicate key '" + key + "'");
  }
  return from_map(kv);
}

ExperimentConfig ExperimentConfig::load(
    const std::string& path, const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::map<std::string, std::string> kv;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    kv = parse_text(buf.str()).to_map();
  }
  for (const auto& [key, value] : overrides) kv[key] = value;
  return from_map(kv);
}

std::string ExperimentConfig::hash() const {
  std::string text = emit();
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace erw
