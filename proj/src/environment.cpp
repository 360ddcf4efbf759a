#include "erw/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace erw {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Splits "a,b,c" at top-level commas (paren depth 0).
std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// "key=value" with value possibly containing parens/commas.
std::pair<std::string, std::string> split_kv(const std::string& s) {
  auto eq = s.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("expected key=value in '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

// "name(body)" -> (name, body)
std::pair<std::string, std::string> split_call(const std::string& s) {
  auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw std::invalid_argument("expected name(...) in '" + s + "'");
  return {s.substr(0, open), s.substr(open + 1, s.size() - open - 2)};
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

void check_beta_range(double v) {
  if (!(v >= -1.0 && v <= 1.0))
    throw std::invalid_argument("cookie value outside [-1,1]: " + fmt_double(v));
}

}  // namespace

// --- MarginalLaw ----------------------------------------------------------------

MarginalLaw MarginalLaw::atoms(std::vector<std::pair<double, double>> value_weight) {
  if (value_weight.empty()) throw std::invalid_argument("MarginalLaw: no atoms");
  std::sort(value_weight.begin(), value_weight.end());
  MarginalLaw law;
  double total = 0.0;
  for (auto& [v, w] : value_weight) {
    check_beta_range(v);
    if (!(w > 0.0)) throw std::invalid_argument("MarginalLaw: nonpositive weight");
    total += w;
  }
  double cum = 0.0;
  for (auto& [v, w] : value_weight) {
    cum += w / total;
    law.values_.push_back(v);
    law.cum_.push_back(cum);
  }
  law.cum_.back() = 1.0;
  return law;
}

MarginalLaw MarginalLaw::uniform(double lo, double hi) {
  check_beta_range(lo);
  check_beta_range(hi);
  if (!(lo < hi)) throw std::invalid_argument("MarginalLaw::uniform: need lo < hi");
  MarginalLaw law;
  law.uniform_ = true;
  law.lo_ = lo;
  law.hi_ = hi;
  return law;
}

double MarginalLaw::quantile(double u) const {
  if (uniform_) return lo_ + u * (hi_ - lo_);
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u,
                             [](double c, double uu) { return c <= uu; });
  if (it == cum_.end()) --it;
  return values_[static_cast<std::size_t>(it - cum_.begin())];
}

double MarginalLaw::mean() const {
  if (uniform_) return 0.5 * (lo_ + hi_);
  double m = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    m += values_[i] * (cum_[i] - prev);
    prev = cum_[i];
  }
  return m;
}

std::vector<std::pair<double, double>> MarginalLaw::atom_list() const {
  std::vector<std::pair<double, double>> out;
  double prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out.emplace_back(values_[i], cum_[i] - prev);
    prev = cum_[i];
  }
  return out;
}

double MarginalLaw::max_abs() const {
  if (uniform_) return std::max(std::fabs(lo_), std::fabs(hi_));
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

std::string MarginalLaw::text() const {
  if (uniform_) return "uniform(" + fmt_double(lo_) + "," + fmt_double(hi_) + ")";
  std::string s = "atoms(";
  double prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(values_[i]) + "@" + fmt_double(cum_[i] - prev);
    prev = cum_[i];
  }
  return s + ")";
}

MarginalLaw MarginalLaw::parse(const std::string& s) {
  auto [name, body] = split_call(s);
  if (name == "uniform") {
    auto parts = split_top(body);
    if (parts.size() != 2) throw std::invalid_argument("uniform(lo,hi) expected");
    return uniform(parse_double(parts[0]), parse_double(parts[1]));
  }
  if (name == "atoms") {
    std::vector<std::pair<double, double>> vw;
    for (const std::string& p : split_top(body)) {
      auto at = p.find('@');
      if (at == std::string::npos) throw std::invalid_argument("atom 'value@weight' expected");
      vw.emplace_back(parse_double(p.substr(0, at)), parse_double(p.substr(at + 1)));
    }
    return atoms(std::move(vw));
  }
  throw std::invalid_argument("unknown law '" + name + "'");
}

bool MarginalLaw::quantile_dominated_by(const MarginalLaw& other) const {
  // Candidate u values: both laws' jump points, approached from the left, plus
  // the interval endpoints. Quantiles are step/affine, so these suffice.
  std::vector<double> us = {0.0, std::nextafter(1.0, 0.0)};
  auto add_breaks = [&us](const MarginalLaw& l) {
    if (l.uniform_) return;
    for (double c : l.cum_) {
      us.push_back(std::min(c, std::nextafter(1.0, 0.0)));
      if (c > 0.0) us.push_back(std::nextafter(c, 0.0));
    }
  };
  add_breaks(*this);
  add_breaks(other);
  for (double u : us) {
    if (quantile(u) > other.quantile(u) + 1e-15) return false;
  }
  return true;
}

// --- CookieEnvironment ----------------------------------------------------------

namespace {
void check_m(int m) {
  if (m < 1) throw std::invalid_argument("cookie count m must be >= 1 (or infinite)");
}
}  // namespace

CookieEnvironment CookieEnvironment::deterministic(double beta, int m) {
  check_beta_range(beta);
  check_m(m);
  CookieEnvironment env;
  env.kind_ = EnvKind::Deterministic;
  env.m_ = m;
  env.iden_ = true;
  env.stack_ = {beta};
  return env;
}

CookieEnvironment CookieEnvironment::deterministic_stack(std::vector<double> stack) {
  if (stack.empty()) throw std::invalid_argument("deterministic_stack: empty stack");
  for (double v : stack) check_beta_range(v);
  CookieEnvironment env;
  env.kind_ = EnvKind::Deterministic;
  env.m_ = static_cast<int>(stack.size());
  env.iden_ = false;
  env.stack_ = std::move(stack);
  return env;
}

CookieEnvironment CookieEnvironment::iid(std::uint64_t env_seed, MarginalLaw law, int m,
                                         bool iden) {
  check_m(m);
  CookieEnvironment env;
  env.kind_ = EnvKind::IIDLazy;
  env.m_ = m;
  env.iden_ = iden;
  env.env_seed_ = env_seed;
  env.law_ = std::move(law);
  return env;
}

CookieEnvironment CookieEnvironment::vertical_stationary(std::uint64_t env_seed, MarginalLaw law,
                                                         int m, bool iden) {
  CookieEnvironment env = iid(env_seed, std::move(law), m, iden);
  env.kind_ = EnvKind::VerticalStationary;
  return env;
}

CookieEnvironment CookieEnvironment::coupled(const CookieEnvironment& lower,
                                             const CookieEnvironment& upper, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("coupled: t outside [0,1]");
  if (lower.kind_ == EnvKind::CoupledPair || upper.kind_ == EnvKind::CoupledPair)
    throw std::invalid_argument("coupled: nested pairs not supported");
  if (lower.kind_ != upper.kind_ || lower.m_ != upper.m_ || lower.iden_ != upper.iden_)
    throw std::invalid_argument("coupled: sub-environments must share kind, m and iden");
  if (lower.kind_ == EnvKind::Deterministic) {
    if (lower.stack_.size() != upper.stack_.size())
      throw std::invalid_argument("coupled: stack length mismatch");
    for (std::size_t i = 0; i < lower.stack_.size(); ++i)
      if (lower.stack_[i] > upper.stack_[i])
        throw std::invalid_argument("coupled: lower stack exceeds upper");
  } else {
    if (lower.env_seed_ != upper.env_seed_)
      throw std::invalid_argument("coupled: lazy sub-environments must share env_seed");
    if (!lower.law_->quantile_dominated_by(*upper.law_))
      throw std::invalid_argument("coupled: lower law not quantile-dominated by upper");
  }
  CookieEnvironment env;
  env.kind_ = EnvKind::CoupledPair;
  env.m_ = lower.m_;
  env.iden_ = lower.iden_;
  env.t_ = t;
  env.lower_ = std::make_shared<CookieEnvironment>(lower);
  env.upper_ = std::make_shared<CookieEnvironment>(upper);
  return env;
}

double CookieEnvironment::beta(const std::int32_t* coords, int dim, int k) const {
  if (k < 1) throw std::invalid_argument("beta: visit index k must be >= 1");
  if (k > m_) return 0.0;  // no cookie left => symmetric step
  switch (kind_) {
    case EnvKind::Deterministic:
      return iden_ ? stack_[0] : stack_[static_cast<std::size_t>(k - 1)];
    case EnvKind::IIDLazy: {
      std::uint64_t extra = iden_ ? 0u : static_cast<std::uint64_t>(k);
      return law_->quantile(u64_to_unit(hash_site(env_seed_, coords, dim, extra)));
    }
    case EnvKind::VerticalStationary: {
      std::uint64_t extra = iden_ ? 0u : static_cast<std::uint64_t>(k);
      return law_->quantile(u64_to_unit(hash_site(env_seed_, coords + 1, dim - 1, extra)));
    }
    case EnvKind::CoupledPair:
      return (1.0 - t_) * lower_->beta(coords, dim, k) + t_ * upper_->beta(coords, dim, k);
  }
  return 0.0;
}

std::pair<double, double> CookieEnvironment::beta_pair(const std::int32_t* coords, int dim,
                                                       int k) const {
  if (kind_ != EnvKind::CoupledPair) throw std::logic_error("beta_pair: not a coupled pair");
  if (k > m_) return {0.0, 0.0};
  return {lower_->beta(coords, dim, k), upper_->beta(coords, dim, k)};
}

double CookieEnvironment::sigma_bound() const {
  switch (kind_) {
    case EnvKind::Deterministic: {
      double s = 0.0;
      for (double v : stack_) s = std::max(s, std::fabs(v));
      return s;
    }
    case EnvKind::IIDLazy:
    case EnvKind::VerticalStationary:
      return law_->max_abs();
    case EnvKind::CoupledPair:
      return std::max(lower_->sigma_bound(), upper_->sigma_bound());
  }
  return 0.0;
}

CookieEnvironment CookieEnvironment::with_seed(std::uint64_t env_seed) const {
  CookieEnvironment env = *this;
  if (kind_ == EnvKind::CoupledPair) {
    env.lower_ = std::make_shared<CookieEnvironment>(lower_->with_seed(env_seed));
    env.upper_ = std::make_shared<CookieEnvironment>(upper_->with_seed(env_seed));
  } else {
    env.env_seed_ = env_seed;
  }
  return env;
}

CookieEnvironment CookieEnvironment::at_t(double t) const {
  if (kind_ != EnvKind::CoupledPair) throw std::logic_error("at_t: not a coupled pair");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("at_t: t outside [0,1]");
  CookieEnvironment env = *this;
  env.t_ = t;
  return env;
}

CookieEnvironment interpolate(const CookieEnvironment& pair, double t) { return pair.at_t(t); }

std::string CookieEnvironment::text() const {
  std::string ms = infinite_m() ? "inf" : std::to_string(m_);
  switch (kind_) {
    case EnvKind::Deterministic:
      if (iden_) return "det(beta=" + fmt_double(stack_[0]) + ",m=" + ms + ")";
      else {
        std::string s = "det(stack=";
        for (std::size_t i = 0; i < stack_.size(); ++i) {
          if (i) s += "|";
          s += fmt_double(stack_[i]);
        }
        return s + ")";
      }
    case EnvKind::IIDLazy:
    case EnvKind::VerticalStationary: {
      std::string name = kind_ == EnvKind::IIDLazy ? "iid" : "vert";
      return name + "(seed=" + std::to_string(env_seed_) + ",m=" + ms +
             ",iden=" + (iden_ ? "1" : "0") + ",law=" + law_->text() + ")";
    }
    case EnvKind::CoupledPair:
      return "pair(t=" + fmt_double(t_) + ",lower=" + lower_->text() +
             ",upper=" + upper_->text() + ")";
  }
  return {};
}

CookieEnvironment CookieEnvironment::parse(const std::string& s) {
  auto [name, body] = split_call(s);
  std::map<std::string, std::string> kv;
  for (const std::string& part : split_top(body)) kv.insert(split_kv(part));
  auto need = [&kv, &s](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing '" + key + "' in '" + s + "'");
    return it->second;
  };
  auto parse_m = [](const std::string& v) {
    return v == "inf" ? kInfiniteCookies : std::stoi(v);
  };
  if (name == "det") {
    if (kv.count("stack")) {
      std::vector<double> stack;
      std::string field;
      for (char ch : need("stack") + "|") {
        if (ch == '|') {
          stack.push_back(parse_double(field));
          field.clear();
        } else {
          field += ch;
        }
      }
      return deterministic_stack(std::move(stack));
    }
    return deterministic(parse_double(need("beta")), parse_m(need("m")));
  }
  if (name == "iid" || name == "vert") {
    std::uint64_t seed = std::stoull(need("seed"));
    int m = parse_m(need("m"));
    bool iden = need("iden") == "1";
    MarginalLaw law = MarginalLaw::parse(need("law"));
    return name == "iid" ? iid(seed, std::move(law), m, iden)
                         : vertical_stationary(seed, std::move(law), m, iden);
  }
  if (name == "pair") {
    return coupled(parse(need("lower")), parse(need("upper")), parse_double(need("t")));
  }
  throw std::invalid_argument("unknown environment '" + name + "'");
}

// --- finite samples and e1 permutation -------------------------------------------

EnvSample materialize(const CookieEnvironment& env, const std::vector<LatticePoint>& sites,
                      int max_k) {
  EnvSample out;
  int rows = env.infinite_m() ? max_k : std::min(env.m(), max_k);
  for (const LatticePoint& y : sites) {
    std::vector<double> stack;
    stack.reserve(static_cast<std::size_t>(rows));
    for (int k = 1; k <= rows; ++k) stack.push_back(env.beta(y, k));
    out.emplace(y, std::move(stack));
  }
  return out;
}

EnvSample e1_permute(const EnvSample& sample, const LinePermutation& perm) {
  for (const auto& [z, line] : perm) {
    std::set<std::int32_t> images;
    for (const auto& [x, fx] : line) {
      if (!images.insert(fx).second)
        throw std::invalid_argument("e1_permute: line map not injective");
    }
  }
  EnvSample out;
  for (const auto& [y, stack] : sample) {
    std::vector<std::int32_t> z(y.vertical().begin(), y.vertical().end());
    std::int32_t x = y.horizontal();
    auto line = perm.find(z);
    if (line != perm.end()) {
      auto it = line->second.find(x);
      if (it != line->second.end()) x = it->second;
    }
    LatticePoint src = y;
    src.c[0] = x;
    auto found = sample.find(src);
    if (found == sample.end())
      throw std::invalid_argument("e1_permute: permutation target outside sample");
    out.emplace(y, found->second);
  }
  return out;
}

}  // namespace erw
