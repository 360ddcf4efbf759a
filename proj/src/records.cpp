#include "erw/records.hpp"

#include <fstream>
#include <stdexcept>

#include "erw/config.hpp"

namespace erw {

std::string result_csv_header() {
  return "method,d,m,beta_or_t,estimate,stderr,ess,replicates,window,truncation_rate,seed,config_hash";
}

std::string result_csv_row(const ResultRecord& r) {
  std::string s;
  s += r.method;
  s += "," + std::to_string(r.d);
  s += "," + r.m;
  s += "," + fmt_g17(r.beta_or_t);
  s += "," + fmt_g17(r.estimate);
  s += "," + fmt_g17(r.se);
  s += "," + fmt_g17(r.ess);
  s += "," + std::to_string(r.replicates);
  s += "," + std::to_string(r.window);
  s += "," + fmt_g17(r.truncation_rate);
  s += "," + std::to_string(r.seed);
  s += "," + r.config_hash;
  return s;
}

ResultRecord record_of(const SpeedEstimate& est, std::uint64_t seed, const std::string& hash) {
  ResultRecord r;
  r.method = speed_method_name(est.method);
  r.d = est.d;
  r.m = est.m == kInfiniteCookies ? "inf" : std::to_string(est.m);
  r.beta_or_t = est.beta_or_t;
  r.estimate = est.value;
  r.se = est.se;
  r.ess = est.ess;
  r.replicates = est.replicates;
  r.window = est.horizon > 0 ? est.horizon : est.window.future;
  r.truncation_rate = est.truncation_rate;
  r.seed = seed;
  r.config_hash = hash;
  return r;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ",";
    text_ += header[i];
  }
  text_ += "\n";
}

void CsvTable::add_row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::invalid_argument("CsvTable: column count mismatch");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) text_ += ",";
    text_ += fields[i];
  }
  text_ += "\n";
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("CsvTable: cannot write '" + path + "'");
  out << text_;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out += ch;
  }
  return out;
}

}  // namespace erw
