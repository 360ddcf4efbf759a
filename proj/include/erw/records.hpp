#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "erw/estimators.hpp"

namespace erw {

/// One estimator output row. Every record carries the exact seed and config
/// hash enabling bit-reproduction of the run that produced it.
struct ResultRecord {
  std::string method;
  int d = 0;
  std::string m;          // integer or "inf"
  double beta_or_t = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double ess = -1.0;      // -1 when not a weighted estimator
  std::int64_t replicates = 0;
  std::int64_t window = 0;
  double truncation_rate = 0.0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

std::string result_csv_header();
std::string result_csv_row(const ResultRecord& r);

ResultRecord record_of(const SpeedEstimate& est, std::uint64_t seed, const std::string& hash);

/// Minimal CSV assembly with %.17g doubles (bit-stable for identical runs).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<std::string>& fields);
  const std::string& text() const { return text_; }
  void write(const std::string& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

std::string json_escape(const std::string& s);

}  // namespace erw
