#include "wic/run_record.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "wic/errors.hpp"

namespace wic {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_num(const std::string& field, int line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || *end != '\0')
    throw ConfigError("run record line " + std::to_string(line) + ": bad number '" + field + "'");
  return v;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  for (std::string field; std::getline(in, field, ',');) out.push_back(field);
  return out;
}

constexpr int kFixedColumns = 6;

}  // namespace

void RunRecord::append(MetricsRow row) {
  require(static_cast<int>(row.endpoint_distance.size()) == skill_count_,
          "run record: endpoint column count must equal K");
  if (!rows_.empty()) {
    require(row.update > rows_.back().update, "run record: update index must increase");
    require(row.lifetime_coverage >= rows_.back().lifetime_coverage,
            "run record: lifetime coverage decreased");
  }
  rows_.push_back(std::move(row));
}

std::string RunRecord::to_csv() const {
  std::string out =
      "update,episodic_coverage,lifetime_coverage,mean_return,objective_loss,policy_entropy";
  for (int w = 0; w < skill_count_; ++w) out += ",endpoint_distance_" + std::to_string(w);
  out += '\n';
  for (const auto& r : rows_) {
    out += std::to_string(r.update) + ',' + num(r.episodic_coverage) + ',' +
           std::to_string(r.lifetime_coverage) + ',' + num(r.mean_return) + ',' +
           num(r.objective_loss) + ',' + num(r.policy_entropy);
    for (double d : r.endpoint_distance) out += ',' + num(d);
    out += '\n';
  }
  return out;
}

RunRecord RunRecord::from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("run record: missing header");
  const auto columns = split(header);
  if (static_cast<int>(columns.size()) < kFixedColumns || columns[0] != "update")
    throw ConfigError("run record: unexpected header");
  RunRecord record(static_cast<int>(columns.size()) - kFixedColumns);
  int line_no = 1;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != columns.size())
      throw ConfigError("run record line " + std::to_string(line_no) + ": wrong field count");
    MetricsRow row;
    row.update = static_cast<int>(parse_num(f[0], line_no));
    row.episodic_coverage = parse_num(f[1], line_no);
    row.lifetime_coverage = static_cast<int>(parse_num(f[2], line_no));
    row.mean_return = parse_num(f[3], line_no);
    row.objective_loss = parse_num(f[4], line_no);
    row.policy_entropy = parse_num(f[5], line_no);
    for (std::size_t i = kFixedColumns; i < f.size(); ++i)
      row.endpoint_distance.push_back(parse_num(f[i], line_no));
    record.append(std::move(row));
  }
  return record;
}

bool operator==(const RunRecord& a, const RunRecord& b) {
  if (a.skill_count_ != b.skill_count_ || a.rows_.size() != b.rows_.size()) return false;
  for (std::size_t i = 0; i < a.rows_.size(); ++i) {
    const MetricsRow& x = a.rows_[i];
    const MetricsRow& y = b.rows_[i];
    if (x.update != y.update || x.lifetime_coverage != y.lifetime_coverage ||
        !same(x.episodic_coverage, y.episodic_coverage) || !same(x.mean_return, y.mean_return) ||
        !same(x.objective_loss, y.objective_loss) || !same(x.policy_entropy, y.policy_entropy))
      return false;
    for (std::size_t w = 0; w < x.endpoint_distance.size(); ++w)
      if (!same(x.endpoint_distance[w], y.endpoint_distance[w])) return false;
  }
  return true;
}

}  // namespace wic
