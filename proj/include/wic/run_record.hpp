#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wic {

struct MetricsRow {
  int update = 0;
  double episodic_coverage = 0.0;  // mean over the batch's skill episodes
  int lifetime_coverage = 0;
  double mean_return = 0.0;        // mean undiscounted intrinsic return
  double objective_loss = 0.0;     // potential or discriminator loss
  double policy_entropy = 0.0;
  // Mean BFS distance of s_T from s_0 per skill; NaN when the batch holds
  // no episode of that skill.
  std::vector<double> endpoint_distance;
};

// Append-only metrics stream of one run. Update indices strictly increase and
// lifetime coverage never decreases.
class RunRecord {
 public:
  explicit RunRecord(int skill_count = 0) : skill_count_(skill_count) {}

  void append(MetricsRow row);

  int skill_count() const { return skill_count_; }
  const std::vector<MetricsRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  // Headered CSV with round-trip exact numbers.
  std::string to_csv() const;
  static RunRecord from_csv(std::string_view text);

  // NaN entries compare equal to NaN.
  friend bool operator==(const RunRecord& a, const RunRecord& b);

 private:
  int skill_count_;
  std::vector<MetricsRow> rows_;
};

}  // namespace wic
