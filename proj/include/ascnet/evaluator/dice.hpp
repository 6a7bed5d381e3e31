#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ascnet/datapipe/slice.hpp"

namespace ascnet::evaluator {

// 2|A^B| / (|A|+|B|); two empty masks score 1.0 (a correct "no anomaly").
double dice_score(const datapipe::Mask& pred, const datapipe::Mask& gt);

struct SlicePair {
  std::string subject_id;
  int slice_index = 0;
  const datapipe::Mask* pred = nullptr;
  const datapipe::Mask* gt = nullptr;
};

struct ScoreRow {
  std::string subject_id;
  int slice_index = 0;  // -1 for subject-level rows
  int n_slices = 1;
  double dice = 0.0;
};

enum class AggLevel { subject_wise, slice_wise };

// slice_wise: one Dice per slice. subject_wise: intersections and mask sizes
// pool over each subject's slices before the ratio, one row per subject
// (order of first appearance).
std::vector<ScoreRow> score_table(const std::vector<SlicePair>& pairs, AggLevel level);

// Mean and population standard deviation of the table's Dice column.
std::pair<double, double> aggregate(const std::vector<ScoreRow>& table);

void write_score_csv(const std::string& path, const std::vector<ScoreRow>& table,
                     AggLevel level);
void write_summary_json(const std::string& path, AggLevel level, double mean, double stddev,
                        size_t n);

}  // namespace ascnet::evaluator
