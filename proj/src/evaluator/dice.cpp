#include "ascnet/evaluator/dice.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "ascnet/core/error.hpp"

namespace ascnet::evaluator {

double dice_score(const datapipe::Mask& pred, const datapipe::Mask& gt) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw config_error("dice_score: shape mismatch");
  }
  uint64_t inter = 0, size_sum = 0;
  for (size_t i = 0; i < pred.pixels.size(); ++i) {
    inter += pred.pixels[i] & gt.pixels[i];
    size_sum += pred.pixels[i] + gt.pixels[i];
  }
  if (size_sum == 0) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(size_sum);
}

std::vector<ScoreRow> score_table(const std::vector<SlicePair>& pairs, AggLevel level) {
  if (pairs.empty()) throw config_error("score_table: no prediction/ground-truth pairs");
  for (const auto& p : pairs) {
    if (p.pred == nullptr || p.gt == nullptr) throw config_error("score_table: null mask");
    if (p.pred->height != p.gt->height || p.pred->width != p.gt->width) {
      throw config_error("score_table: shape mismatch for subject " + p.subject_id);
    }
  }

  std::vector<ScoreRow> rows;
  if (level == AggLevel::slice_wise) {
    for (const auto& p : pairs) {
      rows.push_back({p.subject_id, p.slice_index, 1, dice_score(*p.pred, *p.gt)});
    }
    return rows;
  }

  // subject_wise: pool intersections and sizes across each subject's slices.
  struct Pool {
    uint64_t inter = 0;
    uint64_t size_sum = 0;
    int n_slices = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Pool> pools;
  for (const auto& p : pairs) {
    auto [it, inserted] = pools.try_emplace(p.subject_id);
    if (inserted) order.push_back(p.subject_id);
    for (size_t i = 0; i < p.pred->pixels.size(); ++i) {
      it->second.inter += p.pred->pixels[i] & p.gt->pixels[i];
      it->second.size_sum += p.pred->pixels[i] + p.gt->pixels[i];
    }
    it->second.n_slices += 1;
  }
  for (const auto& sid : order) {
    const Pool& pool = pools[sid];
    double dice = pool.size_sum == 0
                      ? 1.0
                      : 2.0 * static_cast<double>(pool.inter) / static_cast<double>(pool.size_sum);
    rows.push_back({sid, -1, pool.n_slices, dice});
  }
  return rows;
}

std::pair<double, double> aggregate(const std::vector<ScoreRow>& table) {
  if (table.empty()) throw config_error("aggregate: empty score table");
  double mean = 0.0;
  for (const auto& r : table) mean += r.dice;
  mean /= static_cast<double>(table.size());
  double var = 0.0;
  for (const auto& r : table) var += (r.dice - mean) * (r.dice - mean);
  var /= static_cast<double>(table.size());  // population std
  return {mean, std::sqrt(var)};
}

void write_score_csv(const std::string& path, const std::vector<ScoreRow>& table,
                     AggLevel level) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write score csv: " + path);
  if (level == AggLevel::subject_wise) {
    out << "subject_id,n_slices,dice\n";
    for (const auto& r : table) {
      out << r.subject_id << "," << r.n_slices << "," << r.dice << "\n";
    }
  } else {
    out << "subject_id,slice_index,dice\n";
    for (const auto& r : table) {
      out << r.subject_id << "," << r.slice_index << "," << r.dice << "\n";
    }
  }
}

void write_summary_json(const std::string& path, AggLevel level, double mean, double stddev,
                        size_t n) {
  nlohmann::json j;
  j["level"] = level == AggLevel::subject_wise ? "subject-wise" : "slice-wise";
  j["mean"] = mean;
  j["std"] = stddev;
  j["n"] = n;
  std::ofstream out(path);
  if (!out) throw io_error("cannot write summary json: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ascnet::evaluator
