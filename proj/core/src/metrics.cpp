#include "mpsim/metrics.hpp"

#include <cmath>

namespace mpsim {

int occupancy_bucket(VehicleClass klass, int occupancy) {
  if (klass == VehicleClass::kBus) return kOccupancyBuckets - 1;
  if (occupancy < 1) throw InvariantViolation("occupancy_bucket: occupancy below 1");
  return std::min(occupancy, 5) - 1;
}

const char* bucket_label(int bucket) {
  static const char* labels[kOccupancyBuckets] = {"1", "2", "3", "4", "5", "6+"};
  if (bucket < 0 || bucket >= kOccupancyBuckets)
    throw InvariantViolation("bucket_label: index out of range");
  return labels[bucket];
}

RunAggregates aggregate(const RunMetrics& m) {
  RunAggregates agg;
  std::array<double, kOccupancyBuckets> bucket_time_s{};
  for (const VehicleRecord& r : m.ledger) {
    double end = r.censored ? m.horizon_s : r.exit_s;
    double tt_s = end - r.entry_s;
    if (tt_s < 0) throw InvariantViolation("aggregate: negative travel time");
    double tt_h = tt_s / 3600.0;
    if (r.klass == VehicleClass::kBus) {
      agg.bus_vtt_h += tt_h;
      ++agg.bus_count;
    } else {
      agg.private_vtt_h += tt_h;
      ++agg.private_count;
    }
    agg.ptt_pax_h += tt_h * r.occupancy;
    if (r.censored) ++agg.censored;
    int b = occupancy_bucket(r.klass, r.occupancy);
    ++agg.buckets[static_cast<std::size_t>(b)].count;
    bucket_time_s[static_cast<std::size_t>(b)] += tt_s;
  }
  for (int b = 0; b < kOccupancyBuckets; ++b) {
    BucketStat& s = agg.buckets[static_cast<std::size_t>(b)];
    s.total_time_h = bucket_time_s[static_cast<std::size_t>(b)] / 3600.0;
    s.mean_time_s = s.count > 0 ? bucket_time_s[static_cast<std::size_t>(b)] /
                                      static_cast<double>(s.count)
                                : 0;
  }
  if (!m.accumulation.empty())
    agg.final_accumulation = static_cast<double>(m.accumulation.back().accumulation);
  return agg;
}

double percent_change(double value, double baseline) {
  if (baseline <= 0)
    throw ConfigError("percent_change: baseline must be positive");
  return 100.0 * (value - baseline) / baseline;
}

MeanSe summarize(const std::vector<double>& xs) {
  if (xs.empty()) throw ConfigError("summarize: empty sample");
  MeanSe out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() == 1) return out;
  double ss = 0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  double var = ss / static_cast<double>(xs.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

MeanSe paired_percent_change(const std::vector<double>& values,
                             const std::vector<double>& baselines) {
  if (values.size() != baselines.size() || values.empty())
    throw ConfigError("paired_percent_change: samples must pair up");
  std::vector<double> pct(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    pct[i] = percent_change(values[i], baselines[i]);
  return summarize(pct);
}

}  // namespace mpsim
