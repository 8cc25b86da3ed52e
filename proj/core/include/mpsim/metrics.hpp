#pragma once

#include <array>
#include <vector>

#include "mpsim/dynamics.hpp"
#include "mpsim/vehicle.hpp"

namespace mpsim {

struct VehicleRecord {
  VehicleClass klass = VehicleClass::kCar;
  int occupancy = 1;       // true persons, regardless of what sensing exposed
  double entry_s = 0;
  double exit_s = -1;      // -1 while censored
  bool censored = false;   // still inside at the horizon
};

struct RunMetrics {
  double horizon_s = 0;
  std::vector<VehicleRecord> ledger;
  std::vector<LedgerSample> accumulation;  // per-minute samples
};

struct BucketStat {
  long long count = 0;
  double total_time_h = 0;
  double mean_time_s = 0;
};

// Occupancy classes: cars split by persons 1..5, all buses pooled as "6+".
inline constexpr int kOccupancyBuckets = 6;
int occupancy_bucket(VehicleClass klass, int occupancy);
const char* bucket_label(int bucket);

struct RunAggregates {
  double private_vtt_h = 0;  // vehicle-hours, cars
  double bus_vtt_h = 0;      // vehicle-hours, buses
  double ptt_pax_h = 0;      // person-hours, everyone
  long long private_count = 0;
  long long bus_count = 0;
  long long censored = 0;
  double final_accumulation = 0;
  std::array<BucketStat, kOccupancyBuckets> buckets{};
};

// Censored vehicles contribute (horizon - entry) and are tallied separately.
RunAggregates aggregate(const RunMetrics& m);

// 100 * (value - baseline) / baseline; requires a positive baseline.
double percent_change(double value, double baseline);

struct MeanSe {
  double mean = 0;
  double se = 0;  // sample std (n-1) / sqrt(n); zero for a single value
};
MeanSe summarize(const std::vector<double>& xs);

// Per-pair percent changes of `values` against `baselines` (paired seeds),
// summarized across pairs.
MeanSe paired_percent_change(const std::vector<double>& values,
                             const std::vector<double>& baselines);

}  // namespace mpsim
