#pragma once

#include <cstdint>
#include <vector>

#include "mpsim/network.hpp"

namespace mpsim {

enum class VehicleClass : std::uint8_t { kCar = 0, kBus = 1 };

struct Vehicle {
  std::int32_t id = -1;
  VehicleClass klass = VehicleClass::kCar;
  int true_occupancy = 1;          // persons on board, >= 1
  double reported_occupancy = 1;   // sensor-side value; drifts for buses
  bool connected = true;           // shares its presence/occupancy when queued
  std::vector<LinkId> route;       // source link ... sink link
  int route_pos = 0;               // index of the link currently occupied
  double entry_time_s = 0;         // demand event time (includes blocked-entry wait)
  double exit_time_s = -1;         // set on discharge into the sink; -1 while inside
  int intersection_crossings = 0;
  std::uint64_t apc_seed = 0;      // per-bus counter stream for reporting noise
};

}  // namespace mpsim
