#pragma once

#include "malab/geometry.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace malab {

/// Named scalar diagnostic with the location of its extremum. `series` holds (parameter, value)
/// pairs when the monitor is swept over a parameter such as the section height.
struct MonitorReport {
  std::string name;
  double max_value = 0.0;
  Vec argmax = Vec::Zero();
  std::vector<std::pair<double, double>> series;
  std::map<std::string, double> context;
};

}  // namespace malab
