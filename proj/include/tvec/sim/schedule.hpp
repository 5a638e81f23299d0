#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace tvec::sim {

/// Piecewise-constant reference: values[i] holds on [times[i], times[i+1]).
struct StepSchedule {
  std::vector<double> times{0.0};
  std::vector<std::vector<double>> values;

  void validate(std::size_t dim) const {
    if (times.empty() || times.front() != 0.0) throw std::invalid_argument("schedule: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1])) throw std::invalid_argument("schedule: times must be strictly increasing");
    if (values.size() != times.size()) throw std::invalid_argument("schedule: one value per interval required");
    for (const auto& v : values)
      if (v.size() != dim) {
        std::ostringstream msg;
        msg << "schedule: reference values must have dimension " << dim;
        throw std::invalid_argument(msg.str());
      }
  }

  std::size_t interval(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  }
  std::span<const double> value_at(double t) const { return values[interval(t)]; }
  double interval_start(std::size_t i) const { return times[i]; }
  double interval_end(std::size_t i) const {
    return i + 1 < times.size() ? times[i + 1] : std::numeric_limits<double>::infinity();
  }
  std::size_t size() const { return times.size(); }
};

}  // namespace tvec::sim
