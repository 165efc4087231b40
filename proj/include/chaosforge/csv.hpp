#pragma once
#include <string>
#include <vector>

#include "chaosforge/series.hpp"

namespace chaosforge {

// Series CSV: optional leading '#' comment lines, then a header row
// "time,<name>:obs,...,<name>:act", one row per timestep. Action-only
// files (e.g. future conditioning signals) need require_observation=false.
MultivariateSeries read_series_csv(const std::string& path, bool require_observation = true);

// meta, when nonempty, is written as a single leading "# " comment line
void write_series_csv(const std::string& path, const MultivariateSeries& s,
                      const std::string& meta = "");

// Events CSV: header "start_index,duration,magnitude"
std::vector<EventRecord> read_events_csv(const std::string& path);

std::string format_double(double v);  // shortest round-trip representation

}  // namespace chaosforge
