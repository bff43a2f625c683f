#pragma once

#include <cstddef>
#include <string>

#include "tarlm/time_series.hpp"

namespace tarlm {

/// Where to take the series from: a CSV file, a column picked by name or
/// 0-based index, and an optional square-root transform (for count data).
///
/// CSV conventions, pinned for reproducibility: decimal point only, comment
/// lines starting with '#' ignored, header row optional (detected when the
/// first data line has any non-numeric field).
struct SeriesFile {
  std::string path;
  std::string column = "0";  // name, or 0-based index if all digits
  bool sqrt_transform = false;
};

/// Read one column into a TimeSeries. Throws IoError naming the offending
/// row/column for unreadable files, unknown columns, non-finite cells, and
/// negative values under the sqrt transform.
TimeSeries read_series_csv(const SeriesFile& file);

}  // namespace tarlm
