#include "tarlm/periodogram.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace tarlm {

std::string Periodogram::to_csv() const {
  std::ostringstream out;
  out << "frequency,power\n";
  char buf[64];
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g\n", frequencies[i],
                  power[i]);
    out << buf;
  }
  return out.str();
}

Periodogram periodogram(const TimeSeries& series) {
  const std::size_t n = series.size();
  if (n < 8) {
    throw std::invalid_argument("periodogram: series length must be >= 8");
  }
  double mean = 0.0;
  for (double x : series.values) {
    mean += x;
  }
  mean /= static_cast<double>(n);

  Periodogram result;
  const std::size_t half = n / 2;
  result.frequencies.reserve(half);
  result.power.reserve(half);
  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t j = 1; j <= half; ++j) {
    const double freq =
        static_cast<double>(j) / static_cast<double>(n);
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double centered = series.values[t] - mean;
      const double angle = two_pi * freq * static_cast<double>(t + 1);
      re += centered * std::cos(angle);
      im -= centered * std::sin(angle);
    }
    result.frequencies.push_back(freq);
    result.power.push_back((re * re + im * im) / static_cast<double>(n));
  }
  return result;
}

}  // namespace tarlm
