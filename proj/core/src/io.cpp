#include "filtfit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace filtfit {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  // %.17g is lossless for doubles; try the shorter %.15g first and keep it
  // when it round-trips, so common values stay readable.
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_signal_csv(const std::string& path, const ComplexSignal& s) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "tau,re,im\n";
  for (long i = 0; i < s.length(); ++i) {
    const long tau = s.support_start + i;
    const Complex v = s.values[static_cast<std::size_t>(i)];
    out << tau << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

ComplexSignal read_signal_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  // tolerate a UTF-8 BOM and trailing CR
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "tau,re,im") throw std::runtime_error(path + ": expected header tau,re,im");

  std::vector<std::pair<long, Complex>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    long tau = 0;
    double re = 0.0, im = 0.0;
    char extra = 0;
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf%c", &tau, &re, &im, &extra) < 3)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad row '" + line + "'");
    rows.emplace_back(tau, Complex{re, im});
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const long start = rows.front().first;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].first != start + static_cast<long>(i))
      throw std::runtime_error(path + ": tau values must form a contiguous range");
  }
  ComplexVector values(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) values[i] = rows[i].second;
  return {std::move(values), start};
}

}  // namespace filtfit
