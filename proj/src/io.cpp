#include "ernscat/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

namespace ern {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_series_csv(const std::string& path, const std::string& xname,
                      const std::string& yname, const Eigen::ArrayXd& x,
                      const Eigen::ArrayXd& y) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << xname << "," << yname << "\n";
  for (int i = 0; i < x.size(); ++i)
    out << format_double(x[i]) << "," << format_double(y[i]) << "\n";
}

void write_field_csv(const std::string& path, const ModeField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "v,r,value\n";
  for (int i = 0; i < field.strip.nv(); ++i)
    for (int j = 0; j < field.strip.nr(); ++j)
      out << format_double(field.strip.v(i)) << "," << format_double(field.strip.r(j)) << ","
          << format_double(field.values(i, j)) << "\n";
}

void write_field_binary(const std::string& path, const ModeField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const std::int64_t nv = field.strip.nv(), nr = field.strip.nr();
  out.write(reinterpret_cast<const char*>(&nv), sizeof nv);
  out.write(reinterpret_cast<const char*>(&nr), sizeof nr);
  for (std::int64_t i = 0; i < nv; ++i) {
    const double v = field.strip.v(static_cast<int>(i));
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  out.write(reinterpret_cast<const char*>(field.strip.radial.r.data()), nr * sizeof(double));
  for (std::int64_t i = 0; i < nv; ++i)
    for (std::int64_t j = 0; j < nr; ++j) {
      const double val = field.values(i, j);
      out.write(reinterpret_cast<const char*>(&val), sizeof val);
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ern
