// CSV / JSON / flat-binary emitters.  CSV numbers are printed with %.17g so
// identical runs produce byte-identical files.
#pragma once

#include <json.hpp>
#include <string>

#include "ernscat/grid.hpp"

namespace ern {

std::string format_double(double x);

void write_series_csv(const std::string& path, const std::string& xname,
                      const std::string& yname, const Eigen::ArrayXd& x,
                      const Eigen::ArrayXd& y);

// Field snapshot as (v, r, value) rows.
void write_field_csv(const std::string& path, const ModeField& field);

// Flat binary layout: int64 nv, int64 nr, nv doubles (v), nr doubles (r),
// then nv*nr doubles row-major (v-major).
void write_field_binary(const std::string& path, const ModeField& field);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace ern
