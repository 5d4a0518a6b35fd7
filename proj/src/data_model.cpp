#include "windfield/data_model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "windfield/errors.hpp"

namespace windfield::data {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
  if (from + count > s.size()) return false;
  for (std::size_t i = from; i < from + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

int to_int(const std::string& s, std::size_t from, std::size_t count) {
  int v = 0;
  for (std::size_t i = from; i < from + count; ++i) v = v * 10 + (s[i] - '0');
  return v;
}

// Days between 1970-01-01 and y-m-d in the proleptic Gregorian calendar.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const int yoe = static_cast<int>(y - era * 400);
  const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

double parse_double_field(const std::string& field, const char* name,
                          std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("line " + std::to_string(line_no) + ": field '" + name +
                    "' is not a number: '" + field + "'");
  }
  if (!std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ": field '" + name +
                    "' is not finite");
  }
  return value;
}

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void validate_month_filter(const std::vector<std::string>& months) {
  for (const auto& m : months) {
    const bool ok = m.size() == 7 && all_digits(m, 0, 4) && m[4] == '-' &&
                    all_digits(m, 5, 2) && to_int(m, 5, 2) >= 1 &&
                    to_int(m, 5, 2) <= 12;
    if (!ok) {
      throw ConfigError("month filter entry '" + m +
                        "' is not of the form YYYY-MM");
    }
  }
}

}  // namespace

void ProjectionParams::validate() const {
  if (!(semi_major_axis > 0.0) || !std::isfinite(semi_major_axis) ||
      !(flattening > 0.0) || !(flattening < 0.01) ||
      !(scale_factor > 0.9) || !(scale_factor <= 1.1) ||
      !std::isfinite(central_meridian_deg) || !std::isfinite(false_easting) ||
      !std::isfinite(false_northing)) {
    throw ConfigError("invalid projection parameters");
  }
}

std::int64_t parse_time_iso8601(const std::string& text) {
  // YYYY-MM-DD[T ]HH:MM:SS with optional trailing Z.
  const bool shape_ok =
      (text.size() == 19 || text.size() == 20) && all_digits(text, 0, 4) &&
      text[4] == '-' && all_digits(text, 5, 2) && text[7] == '-' &&
      all_digits(text, 8, 2) && (text[10] == 'T' || text[10] == ' ') &&
      all_digits(text, 11, 2) && text[13] == ':' && all_digits(text, 14, 2) &&
      text[16] == ':' && all_digits(text, 17, 2) &&
      (text.size() == 19 || text[19] == 'Z');
  if (!shape_ok) {
    throw DataError("timestamp '" + text +
                    "' is not of the form YYYY-MM-DDTHH:MM:SSZ");
  }
  const int y = to_int(text, 0, 4), mo = to_int(text, 5, 2),
            d = to_int(text, 8, 2), h = to_int(text, 11, 2),
            mi = to_int(text, 14, 2), s = to_int(text, 17, 2);
  if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || h > 23 ||
      mi > 59 || s > 59) {
    throw DataError("timestamp '" + text + "' has out-of-range fields");
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_time_iso8601(std::int64_t time) {
  std::int64_t days = time / 86400;
  std::int64_t rem = time % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  // Inverse of days_from_civil.
  std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const int doe = static_cast<int>(z - era * 146097);
  const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  int y = static_cast<int>(yoe + era * 400);
  const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const int mp = (5 * doy + 2) / 153;
  const int d = doy - (153 * mp + 2) / 5 + 1;
  const int mo = mp + (mp < 10 ? 3 : -9);
  y += mo <= 2;
  const int h = static_cast<int>(rem / 3600);
  const int mi = static_cast<int>(rem % 3600 / 60);
  const int s = static_cast<int>(rem % 60);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, mo, d,
                h, mi, s);
  return buf;
}

std::string month_key(std::int64_t time) {
  return format_time_iso8601(time).substr(0, 7);
}

std::pair<double, double> project_to_plane(double lat_deg, double lon_deg,
                                           const ProjectionParams& params) {
  params.validate();
  if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg) ||
      std::abs(lat_deg) > 84.0) {
    throw DataError("latitude out of the projection's domain (|lat| <= 84)");
  }
  double dlon = lon_deg - params.central_meridian_deg;
  dlon = std::remainder(dlon, 360.0);
  if (std::abs(dlon) > 30.0) {
    throw DataError("point too far from the central meridian (limit 30 "
                    "degrees)");
  }

  const double f = params.flattening;
  const double n = f / (2.0 - f);
  const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
  const double rect_radius = params.semi_major_axis / (1.0 + n) *
                             (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
  const std::array<double, 6> alpha = {
      n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 -
          127.0 * n5 / 288.0 + 7891.0 * n6 / 37800.0,
      13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 +
          281.0 * n5 / 630.0 - 1983433.0 * n6 / 1935360.0,
      61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 +
          167603.0 * n6 / 181440.0,
      49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 +
          6601661.0 * n6 / 7257600.0,
      34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0,
      212378941.0 * n6 / 319334400.0};

  const double e = std::sqrt(f * (2.0 - f));
  const double phi = lat_deg * kDegToRad;
  const double lam = dlon * kDegToRad;
  const double sigma = std::sinh(e * std::atanh(e * std::sin(phi)));
  const double tau = std::tan(phi);
  const double tau_p =
      tau * std::sqrt(1.0 + sigma * sigma) - sigma * std::sqrt(1.0 + tau * tau);
  const double xi_p = std::atan2(tau_p, std::cos(lam));
  const double eta_p =
      std::asinh(std::sin(lam) / std::hypot(tau_p, std::cos(lam)));
  double xi = xi_p;
  double eta = eta_p;
  for (int j = 1; j <= 6; ++j) {
    xi += alpha[j - 1] * std::sin(2.0 * j * xi_p) * std::cosh(2.0 * j * eta_p);
    eta += alpha[j - 1] * std::cos(2.0 * j * xi_p) * std::sinh(2.0 * j * eta_p);
  }
  const double scale = params.scale_factor * rect_radius;
  return {params.false_easting + scale * eta,
          params.false_northing + scale * xi};
}

Vec2 wind_polar_to_cartesian(double speed_ms, double dir_deg,
                             WindConvention convention) {
  if (!std::isfinite(speed_ms) || !std::isfinite(dir_deg)) {
    throw DataError("wind record has non-finite speed or direction");
  }
  if (speed_ms < 0.0) {
    throw DataError("wind speed must be non-negative");
  }
  const double theta = dir_deg * kDegToRad;
  if (convention == WindConvention::heading) {
    return Vec2(-speed_ms * std::sin(theta), speed_ms * std::cos(theta));
  }
  return Vec2(-speed_ms * std::sin(theta), -speed_ms * std::cos(theta));
}

Vec2 rescale_to_unit(const Vec2& xy_m, const Vec2& tau, const Vec2& origin) {
  if (!(tau.x() > 0.0) || !(tau.y() > 0.0) || !tau.allFinite() ||
      !origin.allFinite()) {
    throw ConfigError("rescale requires positive finite tau and finite origin");
  }
  const Vec2 unit((xy_m.x() - origin.x()) / tau.x(),
                  (xy_m.y() - origin.y()) / tau.y());
  constexpr double kSlack = 1e-9;
  if (!(unit.x() >= -kSlack) || !(unit.x() <= 1.0 + kSlack) ||
      !(unit.y() >= -kSlack) || !(unit.y() <= 1.0 + kSlack)) {
    throw DataError("point lies outside the model domain [origin, origin + "
                    "tau]");
  }
  return unit;
}

Vec2 unscale_from_unit(const Vec2& unit, const Vec2& tau, const Vec2& origin) {
  if (!(tau.x() > 0.0) || !(tau.y() > 0.0) || !tau.allFinite() ||
      !origin.allFinite()) {
    throw ConfigError("rescale requires positive finite tau and finite origin");
  }
  return Vec2(origin.x() + unit.x() * tau.x(), origin.y() + unit.y() * tau.y());
}

namespace {

enum class Schema { polar, cartesian };

const std::vector<std::string> kPolarHeader = {
    "station_id", "time", "lat_deg", "lon_deg", "alt_m", "speed_ms", "dir_deg"};
const std::vector<std::string> kCartesianHeader = {
    "station_id", "time", "x_m", "y_m", "alt_m", "u_ms", "v_ms"};

struct RawRecord {
  Point3 point;
  Vec2 velocity;
};

}  // namespace

Dataset parse_observations(std::istream& in, const ParseOptions& options) {
  options.projection.validate();
  validate_month_filter(options.exclude_months);

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("observation file is empty");
  }
  const auto header = split_csv_line(line);
  Schema schema;
  if (header == kPolarHeader) {
    schema = Schema::polar;
  } else if (header == kCartesianHeader) {
    schema = Schema::cartesian;
  } else {
    throw DataError("unrecognized observation header; expected the polar or "
                    "cartesian station schema");
  }

  std::map<std::string, Station> stations;
  std::map<std::int64_t, std::map<std::string, RawRecord>> slices;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7) {
      throw DataError("line " + std::to_string(line_no) +
                      ": expected 7 fields, got " +
                      std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    if (id.empty()) {
      throw DataError("line " + std::to_string(line_no) + ": empty station id");
    }
    const std::int64_t time = parse_time_iso8601(fields[1]);

    // Rows with missing velocity fields carry no usable observation and are
    // dropped rather than rejected.
    if (fields[5].empty() || fields[6].empty()) continue;

    Station st;
    st.id = id;
    RawRecord rec;
    if (schema == Schema::polar) {
      st.lat_deg = parse_double_field(fields[2], "lat_deg", line_no);
      st.lon_deg = parse_double_field(fields[3], "lon_deg", line_no);
      st.alt_m = parse_double_field(fields[4], "alt_m", line_no);
      const double speed = parse_double_field(fields[5], "speed_ms", line_no);
      const double dir = parse_double_field(fields[6], "dir_deg", line_no);
      auto [x, y] = project_to_plane(st.lat_deg, st.lon_deg, options.projection);
      st.x_m = x;
      st.y_m = y;
      rec.velocity = wind_polar_to_cartesian(speed, dir, options.wind);
    } else {
      st.x_m = parse_double_field(fields[2], "x_m", line_no);
      st.y_m = parse_double_field(fields[3], "y_m", line_no);
      st.alt_m = parse_double_field(fields[4], "alt_m", line_no);
      rec.velocity.x() = parse_double_field(fields[5], "u_ms", line_no);
      rec.velocity.y() = parse_double_field(fields[6], "v_ms", line_no);
    }
    rec.point = Point3{st.x_m, st.y_m, st.alt_m};

    auto [it, inserted] = stations.emplace(id, st);
    if (!inserted) {
      const Station& seen = it->second;
      const bool same = std::abs(seen.x_m - st.x_m) < 1e-6 &&
                        std::abs(seen.y_m - st.y_m) < 1e-6 &&
                        std::abs(seen.alt_m - st.alt_m) < 1e-6;
      if (!same) {
        throw DataError("line " + std::to_string(line_no) + ": station '" +
                        id + "' changes coordinates between rows");
      }
    }

    if (!options.exclude_months.empty()) {
      const std::string key = month_key(time);
      if (std::find(options.exclude_months.begin(),
                    options.exclude_months.end(),
                    key) != options.exclude_months.end()) {
        continue;
      }
    }

    auto [slot, fresh] = slices[time].emplace(id, rec);
    (void)slot;
    if (!fresh) {
      throw DataError("line " + std::to_string(line_no) +
                      ": duplicate observation for station '" + id +
                      "' at " + format_time_iso8601(time));
    }
  }

  if (slices.empty()) {
    throw DataError("no observations found (empty file or every row dropped "
                    "by filters)");
  }

  Dataset out;
  out.stations.reserve(stations.size());
  for (auto& [id, st] : stations) out.stations.push_back(st);
  out.slices.reserve(slices.size());
  for (auto& [time, rows] : slices) {
    TimeSlice slice;
    slice.time = time;
    slice.station_ids.reserve(rows.size());
    slice.points.reserve(rows.size());
    slice.velocities.reserve(rows.size());
    for (auto& [id, rec] : rows) {
      for (const auto& p : slice.points) {
        if (p.x == rec.point.x && p.y == rec.point.y && p.z == rec.point.z) {
          throw DataError("stations '" + id + "' and another share position "
                          "at " + format_time_iso8601(time));
        }
      }
      slice.station_ids.push_back(id);
      slice.points.push_back(rec.point);
      slice.velocities.push_back(rec.velocity);
    }
    out.slices.push_back(std::move(slice));
  }
  return out;
}

Dataset parse_observations_text(const std::string& text,
                                const ParseOptions& options) {
  std::istringstream in(text);
  return parse_observations(in, options);
}

Dataset parse_observations_file(const std::string& path,
                                const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open observation file '" + path + "'");
  }
  return parse_observations(in, options);
}

std::string write_observations_csv(const Dataset& dataset) {
  std::string out = "station_id,time,x_m,y_m,alt_m,u_ms,v_ms\n";
  for (const auto& slice : dataset.slices) {
    for (std::size_t i = 0; i < slice.size(); ++i) {
      out += slice.station_ids[i];
      out += ',';
      out += format_time_iso8601(slice.time);
      out += ',';
      out += format_double(slice.points[i].x);
      out += ',';
      out += format_double(slice.points[i].y);
      out += ',';
      out += format_double(slice.points[i].z);
      out += ',';
      out += format_double(slice.velocities[i].x());
      out += ',';
      out += format_double(slice.velocities[i].y());
      out += '\n';
    }
  }
  return out;
}

}  // namespace windfield::data
