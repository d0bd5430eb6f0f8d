#pragma once

// Text serialisation of point clouds.
//
//   vicet-cloud v1 frame=<body|map> period=<seconds> count=<N>
//   <x> <y> <z> <s>        (N lines, map frame in metres, s in [0, 1])
//
// '#' starts a comment anywhere; blank lines are ignored. Numbers are
// written with 17 significant digits so a write/read round trip reproduces
// every double bit-exactly.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "vicet/cloud.hpp"
#include "vicet/errors.hpp"
#include "vicet/key_value.hpp"

namespace vicet {

namespace detail {

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string strip_comment(const std::string& line) {
  const size_t hash = line.find('#');
  return trim(hash == std::string::npos ? line : line.substr(0, hash));
}

}  // namespace detail

inline void write_cloud(const PointCloud& cloud, std::ostream& out,
                        const std::string& name = "<stream>") {
  out << "vicet-cloud v1 frame="
      << (cloud.frame == Frame::body ? "body" : "map")
      << " period=" << detail::format_g17(cloud.period)
      << " count=" << cloud.size() << "\n";
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    if (!p.position.allFinite() || !std::isfinite(p.s))
      throw IoError(name + ": point " + std::to_string(i) +
                    " has non-finite values");
    if (p.s < 0.0 || p.s > 1.0)
      throw IoError(name + ": point " + std::to_string(i) +
                    " has scaled time outside [0, 1]");
    out << detail::format_g17(p.position.x()) << ' '
        << detail::format_g17(p.position.y()) << ' '
        << detail::format_g17(p.position.z()) << ' '
        << detail::format_g17(p.s) << "\n";
  }
}

inline void write_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  write_cloud(cloud, out, path);
  out.flush();
  if (!out) throw IoError(path + ": write failed");
}

inline PointCloud read_cloud(std::istream& in,
                             const std::string& name = "<stream>") {
  std::string raw;
  int line = 0;

  // Header: first substantive line.
  std::string header;
  while (std::getline(in, raw)) {
    ++line;
    header = detail::strip_comment(raw);
    if (!header.empty()) break;
  }
  std::istringstream hs(header);
  std::string magic, version, frame_kv, period_kv, count_kv, extra;
  hs >> magic >> version >> frame_kv >> period_kv >> count_kv;
  const std::string at = name + ":" + std::to_string(line);
  if (!hs || magic != "vicet-cloud" || version != "v1" ||
      frame_kv.rfind("frame=", 0) != 0 || period_kv.rfind("period=", 0) != 0 ||
      count_kv.rfind("count=", 0) != 0 || (hs >> extra))
    throw IoError(at +
                  ": expected header 'vicet-cloud v1 frame=<body|map> "
                  "period=<seconds> count=<N>'");

  PointCloud cloud;
  const std::string frame = frame_kv.substr(6);
  if (frame == "body")
    cloud.frame = Frame::body;
  else if (frame == "map")
    cloud.frame = Frame::map;
  else
    throw IoError(at + ": unknown frame '" + frame + "'");

  size_t count = 0;
  try {
    size_t used = 0;
    cloud.period = std::stod(period_kv.substr(7), &used);
    if (used != period_kv.size() - 7) throw std::invalid_argument(period_kv);
    const std::string n = count_kv.substr(6);
    count = static_cast<size_t>(std::stoull(n, &used));
    if (used != n.size()) throw std::invalid_argument(n);
  } catch (const std::exception&) {
    throw IoError(at + ": malformed header value");
  }
  if (!(cloud.period > 0.0) || !std::isfinite(cloud.period))
    throw IoError(at + ": period must be a positive number of seconds");

  cloud.points.reserve(count);
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = detail::strip_comment(raw);
    if (text.empty()) continue;
    const std::string here = name + ":" + std::to_string(line);
    if (cloud.size() == count)
      throw IoError(here + ": more than the declared " +
                    std::to_string(count) + " points");
    std::istringstream ls(text);
    Point p;
    std::string tail;
    if (!(ls >> p.position.x() >> p.position.y() >> p.position.z() >> p.s) ||
        (ls >> tail))
      throw IoError(here + ": expected 'x y z s'");
    if (!p.position.allFinite() || !std::isfinite(p.s))
      throw IoError(here + ": non-finite value");
    if (p.s < 0.0 || p.s > 1.0)
      throw IoError(here + ": scaled time outside [0, 1]");
    cloud.points.push_back(p);
  }
  if (cloud.size() != count)
    throw IoError(name + ": header declared " + std::to_string(count) +
                  " points, file has " + std::to_string(cloud.size()));
  return cloud;
}

inline PointCloud read_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  return read_cloud(in, path);
}

}  // namespace vicet
