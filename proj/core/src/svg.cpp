#include "handrv/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "handrv/error.hpp"

namespace handrv {

namespace {

struct Bounds {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(Point2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
};

void polyline(std::ostringstream& out, const std::vector<Point2>& pts, const char* colour, double width,
              double opacity) {
  out << "  <polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"" << width
      << "\" stroke-opacity=\"" << opacity << "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out << ' ';
    out << pts[i].x << ',' << pts[i].y;
  }
  out << "\"/>\n";
}

}  // namespace

std::string overlay_svg(const Trajectory& query, const RetrievalManifest& manifest,
                        std::span<const Trajectory> play) {
  if (query.track.empty()) throw Error(Errc::validation, "query trajectory has no track");
  std::unordered_map<std::string, const Trajectory*> by_id;
  for (const auto& t : play) by_id.emplace(t.id, &t);

  const Point2 origin = query.track.front();
  std::vector<std::vector<Point2>> spans;
  std::vector<double> weights;
  Bounds box;
  for (const auto& p : query.track) box.add(p);
  for (const auto& m : manifest.matches) {
    auto it = by_id.find(m.traj_id);
    if (it == by_id.end()) throw Error(Errc::validation, "match refers to unknown trajectory '" + m.traj_id + "'");
    const auto& track = it->second->track;
    if (m.match_end > track.size() || m.match_start >= m.match_end) continue;
    const Point2 first = track[m.match_start];
    std::vector<Point2> pts;
    for (std::size_t f = m.match_start; f < m.match_end; ++f) {
      pts.push_back(origin + (track[f] - first));
      box.add(pts.back());
    }
    spans.push_back(std::move(pts));
    weights.push_back(m.weight);
  }

  constexpr double size = 640.0;
  constexpr double margin = 20.0;
  const double extent = std::max({box.max_x - box.min_x, box.max_y - box.min_y, 1.0});
  const double scale = (size - 2.0 * margin) / extent;
  auto map = [&](Point2 p) { return Point2{margin + (p.x - box.min_x) * scale, margin + (p.y - box.min_y) * scale}; };
  auto mapped = [&](const std::vector<Point2>& pts) {
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(map(p));
    return out;
  };

  const double wmax = weights.empty() ? 1.0 : *std::max_element(weights.begin(), weights.end());
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "  <title>" << manifest.query_id << ": " << spans.size() << " matches</title>\n";
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const double opacity = 0.15 + 0.75 * std::clamp(weights[i] / wmax, 0.0, 1.0);
    polyline(out, mapped(spans[i]), "#2e86c1", 1.5, opacity);
  }
  polyline(out, mapped(query.track), "#e67e22", 4.0, 1.0);
  const Point2 start = map(origin);
  out << "  <circle cx=\"" << start.x << "\" cy=\"" << start.y << "\" r=\"5\" fill=\"#e67e22\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace handrv
