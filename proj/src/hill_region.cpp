#include "hill4bp/hill_region.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hill4bp/lagrange.hpp"
#include "hill4bp/parallel.hpp"

namespace hill4bp {

Allowance classify(const ParameterSet& p, double c, const Eigen::Vector3d& pos) {
  return effective_potential<double>(p, pos) <= c ? Allowance::kAllowed : Allowance::kForbidden;
}

std::size_t GridSpec::cell_count() const {
  std::size_t n = 1;
  for (int d = 0; d < dims; ++d) n *= static_cast<std::size_t>(resolution);
  return n;
}

std::array<int, 2> GridSpec::in_plane_axes() const {
  switch (slice_axis) {
    case Axis::kX:
      return {1, 2};
    case Axis::kY:
      return {0, 2};
    case Axis::kZ:
      break;
  }
  return {0, 1};
}

Eigen::Vector3d GridSpec::lift(double u, double v) const {
  Eigen::Vector3d q;
  q[static_cast<int>(slice_axis)] = slice_value;
  const auto axes = in_plane_axes();
  q[axes[0]] = u;
  q[axes[1]] = v;
  return q;
}

Eigen::Vector3d GridSpec::cell_center(const std::array<int, 3>& idx) const {
  const double h = spacing();
  auto coord = [&](int i) { return -half_width + (i + 0.5) * h; };
  if (dims == 3) return {coord(idx[0]), coord(idx[1]), coord(idx[2])};
  return lift(coord(idx[0]), coord(idx[1]));
}

std::size_t RegionCensus::flat_index(const std::array<int, 3>& idx) const {
  const auto n = static_cast<std::size_t>(grid.resolution);
  std::size_t flat = static_cast<std::size_t>(idx[0]) + n * static_cast<std::size_t>(idx[1]);
  if (grid.dims == 3) flat += n * n * static_cast<std::size_t>(idx[2]);
  return flat;
}

std::array<int, 3> RegionCensus::unflatten(std::size_t flat) const {
  const auto n = static_cast<std::size_t>(grid.resolution);
  std::array<int, 3> idx{static_cast<int>(flat % n), static_cast<int>((flat / n) % n), 0};
  if (grid.dims == 3) idx[2] = static_cast<int>(flat / (n * n));
  return idx;
}

RegionCensus component_census(const ParameterSet& p, double c, const GridSpec& grid) {
  if (grid.dims != 2 && grid.dims != 3) throw DomainError("grid must be 2-D or 3-D");
  if (grid.resolution < 2 || !(grid.half_width > 0.0)) throw DomainError("degenerate grid");

  RegionCensus census;
  census.grid = grid;
  census.mu = p.mu;
  census.c = c;
  const std::size_t n_cells = grid.cell_count();
  const int n = grid.resolution;
  const std::size_t rows = n_cells / static_cast<std::size_t>(n);

  // 0 = forbidden, 1 = allowed; rows evaluated in parallel.
  std::vector<std::uint8_t> allowed(n_cells, 0);
  parallel_for(rows, [&](std::size_t row) {
    for (int i = 0; i < n; ++i) {
      const std::size_t flat = row * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
      const Eigen::Vector3d q = grid.cell_center(census.unflatten(flat));
      allowed[flat] = q.norm() < kOriginCellRadius || effective_potential<double>(p, q) <= c;
    }
  });

  census.labels.assign(n_cells, -1);
  std::vector<std::size_t> stack;
  const int dims = grid.dims;
  for (std::size_t start = 0; start < n_cells; ++start) {
    if (!allowed[start] || census.labels[start] >= 0) continue;
    const auto id = static_cast<std::int32_t>(census.components.size());
    RegionComponent comp;
    census.labels[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const auto idx = census.unflatten(cur);
      ++comp.cells;
      comp.max_radius = std::max(comp.max_radius, grid.cell_center(idx).norm());
      for (int d = 0; d < dims; ++d) {
        if (idx[d] == 0 || idx[d] == n - 1) comp.touches_boundary = true;
        for (int step : {-1, 1}) {
          auto nb = idx;
          nb[d] += step;
          if (nb[d] < 0 || nb[d] >= n) continue;
          const std::size_t flat = census.flat_index(nb);
          if (allowed[flat] && census.labels[flat] < 0) {
            census.labels[flat] = id;
            stack.push_back(flat);
          }
        }
      }
    }
    if (comp.cells <= 4) {
      std::ostringstream msg;
      msg << "ResolutionWarning: component " << id << " has only " << comp.cells << " cells";
      census.warnings.push_back(msg.str());
    }
    (comp.touches_boundary ? census.n_unbounded : census.n_bounded) += 1;
    census.components.push_back(comp);
  }

  // K_c^b: the component of the cell closest to the origin, when bounded.
  std::size_t nearest = 0;
  double nearest_r = std::numeric_limits<double>::infinity();
  for (std::size_t flat = 0; flat < n_cells; ++flat) {
    const double r = grid.cell_center(census.unflatten(flat)).norm();
    if (r < nearest_r) {
      nearest_r = r;
      nearest = flat;
    }
  }
  const std::int32_t origin_label = census.labels[nearest];
  if (origin_label >= 0 && !census.components[static_cast<std::size_t>(origin_label)].touches_boundary) {
    census.bounded_component = origin_label;
    census.max_radius_bounded = census.components[static_cast<std::size_t>(origin_label)].max_radius;
  }
  return census;
}

nlohmann::ordered_json to_json(const RegionCensus& census) {
  nlohmann::ordered_json j;
  j["mu"] = census.mu;
  j["c"] = census.c;
  j["n_bounded"] = census.n_bounded;
  j["n_unbounded"] = census.n_unbounded;
  j["max_radius_bounded"] = census.max_radius_bounded;
  const char* axis_names[] = {"x", "y", "z"};
  nlohmann::ordered_json g;
  g["dims"] = census.grid.dims;
  g["resolution"] = census.grid.resolution;
  g["half_width"] = census.grid.half_width;
  if (census.grid.dims == 2) {
    g["slice_axis"] = axis_names[static_cast<int>(census.grid.slice_axis)];
    g["slice_value"] = census.grid.slice_value;
  }
  j["grid"] = std::move(g);
  j["warnings"] = census.warnings;
  return j;
}

ScanReport bounded_radius_check(const ParameterSet& p, double c, const GridSpec& grid, int sphere_n) {
  const double h12 = critical_values(p).h12;
  if (!(c < h12)) throw DomainError("bounded_radius_check requires c < H(L1)");
  const double r = 1.0 / std::cbrt(p.lambda2);

  const RegionCensus census = component_census(p, c, grid);
  ScanReport report;
  report.bound_kind = "bounded_component_in_ball";
  report.argmin_kind = "position";
  report.mu = p.mu;
  report.c = c;
  report.n_samples = census.bounded_component >= 0
                         ? census.components[static_cast<std::size_t>(census.bounded_component)].cells
                         : 0;

  // Farthest bounded-component cell; the margin r - |q| must stay positive.
  double max_radius = -1.0;
  Eigen::Vector3d farthest = Eigen::Vector3d::Zero();
  for (std::size_t flat = 0; flat < census.labels.size(); ++flat) {
    if (!census.in_bounded_component(flat)) continue;
    const Eigen::Vector3d q = grid.cell_center(census.unflatten(flat));
    if (q.norm() > max_radius) {
      max_radius = q.norm();
      farthest = q;
    }
  }
  report.extremum = r - max_radius;
  report.argmin = {farthest.x(), farthest.y(), farthest.z()};

  // U on the sphere of radius r is minimized at (theta, phi) = (0, pi/2) with value H(L1).
  double sphere_min = std::numeric_limits<double>::infinity();
  SphericalPoint sphere_argmin;
  for (int i = 0; i < 2 * (sphere_n - 1); ++i) {
    for (int j = 0; j < sphere_n; ++j) {
      const SphericalPoint sp{r, std::numbers::pi * i / (sphere_n - 1), std::numbers::pi * j / (sphere_n - 1)};
      const double u = effective_potential_spherical(p, sp);
      if (u < sphere_min) {
        sphere_min = u;
        sphere_argmin = sp;
      }
    }
  }
  const bool sphere_ok = sphere_min >= h12 - 1e-12 * std::abs(h12) && sphere_min > c;

  report.pass = census.bounded_component >= 0 && report.extremum > 0.0 && sphere_ok;
  report.set_metric("max_radius_bounded", max_radius);
  report.set_metric("ball_radius", r);
  report.set_metric("sphere_min_U", sphere_min);
  report.set_metric("sphere_argmin_theta", sphere_argmin.theta);
  report.set_metric("sphere_argmin_phi", sphere_argmin.phi);
  report.set_metric("h12", h12);
  return report;
}

namespace {

// Value of U - c at grid node (i, j); the origin node is treated as deep inside.
double node_value(const ParameterSet& p, double c, const GridSpec& grid, int i, int j) {
  const double h = grid.spacing();
  const Eigen::Vector3d q = grid.lift(-grid.half_width + i * h, -grid.half_width + j * h);
  if (q.norm() < kOriginCellRadius) return -1e300;
  return effective_potential<double>(p, q) - c;
}

Eigen::Vector2d refine_vertex(const ParameterSet& p, double c, const GridSpec& grid, const Eigen::Vector2d& uv) {
  const Eigen::Vector3d q = grid.lift(uv.x(), uv.y());
  const Eigen::Vector3d g3 = potential_gradient<double>(p, q);
  const auto axes = grid.in_plane_axes();
  const Eigen::Vector2d g(g3[axes[0]], g3[axes[1]]);
  const double g2 = g.squaredNorm();
  if (g2 == 0.0) return uv;
  return uv - ((effective_potential<double>(p, q) - c) / g2) * g;
}

}  // namespace

Contour zero_velocity_contour(const ParameterSet& p, double c, const GridSpec& grid) {
  if (grid.dims != 2) throw DomainError("contours are extracted on 2-D slices");
  const int n = grid.resolution;
  const int nodes = n + 1;
  const double h = grid.spacing();

  std::vector<double> f(static_cast<std::size_t>(nodes) * nodes);
  parallel_for(static_cast<std::size_t>(nodes), [&](std::size_t j) {
    for (int i = 0; i < nodes; ++i)
      f[j * nodes + i] = node_value(p, c, grid, i, static_cast<int>(j));
  });
  auto value = [&](int i, int j) { return f[static_cast<std::size_t>(j) * nodes + i]; };
  auto node_uv = [&](int i, int j) { return Eigen::Vector2d(-grid.half_width + i * h, -grid.half_width + j * h); };

  // Edge ids: 2*node for the +u edge, 2*node+1 for the +v edge.
  auto h_edge = [&](int i, int j) { return 2L * (static_cast<long>(j) * nodes + i); };
  auto v_edge = [&](int i, int j) { return 2L * (static_cast<long>(j) * nodes + i) + 1; };
  std::map<long, Eigen::Vector2d> crossing;
  auto cross = [&](long id, int i0, int j0, int i1, int j1) {
    if (crossing.count(id) == 0) {
      const double f0 = value(i0, j0), f1 = value(i1, j1);
      const double t = f0 / (f0 - f1);
      crossing[id] = node_uv(i0, j0) + t * (node_uv(i1, j1) - node_uv(i0, j0));
    }
    return id;
  };

  std::vector<std::pair<long, long>> segments;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double f00 = value(i, j), f10 = value(i + 1, j), f11 = value(i + 1, j + 1), f01 = value(i, j + 1);
      const int code = (f00 < 0) | ((f10 < 0) << 1) | ((f11 < 0) << 2) | ((f01 < 0) << 3);
      if (code == 0 || code == 15) continue;
      auto bottom = [&] { return cross(h_edge(i, j), i, j, i + 1, j); };
      auto right = [&] { return cross(v_edge(i + 1, j), i + 1, j, i + 1, j + 1); };
      auto top = [&] { return cross(h_edge(i, j + 1), i, j + 1, i + 1, j + 1); };
      auto left = [&] { return cross(v_edge(i, j), i, j, i, j + 1); };
      switch (code) {
        case 1: case 14: segments.emplace_back(left(), bottom()); break;
        case 2: case 13: segments.emplace_back(bottom(), right()); break;
        case 3: case 12: segments.emplace_back(left(), right()); break;
        case 4: case 11: segments.emplace_back(right(), top()); break;
        case 6: case 9: segments.emplace_back(bottom(), top()); break;
        case 7: case 8: segments.emplace_back(left(), top()); break;
        case 5: case 10: {
          // Saddle cell: resolve with the mean of the corners.
          const bool center_inside = (f00 + f10 + f11 + f01) / 4.0 < 0;
          if ((code == 5) == center_inside) {
            segments.emplace_back(left(), top());
            segments.emplace_back(bottom(), right());
          } else {
            segments.emplace_back(left(), bottom());
            segments.emplace_back(right(), top());
          }
          break;
        }
        default:
          break;
      }
    }
  }

  // Link segments sharing an edge crossing into polylines.
  std::map<long, std::vector<std::size_t>> incident;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    incident[segments[s].first].push_back(s);
    incident[segments[s].second].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  auto next_segment = [&](long edge) -> long {
    for (std::size_t s : incident[edge])
      if (!used[s]) return static_cast<long>(s);
    return -1;
  };
  auto other_end = [&](std::size_t s, long edge) {
    return segments[s].first == edge ? segments[s].second : segments[s].first;
  };

  Contour contour;
  contour.grid = grid;
  contour.c = c;
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::vector<long> chain{segments[s0].first, segments[s0].second};
    for (long s = next_segment(chain.back()); s >= 0; s = next_segment(chain.back())) {
      used[static_cast<std::size_t>(s)] = true;
      chain.push_back(other_end(static_cast<std::size_t>(s), chain.back()));
    }
    for (long s = next_segment(chain.front()); s >= 0; s = next_segment(chain.front())) {
      used[static_cast<std::size_t>(s)] = true;
      chain.insert(chain.begin(), other_end(static_cast<std::size_t>(s), chain.front()));
    }
    Polyline line;
    line.closed = chain.size() > 2 && chain.front() == chain.back();
    if (line.closed) chain.pop_back();
    line.points.reserve(chain.size());
    for (long edge : chain) line.points.push_back(refine_vertex(p, c, grid, crossing.at(edge)));
    contour.curves.push_back(std::move(line));
  }
  return contour;
}

void write_contour_csv(std::ostream& out, const Contour& contour) {
  out << "curve_id,x,y\n";
  char buf[128];
  for (std::size_t id = 0; id < contour.curves.size(); ++id) {
    const auto& line = contour.curves[id];
    auto emit = [&](const Eigen::Vector2d& q) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", id, q.x(), q.y());
      out << buf;
    };
    for (const auto& q : line.points) emit(q);
    if (line.closed && !line.points.empty()) emit(line.points.front());
  }
}

}  // namespace hill4bp
