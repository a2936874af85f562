#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <limits>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hill4bp/model.hpp"
#include "hill4bp/scan_report.hpp"

namespace hill4bp {

enum class Allowance { kAllowed, kForbidden };

/// Allowed iff U(pos) <= c. Throws SingularityError at the origin.
Allowance classify(const ParameterSet& p, double c, const Eigen::Vector3d& pos);

enum class Axis { kX = 0, kY = 1, kZ = 2 };

/// Uniform cell grid over [-half_width, half_width]^dims. A 2-D grid is the
/// axis-aligned slice {pos[slice_axis] = slice_value}; its two in-plane axes
/// are the remaining coordinates in increasing order.
struct GridSpec {
  int dims = 2;
  int resolution = 256;
  double half_width = 3.0;
  Axis slice_axis = Axis::kZ;
  double slice_value = 0.0;

  double spacing() const { return 2.0 * half_width / resolution; }
  std::size_t cell_count() const;
  /// Center of the cell with per-axis indices idx (idx[2] ignored in 2-D).
  Eigen::Vector3d cell_center(const std::array<int, 3>& idx) const;
  /// In-plane point (u, v) of a 2-D slice lifted to R^3.
  Eigen::Vector3d lift(double u, double v) const;
  std::array<int, 2> in_plane_axes() const;
};

/// Cells whose center lies within this radius of the origin are allowed
/// unconditionally (U -> -infinity there).
inline constexpr double kOriginCellRadius = 1e-3;

struct RegionComponent {
  std::size_t cells = 0;
  bool touches_boundary = false;
  double max_radius = 0.0;
};

/// Connected components of the allowed cells {U <= c}. A component is counted
/// as unbounded iff it touches the grid boundary (a proxy justified by U -> -inf
/// quadratically far out, not a proof).
struct RegionCensus {
  GridSpec grid;
  double mu = 0.0;
  double c = 0.0;
  std::size_t n_bounded = 0;
  std::size_t n_unbounded = 0;
  std::vector<std::int32_t> labels;          ///< per cell: component id, -1 if forbidden
  std::vector<RegionComponent> components;
  int bounded_component = -1;                ///< K_c^b, the bounded component at the origin, or -1
  double max_radius_bounded = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;         ///< ResolutionWarning messages

  std::size_t flat_index(const std::array<int, 3>& idx) const;
  std::array<int, 3> unflatten(std::size_t flat) const;
  bool in_bounded_component(std::size_t flat) const {
    return bounded_component >= 0 && labels[flat] == bounded_component;
  }
};

/// Flood-fill census with 4-connectivity (2-D) or 6-connectivity (3-D).
RegionCensus component_census(const ParameterSet& p, double c, const GridSpec& grid);

nlohmann::ordered_json to_json(const RegionCensus& census);

/// Checks that K_c^b lies in the open ball of radius r = lambda2^{-1/3}: every
/// bounded-component cell center has norm < r, and U(r, theta, phi) >= H(L1) > c
/// on a (sphere_n x sphere_n) angular grid. Requires c < H(L1).
ScanReport bounded_radius_check(const ParameterSet& p, double c, const GridSpec& grid = {}, int sphere_n = 181);

struct Polyline {
  std::vector<Eigen::Vector2d> points;  ///< in-plane coordinates of the slice
  bool closed = false;
};

struct Contour {
  GridSpec grid;
  double c = 0.0;
  std::vector<Polyline> curves;
};

/// Zero-velocity curves {U = c} on a 2-D slice by marching squares over the
/// grid nodes, with one Newton refinement of every vertex onto U = c.
Contour zero_velocity_contour(const ParameterSet& p, double c, const GridSpec& grid = {});

/// CSV with header `curve_id,x,y`; closed curves repeat their first vertex.
void write_contour_csv(std::ostream& out, const Contour& contour);

}  // namespace hill4bp
