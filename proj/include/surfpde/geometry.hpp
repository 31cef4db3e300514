#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace surfpde {

/// A sampled codimension-1 surface: points, unit normals and the average
/// internodal distance h (mean distance to the nearest distinct node).
///
/// Points are always stored as 3-vectors; for curves in the plane (dim == 2)
/// the z component is zero and ignored by every distance computation.
class SurfaceNodeSet {
public:
  /// Validates the data and computes h. Throws InputError when normals are not
  /// unit length (1e-12), coordinates are non-finite, sizes disagree, or two
  /// points coincide.
  SurfaceNodeSet(int dim, std::vector<Eigen::Vector3d> points, std::vector<Eigen::Vector3d> normals);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  double h() const { return h_; }
  const std::vector<Eigen::Vector3d>& points() const { return points_; }
  const std::vector<Eigen::Vector3d>& normals() const { return normals_; }
  const Eigen::Vector3d& point(std::size_t i) const { return points_[i]; }
  const Eigen::Vector3d& normal(std::size_t i) const { return normals_[i]; }

private:
  int dim_;
  std::vector<Eigen::Vector3d> points_;
  std::vector<Eigen::Vector3d> normals_;
  double h_;
};

/// Zero level set of a smooth function F with analytic first and second
/// derivatives, plus a bounding box that contains the surface.
struct ImplicitSurface {
  std::string name;
  std::function<double(const Eigen::Vector3d&)> value;
  std::function<Eigen::Vector3d(const Eigen::Vector3d&)> gradient;
  std::function<Eigen::Matrix3d(const Eigen::Vector3d&)> hessian;
  Eigen::Vector3d box_lo;
  Eigen::Vector3d box_hi;

  Eigen::Vector3d unit_normal(const Eigen::Vector3d& x) const;
  /// Divergence of the unit normal field (sum of principal curvatures).
  double mean_curvature(const Eigen::Vector3d& x) const;
};

namespace surfaces {
ImplicitSurface unit_sphere();
/// x^8 + y^8 + z^8 - (x^2 + y^2 + z^2) = 0
ImplicitSurface tooth();
/// (R - sqrt(x^2 + y^2))^2 + z^2 - r^2 = 0
ImplicitSurface torus(double major_radius, double minor_radius);
/// (x - z^2)^2 + y^2 + z^2 - 1 = 0
ImplicitSurface dziuk();
}  // namespace surfaces

/// Surface Laplacian of an ambient function u at a point of an implicit surface:
/// tr(H_u) - n^T H_u n - kappa (n . grad u).
double surface_laplacian(const ImplicitSurface& surface, const Eigen::Vector3d& x,
                         const Eigen::Vector3d& grad_u, const Eigen::Matrix3d& hess_u);

// Node generators. All are deterministic in their arguments.

SurfaceNodeSet fibonacci_sphere_nodes(std::size_t n);

/// Ring-based sampling of the torus with approximately n_target nodes.
SurfaceNodeSet torus_nodes(std::size_t n_target, double major_radius, double minor_radius);

/// Background-grid seeding, Newton projection onto F = 0 and Poisson-disk
/// thinning at radius 0.7 * target_h.
SurfaceNodeSet implicit_surface_nodes(const ImplicitSurface& surface, double target_h,
                                      std::uint64_t seed = 1);

/// Planar rose curve (r0 + cos(k t)) (cos t, sin t), equispaced in arclength.
SurfaceNodeSet rose_curve_nodes(double r0, int k, double h);
/// Total arclength of the rose curve.
double rose_curve_length(double r0, int k);

/// Fibonacci directions scaled to radius 1 + gamma sin(k phi), phi the polar
/// angle from +z.
SurfaceNodeSet bumpy_sphere_nodes(double gamma, int k, std::size_t n);

enum class PointCloudFormat { xyz_csv, ply };

/// Reads a point cloud; missing normals are estimated with k_nn neighbours.
SurfaceNodeSet load_point_cloud(const std::filesystem::path& path, PointCloudFormat format,
                                std::size_t k_nn = 12);

/// PCA normals from the k_nn-neighbourhood covariance, oriented consistently by
/// propagation along a minimum spanning tree of the neighbourhood graph and
/// pointed outward relative to the centroid.
std::vector<Eigen::Vector3d> estimate_normals(std::span<const Eigen::Vector3d> points,
                                              std::size_t k_nn);

/// Mean nearest-neighbour distance. Throws InputError on duplicate points.
double average_spacing(std::span<const Eigen::Vector3d> points, int dim = 3);

/// Writes an ASCII PLY with normals and any number of per-vertex scalar fields.
struct NamedField {
  std::string name;
  std::span<const double> values;
};
void write_ply(const std::filesystem::path& path, const SurfaceNodeSet& nodes,
               std::span<const NamedField> fields = {});

void write_xyz_csv(const std::filesystem::path& path, const SurfaceNodeSet& nodes);

}  // namespace surfpde
