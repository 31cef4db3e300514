#include "surfpde/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <unordered_map>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "surfpde/error.hpp"
#include "surfpde/neighbor_index.hpp"

namespace surfpde {

using Eigen::Matrix3d;
using Eigen::Vector3d;

SurfaceNodeSet::SurfaceNodeSet(int dim, std::vector<Vector3d> points, std::vector<Vector3d> normals)
    : dim_(dim), points_(std::move(points)), normals_(std::move(normals)) {
  if (dim != 2 && dim != 3) throw InputError("SurfaceNodeSet: dimension must be 2 or 3");
  if (points_.empty()) throw InputError("SurfaceNodeSet: empty node set");
  if (points_.size() != normals_.size())
    throw InputError("SurfaceNodeSet: point and normal counts differ");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite() || !normals_[i].allFinite())
      throw InputError("SurfaceNodeSet: non-finite coordinate at node " + std::to_string(i));
    if (dim == 2 && (points_[i].z() != 0.0 || normals_[i].z() != 0.0))
      throw InputError("SurfaceNodeSet: planar node set with nonzero z at node " + std::to_string(i));
    if (std::abs(normals_[i].norm() - 1.0) > 1e-12)
      throw InputError("SurfaceNodeSet: normal " + std::to_string(i) + " is not unit length");
  }
  h_ = points_.size() >= 2 ? average_spacing(points_, dim) : 1.0;
}

// ---------------------------------------------------------------------------
// Implicit surfaces

Vector3d ImplicitSurface::unit_normal(const Vector3d& x) const { return gradient(x).normalized(); }

double ImplicitSurface::mean_curvature(const Vector3d& x) const {
  const Vector3d g = gradient(x);
  const double gn = g.norm();
  const Vector3d n = g / gn;
  const Matrix3d H = hessian(x);
  return (H.trace() - n.dot(H * n)) / gn;
}

double surface_laplacian(const ImplicitSurface& surface, const Vector3d& x, const Vector3d& grad_u,
                         const Matrix3d& hess_u) {
  const Vector3d n = surface.unit_normal(x);
  return hess_u.trace() - n.dot(hess_u * n) - surface.mean_curvature(x) * n.dot(grad_u);
}

namespace surfaces {

ImplicitSurface unit_sphere() {
  ImplicitSurface s;
  s.name = "sphere";
  s.value = [](const Vector3d& x) { return x.squaredNorm() - 1.0; };
  s.gradient = [](const Vector3d& x) -> Vector3d { return 2.0 * x; };
  s.hessian = [](const Vector3d&) -> Matrix3d { return 2.0 * Matrix3d::Identity(); };
  s.box_lo = Vector3d::Constant(-1.2);
  s.box_hi = Vector3d::Constant(1.2);
  return s;
}

ImplicitSurface tooth() {
  ImplicitSurface s;
  s.name = "tooth";
  s.value = [](const Vector3d& x) {
    return x.array().pow(8).sum() - x.squaredNorm();
  };
  s.gradient = [](const Vector3d& x) -> Vector3d {
    return (8.0 * x.array().pow(7) - 2.0 * x.array()).matrix();
  };
  s.hessian = [](const Vector3d& x) -> Matrix3d {
    return (56.0 * x.array().pow(6) - 2.0).matrix().asDiagonal();
  };
  s.box_lo = Vector3d::Constant(-1.25);
  s.box_hi = Vector3d::Constant(1.25);
  return s;
}

ImplicitSurface torus(double R, double r) {
  if (!(r > 0.0) || !(R > r)) throw InputError("torus: require 0 < r < R");
  ImplicitSurface s;
  s.name = "torus";
  s.value = [R, r](const Vector3d& x) {
    const double rho = std::hypot(x.x(), x.y());
    return (R - rho) * (R - rho) + x.z() * x.z() - r * r;
  };
  s.gradient = [R](const Vector3d& x) -> Vector3d {
    const double rho = std::hypot(x.x(), x.y());
    const double c = -2.0 * (R - rho) / rho;
    return {c * x.x(), c * x.y(), 2.0 * x.z()};
  };
  s.hessian = [R](const Vector3d& x) -> Matrix3d {
    const double rho = std::hypot(x.x(), x.y());
    const double rho3 = rho * rho * rho;
    Matrix3d H = Matrix3d::Zero();
    H(0, 0) = 2.0 - 2.0 * R * x.y() * x.y() / rho3;
    H(1, 1) = 2.0 - 2.0 * R * x.x() * x.x() / rho3;
    H(0, 1) = H(1, 0) = 2.0 * R * x.x() * x.y() / rho3;
    H(2, 2) = 2.0;
    return H;
  };
  const double m = 1.1 * (R + r);
  s.box_lo = Vector3d(-m, -m, -1.2 * r);
  s.box_hi = Vector3d(m, m, 1.2 * r);
  return s;
}

ImplicitSurface dziuk() {
  ImplicitSurface s;
  s.name = "dziuk";
  s.value = [](const Vector3d& x) {
    const double a = x.x() - x.z() * x.z();
    return a * a + x.y() * x.y() + x.z() * x.z() - 1.0;
  };
  s.gradient = [](const Vector3d& x) -> Vector3d {
    const double a = x.x() - x.z() * x.z();
    return {2.0 * a, 2.0 * x.y(), -4.0 * x.z() * a + 2.0 * x.z()};
  };
  s.hessian = [](const Vector3d& x) -> Matrix3d {
    Matrix3d H = Matrix3d::Zero();
    H(0, 0) = 2.0;
    H(1, 1) = 2.0;
    H(0, 2) = H(2, 0) = -4.0 * x.z();
    H(2, 2) = -4.0 * x.x() + 12.0 * x.z() * x.z() + 2.0;
    return H;
  };
  s.box_lo = Vector3d(-1.5, -1.2, -1.2);
  s.box_hi = Vector3d(2.2, 1.2, 1.2);
  return s;
}

}  // namespace surfaces

// ---------------------------------------------------------------------------
// Generators

SurfaceNodeSet fibonacci_sphere_nodes(std::size_t n) {
  if (n < 4) throw InputError("fibonacci_sphere_nodes: need at least 4 nodes");
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vector3d> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
    const double rho = std::sqrt((1.0 - z) * (1.0 + z));
    const double t = golden_angle * static_cast<double>(i);
    pts[i] = Vector3d(rho * std::cos(t), rho * std::sin(t), z);
  }
  auto normals = pts;
  return SurfaceNodeSet(3, std::move(pts), std::move(normals));
}

SurfaceNodeSet torus_nodes(std::size_t n_target, double R, double r) {
  if (!(r > 0.0) || !(R > r)) throw InputError("torus_nodes: require 0 < r < R");
  if (n_target < 16) throw InputError("torus_nodes: need at least 16 nodes");
  const double pi = std::numbers::pi;
  const double area = 4.0 * pi * pi * R * r;
  const double a = std::sqrt(area / static_cast<double>(n_target));
  const int rings = std::max(3, static_cast<int>(std::lround(2.0 * pi * r / a)));
  const double phase = 0.5 * (std::sqrt(5.0) - 1.0);

  // Per-ring counts proportional to ring circumference, then rescaled so the
  // total lands on n_target up to rounding.
  std::vector<double> circumference(rings);
  double total = 0.0;
  for (int j = 0; j < rings; ++j) {
    const double v = 2.0 * pi * (j + 0.5) / rings;
    circumference[j] = R + r * std::cos(v);
    total += circumference[j];
  }

  std::vector<Vector3d> pts, nrm;
  pts.reserve(n_target + rings);
  nrm.reserve(n_target + rings);
  for (int j = 0; j < rings; ++j) {
    const double v = 2.0 * pi * (j + 0.5) / rings;
    const int count =
        std::max(3, static_cast<int>(std::lround(static_cast<double>(n_target) * circumference[j] / total)));
    const double offset = std::fmod(phase * j, 1.0);
    for (int i = 0; i < count; ++i) {
      const double u = 2.0 * pi * (i + offset) / count;
      const double cu = std::cos(u), su = std::sin(u), cv = std::cos(v), sv = std::sin(v);
      pts.emplace_back((R + r * cv) * cu, (R + r * cv) * su, r * sv);
      nrm.emplace_back(cv * cu, cv * su, sv);
    }
  }
  for (auto& n : nrm) n.normalize();
  return SurfaceNodeSet(3, std::move(pts), std::move(nrm));
}

namespace {

struct CellKey {
  long i, j, k;
  bool operator==(const CellKey&) const = default;
};
struct CellKeyHash {
  std::size_t operator()(const CellKey& c) const {
    std::size_t h = static_cast<std::size_t>(c.i) * 73856093u;
    h ^= static_cast<std::size_t>(c.j) * 19349663u;
    h ^= static_cast<std::size_t>(c.k) * 83492791u;
    return h;
  }
};

}  // namespace

SurfaceNodeSet implicit_surface_nodes(const ImplicitSurface& surface, double target_h, std::uint64_t seed) {
  if (!(target_h > 0.0)) throw InputError("implicit_surface_nodes: target_h must be positive");
  const double g = 0.5 * target_h;
  const Vector3d extent = surface.box_hi - surface.box_lo;
  const long nx = static_cast<long>(std::ceil(extent.x() / g)) + 1;
  const long ny = static_cast<long>(std::ceil(extent.y() / g)) + 1;
  const long nz = static_cast<long>(std::ceil(extent.z() / g)) + 1;
  const double band = 0.5 * std::sqrt(3.0) * g;

  std::vector<Vector3d> projected;
  for (long i = 0; i < nx; ++i) {
    for (long j = 0; j < ny; ++j) {
      for (long k = 0; k < nz; ++k) {
        Vector3d x = surface.box_lo + g * Vector3d(i, j, k);
        const double f0 = surface.value(x);
        const Vector3d g0 = surface.gradient(x);
        const double gn0 = g0.norm();
        if (gn0 == 0.0 || std::abs(f0) / gn0 > band) continue;

        const Vector3d start = x;
        bool converged = false;
        for (int it = 0; it < 50; ++it) {
          const double f = surface.value(x);
          if (std::abs(f) <= 1e-13 * (1.0 + x.norm())) {
            converged = true;
            break;
          }
          const Vector3d grad = surface.gradient(x);
          const double gg = grad.squaredNorm();
          if (gg == 0.0) break;
          x -= (f / gg) * grad;
        }
        if (!converged || (x - start).norm() > 4.0 * g) continue;
        if (surface.gradient(x).norm() == 0.0) continue;
        projected.push_back(x);
      }
    }
  }
  if (projected.empty()) throw InputError("implicit_surface_nodes: no seed converged onto the surface");

  // Deterministic Fisher-Yates shuffle so the greedy thinning has no grid bias.
  std::mt19937_64 rng(seed);
  for (std::size_t i = projected.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(projected[i - 1], projected[j]);
  }

  const double radius = 0.7 * target_h;
  const double r2 = radius * radius;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> grid;
  auto key_of = [&](const Vector3d& p) {
    return CellKey{static_cast<long>(std::floor(p.x() / radius)), static_cast<long>(std::floor(p.y() / radius)),
                   static_cast<long>(std::floor(p.z() / radius))};
  };

  std::vector<Vector3d> pts, nrm;
  for (const auto& p : projected) {
    const CellKey c = key_of(p);
    bool ok = true;
    for (long di = -1; di <= 1 && ok; ++di)
      for (long dj = -1; dj <= 1 && ok; ++dj)
        for (long dk = -1; dk <= 1 && ok; ++dk) {
          auto it = grid.find(CellKey{c.i + di, c.j + dj, c.k + dk});
          if (it == grid.end()) continue;
          for (std::size_t q : it->second)
            if ((pts[q] - p).squaredNorm() < r2) {
              ok = false;
              break;
            }
        }
    if (!ok) continue;
    grid[c].push_back(pts.size());
    pts.push_back(p);
    nrm.push_back(surface.unit_normal(p));
  }
  if (pts.size() < 4) throw InputError("implicit_surface_nodes: fewer than 4 nodes generated");
  return SurfaceNodeSet(3, std::move(pts), std::move(nrm));
}

namespace {

struct Rose {
  double r0;
  int k;
  double speed(double t) const {
    const double rho = r0 + std::cos(k * t);
    const double drho = -k * std::sin(k * t);
    return std::sqrt(rho * rho + drho * drho);
  }
};

}  // namespace

double rose_curve_length(double r0, int k) {
  if (!(r0 > 1.0)) throw InputError("rose_curve: r0 must exceed 1");
  if (k < 1) throw InputError("rose_curve: k must be positive");
  const Rose rose{r0, k};
  using boost::math::quadrature::gauss_kronrod;
  // Integrate petal by petal so the adaptive rule sees a smooth integrand.
  double total = 0.0;
  const double petal = 2.0 * std::numbers::pi / k;
  for (int p = 0; p < k; ++p)
    total += gauss_kronrod<double, 31>::integrate([&](double t) { return rose.speed(t); }, p * petal,
                                                  (p + 1) * petal, 15, 1e-14);
  return total;
}

SurfaceNodeSet rose_curve_nodes(double r0, int k, double h) {
  if (!(r0 > 1.0)) throw InputError("rose_curve_nodes: r0 must exceed 1");
  if (!(h > 0.0)) throw InputError("rose_curve_nodes: h must be positive");
  if (k < 1) throw InputError("rose_curve_nodes: k must be positive");
  const Rose rose{r0, k};
  const double two_pi = 2.0 * std::numbers::pi;
  const double length = rose_curve_length(r0, k);
  const auto n = static_cast<std::size_t>(std::max(4L, std::lround(length / h)));
  const double step = length / static_cast<double>(n);

  using boost::math::quadrature::gauss;
  auto segment = [&](double a, double b) {
    return gauss<double, 20>::integrate([&](double t) { return rose.speed(t); }, a, b);
  };

  // Cumulative arclength on fine panels.
  const std::size_t panels = 64 * static_cast<std::size_t>(k);
  const double dt = two_pi / static_cast<double>(panels);
  std::vector<double> cumulative(panels + 1, 0.0);
  for (std::size_t p = 0; p < panels; ++p) cumulative[p + 1] = cumulative[p] + segment(p * dt, (p + 1) * dt);
  // Rescale so the panel sum matches the adaptive total exactly.
  const double fix = length / cumulative.back();
  for (auto& c : cumulative) c *= fix;

  std::vector<Vector3d> pts(n), nrm(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = step * static_cast<double>(j);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
    const std::size_t p = std::min<std::size_t>(panels - 1, static_cast<std::size_t>(it - cumulative.begin()) - 1);
    const double a = p * dt;
    double t = a + dt * (s - cumulative[p]) / (cumulative[p + 1] - cumulative[p]);
    for (int it2 = 0; it2 < 30; ++it2) {
      const double residual = cumulative[p] + fix * segment(a, t) - s;
      const double dtn = residual / (fix * rose.speed(t));
      t -= dtn;
      if (std::abs(dtn) < 1e-15) break;
    }
    const double rho = r0 + std::cos(k * t);
    const double drho = -k * std::sin(k * t);
    const double c = std::cos(t), si = std::sin(t);
    pts[j] = Vector3d(rho * c, rho * si, 0.0);
    const double dx = drho * c - rho * si;
    const double dy = drho * si + rho * c;
    nrm[j] = Vector3d(dy, -dx, 0.0).normalized();
  }
  return SurfaceNodeSet(2, std::move(pts), std::move(nrm));
}

SurfaceNodeSet bumpy_sphere_nodes(double gamma, int k, std::size_t n) {
  if (!(std::abs(gamma) < 1.0)) throw InputError("bumpy_sphere_nodes: |gamma| must be below 1");
  if (k < 0) throw InputError("bumpy_sphere_nodes: k must be nonnegative");
  if (gamma == 0.0) return fibonacci_sphere_nodes(n);
  const SurfaceNodeSet base = fibonacci_sphere_nodes(n);
  std::vector<Vector3d> pts(n), nrm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector3d& d = base.point(i);
    const double phi = std::acos(std::clamp(d.z(), -1.0, 1.0));
    const double r = 1.0 + gamma * std::sin(k * phi);
    const double dr = gamma * k * std::cos(k * phi);
    pts[i] = r * d;
    // grad(|x| - r(phi(x))) = xhat - r'(phi) / |x| * e_phi
    const double rho = std::hypot(d.x(), d.y());
    const Vector3d e_phi(d.z() * d.x() / rho, d.z() * d.y() / rho, -rho);
    nrm[i] = (d - (dr / r) * e_phi).normalized();
  }
  return SurfaceNodeSet(3, std::move(pts), std::move(nrm));
}

// ---------------------------------------------------------------------------
// Normals and spacing

std::vector<Vector3d> estimate_normals(std::span<const Vector3d> points, std::size_t k_nn) {
  const std::size_t n = points.size();
  if (k_nn < 6) throw InputError("estimate_normals: k_nn must be at least 6");
  if (n <= k_nn) throw InputError("estimate_normals: need more points than k_nn");

  const NeighborIndex index(points, 3);
  std::vector<std::vector<std::size_t>> nbrs(n);
  std::vector<Vector3d> normals(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto found = index.knn(points[i], k_nn);
    Vector3d mean = Vector3d::Zero();
    for (const auto& nb : found) mean += points[nb.index];
    mean /= static_cast<double>(found.size());
    Matrix3d cov = Matrix3d::Zero();
    for (const auto& nb : found) {
      const Vector3d d = points[nb.index] - mean;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Matrix3d> eig(cov);
    const auto& ev = eig.eigenvalues();
    if (!(ev(1) > 1e-12 * ev(2))) throw InputError("estimate_normals: collinear neighbourhood at point " + std::to_string(i));
    normals[i] = eig.eigenvectors().col(0).normalized();
    for (const auto& nb : found)
      if (nb.index != i) nbrs[i].push_back(nb.index);
  }

  // Symmetrize the neighbourhood graph.
  std::vector<std::vector<std::size_t>> adj = nbrs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : nbrs[i]) adj[j].push_back(i);
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  Vector3d centroid = Vector3d::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);

  // Prim's algorithm per connected component with weight 1 - |n_i . n_j|.
  std::vector<char> done(n, 0);
  std::vector<std::size_t> component;
  for (std::size_t root = 0; root < n; ++root) {
    if (done[root]) continue;
    component.clear();
    using Item = std::tuple<double, std::size_t, std::size_t>;  // weight, node, parent
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, root, root);
    while (!pq.empty()) {
      auto [w, v, parent] = pq.top();
      pq.pop();
      if (done[v]) continue;
      done[v] = 1;
      if (v != parent && normals[v].dot(normals[parent]) < 0.0) normals[v] = -normals[v];
      component.push_back(v);
      for (std::size_t u : adj[v])
        if (!done[u]) pq.emplace(1.0 - std::abs(normals[v].dot(normals[u])), u, v);
    }
    double outward = 0.0;
    for (std::size_t v : component) outward += normals[v].dot(points[v] - centroid);
    if (outward < 0.0)
      for (std::size_t v : component) normals[v] = -normals[v];
  }
  for (auto& nv : normals) nv.normalize();
  return normals;
}

double average_spacing(std::span<const Vector3d> points, int dim) {
  if (points.size() < 2) throw InputError("average_spacing: need at least 2 points");
  const NeighborIndex index(points, dim);
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto nb = index.knn(points[i], 2);
    // nb[0] is the point itself (distance 0); a second zero means a duplicate.
    const double d = std::sqrt(nb[1].dist2);
    if (d == 0.0) throw InputError("average_spacing: duplicate point at index " + std::to_string(i));
    sum += d;
  }
  return sum / static_cast<double>(points.size());
}

}  // namespace surfpde
