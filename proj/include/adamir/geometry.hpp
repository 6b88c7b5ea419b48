#pragma once

#include <Eigen/Core>
#include <string_view>

namespace adamir {

/// Primal points x ∈ X ⊆ ℝᵈ.
using Point = Eigen::VectorXd;
/// Dual vectors (gradients, gradient signals, mirror coordinates).
using DualVector = Eigen::VectorXd;

enum class GeometryKind { Euclidean, Entropic, LogBarrier };
enum class AmbientNorm { L2, L1 };

std::string_view to_string(GeometryKind kind);

/// Coordinates at or below this value are clamped before taking logarithms.
inline constexpr double kLogFloor = 1e-300;

/// A Bregman reference function h together with its divergence, mirror map and prox-mapping.
///
/// Three closed-form kernels are shipped:
///   - Euclidean:  h(x) = ½‖x‖₂² on ℝᵈ, K = 1 in L2.
///   - Entropic:   h(x) = Σ xᵢ log xᵢ on a product of `blocks` unit simplices of equal size,
///                 K = 1 in the block norm ‖x‖ = (Σ_b ‖x_b‖₁²)^½ (plain L1 for one block).
///   - LogBarrier: h(x) = −Σ log xᵢ on the open positive orthant. It is only strongly convex
///                 on bounded sets; K is declared by the caller (K = 1/R² on (0, R]ᵈ).
///
/// Objects are immutable and every member function is a pure function of its arguments.
class BregmanGeometry {
 public:
  static BregmanGeometry euclidean(Eigen::Index dimension);
  static BregmanGeometry entropic(Eigen::Index dimension);
  /// Product of `blocks` simplices, each of size `block_size` (row-major layout).
  static BregmanGeometry entropic_product(Eigen::Index blocks, Eigen::Index block_size);
  static BregmanGeometry log_barrier(Eigen::Index dimension, double modulus = 1.0);

  GeometryKind kind() const { return kind_; }
  Eigen::Index dimension() const { return dimension_; }
  Eigen::Index blocks() const { return blocks_; }
  Eigen::Index block_size() const { return dimension_ / blocks_; }
  double modulus() const { return modulus_; }
  AmbientNorm ambient_norm() const;

  /// Domain of h (closed simplex for Entropic); throws DomainViolation when violated.
  void check_domain(const Point& x) const;
  /// Domain of ∇h (prox domain).
  void check_prox_domain(const Point& x) const;
  bool in_prox_domain(const Point& x) const;

  double h_value(const Point& x) const;
  DualVector h_gradient(const Point& x) const;

  /// D(y, x) = h(y) − h(x) − ⟨∇h(x), y − x⟩.
  double divergence(const Point& y, const Point& x) const;
  /// D(x, y) + D(y, x) = ⟨∇h(x) − ∇h(y), x − y⟩.
  double symmetric_divergence(const Point& x, const Point& y) const;

  /// argmax_x {⟨y, x⟩ − h(x)}.
  Point mirror_map(const DualVector& y) const;
  /// argmin_y {⟨v, x − y⟩ + D(y, x)} = mirror_map(∇h(x) + v).
  Point prox_step(const Point& x, const DualVector& v) const;

  double norm(const Point& x) const;
  double dual_norm(const DualVector& v) const;

  /// Center of the feasible set. Only meaningful for Entropic; other kinds throw DomainViolation.
  Point barycenter() const;

 private:
  BregmanGeometry(GeometryKind kind, Eigen::Index dimension, Eigen::Index blocks, double modulus);

  void check_dimension(const Eigen::VectorXd& v) const;

  GeometryKind kind_;
  Eigen::Index dimension_;
  Eigen::Index blocks_;
  double modulus_;
};

}  // namespace adamir
