#pragma once

namespace mospline {

/// Largest supported kernel order. Orders above this are rejected with
/// an invalid-order error.
inline constexpr int kMaxOrder = 32;

/**
 * Centered uniform B-spline N_k of order k (degree k-1).
 *
 * The knots are -k/2, -k/2+1, ..., k/2, so the support is [-k/2, k/2] and
 * N_k is even. Values come straight from the Cox-de Boor recurrence with
 * half-open base intervals; both support ends are pinned to 0.
 *
 * This is the moving kernel: every curve and surface blend evaluates
 * translated copies N_k(t - t_i).
 */
class UniformBSpline {
 public:
  explicit UniformBSpline(int order);

  int order() const noexcept { return order_; }
  double half_support() const noexcept { return 0.5 * order_; }

  double operator()(double t) const;

  /// r-th derivative (r >= 1). Where the derivative jumps, the right-hand
  /// limit is returned.
  double derivative(double t, int r) const;

 private:
  int order_;
};

/// N_k(t). Throws InvalidArgument("invalid-order") for k < 2 or k > kMaxOrder.
double eval_basis(int k, double t);

/// d^r/dt^r N_k(t), right-hand limit at breakpoints; 0 for r >= k.
/// Throws InvalidArgument for r < 1 or an invalid order.
double eval_basis_derivative(int k, double t, int r);

}  // namespace mospline
