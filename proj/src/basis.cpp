#include "mospline/basis.hpp"

#include <array>
#include <cmath>
#include <string>

#include "mospline/error.hpp"

namespace mospline {
namespace {

void check_order(int k) {
  if (k < 2 || k > kMaxOrder) {
    throw InvalidArgument("invalid-order", "B-spline order must lie in [2, " +
                                               std::to_string(kMaxOrder) + "], got " +
                                               std::to_string(k));
  }
}

// Cox-de Boor over the knots tau_j = -k/2 + j. Accepts k == 1 (the half-open
// box [-1/2, 1/2)), which the derivative formula needs internally.
double cox_de_boor(int k, double t) {
  const double half = 0.5 * k;
  if (!(t >= -half && t < half)) return 0.0;
  if (k >= 2 && t == -half) return 0.0;

  // Only the base interval containing t is nonzero.
  const int span = static_cast<int>(std::floor(t + half));
  std::array<double, kMaxOrder + 1> n{};
  n[span] = 1.0;

  for (int q = 2; q <= k; ++q) {
    const double inv = 1.0 / (q - 1);
    for (int j = 0; j <= k - q; ++j) {
      const double tau_j = -half + j;
      const double tau_jq = tau_j + q;
      n[j] = ((t - tau_j) * n[j] + (tau_jq - t) * n[j + 1]) * inv;
    }
  }
  return n[0];
}

double binomial(int n, int r) {
  double c = 1.0;
  for (int i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

}  // namespace

UniformBSpline::UniformBSpline(int order) : order_(order) { check_order(order); }

double UniformBSpline::operator()(double t) const { return cox_de_boor(order_, t); }

double UniformBSpline::derivative(double t, int r) const {
  if (r < 1) throw InvalidArgument("derivative order must be >= 1, got " + std::to_string(r));
  if (r >= order_) return 0.0;
  if (std::abs(t) > half_support()) return 0.0;
  // d^r N_k(t) = sum_j (-1)^j C(r, j) N_{k-r}(t + r/2 - j)
  const int low = order_ - r;
  double sum = 0.0;
  for (int j = 0; j <= r; ++j) {
    const double term = binomial(r, j) * cox_de_boor(low, t + 0.5 * r - j);
    sum += (j % 2 == 0) ? term : -term;
  }
  return sum;
}

double eval_basis(int k, double t) { return UniformBSpline(k)(t); }

double eval_basis_derivative(int k, double t, int r) { return UniformBSpline(k).derivative(t, r); }

}  // namespace mospline
