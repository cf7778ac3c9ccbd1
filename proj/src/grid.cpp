#include "ernscat/grid.hpp"

#include <algorithm>
#include <cmath>

namespace ern {

RadialGrid RadialGrid::uniform(double r_min, double r_max, int n) {
  if (n < 2 || !(r_max > r_min)) throw std::domain_error("RadialGrid::uniform: bad range");
  RadialGrid g;
  g.r = Eigen::ArrayXd::LinSpaced(n, r_min, r_max);
  return g;
}

RadialGrid RadialGrid::horizon_graded(double M, double zeta_in, double zeta_min,
                                      double zeta_match, double dr_far, double r_max,
                                      int per_decade) {
  if (!(zeta_min > 0.0) || !(zeta_match > zeta_min) || !(r_max > M + zeta_match))
    throw std::domain_error("RadialGrid::horizon_graded: bad parameters");
  std::vector<double> pts;

  const double ratio = std::pow(10.0, 1.0 / per_decade);

  // Interior side: M - zeta down to M - zeta_in (descending offsets).
  if (zeta_in > 0.0) {
    std::vector<double> in;
    for (double z = zeta_min; z < zeta_in * (1.0 + 1e-12); z *= ratio) in.push_back(M - z);
    std::sort(in.begin(), in.end());
    pts.insert(pts.end(), in.begin(), in.end());
  }
  pts.push_back(M);
  for (double z = zeta_min; z < zeta_match * (1.0 + 1e-12); z *= ratio) pts.push_back(M + z);

  // Continue uniformly; first step matched to the last graded step.
  double r = pts.back();
  double step = std::min(dr_far, std::max(pts.back() - pts[pts.size() - 2], zeta_min));
  while (r < r_max - 1e-12) {
    step = std::min(dr_far, step * 1.15);
    r += step;
    if (r > r_max) r = r_max;
    pts.push_back(r);
  }

  RadialGrid g;
  g.r = Eigen::Map<Eigen::ArrayXd>(pts.data(), static_cast<int>(pts.size()));
  return g;
}

int RadialGrid::index_of(double rq, double tol) const {
  const auto* begin = r.data();
  const auto* end = r.data() + r.size();
  const auto* it = std::lower_bound(begin, end, rq - tol);
  if (it != end && std::abs(*it - rq) <= tol * std::max(1.0, std::abs(rq)))
    return static_cast<int>(it - begin);
  throw std::domain_error("RadialGrid::index_of: point not on grid");
}

Eigen::ArrayXd fd_weights(double x0, const Eigen::ArrayXd& nodes, int order) {
  // Fornberg (1988).
  const int n = static_cast<int>(nodes.size()) - 1;
  const int m = order;
  Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(n + 1, m + 1);
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j <= i - 1; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k)
        c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(m);
}

double fd_derivative(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, int j,
                     int order, int width) {
  const int n = static_cast<int>(x.size());
  if (width > n) width = n;
  int lo = j - width / 2;
  lo = std::max(0, std::min(lo, n - width));
  const Eigen::ArrayXd nodes = x.segment(lo, width);
  const Eigen::ArrayXd w = fd_weights(x[j], nodes, order);
  double acc = 0.0;
  for (int k = 0; k < width; ++k) acc += w[k] * y[lo + k];
  return acc;
}

double lagrange_interp(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y, double xq,
                       int width) {
  const int n = static_cast<int>(x.size());
  if (n == 0) throw std::domain_error("lagrange_interp: empty nodes");
  if (width > n) width = n;
  const auto* begin = x.data();
  int j = static_cast<int>(std::lower_bound(begin, begin + n, xq) - begin);
  int lo = std::max(0, std::min(j - width / 2, n - width));
  // Barycentric form.
  double num = 0.0, den = 0.0;
  for (int k = 0; k < width; ++k) {
    const double xk = x[lo + k];
    if (xq == xk) return y[lo + k];
    double w = 1.0;
    for (int l = 0; l < width; ++l)
      if (l != k) w /= (xk - x[lo + l]);
    const double t = w / (xq - xk);
    num += t * y[lo + k];
    den += t;
  }
  return num / den;
}

Eigen::ArrayXd cumtrapz(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  const int n = static_cast<int>(x.size());
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  for (int i = 1; i < n; ++i)
    out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return out;
}

Eigen::ArrayXd cumint4(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  const int n = static_cast<int>(x.size());
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(n);
  if (n < 4) return cumtrapz(x, y);
  for (int i = 1; i < n; ++i) {
    const int lo = std::max(0, std::min(i - 2, n - 4));
    // Integrate the cubic Lagrange interpolant through nodes lo..lo+3
    // over [x_{i-1}, x_i] by 3-point Gauss-Legendre (exact for cubics).
    const double a = x[i - 1], b = x[i];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double gauss = std::sqrt(3.0 / 5.0);
    const double xs[3] = {mid - half * gauss, mid, mid + half * gauss};
    const double ws[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double acc = 0.0;
    for (int q = 0; q < 3; ++q) {
      double val = 0.0;
      for (int k = 0; k < 4; ++k) {
        double lk = 1.0;
        for (int l = 0; l < 4; ++l)
          if (l != k) lk *= (xs[q] - x[lo + l]) / (x[lo + k] - x[lo + l]);
        val += lk * y[lo + k];
      }
      acc += ws[q] * val;
    }
    out[i] = out[i - 1] + half * acc;
  }
  return out;
}

double trapz(const Eigen::ArrayXd& x, const Eigen::ArrayXd& y) {
  double acc = 0.0;
  for (int i = 1; i < x.size(); ++i) acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return acc;
}

}  // namespace ern
