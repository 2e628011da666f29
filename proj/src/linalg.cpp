#include "gss/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace gss {

SymmetricEigen jacobi_eigen(const Mat& symmetric, double tolerance, int max_sweeps) {
  const Eigen::Index n = symmetric.rows();
  Mat a = symmetric;
  Mat v = Mat::Identity(n, n);
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= tolerance * scale) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });
  SymmetricEigen out{Vec(n), Mat(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

Mat orthonormal_null_space(const Mat& constraints) {
  const Eigen::Index rows = constraints.rows();
  const Eigen::Index cols = constraints.cols();
  Eigen::HouseholderQR<Mat> qr(constraints.transpose());
  const Mat q = qr.householderQ() * Mat::Identity(cols, cols);
  return q.rightCols(cols - rows);
}

}  // namespace gss
