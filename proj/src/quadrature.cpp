#include "gss/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace gss {
namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGauss = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kKronrod[7] * fc;
  double gauss = kGauss[3] * fc;
  for (std::size_t i = 0; i < 7; ++i) {
    const double pair = f(c - h * kNodes[i]) + f(c + h * kNodes[i]);
    kronrod += kKronrod[i] * pair;
    if (i % 2 == 1) gauss += kGauss[i / 2] * pair;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol, std::size_t max_intervals) {
  std::priority_queue<Segment> heap;
  Segment first = rule(f, a, b);
  double value = first.value, error = first.error;
  heap.push(first);
  while (error > std::max(abs_tol, rel_tol * std::abs(value)) && heap.size() < max_intervals) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;
    heap.pop();
    const Segment left = rule(f, worst.a, mid), right = rule(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running totals.
  QuadratureResult out;
  out.intervals = heap.size();
  while (!heap.empty()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
    heap.pop();
  }
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

}  // namespace gss
