#include "gss/section.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gss/error.hpp"

namespace gss {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double lambda_of(const SurfaceJet& j, const Vec& y) { return y.dot(j.hess * y) / j.grad.squaredNorm(); }

PhasePoint phase_from_parameters(const DefiningSurface& surface, const Vec& direction, const Vec& covector) {
  auto x = shoot_ray(surface, direction);
  if (!x) throw Error(ErrorKind::regularity, "ray missed the surface");
  return project_to_surface(surface, *x, covector);
}

}  // namespace

double page_angle(const PhasePoint& phase) {
  const double x0 = phase.x(0), y0 = phase.y(0);
  if (x0 * x0 + y0 * y0 < 1e-20) throw Error(ErrorKind::on_binding, "page angle undefined on the binding");
  double a = std::atan2(y0, x0);
  if (a < 0.0) a += kTwoPi;
  return a >= kTwoPi ? 0.0 : a;
}

double a_value(const DefiningSurface& surface, const PhasePoint& phase) {
  const SurfaceJet j = surface.jet(phase.x);
  const double lambda = lambda_of(j, phase.y);
  const double x0 = phase.x(0);
  if (std::abs(x0) > 1e-4 * surface.scale()) return lambda * j.grad(0) / x0;
  Vec on_equator = phase.x;
  on_equator(0) = 0.0;
  return lambda * surface.jet(on_equator).hess(0, 0);
}

ThetaValue theta_of_field(const DefiningSurface& surface, const PhasePoint& phase) {
  const double x0 = phase.x(0), y0 = phase.y(0);
  const double r2 = x0 * x0 + y0 * y0;
  if (r2 < 1e-20) throw Error(ErrorKind::on_binding, "Θ(X_H) undefined on the binding");
  const double theta = a_value(surface, phase) * x0 * x0 + y0 * y0;
  return {theta, theta / r2};
}

EpsilonEstimate estimate_epsilon(const DefiningSurface& surface, std::size_t samples) {
  const auto dim = static_cast<Eigen::Index>(surface.ambient_dim());
  struct Candidate {
    double a;
    Vec direction;
    Vec covector;
  };
  std::vector<Candidate> found;
  found.reserve(samples);

  Halton seq(2 * surface.ambient_dim());
  const std::size_t binding_samples = std::max<std::size_t>(samples / 8, 1);
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec h = seq.next();
    Vec direction = halton_direction(h.head(dim));
    Vec covector = halton_direction(h.tail(dim));
    if (k < binding_samples) {
      // Phases on the binding: equator point, covector with y0 = 0.
      direction(0) = 0.0;
      covector(0) = 0.0;
      if (direction.norm() < 1e-8 || covector.norm() < 1e-8) continue;
    }
    try {
      const PhasePoint p = phase_from_parameters(surface, direction, covector);
      found.push_back({a_value(surface, p), p.x, covector});
    } catch (const Error&) {
    }
  }
  if (found.empty()) throw Error(ErrorKind::regularity, "no phases could be sampled");

  std::sort(found.begin(), found.end(), [](const Candidate& l, const Candidate& r) { return l.a < r.a; });
  found.resize(std::min<std::size_t>(found.size(), 10));

  EpsilonEstimate out;
  out.samples = samples;
  out.epsilon = std::numeric_limits<double>::infinity();
  for (Candidate c : found) {
    auto evaluate = [&](const Vec& direction, const Vec& covector) {
      try {
        return a_value(surface, phase_from_parameters(surface, direction, covector));
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    for (double delta = 0.05; delta > 1e-7; delta *= 0.5) {
      bool improved = true;
      for (int sweep = 0; improved && sweep < 50; ++sweep) {
        improved = false;
        for (Eigen::Index i = 0; i < 2 * dim; ++i)
          for (double sign : {1.0, -1.0}) {
            Vec d = c.direction, v = c.covector;
            (i < dim ? d(i) : v(i - dim)) += sign * delta;
            const double a = evaluate(d, v);
            if (a < c.a) {
              c = {a, d, v};
              improved = true;
            }
          }
      }
    }
    if (c.a < out.epsilon) {
      out.epsilon = c.a;
      out.argmin = phase_from_parameters(surface, c.direction, c.covector);
    }
  }
  if (!(out.epsilon > 0.0))
    throw Error(ErrorKind::non_positive_epsilon, "sampled minimum of A is " + std::to_string(out.epsilon));
  return out;
}

PhasePoint project_to_page(const DefiningSurface& surface, const PhasePoint& phase, double page_offset) {
  PhasePoint p = phase;
  if (page_offset == 0.0) {
    p.x(0) = 0.0;
    p.y(0) = std::max(p.y(0), 0.0);
    return project_to_surface(surface, p.x, p.y);
  }
  // Off x0 = 0 the projection moves (x0, y0), so rotate and project alternately.
  const double alpha = kPageAngle + page_offset;
  for (int k = 0; k < 50; ++k) {
    const double r = std::hypot(p.x(0), p.y(0));
    p.x(0) = r * std::cos(alpha);
    p.y(0) = r * std::sin(alpha);
    p = project_to_surface(surface, p.x, p.y);
    const double miss = std::remainder(std::atan2(p.y(0), p.x(0)) - alpha, kTwoPi);
    if (std::abs(miss) < 1e-14) break;
  }
  return p;
}

ReturnRecord return_map(const DefiningSurface& surface, const PhasePoint& start, const IntegratorConfig& config,
                        double page_offset, int turns) {
  config.validate();
  if (turns < 1) throw Error(ErrorKind::config, "turns must be positive");
  ReturnRecord rec;
  rec.start = project_to_page(surface, start, page_offset);
  const double r2 = rec.start.x(0) * rec.start.x(0) + rec.start.y(0) * rec.start.y(0);
  if (r2 < 1e-12) throw Error(ErrorKind::on_binding, "start is within 1e-6 of the binding");

  const double target = kTwoPi * turns;
  FlowState prev;
  prev.phase = rec.start;
  FlowState cur = prev;
  while (cur.unwrapped_angle < target) {
    if (++rec.steps > config.max_steps)
      throw Error(ErrorKind::max_steps_exceeded, "no return after " + std::to_string(config.max_steps) + " steps");
    prev = cur;
    cur = step(surface, prev, config);
    rec.max_drift = std::max(rec.max_drift, cur.drift);
    if (!(cur.unwrapped_angle > prev.unwrapped_angle))
      throw Error(ErrorKind::non_positive_epsilon, "winding angle decreased along the flow");
  }

  // Bisection on the length of the final step.
  const double h = cur.time - prev.time;
  double lo = 0.0, hi = h;
  FlowState best = cur;
  for (int k = 0; k < 200 && std::abs(best.unwrapped_angle - target) >= 1e-12; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const FlowState trial = step(surface, prev, config, mid);
    if (trial.unwrapped_angle < target) lo = mid;
    else hi = mid;
    if (std::abs(trial.unwrapped_angle - target) < std::abs(best.unwrapped_angle - target)) best = trial;
  }
  rec.max_drift = std::max(rec.max_drift, best.drift);
  rec.tau = best.time;
  rec.angle_total = best.unwrapped_angle;
  rec.end = project_to_page(surface, best.phase, page_offset);
  return rec;
}

PhasePoint random_page_start(const DefiningSurface& surface, Rng& rng) {
  const auto dim = static_cast<Eigen::Index>(surface.ambient_dim());
  for (int attempt = 0; attempt < 100; ++attempt) {
    Vec direction = Vec::Zero(dim);
    direction.tail(dim - 1) = rng.unit_vector(surface.n());
    auto x = shoot_ray(surface, direction);
    if (!x) continue;
    Vec y = rng.unit_vector(surface.ambient_dim());
    y(0) = std::abs(y(0));
    try {
      PhasePoint p = project_to_page(surface, {*x, y});
      if (p.y(0) * p.y(0) >= 1e-12) return p;
    } catch (const Error&) {
    }
  }
  throw Error(ErrorKind::regularity, "could not sample a page start");
}

Mat page_tangent_basis(const DefiningSurface& surface, const PhasePoint& phase) {
  const auto dim = static_cast<Eigen::Index>(surface.ambient_dim());
  const SurfaceJet j = surface.jet(phase.x);
  Mat c = Mat::Zero(4, 2 * dim);
  c.block(0, 0, 1, dim) = j.grad.transpose();
  c(1, 0) = 1.0;
  c.block(2, 0, 1, dim) = (j.hess * phase.y).transpose();
  c.block(2, dim, 1, dim) = j.grad.transpose();
  c.block(3, dim, 1, dim) = phase.y.transpose();
  return orthonormal_null_space(c);
}

SymplecticityDefect symplecticity_defect(const DefiningSurface& surface, const PhasePoint& start, double h,
                                         const IntegratorConfig& config) {
  const auto dim = static_cast<Eigen::Index>(surface.ambient_dim());
  const ReturnRecord center = return_map(surface, start, config);
  const PhasePoint& p = center.start;
  const PhasePoint& q = center.end;
  const Mat bp = page_tangent_basis(surface, p);
  const Mat bq = page_tangent_basis(surface, q);
  const Eigen::Index m = bp.cols();

  auto omega = [dim](const Mat& b) {
    return Mat(b.topRows(dim).transpose() * b.bottomRows(dim) - b.bottomRows(dim).transpose() * b.topRows(dim));
  };

  Mat jac(m, m);
  SymplecticityDefect out;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Vec v = bp.col(k);
    const PhasePoint plus{p.x + h * v.head(dim), p.y + h * v.tail(dim)};
    const PhasePoint minus{p.x - h * v.head(dim), p.y - h * v.tail(dim)};
    const ReturnRecord rp = return_map(surface, plus, config);
    const ReturnRecord rm = return_map(surface, minus, config);
    Vec dpsi(2 * dim);
    dpsi.head(dim) = (rp.end.x - rm.end.x) / (2.0 * h);
    dpsi.tail(dim) = (rp.end.y - rm.end.y) / (2.0 * h);
    jac.col(k) = bq.transpose() * dpsi;

    const double dtau = (rp.tau - rm.tau) / (2.0 * h);
    const double pulled = q.y.dot(dpsi.head(dim));
    const double original = p.y.dot(v.head(dim));
    out.exactness = std::max(out.exactness, std::abs(pulled - original - dtau));
  }
  out.symplectic = (jac.transpose() * omega(bq) * jac - omega(bp)).cwiseAbs().maxCoeff();
  return out;
}

NormalHessianSample normal_hessian(const DefiningSurface& surface, const PhasePoint& binding_point) {
  if (std::abs(binding_point.x(0)) > 1e-8 || std::abs(binding_point.y(0)) > 1e-8)
    throw Error(ErrorKind::not_on_binding, "normal Hessian needs x0 = y0 = 0");
  const SurfaceJet j = surface.jet(binding_point.x);
  NormalHessianSample out;
  out.binding_point = binding_point;
  out.s00 = binding_point.y.dot(j.hess * binding_point.y) * j.hess(0, 0) / j.grad.squaredNorm();
  out.s11 = 1.0;
  return out;
}

PhasePoint make_binding_point(const DefiningSurface& surface, const Vec& x, const Vec& y_direction) {
  Vec xb = x, yb = y_direction;
  xb(0) = 0.0;
  yb(0) = 0.0;
  PhasePoint p = project_to_surface(surface, xb, yb);
  p.x(0) = 0.0;
  p.y(0) = 0.0;
  return p;
}

BoundaryExtrapolation boundary_return_extrapolation(const DefiningSurface& surface, const PhasePoint& binding_point,
                                                    std::span<const double> offsets, const IntegratorConfig& config) {
  if (offsets.size() < 2) throw Error(ErrorKind::config, "need at least two offsets");
  for (std::size_t i = 0; i < offsets.size(); ++i)
    if (!(offsets[i] > 0.0) || (i > 0 && !(offsets[i] < offsets[i - 1])))
      throw Error(ErrorKind::config, "offsets must be positive and decreasing");
  const auto dim = static_cast<Eigen::Index>(surface.ambient_dim());
  const PhasePoint b = normal_hessian(surface, binding_point).binding_point;

  BoundaryExtrapolation out;
  std::vector<Vec> states;
  for (double delta : offsets) {
    PhasePoint s = b;
    s.y = std::sqrt(1.0 - delta * delta) * b.y;
    s.y(0) = delta;
    const ReturnRecord rec = return_map(surface, s, config);
    out.ends.push_back(rec.end);
    Vec z(2 * dim);
    z << rec.end.x, rec.end.y;
    states.push_back(std::move(z));
  }
  const std::size_t n = states.size();
  const double last = (states[n - 1] - states[n - 2]).norm();
  out.offset_ratio = offsets[n - 1] / offsets[n - 2];
  if (n >= 3) {
    const double previous = (states[n - 2] - states[n - 3]).norm();
    out.convergence_ratio = previous > 0.0 ? last / previous : 0.0;
    if (!(out.convergence_ratio < 1.0))
      throw Error(ErrorKind::non_convergent, "endpoint differences do not contract (ratio " +
                                                 std::to_string(out.convergence_ratio) + ")");
  }
  // Neville extrapolation of the endpoint polynomial in the offset to 0.
  std::vector<Vec> table = states;
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i) {
      const double di = offsets[i], dl = offsets[i + level];
      table[i] = (dl * table[i] - di * table[i + 1]) / (dl - di);
    }
  PhasePoint limit{table[0].head(dim), table[0].tail(dim)};
  limit.x(0) = 0.0;
  limit.y(0) = 0.0;
  out.limit = make_binding_point(surface, limit.x, limit.y);
  return out;
}

}  // namespace gss
