#include "gss/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace gss {
namespace {

constexpr std::array<std::uint32_t, 64> kPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,  59,  61,  67,  71,  73,  79,
    83,  89,  97,  101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

double radical_inverse(std::uint64_t i, std::uint32_t base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::split(std::uint64_t stream) const {
  Rng mixer(state_ ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
  return Rng(mixer.next());
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec Rng::unit_vector(std::size_t dim) {
  Vec v(static_cast<Eigen::Index>(dim));
  do {
    for (auto& c : v) c = normal();
  } while (v.norm() < 1e-12);
  return v.normalized();
}

Vec Halton::next() {
  if (dim_ > kPrimes.size()) throw std::invalid_argument("Halton dimension too large");
  Vec p(static_cast<Eigen::Index>(dim_));
  for (std::size_t k = 0; k < dim_; ++k) p(static_cast<Eigen::Index>(k)) = radical_inverse(index_, kPrimes[k]);
  ++index_;
  return p;
}

Vec halton_direction(const Vec& halton_point) {
  Vec z(halton_point.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double u = std::clamp(halton_point(k), 1e-12, 1.0 - 1e-12);
    z(k) = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * u - 1.0);
  }
  const double n = z.norm();
  if (n < 1e-12) {
    z.setZero();
    z(0) = 1.0;
    return z;
  }
  return z / n;
}

}  // namespace gss
