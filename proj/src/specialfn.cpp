#include "gffi/specialfn.hpp"

#include <cmath>

#include "gffi/error.hpp"

namespace gffi {

namespace {

constexpr double kNearOne = 1e-4;

cplx ipow(cplx z, int s) {
  cplx r = 1.0;
  cplx b = s >= 0 ? z : 1.0 / z;
  for (unsigned e = static_cast<unsigned>(std::abs(s)); e; e >>= 1) {
    if (e & 1u) r *= b;
    b *= b;
  }
  return r;
}

}  // namespace

cplx jacobi(Shift a, int s, cplx z) {
  if (z == cplx(0.0)) throw Error(ErrorKind::InvalidArgument, "jacobi at z = 0");
  if (s < 0) throw Error(ErrorKind::InvalidArgument, "jacobi degree must be >= 0");
  if (a == Shift::Minus) return 0.5 * (ipow(z, s) + ipow(z, -s));
  if (std::abs(z - 1.0) < kNearOne) {
    cplx sum = 1.0, zp = 1.0, zm = 1.0;
    const cplx zi = 1.0 / z;
    for (int j = 1; j <= s; ++j) {
      zp *= z;
      zm *= zi;
      sum += zp + zm;
    }
    return sum;
  }
  return (ipow(z, s + 1) - ipow(z, -s)) / (z - 1.0);
}

double weight(Shift a, int s) {
  if (s < 0) throw Error(ErrorKind::InvalidArgument, "weight needs s >= 0");
  if (a == Shift::Plus) return 1.0;
  return s > 0 ? 2.0 : 1.0;
}

double measure_density(Shift a, double theta) {
  if (a == Shift::Minus) return 0.5;
  const double h = std::sin(0.5 * theta);
  return h * h;
}

}  // namespace gffi
