#include "svg.hpp"

#include <algorithm>
#include <sstream>

#include "gffi/format.hpp"

namespace gffi::svg {

namespace {

const char* colour(LozengeType t) {
  switch (t) {
    case LozengeType::I: return "#d95f02";
    case LozengeType::II: return "#1b9e77";
    case LozengeType::III: return "#7570b3";
  }
  return "#000";
}

}  // namespace

std::string tiling(const ParticleConfiguration& cfg) {
  const int levels = cfg.max_level();
  int width = 2;
  for (int ell = 1; ell <= levels; ++ell) {
    auto lv = cfg.level(ell);
    if (!lv.empty()) width = std::max(width, 2 * lv.front() + 4);
  }
  constexpr double kScale = 12.0;
  const double w = (width + 2) * kScale, h = (levels + 2) * kScale;
  // intro picture: horizontal 2s + [ell even], levels upward
  auto px = [&](int s, int ell) { return (2 * s + (ell % 2 == 0 ? 1 : 0) + 1) * kScale; };
  auto py = [&](int ell) { return h - ell * kScale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_real(w) << "\" height=\""
     << fmt_real(h) << "\" viewBox=\"0 0 " << fmt_real(w) << ' ' << fmt_real(h) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int ell = 1; ell <= levels; ++ell) {
    auto lv = cfg.level(ell);
    const int x_max = lv.empty() ? 0 : lv.front() + 1;
    for (int x = 0; x <= x_max; ++x) {
      if (cfg.occupied(x, ell)) {
        const double cx = px(x, ell), cy = py(ell), r = 0.45 * kScale;
        os << "<polygon fill=\"" << colour(LozengeType::I) << "\" points=\"" << fmt_real(cx - r)
           << ',' << fmt_real(cy) << ' ' << fmt_real(cx) << ',' << fmt_real(cy - r) << ' '
           << fmt_real(cx + r) << ',' << fmt_real(cy) << ' ' << fmt_real(cx) << ','
           << fmt_real(cy + r) << "\"/>\n";
        continue;
      }
      if (ell < 2) continue;
      for (LozengeType t : {LozengeType::II, LozengeType::III}) {
        if (lozenge_indicator(cfg, x, ell, t) != 1) continue;
        const BlackWhite bw = black_white({x, ell, t});
        os << "<line stroke=\"" << colour(t) << "\" stroke-width=\"" << fmt_real(0.5 * kScale)
           << "\" stroke-linecap=\"round\" x1=\"" << fmt_real(px(x, ell)) << "\" y1=\""
           << fmt_real(py(ell)) << "\" x2=\"" << fmt_real(px(bw.black.x, bw.black.level))
           << "\" y2=\"" << fmt_real(py(bw.black.level)) << "\"/>\n";
      }
    }
  }
  os << "<line stroke=\"black\" x1=\"" << fmt_real(0.5 * kScale) << "\" y1=\"0\" x2=\""
     << fmt_real(0.5 * kScale) << "\" y2=\"" << fmt_real(h) << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

std::string frozen_boundary(const std::vector<BoundaryCurve>& curves) {
  double nu_max = 1.0, eta_max = 1.0;
  for (const auto& c : curves) {
    for (double q : c.q2) nu_max = std::max(nu_max, q);
    for (double e : c.eta) eta_max = std::max(eta_max, e);
  }
  constexpr double W = 480, H = 360, M = 40;
  auto sx = [&](double nu) { return M + (W - 2 * M) * nu / nu_max; };
  auto sy = [&](double eta) { return H - M - (H - 2 * M) * eta / eta_max; };
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line stroke=\"black\" x1=\"" << M << "\" y1=\"" << H - M << "\" x2=\"" << W - M
     << "\" y2=\"" << H - M << "\"/>\n";
  os << "<line stroke=\"black\" x1=\"" << M << "\" y1=\"" << M << "\" x2=\"" << M << "\" y2=\""
     << H - M << "\"/>\n";
  os << "<text x=\"" << W - M << "\" y=\"" << H - 10 << "\" font-size=\"12\">nu (max "
     << fmt_real(nu_max) << ")</text>\n";
  os << "<text x=\"4\" y=\"" << M - 10 << "\" font-size=\"12\">eta (max " << fmt_real(eta_max)
     << ")</text>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const char* col = palette[k % 5];
    for (const auto* q : {&c.q1, &c.q2}) {
      os << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
      for (std::size_t i = 0; i < c.eta.size(); ++i) {
        os << fmt_real(sx((*q)[i])) << ',' << fmt_real(sy(c.eta[i])) << ' ';
      }
      os << "\"/>\n";
    }
    os << "<text x=\"" << W - M - 60 << "\" y=\"" << M + 14 * k << "\" font-size=\"11\" fill=\""
       << col << "\">tau=" << fmt_real(c.tau) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace gffi::svg
