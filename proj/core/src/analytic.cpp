#include "cqed/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cqed::analytic {

namespace {

using std::numbers::pi;

constexpr double kSeriesCut = 1e-6;
constexpr double kGapTol = 1e-12;

void check_phi_max(double phi_max) {
  if (!(phi_max >= 0.0) || !std::isfinite(phi_max)) {
    throw std::invalid_argument("phi_max must be finite and >= 0");
  }
}

// integral over [0, phi_max], split at the kinks of |cos(phi/2)| (odd multiples of pi)
template <class F>
double piecewise_average(F f, double phi_max) {
  check_phi_max(phi_max);
  if (phi_max == 0.0) return f(0.0);
  using boost::math::quadrature::gauss_kronrod;
  double sum = 0.0;
  double a = 0.0;
  for (double k = pi; a < phi_max; k += 2 * pi) {
    const double b = std::min(k, phi_max);
    sum += gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
    a = b;
  }
  return sum / phi_max;
}

}  // namespace

double f_nofb(double phi) { return std::abs(std::cos(phi / 2.0)); }

double f_fb(double phi) {
  const double c2 = std::pow(std::cos(phi / 2.0), 2);
  const double s2 = std::pow(std::sin(phi / 2.0), 2);
  return std::sqrt(c2 * c2 + s2 * s2);
}

double f_nofb_ave(double phi_max) {
  check_phi_max(phi_max);
  if (phi_max < kSeriesCut) return std::sqrt(1.0 - phi_max * phi_max / 12.0);
  return std::sqrt(0.5 + std::sin(phi_max) / (2.0 * phi_max));
}

double f_fb_ave(double phi_max) {
  check_phi_max(phi_max);
  if (phi_max < kSeriesCut) return std::sqrt(1.0 - phi_max * phi_max / 6.0);
  return std::sqrt(0.75 + std::sin(2.0 * phi_max) / (8.0 * phi_max));
}

std::vector<ModelPoint> model_grid(double phi_stop, std::size_t count) {
  check_phi_max(phi_stop);
  if (count == 0) throw std::invalid_argument("model_grid: count must be positive");
  if (count == 1 && phi_stop != 0.0) throw std::invalid_argument("model_grid: one point only spans {0}");
  std::vector<ModelPoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double phi = count == 1 ? 0.0 : phi_stop * static_cast<double>(k) / static_cast<double>(count - 1);
    out.push_back({phi, f_nofb_ave(phi), f_fb_ave(phi)});
  }
  return out;
}

double true_average_nofb(double phi_max) { return piecewise_average(f_nofb, phi_max); }

double true_average_fb(double phi_max) { return piecewise_average(f_fb, phi_max); }

ConsistencyReport model_consistency_check() {
  std::vector<double> grid(16);
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = 4 * pi * static_cast<double>(k + 1) / 16.0;
  return model_consistency_check(grid);
}

ConsistencyReport model_consistency_check(std::span<const double> phi_grid) {
  ConsistencyReport rep;
  for (double phi : phi_grid) {
    ConsistencyRow r{phi, f_nofb_ave(phi), true_average_nofb(phi), f_fb_ave(phi), true_average_fb(phi)};
    rep.max_gap_nofb = std::max(rep.max_gap_nofb, r.gap_nofb());
    rep.max_gap_fb = std::max(rep.max_gap_fb, r.gap_fb());
    if (r.gap_nofb() < -kGapTol || r.gap_fb() < -kGapTol) rep.closed_form_is_upper_bound = false;
    rep.rows.push_back(r);
  }
  return rep;
}

}  // namespace cqed::analytic
