#pragma once

// Simplified single-qubit model of the correction scheme: a random rotation
// by phi, with and without measure-and-flip feedback, plus the averaged
// fidelity curves over a uniform phi in [0, phi_max].

#include <cstddef>
#include <span>
#include <vector>

namespace cqed::analytic {

/// |cos(phi/2)|
double f_nofb(double phi);
/// sqrt(cos^4(phi/2) + sin^4(phi/2))
double f_fb(double phi);

/// sqrt(1/2 + sin(phi_max)/(2 phi_max)); 1 at phi_max = 0.
double f_nofb_ave(double phi_max);
/// sqrt(3/4 + sin(2 phi_max)/(8 phi_max)); 1 at phi_max = 0.
double f_fb_ave(double phi_max);

struct ModelPoint {
  double phi_max = 0.0;
  double f_nofb_ave = 1.0;
  double f_fb_ave = 1.0;
};

/// `count` evenly spaced points on [0, phi_stop] (count >= 2, or 1 for {0}).
std::vector<ModelPoint> model_grid(double phi_stop, std::size_t count);

/// (1/phi_max) * integral of f over [0, phi_max], by adaptive quadrature.
double true_average_nofb(double phi_max);
double true_average_fb(double phi_max);

struct ConsistencyRow {
  double phi_max = 0.0;
  double closed_nofb = 1.0;  // square root of the averaged success probability
  double true_nofb = 1.0;    // average of the fidelity itself
  double closed_fb = 1.0;
  double true_fb = 1.0;

  double gap_nofb() const noexcept { return closed_nofb - true_nofb; }
  double gap_fb() const noexcept { return closed_fb - true_fb; }
};

struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;
  /// Every gap >= -tolerance, i.e. the closed forms never fall below the true averages.
  bool closed_form_is_upper_bound = true;
  double max_gap_nofb = 0.0;
  double max_gap_fb = 0.0;
};

/// Default grid: 16 points on (0, 4pi].
ConsistencyReport model_consistency_check();
ConsistencyReport model_consistency_check(std::span<const double> phi_grid);

}  // namespace cqed::analytic
