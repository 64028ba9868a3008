#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/analytic.hpp"
#include "cqed/cli/sweep.hpp"

namespace cqed::cli {

inline constexpr std::string_view kCsvHeader =
    "phi_max,t_cav_ms,alpha_sq,n_traj,f_corr,f_corr_se,f_uncorr,f_uncorr_se,syn_mm,syn_pm,syn_mp,syn_pp,seed";
inline constexpr std::string_view kAnalyticHeader = "phi_max,f_nofb_ave,f_fb_ave";

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> parse_csv(std::string_view text);

void emit_analytic_csv(const std::vector<analytic::ModelPoint>& grid, std::ostream& out);

/// SVG with both fidelity curves and error bars against the swept
/// parameter; `overlay` adds the simple-model curves (phi_max sweeps).
void emit_plot(const std::vector<ResultRow>& rows, SweepParameter parameter,
               const std::vector<analytic::ModelPoint>& overlay, std::ostream& out);
void write_plot(const std::vector<ResultRow>& rows, SweepParameter parameter,
                const std::vector<analytic::ModelPoint>& overlay, const std::string& path);
void write_analytic_plot(const std::vector<analytic::ModelPoint>& grid, const std::string& path);

}  // namespace cqed::cli
