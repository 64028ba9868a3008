#include "cqed/cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cqed::cli {

namespace {

template <class Emit>
void write_file(const std::string& path, Emit emit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  emit(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument("csv line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument("csv line " + std::to_string(line) + ": bad integer '" + std::string(s) + "'");
  }
  return v;
}

// --- svg ------------------------------------------------------------------

struct Frame {
  double x0, x1, y0, y1;
  static constexpr double W = 720, H = 480, L = 70, R = 20, T = 40, B = 60;

  double px(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - R); }
  double py(double y) const { return H - B - (y - y0) / (y1 - y0) * (H - T - B); }
};

std::string num(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

std::string x_label(SweepParameter p) {
  switch (p) {
    case SweepParameter::phi_max: return "phi_max [rad]";
    case SweepParameter::t_cav: return "T_cav [ms]";
    case SweepParameter::alpha_sq: return "|alpha|^2";
  }
  return "";
}

void axes(std::ostream& o, const Frame& f, const std::string& xlabel, const std::string& title) {
  o << "<rect x='" << Frame::L << "' y='" << Frame::T << "' width='" << Frame::W - Frame::L - Frame::R
    << "' height='" << Frame::H - Frame::T - Frame::B << "' fill='none' stroke='black'/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 5.0;
    const double y = f.y0 + (f.y1 - f.y0) * k / 5.0;
    o << "<line x1='" << f.px(x) << "' y1='" << Frame::H - Frame::B << "' x2='" << f.px(x) << "' y2='"
      << Frame::H - Frame::B + 5 << "' stroke='black'/>\n";
    o << "<text x='" << f.px(x) << "' y='" << Frame::H - Frame::B + 20 << "' text-anchor='middle'>" << num(x)
      << "</text>\n";
    o << "<line x1='" << Frame::L - 5 << "' y1='" << f.py(y) << "' x2='" << Frame::L << "' y2='" << f.py(y)
      << "' stroke='black'/>\n";
    o << "<text x='" << Frame::L - 8 << "' y='" << f.py(y) + 4 << "' text-anchor='end'>" << num(y) << "</text>\n";
  }
  o << "<text x='" << (Frame::W + Frame::L) / 2 << "' y='" << Frame::H - 15 << "' text-anchor='middle'>" << xlabel
    << "</text>\n";
  o << "<text x='18' y='" << (Frame::H - Frame::B + Frame::T) / 2 << "' text-anchor='middle' transform='rotate(-90 18 "
    << (Frame::H - Frame::B + Frame::T) / 2 << ")'>fidelity</text>\n";
  o << "<text x='" << (Frame::W + Frame::L) / 2 << "' y='24' text-anchor='middle'>" << title << "</text>\n";
}

void polyline(std::ostream& o, const Frame& f, const std::vector<std::pair<double, double>>& pts,
              const char* colour, bool dashed) {
  o << "<polyline fill='none' stroke='" << colour << "'" << (dashed ? " stroke-dasharray='6 4'" : "")
    << " points='";
  for (auto [x, y] : pts) o << f.px(x) << ',' << f.py(y) << ' ';
  o << "'/>\n";
}

void legend(std::ostream& o, int slot, const char* colour, bool dashed, const std::string& text) {
  const double y = Frame::T + 18 + 18 * slot;
  const double x = Frame::W - Frame::R - 230;
  o << "<line x1='" << x << "' y1='" << y << "' x2='" << x + 30 << "' y2='" << y << "' stroke='" << colour << "'"
    << (dashed ? " stroke-dasharray='6 4'" : "") << "/>\n";
  o << "<text x='" << x + 38 << "' y='" << y + 4 << "'>" << text << "</text>\n";
}

void svg_open(std::ostream& o) {
  o << "<?xml version='1.0' encoding='UTF-8'?>\n"
    << "<svg xmlns='http://www.w3.org/2000/svg' width='" << Frame::W << "' height='" << Frame::H
    << "' font-family='sans-serif' font-size='12'>\n"
    << "<rect width='100%' height='100%' fill='white'/>\n";
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << format_double(r.phi_max) << ',' << format_double(r.t_cav_ms) << ',' << format_double(r.alpha_sq) << ','
        << r.n_traj << ',' << format_double(r.f_corr) << ',' << format_double(r.f_corr_se) << ','
        << format_double(r.f_uncorr) << ',' << format_double(r.f_uncorr_se);
    for (std::size_t c : r.syndrome_counts) out << ',' << c;
    out << ',' << r.seed << '\n';
  }
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  write_file(path, [&](std::ostream& o) { emit_csv(rows, o); });
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw std::invalid_argument("csv: unexpected header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 13) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) + ": expected 13 fields, got " +
                                  std::to_string(f.size()));
    }
    ResultRow r;
    r.phi_max = parse_double(f[0], line_no);
    r.t_cav_ms = parse_double(f[1], line_no);
    r.alpha_sq = parse_double(f[2], line_no);
    r.n_traj = parse_uint(f[3], line_no);
    r.f_corr = parse_double(f[4], line_no);
    r.f_corr_se = parse_double(f[5], line_no);
    r.f_uncorr = parse_double(f[6], line_no);
    r.f_uncorr_se = parse_double(f[7], line_no);
    for (std::size_t k = 0; k < 4; ++k) r.syndrome_counts[k] = parse_uint(f[8 + k], line_no);
    r.seed = parse_uint(f[12], line_no);
    rows.push_back(r);
  }
  if (!header_seen) throw std::invalid_argument("csv: missing header");
  return rows;
}

void emit_analytic_csv(const std::vector<analytic::ModelPoint>& grid, std::ostream& out) {
  out << kAnalyticHeader << '\n';
  for (const auto& p : grid) {
    out << format_double(p.phi_max) << ',' << format_double(p.f_nofb_ave) << ',' << format_double(p.f_fb_ave) << '\n';
  }
}

void emit_plot(const std::vector<ResultRow>& rows, SweepParameter parameter,
               const std::vector<analytic::ModelPoint>& overlay, std::ostream& out) {
  if (rows.empty()) throw std::invalid_argument("emit_plot: no rows");
  auto xval = [&](const ResultRow& r) {
    return parameter == SweepParameter::phi_max ? r.phi_max
           : parameter == SweepParameter::t_cav ? r.t_cav_ms
                                                : r.alpha_sq;
  };
  double x0 = xval(rows.front()), x1 = x0, ylo = 1.0;
  for (const auto& r : rows) {
    x0 = std::min(x0, xval(r));
    x1 = std::max(x1, xval(r));
    ylo = std::min({ylo, r.f_corr - r.f_corr_se, r.f_uncorr - r.f_uncorr_se});
  }
  for (const auto& p : overlay) {
    x0 = std::min(x0, p.phi_max);
    x1 = std::max(x1, p.phi_max);
    ylo = std::min(ylo, p.f_nofb_ave);
  }
  if (!std::isfinite(x0) || !std::isfinite(x1)) throw std::invalid_argument("emit_plot: non-finite abscissa");
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  const Frame f{x0, x1, std::max(0.0, std::floor(ylo * 10.0) / 10.0), 1.0};

  svg_open(out);
  axes(out, f, x_label(parameter), "fidelity with and without correction");

  struct Series {
    const char* colour;
    double ResultRow::*value;
    double ResultRow::*se;
    const char* name;
  };
  const Series series[] = {{"#1f4fd1", &ResultRow::f_corr, &ResultRow::f_corr_se, "corrected"},
                           {"#c62828", &ResultRow::f_uncorr, &ResultRow::f_uncorr_se, "uncorrected"}};
  int slot = 0;
  for (const Series& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
      const double x = xval(r), y = r.*s.value, e = r.*s.se;
      pts.emplace_back(x, y);
      out << "<line x1='" << f.px(x) << "' y1='" << f.py(std::min(1.0, y + e)) << "' x2='" << f.px(x) << "' y2='"
          << f.py(std::max(f.y0, y - e)) << "' stroke='" << s.colour << "'/>\n";
      out << "<circle cx='" << f.px(x) << "' cy='" << f.py(y) << "' r='3' fill='" << s.colour << "'/>\n";
    }
    polyline(out, f, pts, s.colour, false);
    legend(out, slot++, s.colour, false, s.name);
  }
  if (!overlay.empty()) {
    std::vector<std::pair<double, double>> fb, nofb;
    for (const auto& p : overlay) {
      fb.emplace_back(p.phi_max, p.f_fb_ave);
      nofb.emplace_back(p.phi_max, p.f_nofb_ave);
    }
    polyline(out, f, fb, "#1f4fd1", true);
    polyline(out, f, nofb, "#c62828", true);
    legend(out, slot++, "#1f4fd1", true, "simple model, feedback");
    legend(out, slot++, "#c62828", true, "simple model, no feedback");
  }
  out << "</svg>\n";
}

void write_plot(const std::vector<ResultRow>& rows, SweepParameter parameter,
                const std::vector<analytic::ModelPoint>& overlay, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_plot: no rows");
  write_file(path, [&](std::ostream& o) { emit_plot(rows, parameter, overlay, o); });
}

void write_analytic_plot(const std::vector<analytic::ModelPoint>& grid, const std::string& path) {
  if (grid.empty()) throw std::invalid_argument("analytic plot: empty grid");
  write_file(path, [&](std::ostream& o) {
    const Frame f{grid.front().phi_max, std::max(grid.back().phi_max, grid.front().phi_max + 1.0), 0.6, 1.0};
    svg_open(o);
    axes(o, f, "phi_max [rad]", "simple model averaged fidelity");
    std::vector<std::pair<double, double>> fb, nofb;
    for (const auto& p : grid) {
      fb.emplace_back(p.phi_max, p.f_fb_ave);
      nofb.emplace_back(p.phi_max, p.f_nofb_ave);
    }
    polyline(o, f, fb, "#1f4fd1", false);
    polyline(o, f, nofb, "#c62828", false);
    legend(o, 0, "#1f4fd1", false, "feedback");
    legend(o, 1, "#c62828", false, "no correction");
    o << "</svg>\n";
  });
}

}  // namespace cqed::cli
