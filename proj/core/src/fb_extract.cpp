#include "fbp/fb_extract.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fbp/csv.hpp"
#include "fbp/error.hpp"
#include "fbp/operators.hpp"

namespace fbp {

namespace {

void require_converged(const SolveResult& res) {
  if (!res.converged) throw Error(ErrorCode::NotConverged, "free boundary extraction needs a converged solve");
}

double crossing(double a, double b, double ua, double ub, double level) {
  return a + (level - ua) / (ub - ua) * (b - a);
}

bool on_face(const Grid& g, std::size_t p) {
  const auto m = g.plane_multi(p);
  const int last = g.nx() - 1;
  if (g.axisymmetric()) return m[0] == last;
  for (int a = 0; a < g.plane_axes(); ++a) {
    if (m[a] == 0 || m[a] == last) return true;
  }
  return false;
}

double point_segment_distance(const PlanePoint& x, const BoundarySegment& s) {
  const double dx = s[1][0] - s[0][0];
  const double dy = s[1][1] - s[0][1];
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((x[0] - s[0][0]) * dx + (x[1] - s[0][1]) * dy) / len2, 0.0, 1.0);
  return std::hypot(x[0] - (s[0][0] + t * dx), x[1] - (s[0][1] + t * dy));
}

// Marching squares on the plane lattice; emits one or two segments per cell.
void contour_2d(const Grid& g, const std::vector<double>& u, double thr, OmegaExtract& out) {
  const int n = g.nx();
  const double h = g.hx();
  for (int i2 = 0; i2 < n; ++i2) {
    for (int i1 = 0; i1 < n; ++i1) {
      const std::size_t p = g.plane_index(i1, i2);
      const double x1 = g.coord(i1);
      const double x2 = g.coord(i2);
      if (i1 + 1 < n) {
        const std::size_t q = g.plane_index(i1 + 1, i2);
        if ((u[p] > thr) != (u[q] > thr)) out.points.push_back({crossing(x1, x1 + h, u[p], u[q], thr), x2});
      }
      if (i2 + 1 < n) {
        const std::size_t q = g.plane_index(i1, i2 + 1);
        if ((u[p] > thr) != (u[q] > thr)) out.points.push_back({x1, crossing(x2, x2 + h, u[p], u[q], thr)});
      }
      if (i1 + 1 >= n || i2 + 1 >= n) continue;

      // corners counter-clockwise from (i1, i2)
      const double c[4] = {u[p], u[g.plane_index(i1 + 1, i2)], u[g.plane_index(i1 + 1, i2 + 1)],
                           u[g.plane_index(i1, i2 + 1)]};
      const PlanePoint v[4] = {PlanePoint{x1, x2}, PlanePoint{x1 + h, x2}, PlanePoint{x1 + h, x2 + h},
                               PlanePoint{x1, x2 + h}};
      int code = 0;
      for (int k = 0; k < 4; ++k) code |= (c[k] > thr ? 1 : 0) << k;
      if (code == 0 || code == 15) continue;
      auto edge = [&](int k) {
        const int l = (k + 1) % 4;
        const double t = (thr - c[k]) / (c[l] - c[k]);
        return PlanePoint{v[k][0] + t * (v[l][0] - v[k][0]), v[k][1] + t * (v[l][1] - v[k][1])};
      };
      std::vector<int> cut;
      for (int k = 0; k < 4; ++k) {
        if ((c[k] > thr) != (c[(k + 1) % 4] > thr)) cut.push_back(k);
      }
      if (cut.size() == 2) {
        out.segments.push_back({edge(cut[0]), edge(cut[1])});
      } else if (cut.size() == 4) {
        // saddle: the centre value decides which corners connect
        const double centre = 0.25 * (c[0] + c[1] + c[2] + c[3]);
        const bool joined = (centre > thr) == (c[0] > thr);
        if (joined) {
          out.segments.push_back({edge(0), edge(1)});
          out.segments.push_back({edge(2), edge(3)});
        } else {
          out.segments.push_back({edge(3), edge(0)});
          out.segments.push_back({edge(1), edge(2)});
        }
      }
    }
  }
}

}  // namespace

std::vector<double> extract_psi(const Field& f, double level, long* violations) {
  const Grid& g = f.grid();
  std::vector<double> psi(g.plane_size(), kNoPsi);
  long bad = 0;
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    int crossings = 0;
    for (int j = 0; j < g.top(); ++j) {
      const double a = f.at(p, j);
      const double b = f.at(p, j + 1);
      if (a < level && b >= level) {
        psi[p] = crossing(g.y(j), g.y(j + 1), a, b, level);
        ++crossings;
      }
    }
    if (crossings > 1) ++bad;
  }
  if (violations != nullptr) *violations = bad;
  return psi;
}

std::vector<double> extract_psi(const SolveResult& res, double level_factor, long* violations) {
  require_converged(res);
  return extract_psi(res.field, level_factor * res.eps_final, violations);
}

OmegaExtract extract_omega(const Grid& g, const std::vector<double>& trace, double threshold) {
  OmegaExtract out;
  out.mask.assign(g.plane_size(), 0);
  bool any = false;
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    out.mask[p] = trace[p] > threshold ? 1 : 0;
    if (out.mask[p] != 0) {
      any = true;
      if (on_face(g, p)) out.truncation_suspect = true;
    }
  }
  if (!any) throw Error(ErrorCode::EmptyOmega, "no plane node exceeds the threshold " + format_double(threshold));

  if (g.plane_axes() == 1) {
    for (int i = 0; i + 1 < g.nx(); ++i) {
      const auto a = static_cast<std::size_t>(i);
      if ((out.mask[a] != 0) != (out.mask[a + 1] != 0)) {
        out.points.push_back({crossing(g.coord(i), g.coord(i + 1), trace[a], trace[a + 1], threshold), 0.0});
      }
    }
  } else {
    contour_2d(g, trace, threshold, out);
  }
  if (out.points.empty()) out.truncation_suspect = true;
  return out;
}

OmegaExtract extract_omega(const SolveResult& res, double threshold) {
  require_converged(res);
  const auto plane = res.field.plane_view();
  return extract_omega(res.field.grid(), std::vector<double>(plane.begin(), plane.end()), threshold);
}

std::vector<double> uy_trace(const Field& f) {
  std::vector<double> out(f.grid().plane_size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = uy_at_plane(f, p);
  return out;
}

std::vector<double> uy_trace(const SolveResult& res) {
  require_converged(res);
  return uy_trace(res.field);
}

std::vector<double> directional_derivative_plane(const Field& f, const PlanePoint& e) {
  const Grid& g = f.grid();
  const auto u = f.plane_view();
  const int n = g.nx();
  const double h = g.hx();
  std::vector<double> out(g.plane_size(), 0.0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto m = g.plane_multi(p);
    double d = 0.0;
    for (int a = 0; a < g.plane_axes(); ++a) {
      if (e[a] == 0.0) continue;
      auto at = [&](int i) { return u[a == 0 ? g.plane_index(i, m[1]) : g.plane_index(m[0], i)]; };
      const int i = m[a];
      double du = 0.0;
      if (g.axisymmetric() && i == 0) {
        du = 0.0;  // even in r
      } else if (i == 0) {
        du = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
      } else if (i == n - 1) {
        du = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
      } else {
        du = (at(i + 1) - at(i - 1)) / (2.0 * h);
      }
      d += e[a] * du;
    }
    out[p] = d;
  }
  return out;
}

std::vector<double> directional_derivative_plane(const SolveResult& res, const PlanePoint& e) {
  require_converged(res);
  return directional_derivative_plane(res.field, e);
}

FreeBoundary extract_free_boundary(const SolveResult& res, const ObstacleSpec& ob, const FbOptions& opts) {
  if (opts.require_converged) require_converged(res);
  const Field& f = res.field;
  const Grid& g = f.grid();
  FreeBoundary fb;
  fb.grid = g;
  fb.eps = res.eps_final;
  fb.level_used = opts.level_factor * res.eps_final;
  fb.plane_threshold = opts.plane_threshold >= 0.0 ? opts.plane_threshold : fb.level_used;
  fb.coincidence_tol = opts.coincidence_tol >= 0.0 ? opts.coincidence_tol : 10.0 * res.tol;
  fb.psi = extract_psi(f, fb.level_used, &fb.graph_violations);
  const auto plane = f.plane_view();
  fb.u0.assign(plane.begin(), plane.end());
  fb.uy = uy_trace(f);
  fb.phi = ob.sample(g);

  OmegaExtract om = extract_omega(g, fb.u0, fb.plane_threshold);
  fb.omega_mask = std::move(om.mask);
  fb.boundary_points = std::move(om.points);
  fb.boundary_segments = std::move(om.segments);
  fb.truncation_suspect = om.truncation_suspect;

  fb.coincidence_mask.assign(g.plane_size(), 0);
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    if (fb.phi[p] > 0.0 && fb.u0[p] - fb.phi[p] <= fb.coincidence_tol) fb.coincidence_mask[p] = 1;
  }
  return fb;
}

double distance_to_boundary(const FreeBoundary& fb, const PlanePoint& x) {
  double best = std::numeric_limits<double>::infinity();
  if (!fb.boundary_segments.empty()) {
    for (const auto& s : fb.boundary_segments) best = std::min(best, point_segment_distance(x, s));
    return best;
  }
  for (const auto& b : fb.boundary_points) best = std::min(best, std::hypot(x[0] - b[0], x[1] - b[1]));
  return best;
}

void write_fb_csv(std::ostream& out, const FreeBoundary& fb) {
  const Grid& g = fb.grid;
  if (g.axisymmetric()) {
    out << "r,";
  } else if (g.plane_axes() == 2) {
    out << "x1,x2,";
  } else {
    out << "x,";
  }
  out << "psi,u0,uy,in_omega,in_coincidence\n";
  for (std::size_t p = 0; p < g.plane_size(); ++p) {
    const PlanePoint x = g.plane_point(p);
    out << format_double(x[0]) << ',';
    if (g.plane_axes() == 2) out << format_double(x[1]) << ',';
    if (!std::isnan(fb.psi[p])) out << format_double(fb.psi[p]);
    out << ',' << format_double(fb.u0[p]) << ',' << format_double(fb.uy[p]) << ',' << int(fb.omega_mask[p]) << ','
        << int(fb.coincidence_mask[p]) << '\n';
  }
}

void write_boundary_csv(std::ostream& out, const FreeBoundary& fb) {
  const Grid& g = fb.grid;
  if (g.plane_axes() == 2) {
    out << "x1,x2\n";
    for (const auto& b : fb.boundary_points) write_csv_row(out, {b[0], b[1]});
    return;
  }
  out << (g.axisymmetric() ? "r\n" : "x\n");
  for (const auto& b : fb.boundary_points) write_csv_row(out, {b[0]});
}

}  // namespace fbp
