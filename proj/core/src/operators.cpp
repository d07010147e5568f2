#include "fbp/operators.hpp"

#include <algorithm>
#include <cmath>

#include "fbp/error.hpp"

namespace fbp {

PlaneLaplacian::PlaneLaplacian(const Grid& g) : rows_(g.plane_size()) {
  const double h2 = g.hx() * g.hx();
  const int last = g.nx() - 1;
  const bool neumann = g.spec().lateral_bc == LateralBc::Neumann;

  for (std::size_t p = 0; p < rows_.size(); ++p) {
    PlaneRow& row = rows_[p];
    if (g.spec().lateral_bc == LateralBc::Dirichlet && g.on_lateral_face(p)) {
      row.fixed = true;
      continue;
    }
    const auto m = g.plane_multi(p);
    auto add = [&row](std::size_t q, double w) {
      for (int k = 0; k < row.count; ++k) {
        if (row.nb[k] == q) {
          row.w[k] += w;
          return;
        }
      }
      row.nb[row.count] = static_cast<std::uint32_t>(q);
      row.w[row.count] = w;
      ++row.count;
    };

    if (g.axisymmetric()) {
      const int n = g.plane_dim();
      const int i = m[0];
      if (i == 0) {
        row.diag = 2.0 * n / h2;
        add(1, 2.0 * n / h2);
      } else {
        // (N-1)/r u_r with r = i h, centred
        const double c = (n - 1) / (2.0 * i * h2);
        row.diag = 2.0 / h2;
        add(static_cast<std::size_t>(i + 1), 1.0 / h2 + c);
        add(static_cast<std::size_t>(i - 1), 1.0 / h2 - c);
      }
      continue;
    }

    for (int a = 0; a < g.plane_axes(); ++a) {
      row.diag += 2.0 / h2;
      auto at = [&](int shift) {
        auto mm = m;
        mm[a] += shift;
        if (neumann) {
          if (mm[a] < 0) mm[a] = -mm[a];
          if (mm[a] > last) mm[a] = 2 * last - mm[a];
        }
        return g.plane_index(mm[0], mm[1]);
      };
      add(at(-1), 1.0 / h2);
      add(at(+1), 1.0 / h2);
    }
  }
}

double sup_norm(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double uy_at_plane(const Field& f, std::size_t p) noexcept {
  const Grid& g = f.grid();
  const int t = g.top();
  return (3.0 * f.at(p, t) - 4.0 * f.at(p, t - 1) + f.at(p, t - 2)) / (2.0 * g.hy());
}

namespace {

template <class Reaction>
std::vector<double> interior_residual_impl(const Field& f, Reaction&& reaction) {
  const Grid& g = f.grid();
  const PlaneLaplacian lap(g);
  const std::size_t P = g.plane_size();
  const double iy2 = 1.0 / (g.hy() * g.hy());
  const auto u = f.values();
  std::vector<double> res(g.size(), 0.0);
  for (int j = 1; j + 1 < g.ny(); ++j) {
    const auto layer = u.subspan(g.index(0, j), P);
    for (std::size_t p = 0; p < P; ++p) {
      if (lap.row(p).fixed) continue;
      const std::size_t k = g.index(p, j);
      const double uyy = (u[k + P] - 2.0 * u[k] + u[k - P]) * iy2;
      res[k] = lap.apply(layer, p) - uyy + reaction(u[k]);
    }
  }
  return res;
}

void require_axisym(const Field& f) {
  if (!f.grid().axisymmetric()) throw Error(ErrorCode::InvalidGrid, "axisymmetric operator on a Cartesian grid");
}

}  // namespace

std::vector<double> interior_residual(const Field& f, const PenaltyFamily& fam, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::NonpositiveEps, "eps must be positive");
  const double inv = 1.0 / eps;
  return interior_residual_impl(f, [&](double v) { return fam.beta_raw(v * inv) * inv; });
}

std::vector<double> interior_residual(const Field& f) {
  return interior_residual_impl(f, [](double) { return 0.0; });
}

std::vector<double> plane_residual(const Field& f) {
  const Grid& g = f.grid();
  if (g.ny() < 3) throw Error(ErrorCode::GridTooShallow, "plane residual needs ny >= 3");
  const PlaneLaplacian lap(g);
  const auto layer = f.plane_view();
  std::vector<double> res(g.plane_size(), 0.0);
  for (std::size_t p = 0; p < res.size(); ++p) {
    if (lap.row(p).fixed) continue;
    res[p] = lap.apply(layer, p) + uy_at_plane(f, p);
  }
  return res;
}

std::vector<double> complementarity_residual(const Field& f, const ObstacleSpec& ob) {
  const Grid& g = f.grid();
  std::vector<double> res = plane_residual(f);
  const PlaneLaplacian lap(g);
  const auto layer = f.plane_view();
  for (std::size_t p = 0; p < res.size(); ++p) {
    if (lap.row(p).fixed) continue;
    res[p] = std::min(layer[p] - ob.phi(g.plane_point(p)), res[p]);
  }
  return res;
}

ResidualField residuals(const Field& f, const PenaltyFamily& fam, double eps, const ObstacleSpec& ob) {
  ResidualField r;
  r.interior = interior_residual(f, fam, eps);
  r.plane = plane_residual(f);
  r.comp = complementarity_residual(f, ob);
  r.interior_sup = sup_norm(r.interior);
  r.comp_sup = sup_norm(r.comp);
  return r;
}

std::vector<double> axisym_interior_residual(const Field& f, const PenaltyFamily& fam, double eps) {
  require_axisym(f);
  return interior_residual(f, fam, eps);
}

std::vector<double> axisym_interior_residual(const Field& f) {
  require_axisym(f);
  return interior_residual(f);
}

std::vector<double> axisym_plane_residual(const Field& f) {
  require_axisym(f);
  return plane_residual(f);
}

EnergyValues energy(const Field& f, const PenaltyFamily& fam, double eps) {
  const Grid& g = f.grid();
  const std::size_t P = g.plane_size();
  const double hx = g.hx();
  const double hy = g.hy();
  const auto u = f.values();
  const int n = g.plane_dim();

  // plane measure per node and per x-edge
  auto weight = [&](double r) { return g.axisymmetric() ? std::pow(std::abs(r), n - 1) : 1.0; };
  const double cell = std::pow(hx, g.plane_axes());

  double grad_bulk = 0.0;
  double grad_plane = 0.0;
  double pen = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (std::size_t p = 0; p < P; ++p) {
      const auto m = g.plane_multi(p);
      const std::size_t k = g.index(p, j);
      const double r = g.plane_point(p)[0];
      double gx = 0.0;
      for (int a = 0; a < g.plane_axes(); ++a) {
        if (m[a] + 1 >= g.nx()) continue;
        const std::size_t q = a == 0 ? g.plane_index(m[0] + 1, m[1]) : g.plane_index(m[0], m[1] + 1);
        const double d = (u[g.index(q, j)] - u[k]) / hx;
        const double wr = a == 0 ? weight(r + 0.5 * hx) : 1.0;
        gx += wr * d * d;
      }
      const double w = weight(r);
      double e = gx * cell * hy;
      if (j + 1 < g.ny()) {
        const double d = (u[k + P] - u[k]) / hy;
        e += w * d * d * cell * hy;
      }
      grad_bulk += e;
      pen += w * fam.B_raw(u[k] / eps) * cell * hy;
      if (j == g.top()) grad_plane += gx * cell;
    }
  }
  return {0.5 * grad_bulk + pen + 0.5 * grad_plane, grad_bulk + pen + grad_plane};
}

}  // namespace fbp
