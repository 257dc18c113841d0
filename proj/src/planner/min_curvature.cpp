#include "racestack/planner/min_curvature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rs::planner {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Periodic cubic splines through N points: segment i is
// p_i(t) = a + b t + c t^2 + d t^3 on t in [0, 1], ending at point i+1 (mod N).
// The 4N x 4N constraint matrix depends only on N.
MatrixXd spline_matrix(int n) {
  MatrixXd a = MatrixXd::Zero(4 * n, 4 * n);
  for (int i = 0; i < n; ++i) {
    const int r = 4 * i;
    const int nxt = 4 * ((i + 1) % n);
    a(r, r) = 1.0;                                   // value at t = 0
    a(r + 1, r) = a(r + 1, r + 1) = a(r + 1, r + 2) = a(r + 1, r + 3) = 1.0;  // at t = 1
    a(r + 2, r + 1) = 1.0;                           // first-derivative continuity
    a(r + 2, r + 2) = 2.0;
    a(r + 2, r + 3) = 3.0;
    a(r + 2, nxt + 1) = -1.0;
    a(r + 3, r + 2) = 2.0;                           // second-derivative continuity
    a(r + 3, r + 3) = 6.0;
    a(r + 3, nxt + 2) = -2.0;
  }
  return a;
}

VectorXd rhs_from_points(const VectorXd& pts) {
  const int n = static_cast<int>(pts.size());
  VectorXd q = VectorXd::Zero(4 * n);
  for (int i = 0; i < n; ++i) {
    q(4 * i) = pts(i);
    q(4 * i + 1) = pts((i + 1) % n);
  }
  return q;
}

// Box-constrained convex QP: minimize 0.5 x'Hx + f'x, lb <= x <= ub.
// Primal active-set with bounded iteration count; deterministic.
VectorXd solve_box_qp(const MatrixXd& h, const VectorXd& f, const VectorXd& lb,
                      const VectorXd& ub) {
  const int n = static_cast<int>(f.size());
  VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = std::clamp(0.0, lb(i), ub(i));

  // active[i]: -1 at lower bound, +1 at upper, 0 free
  std::vector<int> active(n, 0);
  const int max_pass = 4 * n + 50;
  for (int pass = 0; pass < max_pass; ++pass) {
    std::vector<int> free_idx;
    for (int i = 0; i < n; ++i)
      if (active[i] == 0) free_idx.push_back(i);

    VectorXd target = x;
    if (!free_idx.empty()) {
      const int m = static_cast<int>(free_idx.size());
      MatrixXd hff(m, m);
      VectorXd rhs(m);
      for (int r = 0; r < m; ++r) {
        double fixed = f(free_idx[r]);
        for (int i = 0; i < n; ++i)
          if (active[i] != 0) fixed += h(free_idx[r], i) * x(i);
        rhs(r) = -fixed;
        for (int c = 0; c < m; ++c) hff(r, c) = h(free_idx[r], free_idx[c]);
      }
      const VectorXd xf = hff.ldlt().solve(rhs);
      for (int r = 0; r < m; ++r) target(free_idx[r]) = xf(r);
    }

    // Step from x toward target, stopping at the first violated bound.
    double tau = 1.0;
    int blocking = -1, block_side = 0;
    for (int i : free_idx) {
      const double dx = target(i) - x(i);
      if (dx > 0.0 && x(i) + dx > ub(i)) {
        const double t = (ub(i) - x(i)) / dx;
        if (t < tau) {
          tau = t;
          blocking = i;
          block_side = +1;
        }
      } else if (dx < 0.0 && x(i) + dx < lb(i)) {
        const double t = (lb(i) - x(i)) / dx;
        if (t < tau) {
          tau = t;
          blocking = i;
          block_side = -1;
        }
      }
    }
    for (int i : free_idx) x(i) += tau * (target(i) - x(i));
    if (blocking >= 0) {
      x(blocking) = block_side > 0 ? ub(blocking) : lb(blocking);
      active[blocking] = block_side;
      continue;
    }

    // KKT: release the most negative multiplier, if any.
    const VectorXd g = h * x + f;
    int worst = -1;
    double worst_val = -1e-10;
    for (int i = 0; i < n; ++i) {
      if (active[i] == -1 && g(i) < worst_val) {
        worst = i;
        worst_val = g(i);
      } else if (active[i] == +1 && -g(i) < worst_val) {
        worst = i;
        worst_val = -g(i);
      }
    }
    if (worst < 0) break;
    active[worst] = 0;
  }
  return x;
}

struct PathState {
  VectorXd x, y, w_left, w_right;
};

// Uniform arc-length resampling of the closed path, widths carried along.
PathState resample(const PathState& in, int n_out) {
  const int m = static_cast<int>(in.x.size());
  std::vector<double> cum(m + 1, 0.0);
  for (int i = 0; i < m; ++i) {
    const int j = (i + 1) % m;
    cum[i + 1] = cum[i] + std::hypot(in.x(j) - in.x(i), in.y(j) - in.y(i));
  }
  const double total = cum[m];

  PathState out;
  out.x.resize(n_out);
  out.y.resize(n_out);
  out.w_left.resize(n_out);
  out.w_right.resize(n_out);
  int seg = 0;
  for (int i = 0; i < n_out; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(n_out);
    while (seg + 1 < m && cum[seg + 1] <= target) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? (target - cum[seg]) / len : 0.0;
    const int j = (seg + 1) % m;
    out.x(i) = in.x(seg) + t * (in.x(j) - in.x(seg));
    out.y(i) = in.y(seg) + t * (in.y(j) - in.y(seg));
    out.w_left(i) = in.w_left(seg) + t * (in.w_left(j) - in.w_left(seg));
    out.w_right(i) = in.w_right(seg) + t * (in.w_right(j) - in.w_right(seg));
  }
  return out;
}

struct SplineFit {
  VectorXd coef_x, coef_y;
  VectorXd dx, dy, ddx, ddy;  // knot derivatives w.r.t. segment parameter
  VectorXd kappa;
};

SplineFit fit_splines(const MatrixXd& a_inv, const MatrixXd& t_b, const MatrixXd& t_c,
                      const PathState& path) {
  SplineFit fit;
  const VectorXd qx = rhs_from_points(path.x);
  const VectorXd qy = rhs_from_points(path.y);
  fit.coef_x = a_inv * qx;
  fit.coef_y = a_inv * qy;
  fit.dx = t_b * qx;
  fit.dy = t_b * qy;
  fit.ddx = t_c * qx;
  fit.ddy = t_c * qy;
  const int n = static_cast<int>(path.x.size());
  fit.kappa.resize(n);
  for (int i = 0; i < n; ++i) {
    const double denom = std::pow(fit.dx(i) * fit.dx(i) + fit.dy(i) * fit.dy(i), 1.5);
    fit.kappa(i) = denom > 1e-12 ? (fit.dx(i) * fit.ddy(i) - fit.dy(i) * fit.ddx(i)) / denom : 0.0;
  }
  return fit;
}

}  // namespace

MinCurvatureResult min_curvature_qp(const Centerline& center, const PlannerParams& params) {
  const int n = static_cast<int>(center.size());
  if (n < 8) throw PlannerError("min_curvature_qp: centerline too short");

  // Feasibility: the corridor must fit the optimization width everywhere.
  for (int i = 0; i < n; ++i) {
    if (center.w_left[i] + center.w_right[i] < params.width_opt) {
      const double s = static_cast<double>(i) * params.stepsize_reg;
      throw InfeasibleCorridorError(
          "min_curvature_qp: corridor narrower than width_opt near s=" + std::to_string(s),
          s, s + params.stepsize_reg);
    }
  }

  const MatrixXd a = spline_matrix(n);
  const MatrixXd a_inv = a.partialPivLu().inverse();
  MatrixXd t_b(n, 4 * n), t_c(n, 4 * n);  // first/second derivative extractors
  for (int i = 0; i < n; ++i) {
    t_b.row(i) = a_inv.row(4 * i + 1);
    t_c.row(i) = 2.0 * a_inv.row(4 * i + 2);
  }

  PathState path;
  path.x.resize(n);
  path.y.resize(n);
  path.w_left.resize(n);
  path.w_right.resize(n);
  for (int i = 0; i < n; ++i) {
    path.x(i) = center.x[i];
    path.y(i) = center.y[i];
    path.w_left(i) = center.w_left[i];
    path.w_right(i) = center.w_right[i];
  }

  // Per-iteration step cap keeps the Gauss-Newton linearization honest.
  const double trust = 0.35;

  MinCurvatureResult result;
  SplineFit fit = fit_splines(a_inv, t_b, t_c, path);
  VectorXd kappa_pred;

  for (int iter = 0; iter < params.max_iter; ++iter) {
    if (iter > 0) {
      result.max_lin_error = (fit.kappa - kappa_pred).cwiseAbs().maxCoeff();
      result.max_kappa = fit.kappa.cwiseAbs().maxCoeff();
      if (result.max_lin_error <= params.iqp_curverror_allowed &&
          result.max_kappa <= params.curvlim) {
        result.converged = true;
        break;
      }
    }

    VectorXd norm_x(n), norm_y(n);
    for (int i = 0; i < n; ++i) {
      const double len = std::max(std::hypot(fit.dx(i), fit.dy(i)), 1e-9);
      norm_x(i) = -fit.dy(i) / len;  // left normal
      norm_y(i) = fit.dx(i) / len;
    }

    // q(alpha) = q0 + M alpha; only the point-value rows move.
    MatrixXd m_x = MatrixXd::Zero(4 * n, n), m_y = MatrixXd::Zero(4 * n, n);
    for (int i = 0; i < n; ++i) {
      const int j = (i + 1) % n;
      m_x(4 * i, i) = norm_x(i);
      m_x(4 * i + 1, j) = norm_x(j);
      m_y(4 * i, i) = norm_y(i);
      m_y(4 * i + 1, j) = norm_y(j);
    }

    // Full first-order linearization of kappa(alpha) (Gauss-Newton):
    // first and second spline derivatives and the speed denominator all
    // vary with alpha. Freezing the first derivatives flips the gradient
    // sign for radial motion, walking the path to the wrong side.
    const MatrixXd b_x = t_b * m_x;
    const MatrixXd b_y = t_b * m_y;
    const MatrixXd c_x = t_c * m_x;
    const MatrixXd c_y = t_c * m_y;
    MatrixXd g(n, n);
    for (int i = 0; i < n; ++i) {
      const double speed2 = std::max(fit.dx(i) * fit.dx(i) + fit.dy(i) * fit.dy(i), 1e-12);
      const double weight = 1.0 / std::pow(speed2, 1.5);
      g.row(i) = weight * (fit.dx(i) * c_y.row(i) + fit.ddy(i) * b_x.row(i) -
                           fit.dy(i) * c_x.row(i) - fit.ddx(i) * b_y.row(i)) -
                 (3.0 * fit.kappa(i) / speed2) *
                     (fit.dx(i) * b_x.row(i) + fit.dy(i) * b_y.row(i));
    }

    MatrixXd h = 2.0 * g.transpose() * g;
    h.diagonal().array() += 1e-9;
    const VectorXd f = 2.0 * g.transpose() * fit.kappa;

    VectorXd lb(n), ub(n);
    for (int i = 0; i < n; ++i) {
      double lo = -(path.w_right(i) - params.width_opt / 2.0);
      double hi = path.w_left(i) - params.width_opt / 2.0;
      if (lo > hi) lo = hi = 0.5 * (lo + hi);  // numeric corridor collapse
      lb(i) = std::max(lo, -trust);
      ub(i) = std::min(hi, trust);
      if (lb(i) > ub(i)) lb(i) = ub(i) = std::clamp(0.0, lo, hi);
    }

    const VectorXd alpha = solve_box_qp(h, f, lb, ub);
    kappa_pred = fit.kappa + g * alpha;

    for (int i = 0; i < n; ++i) {
      path.x(i) += alpha(i) * norm_x(i);
      path.y(i) += alpha(i) * norm_y(i);
      path.w_left(i) -= alpha(i);
      path.w_right(i) += alpha(i);
    }
    path = resample(path, n);
    fit = fit_splines(a_inv, t_b, t_c, path);
    result.iterations = iter + 1;
  }

  // Signed lateral offset of the final line relative to each input point,
  // projected on the input normal (left positive).
  result.alpha.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int prev = (i + n - 1) % n;
    const int next = (i + 1) % n;
    const double tx = center.x[next] - center.x[prev];
    const double ty = center.y[next] - center.y[prev];
    const double len = std::max(std::hypot(tx, ty), 1e-12);
    const double nx = -ty / len, ny = tx / len;
    double best_d2 = 1e300, best_off = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ox = path.x(j) - center.x[i];
      const double oy = path.y(j) - center.y[i];
      const double d2 = ox * ox + oy * oy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best_off = ox * nx + oy * ny;
      }
    }
    result.alpha[i] = best_off;
  }

  // Final spline densely sampled and arc-length resampled at the output step.
  const int sub = 20;
  const int total_samples = n * sub;
  std::vector<double> sx(total_samples), sy(total_samples), skappa(total_samples),
      sleft(total_samples), sright(total_samples);
  for (int i = 0; i < n; ++i) {
    const auto cx = fit.coef_x.segment<4>(4 * i);
    const auto cy = fit.coef_y.segment<4>(4 * i);
    const int j = (i + 1) % n;
    for (int k = 0; k < sub; ++k) {
      const double t = static_cast<double>(k) / sub;
      const int idx = i * sub + k;
      sx[idx] = cx(0) + cx(1) * t + cx(2) * t * t + cx(3) * t * t * t;
      sy[idx] = cy(0) + cy(1) * t + cy(2) * t * t + cy(3) * t * t * t;
      const double dx = cx(1) + 2 * cx(2) * t + 3 * cx(3) * t * t;
      const double dy = cy(1) + 2 * cy(2) * t + 3 * cy(3) * t * t;
      const double ddx = 2 * cx(2) + 6 * cx(3) * t;
      const double ddy = 2 * cy(2) + 6 * cy(3) * t;
      const double denom = std::pow(dx * dx + dy * dy, 1.5);
      skappa[idx] = denom > 1e-12 ? (dx * ddy - dy * ddx) / denom : 0.0;
      sleft[idx] = path.w_left(i) + t * (path.w_left(j) - path.w_left(i));
      sright[idx] = path.w_right(i) + t * (path.w_right(j) - path.w_right(i));
    }
  }

  std::vector<double> cum(total_samples + 1, 0.0);
  for (int i = 0; i < total_samples; ++i) {
    const int j = (i + 1) % total_samples;
    cum[i + 1] = cum[i] + std::hypot(sx[j] - sx[i], sy[j] - sy[i]);
  }
  const double total_len = cum[total_samples];
  const std::size_t n_out = static_cast<std::size_t>(std::llround(total_len / params.step_out));
  const double step_out = total_len / static_cast<double>(n_out);

  track::Raceline line;
  line.step = step_out;
  line.s_max = total_len;
  line.closed = true;
  line.s.resize(n_out);
  line.x.resize(n_out);
  line.y.resize(n_out);
  line.psi.resize(n_out);
  line.kappa.resize(n_out);
  line.v.assign(n_out, 0.0);
  line.d_left.resize(n_out);
  line.d_right.resize(n_out);

  std::size_t seg = 0;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double target = static_cast<double>(i) * step_out;
    while (seg + 1 < static_cast<std::size_t>(total_samples) && cum[seg + 1] <= target) ++seg;
    const double seg_len = cum[seg + 1] - cum[seg];
    const double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
    const std::size_t j = (seg + 1) % total_samples;
    line.s[i] = target;
    line.x[i] = sx[seg] + t * (sx[j] - sx[seg]);
    line.y[i] = sy[seg] + t * (sy[j] - sy[seg]);
    line.kappa[i] = skappa[seg] + t * (skappa[j] - skappa[seg]);
    line.d_left[i] = std::max(0.0, sleft[seg] + t * (sleft[j] - sleft[seg]));
    line.d_right[i] = std::max(0.0, sright[seg] + t * (sright[j] - sright[seg]));
  }
  for (std::size_t i = 0; i < n_out; ++i) {
    const std::size_t prev = (i + n_out - 1) % n_out;
    const std::size_t next = (i + 1) % n_out;
    line.psi[i] = std::atan2(line.y[next] - line.y[prev], line.x[next] - line.x[prev]);
  }

  double mk = 0.0;
  for (double k : line.kappa) mk = std::max(mk, std::abs(k));
  result.max_kappa = mk;
  result.raceline = std::move(line);
  return result;
}

}  // namespace rs::planner
