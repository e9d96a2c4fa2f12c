// Solver for the MinCq program.
//
// Working in z = rho - u (u the box midpoint) the box becomes |z_j| <= b with
// b = 1/(2n) and the equality reads m'z = t. The objective z'(M + ridge)z is
// strictly convex, so the minimizer is unique.
//
// Phase 1 runs a bounded number of SMO steps: pairs of coordinates move along
// directions that keep m'z fixed (in w_j = m_j z_j this is the usual
// "sum w = const" SMO with second-order working-set selection). This is cheap
// and guesses which coordinates end at the box.
//
// Phase 2 is a primal active-set method started from that point. The free
// block of Q = 2(M + ridge) is held as a Cholesky factor that is extended or
// shrunk by one index per step, so each step costs O(k^2).
//
// If phase 2 hits its step cap, SMO resumes from the current point.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>

#include "pvmincq/mincq.hpp"

namespace pvmincq {

namespace {

/// Projection of 0 onto {m'z = t, |z_j| <= b}: z_j = clip(lambda m_j, -b, b).
Eigen::VectorXd min_norm_feasible(const Eigen::VectorXd& m, const std::vector<char>& coupled,
                                  double b, double t) {
  const Eigen::Index n = m.size();
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  if (t == 0.0) return z;
  const double target = std::abs(t);
  const double sign = t > 0.0 ? 1.0 : -1.0;

  std::vector<Eigen::Index> order;
  double free_sq = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    if (coupled[static_cast<std::size_t>(j)]) {
      order.push_back(j);
      free_sq += m[j] * m[j];
    }
  // Coordinates saturate at lambda = b / |m_j|, largest |m_j| first.
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index c) { return std::abs(m[a]) > std::abs(m[c]); });

  double saturated = 0.0;
  double lambda = std::numeric_limits<double>::infinity();
  std::size_t k = 0;
  for (; k < order.size(); ++k) {
    const double am = std::abs(m[order[k]]);
    const double at_break = (b / am) * free_sq + saturated;
    if (at_break >= target) {
      lambda = (target - saturated) / free_sq;
      break;
    }
    free_sq -= am * am;
    saturated += b * am;
  }
  for (std::size_t q = 0; q < order.size(); ++q) {
    const Eigen::Index j = order[q];
    const double mag = q < k ? b : std::min(b, lambda * std::abs(m[j]));
    z[j] = sign * std::copysign(mag, m[j]);
  }
  return z;
}

/// Lower Cholesky factor of a principal submatrix, grown and shrunk one index
/// at a time.
class GrowingCholesky {
 public:
  explicit GrowingCholesky(Eigen::Index capacity) : l_(capacity, capacity) {}

  Eigen::Index size() const noexcept { return k_; }

  bool factor(const Eigen::MatrixXd& block) {
    Eigen::LLT<Eigen::MatrixXd> llt(block);
    if (llt.info() != Eigen::Success) return false;
    k_ = block.rows();
    l_.topLeftCorner(k_, k_) = llt.matrixL();
    return true;
  }

  /// Appends a row/column whose off-diagonal part is `col` (length size()).
  void append(const Eigen::VectorXd& col, double diag) {
    Eigen::VectorXd lrow = col;
    if (k_ > 0) l_.topLeftCorner(k_, k_).triangularView<Eigen::Lower>().solveInPlace(lrow);
    const double d2 = diag - lrow.squaredNorm();
    l_.row(k_).head(k_) = lrow.transpose();
    l_(k_, k_) = std::sqrt(std::max(d2, 1e-14 * diag));
    ++k_;
  }

  /// Deletes row/column `pos`, restoring triangular form with Givens rotations.
  void remove(Eigen::Index pos) {
    for (Eigen::Index r = pos; r + 1 < k_; ++r) l_.row(r).head(r + 2) = l_.row(r + 1).head(r + 2);
    for (Eigen::Index i = pos; i + 1 < k_; ++i) {
      const double a = l_(i, i);
      const double c = l_(i, i + 1);
      const double r = std::hypot(a, c);
      if (r == 0.0) continue;
      const double cs = a / r;
      const double sn = c / r;
      for (Eigen::Index q = i; q + 1 < k_; ++q) {
        const double x = l_(q, i);
        const double y = l_(q, i + 1);
        l_(q, i) = cs * x + sn * y;
        l_(q, i + 1) = -sn * x + cs * y;
      }
      l_(i, i) = r;
      l_(i, i + 1) = 0.0;
    }
    --k_;
  }

  void solve_in_place(Eigen::VectorXd& v) const {
    if (k_ == 0) return;
    const auto lower = l_.topLeftCorner(k_, k_).triangularView<Eigen::Lower>();
    lower.solveInPlace(v);
    lower.transpose().solveInPlace(v);
  }

 private:
  Eigen::MatrixXd l_;
  Eigen::Index k_ = 0;
};

struct Problem {
  const Eigen::MatrixXd& M;
  const Eigen::VectorXd& m;
  const Eigen::VectorXd& linear;
  double b;
  double ridge;
  std::vector<char> coupled;
  bool any_decoupled = false;
  Eigen::VectorXd inv_m;
  Eigen::VectorXd diag;

  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const {
    const Eigen::VectorXd rho = z.array() + b;
    return 2.0 * (M * rho) - linear + 2.0 * ridge * z;
  }
};

/// Runs SMO steps until the scaled gap falls below `tol` or `budget` steps
/// were taken. Returns the number of steps.
std::size_t run_smo(const Problem& P, Eigen::VectorXd& z, Eigen::VectorXd& g, std::size_t budget, double tol) {
  const Eigen::Index n = z.size();
  const Eigen::MatrixXd& M = P.M;
  const Eigen::VectorXd& m = P.m;
  const double b = P.b;
  constexpr double curvature_floor = 1e-14;

  auto can_increase = [&](Eigen::Index j) { return m[j] > 0.0 ? z[j] < b : z[j] > -b; };
  auto can_decrease = [&](Eigen::Index j) { return m[j] > 0.0 ? z[j] > -b : z[j] < b; };
  auto update = [&](Eigen::Index j, double dz) {
    if (dz == 0.0) return;
    g.noalias() += (2.0 * dz) * M.col(j);
    g[j] += 2.0 * P.ridge * dz;
  };

  std::size_t iter = 0;
  while (iter < budget) {
    if (P.any_decoupled) {
      Eigen::Index worst = -1;
      double worst_v = tol;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (P.coupled[static_cast<std::size_t>(j)]) continue;
        const double v = g[j] > 0.0 ? (z[j] > -b ? g[j] : 0.0) : (z[j] < b ? -g[j] : 0.0);
        if (v > worst_v) {
          worst_v = v;
          worst = j;
        }
      }
      if (worst >= 0) {
        const double target = std::clamp(z[worst] - g[worst] / (2.0 * P.diag[worst]), -b, b);
        const double dz = target - z[worst];
        z[worst] = target;
        update(worst, dz);
        ++iter;
        continue;
      }
    }

    Eigen::Index i = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -g_min;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!P.coupled[static_cast<std::size_t>(j)]) continue;
      const double gj = g[j] * P.inv_m[j];
      if (can_increase(j) && gj < g_min) {
        g_min = gj;
        i = j;
      }
      if (can_decrease(j) && gj > g_max) g_max = gj;
    }
    if (i < 0 || !(g_max - g_min > tol)) break;

    Eigen::Index jsel = -1;
    double best = -1.0;
    double best_a = 0.0;
    const double qi = P.diag[i] * P.inv_m[i] * P.inv_m[i];
    const auto Mi = M.col(i);  // M is symmetric; column access is contiguous
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || !P.coupled[static_cast<std::size_t>(j)] || !can_decrease(j)) continue;
      const double diff = g[j] * P.inv_m[j] - g_min;
      if (diff <= 0.0) continue;
      double a = 2.0 * (qi + P.diag[j] * P.inv_m[j] * P.inv_m[j] - 2.0 * Mi[j] * P.inv_m[i] * P.inv_m[j]);
      if (a <= curvature_floor) a = curvature_floor;
      const double score = diff * diff / a;
      if (score > best) {
        best = score;
        jsel = j;
        best_a = a;
      }
    }
    if (jsel < 0) break;

    const Eigen::Index j = jsel;
    double s = (g[j] * P.inv_m[j] - g[i] * P.inv_m[i]) / best_a;
    const double cap_i = m[i] > 0.0 ? (b - z[i]) * m[i] : (z[i] + b) * -m[i];
    const double cap_j = m[j] > 0.0 ? (z[j] + b) * m[j] : (b - z[j]) * -m[j];
    bool clip_i = false, clip_j = false;
    if (s >= cap_i) {
      s = cap_i;
      clip_i = true;
    }
    if (s >= cap_j) {
      clip_i = s == cap_j ? clip_i : false;
      s = cap_j;
      clip_j = true;
    }

    const double zi_old = z[i], zj_old = z[j];
    z[i] = std::clamp(clip_i ? (m[i] > 0.0 ? b : -b) : z[i] + s * P.inv_m[i], -b, b);
    z[j] = std::clamp(clip_j ? (m[j] > 0.0 ? -b : b) : z[j] - s * P.inv_m[j], -b, b);
    update(i, z[i] - zi_old);
    update(j, z[j] - zj_old);
    ++iter;
  }
  return iter;
}

/// Multiplier of the equality minimizing the worst bound violation over the
/// fixed coordinates; used when no free coordinate enters the equality.
double multiplier_from_bounds(const Problem& P, const Eigen::VectorXd& g, const std::vector<signed char>& at) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t j = 0; j < at.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (at[j] == 0 || !P.coupled[j]) continue;
    lo = std::min(lo, g[jj] / P.m[jj]);
    hi = std::max(hi, g[jj] / P.m[jj]);
  }
  if (!(lo <= hi)) return 0.0;
  auto worst = [&](double nu) {
    double w = 0.0;
    for (std::size_t j = 0; j < at.size(); ++j) {
      if (at[j] == 0) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      const double r = g[jj] - nu * P.m[jj];
      w = std::max(w, at[j] > 0 ? r : -r);
    }
    return w;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double a = lo + (hi - lo) / 3.0;
    const double c = hi - (hi - lo) / 3.0;
    if (worst(a) <= worst(c))
      hi = c;
    else
      lo = a;
  }
  return 0.5 * (lo + hi);
}

/// Primal active-set phase. Returns false if the step cap was reached.
bool run_active_set(const Problem& P, Eigen::VectorXd& z, std::size_t cap, double release_tol,
                    std::size_t& steps) {
  const Eigen::Index n = z.size();
  const double b = P.b;
  const double two_ridge = 2.0 * P.ridge;
  auto q_entry = [&](Eigen::Index i, Eigen::Index j) { return 2.0 * P.M(i, j) + (i == j ? two_ridge : 0.0); };

  std::vector<signed char> at(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> free;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (z[j] >= b) {
      z[j] = b;
      at[static_cast<std::size_t>(j)] = 1;
    } else if (z[j] <= -b) {
      z[j] = -b;
      at[static_cast<std::size_t>(j)] = -1;
    } else {
      free.push_back(j);
    }
  }

  GrowingCholesky chol(n);
  {
    const auto k = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd block(k, k);
    for (Eigen::Index c = 0; c < k; ++c)
      for (Eigen::Index r = 0; r < k; ++r) block(r, c) = q_entry(free[r], free[c]);
    if (!chol.factor(block)) {
      for (Eigen::Index c = 0; c < k; ++c)
        chol.append(block.col(c).head(c), block(c, c));
    }
  }

  auto append_free = [&](Eigen::Index j) {
    Eigen::VectorXd col(static_cast<Eigen::Index>(free.size()));
    for (std::size_t r = 0; r < free.size(); ++r) col[static_cast<Eigen::Index>(r)] = q_entry(free[r], j);
    chol.append(col, q_entry(j, j));
    free.push_back(j);
    at[static_cast<std::size_t>(j)] = 0;
  };

  Eigen::VectorXd g = P.gradient(z);
  bool at_minimizer = false;
  steps = 0;
  while (steps < cap) {
    ++steps;
    const auto k = static_cast<Eigen::Index>(free.size());
    bool coupled_free = false;
    for (Eigen::Index f : free) coupled_free |= P.coupled[static_cast<std::size_t>(f)] != 0;

    if (!at_minimizer) {
      // Minimize over the free block subject to m_F'p = 0.
      Eigen::VectorXd a(k), mf(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        a[r] = g[free[static_cast<std::size_t>(r)]];
        mf[r] = P.m[free[static_cast<std::size_t>(r)]];
      }
      Eigen::VectorXd cvec = mf;
      chol.solve_in_place(a);
      Eigen::VectorXd p = -a;
      double nu_face = 0.0;
      if (coupled_free) {
        chol.solve_in_place(cvec);
        const double denom = mf.dot(cvec);
        if (denom > 0.0) {
          nu_face = mf.dot(a) / denom;
          p += nu_face * cvec;
        }
      }

      double alpha = 1.0;
      Eigen::Index block_pos = -1;
      for (Eigen::Index r = 0; r < k; ++r) {
        const double zj = z[free[static_cast<std::size_t>(r)]];
        double room;
        if (p[r] > 0.0)
          room = (b - zj) / p[r];
        else if (p[r] < 0.0)
          room = (-b - zj) / p[r];
        else
          continue;
        room = std::max(room, 0.0);
        if (room < alpha) {
          alpha = room;
          block_pos = r;
        }
      }

      // Q_FF p = nu m_F - g_F, so the free gradient moves linearly; the
      // fixed coordinates' gradient is only needed at face minimizers.
      for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index j = free[static_cast<std::size_t>(r)];
        z[j] += alpha * p[r];
        g[j] = (1.0 - alpha) * g[j] + alpha * nu_face * P.m[j];
      }

      if (block_pos >= 0) {
        const Eigen::Index j = free[static_cast<std::size_t>(block_pos)];
        const signed char side = p[block_pos] > 0.0 ? 1 : -1;
        z[j] = side * b;
        at[static_cast<std::size_t>(j)] = side;
        free.erase(free.begin() + block_pos);
        chol.remove(block_pos);
        continue;
      }
      for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::Index j = free[static_cast<std::size_t>(r)];
        z[j] = std::clamp(z[j], -b, b);
      }
      at_minimizer = true;
    }

    // At the minimizer of the current face: check the bound multipliers.
    g = P.gradient(z);
    double nu = 0.0;
    if (coupled_free) {
      double num = 0.0, den = 0.0;
      for (Eigen::Index f : free) {
        if (!P.coupled[static_cast<std::size_t>(f)]) continue;
        num += P.m[f] * g[f];
        den += P.m[f] * P.m[f];
      }
      nu = num / den;
    } else {
      nu = multiplier_from_bounds(P, g, at);
    }

    Eigen::Index release = -1;
    double worst = release_tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      const signed char s = at[static_cast<std::size_t>(j)];
      if (s == 0) continue;
      const double r = g[j] - nu * P.m[j];
      const double v = s > 0 ? r : -r;
      if (v > worst) {
        worst = v;
        release = j;
      }
    }
    if (release < 0) return true;
    append_free(release);
    at_minimizer = false;
  }
  return false;
}

}  // namespace

Posterior solve(const QPInstance& qp, const SolverOptions& options, SolverStats* stats) {
  const Eigen::Index n = qp.first_moment.size();
  if (n == 0) throw std::invalid_argument("empty program");
  if (qp.second_moment.rows() != n || qp.second_moment.cols() != n || qp.linear_term.size() != n)
    throw std::invalid_argument("inconsistent program dimensions");

  const auto [lo, hi] = achievable_rhs(qp);
  const double c = qp.equality_rhs;
  const double slack = 1e-14 * std::max({1.0, std::abs(lo), std::abs(hi)});
  if (!(c >= lo - slack && c <= hi + slack)) throw InfeasibleMargin(lo, hi, c);

  const Eigen::VectorXd& m = qp.first_moment;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double b = 0.5 * inv_n;

  Problem P{qp.second_moment, m, qp.linear_term, b, options.ridge, {}, false, Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double m_scale = m.cwiseAbs().maxCoeff();
  const double tiny = 1e-12 * m_scale;
  P.coupled.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool cj = std::abs(m[j]) > tiny && m_scale > 0.0;
    P.coupled[static_cast<std::size_t>(j)] = cj;
    P.any_decoupled |= !cj;
    P.inv_m[j] = cj ? 1.0 / m[j] : 0.0;
    P.diag[j] = qp.second_moment(j, j) + options.ridge;
  }

  double t = c - m.sum() * b;
  if (t > 0.0) t = std::min(t, hi - m.sum() * b);
  if (t < 0.0) t = std::max(t, lo - m.sum() * b);
  Eigen::VectorXd z = min_norm_feasible(m, P.coupled, b, t);

  const auto un = static_cast<std::size_t>(n);
  const std::size_t warmup = options.warmup_iterations ? options.warmup_iterations : 10 * un;
  const std::size_t smo_cap = options.max_iterations ? options.max_iterations : std::max<std::size_t>(200000, 400 * un);
  const double smo_tol = 1e-2 * options.tolerance;

  Eigen::VectorXd g = P.gradient(z);
  std::size_t iterations = run_smo(P, z, g, std::min(warmup, smo_cap), smo_tol);

  std::size_t as_steps = 0;
  const bool finished = run_active_set(P, z, 4 * un + 100, smo_tol, as_steps);
  if (!finished) {
    for (int refresh = 0; refresh < 4 && iterations < smo_cap; ++refresh) {
      g = P.gradient(z);
      const std::size_t done = run_smo(P, z, g, smo_cap - iterations, smo_tol);
      iterations += done;
      if (done == 0) break;
    }
  }

  // Remove equality drift on the free coordinates.
  {
    const double resid = t - m.dot(z);
    double free_sq = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (P.coupled[static_cast<std::size_t>(j)] && std::abs(z[j]) < b) free_sq += m[j] * m[j];
    if (resid != 0.0 && free_sq > 0.0) {
      const double lambda = resid / free_sq;
      for (Eigen::Index j = 0; j < n; ++j)
        if (P.coupled[static_cast<std::size_t>(j)] && std::abs(z[j]) < b)
          z[j] = std::clamp(z[j] + lambda * m[j], -b, b);
    }
  }

  Posterior out{Eigen::VectorXd(n)};
  for (Eigen::Index j = 0; j < n; ++j) out.weights[j] = std::clamp(b + z[j], 0.0, inv_n);
  if (stats) {
    const double residual = kkt_residual(qp, out.weights);
    *stats = SolverStats{iterations, as_steps, residual, residual <= options.tolerance};
  }
  return out;
}

}  // namespace pvmincq
