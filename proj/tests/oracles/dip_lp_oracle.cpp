#include "dip_lp_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace unimodal::oracle {

namespace {

constexpr double kEps = 1e-10;

// Tableau layout follows the classic "Ax <= b" formulation: m slack rows,
// one objective row and one phase-one row.
class Simplex {
 public:
  Simplex(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
          const std::vector<double>& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        basic_(m_),
        nonbasic_(n_ + 1),
        d_(m_ + 2, std::vector<double>(n_ + 2)) {
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) d_[i][j] = A[i][j];
    }
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      d_[i][n_] = -1;
      d_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      d_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    d_[m_ + 1][n_] = 1;
  }

  bool solve(double& value, std::vector<double>& x) {
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    }
    if (m_ > 0 && d_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(1) || d_[m_ + 1][n_ + 1] < -kEps) return false;
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] == -1) {
          int s = -1;
          for (int j = 0; j <= n_; ++j) {
            if (s == -1 || d_[i][j] < d_[i][s] ||
                (d_[i][j] == d_[i][s] && nonbasic_[j] < nonbasic_[s])) {
              s = j;
            }
          }
          pivot(i, s);
        }
      }
    }
    if (!run(2)) return false;
    x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] < n_) x[basic_[i]] = d_[i][n_ + 1];
    }
    value = d_[m_][n_ + 1];
    return true;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / d_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double f = d_[i][s] * inv;
      if (f == 0.0) continue;
      for (int j = 0; j < n_ + 2; ++j) {
        if (j != s) d_[i][j] -= d_[r][j] * f;
      }
      d_[i][s] = -f;
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) d_[r][j] *= inv;
    }
    d_[r][s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool run(int phase) {
    const int x = phase == 1 ? m_ + 1 : m_;
    while (true) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasic_[j] == -1) continue;
        if (s == -1 || d_[x][j] < d_[x][s] ||
            (d_[x][j] == d_[x][s] && nonbasic_[j] < nonbasic_[s])) {
          s = j;
        }
      }
      if (d_[x][s] > -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_[i][s] < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_[i][n_ + 1] / d_[i][s];
        const double rhs = d_[r][n_ + 1] / d_[r][s];
        if (lhs < rhs - kEps || (std::abs(lhs - rhs) <= kEps && basic_[i] < basic_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  int m_, n_;
  std::vector<int> basic_, nonbasic_;
  std::vector<std::vector<double>> d_;
};

}  // namespace

bool solve_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
              const std::vector<double>& c, double& value, std::vector<double>* x) {
  Simplex lp(A, b, c);
  std::vector<double> sol;
  const bool ok = lp.solve(value, sol);
  if (ok && x != nullptr) *x = std::move(sol);
  return ok;
}

double dip_lp_at(std::span<const double> sorted, int subdivisions) {
  const double n = static_cast<double>(sorted.size());

  // Distinct data values with ECDF left and right limits.
  std::vector<double> z, left, right;
  std::vector<bool> is_data;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (!z.empty() && subdivisions > 0) {
      const double a = z.back();
      const double fl = right.back();
      for (int s = 1; s <= subdivisions; ++s) {
        z.push_back(a + (sorted[i] - a) * s / (subdivisions + 1));
        left.push_back(fl);
        right.push_back(fl);
        is_data.push_back(false);
      }
    }
    z.push_back(sorted[i]);
    left.push_back(static_cast<double>(i) / n);
    right.push_back(static_cast<double>(j) / n);
    is_data.push_back(true);
    i = j;
  }
  const int m = static_cast<int>(z.size());
  if (m == 1) return 0.0;

  // Variables: u_0..u_{m-1}, a (left limit at the mode), t.
  const int nv = m + 2;
  const int ia = m;
  const int it = m + 1;

  double best = std::numeric_limits<double>::infinity();
  for (int mode = 0; mode < m; ++mode) {
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    auto row = [&] { return std::vector<double>(nv, 0.0); };
    auto add = [&](std::vector<double> r, double rhs) {
      A.push_back(std::move(r));
      b.push_back(rhs);
    };

    for (int i = 0; i < m; ++i) {
      auto r = row();
      r[i] = 1;
      add(r, 1.0);
    }
    {
      auto r = row();
      r[ia] = 1;
      r[mode] = -1;
      add(r, 0.0);
    }
    for (int i = 0; i < m; ++i) {
      const int lv = i == mode ? ia : i;  // variable holding U(z_i-)
      auto r1 = row();
      r1[lv] = 1;
      r1[it] = -1;
      add(r1, left[i]);
      auto r2 = row();
      r2[lv] = -1;
      r2[it] = -1;
      add(r2, -left[i]);
      auto r3 = row();
      r3[i] = 1;
      r3[it] = -1;
      add(r3, right[i]);
      auto r4 = row();
      r4[i] = -1;
      r4[it] = -1;
      add(r4, -right[i]);
    }

    // Left part: points 0..mode-1 plus (z_mode, a); nondecreasing, convex.
    std::vector<int> lvars;
    for (int i = 0; i < mode; ++i) lvars.push_back(i);
    lvars.push_back(ia);
    for (int i = 0; i + 1 < static_cast<int>(lvars.size()); ++i) {
      auto r = row();
      r[lvars[i]] += 1;
      r[lvars[i + 1]] -= 1;
      add(r, 0.0);
    }
    for (int i = 1; i + 1 < static_cast<int>(lvars.size()); ++i) {
      const double d1 = z[i] - z[i - 1];
      const double d2 = z[i + 1] - z[i];
      auto r = row();
      r[lvars[i]] += 1 / d1 + 1 / d2;
      r[lvars[i - 1]] -= 1 / d1;
      r[lvars[i + 1]] -= 1 / d2;
      add(r, 0.0);
    }

    // Right part: points mode..m-1; nondecreasing, concave.
    for (int i = mode; i + 1 < m; ++i) {
      auto r = row();
      r[i] += 1;
      r[i + 1] -= 1;
      add(r, 0.0);
    }
    for (int i = mode + 1; i + 1 < m; ++i) {
      const double d1 = z[i] - z[i - 1];
      const double d2 = z[i + 1] - z[i];
      auto r = row();
      r[i] -= 1 / d1 + 1 / d2;
      r[i - 1] += 1 / d1;
      r[i + 1] += 1 / d2;
      add(r, 0.0);
    }

    std::vector<double> c(nv, 0.0);
    c[it] = -1.0;
    double value = 0.0;
    if (solve_lp(A, b, c, value)) best = std::min(best, -value);
  }
  return best;
}

double dip_lp(std::span<const double> sorted) {
  double prev = dip_lp_at(sorted, 0);
  for (int subdivisions : {1, 3, 7}) {
    const double next = dip_lp_at(sorted, subdivisions);
    const bool settled = std::abs(next - prev) < 1e-7;
    prev = std::min(prev, next);
    if (settled) break;
  }
  return std::max(prev, 1.0 / (2.0 * static_cast<double>(sorted.size())));
}

}  // namespace unimodal::oracle
