// Bounded-variable primal simplex over the base box:
//
//   maximize c.x   subject to   A x <= b,   x in [-1,1]^n
//
// One implementation instantiated twice: with double (Dantzig pricing,
// tolerance-based, Bland fallback on stalling) and with mpq_class (exact
// arithmetic, Bland's rule throughout, zero tolerances). The exact instance
// is what confirms infeasibility verdicts and rechecks optimal bases.
//
// Internally: slack s_i >= 0 per row, phase-1 artificials only for rows
// infeasible at the all-lower starting point. Full dense tableau.

#pragma once

#include <cstdint>
#include <optional>
#include <type_traits>
#include <vector>

namespace nnequiv::detail {

enum class SimplexStatus { Optimal, Infeasible, IterationLimit };

inline constexpr std::int8_t kAtLower = 0;
inline constexpr std::int8_t kAtUpper = 1;
inline constexpr std::int8_t kBasic = 2;

template <class S>
struct SimplexResult {
  SimplexStatus status = SimplexStatus::IterationLimit;
  S value{};
  std::vector<S> x;                // structural values (n), Optimal only
  std::vector<int> basic;          // basic variable per row
  std::vector<std::int8_t> vstat;  // status per column (n + m [+ artificials])
  long pivots = 0;
};

template <class S>
class BoxSimplex {
 public:
  struct Config {
    S rc_tol{};    // reduced-cost eligibility threshold
    S piv_tol{};   // minimal usable pivot / ratio denominator
    S feas_tol{};  // phase-1 acceptance, bound violation slack
    long iter_cap = 100000;
    bool bland = false;  // Bland's rule from the first pivot
  };

  // a: m rows of length n, c: length n.
  SimplexResult<S> solve(const std::vector<std::vector<S>>& a, const std::vector<S>& b,
                         const std::vector<S>& c, int n, const Config& cfg) {
    setup(n, static_cast<int>(a.size()), cfg);
    init_cold(a, b);
    if (!artificials_.empty()) {
      std::vector<S> phase1(ncols_, S(0));
      for (int j : artificials_) phase1[j] = S(-1);
      build_objective(phase1);
      LoopEnd e = run_loop();
      if (e != LoopEnd::Optimal) return finish(SimplexStatus::IterationLimit);
      if (zval_ < -cfg_.feas_tol) return finish(SimplexStatus::Infeasible);
      pin_artificials();
    }
    build_objective(full_cost(c));
    LoopEnd e = run_loop();
    if (e != LoopEnd::Optimal) return finish(SimplexStatus::IterationLimit);
    return finish(SimplexStatus::Optimal);
  }

  // Phase-2 run from a caller-supplied basis. Returns nullopt when the basis
  // is unusable for this instance (wrong shape, contains artificials,
  // singular, or infeasible under recomputation).
  std::optional<SimplexResult<S>> solve_warm(const std::vector<std::vector<S>>& a,
                                             const std::vector<S>& b, const std::vector<S>& c,
                                             int n, const std::vector<int>& warm_basic,
                                             const std::vector<std::int8_t>& warm_vstat,
                                             const Config& cfg) {
    setup(n, static_cast<int>(a.size()), cfg);
    if (!init_warm(a, b, warm_basic, warm_vstat)) return std::nullopt;
    build_objective(full_cost(c));
    LoopEnd e = run_loop();
    if (e != LoopEnd::Optimal) return std::nullopt;
    return finish(SimplexStatus::Optimal);
  }

 private:
  enum class LoopEnd { Optimal, IterLimit, Unbounded };

  static S sabs(const S& v) { return v < S(0) ? S(-v) : v; }

  void setup(int n, int m, const Config& cfg) {
    cfg_ = cfg;
    n_ = n;
    m_ = m;
    bland_mode_ = cfg.bland;
    pivots_ = 0;
    stall_ = 0;
    artificials_.clear();
  }

  void init_cold(const std::vector<std::vector<S>>& a, const std::vector<S>& b) {
    ncols_ = n_ + m_;
    t_.assign(m_, std::vector<S>(ncols_, S(0)));
    lo_.assign(ncols_, S(0));
    up_.assign(ncols_, S(0));
    has_up_.assign(ncols_, 1);
    fixed_.assign(ncols_, 0);
    artificial_col_.assign(ncols_, 0);
    vstat_.assign(ncols_, kAtLower);
    basic_.assign(m_, -1);
    xb_.assign(m_, S(0));

    for (int j = 0; j < n_; ++j) {
      lo_[j] = S(-1);
      up_[j] = S(1);
    }
    for (int j = n_; j < n_ + m_; ++j) {
      lo_[j] = S(0);
      has_up_[j] = 0;  // slack: unbounded above
    }

    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) t_[i][j] = a[i][j];
      t_[i][n_ + i] = S(1);
      basic_[i] = n_ + i;
      vstat_[n_ + i] = kBasic;
      S v = b[i];
      for (int j = 0; j < n_; ++j) v -= a[i][j] * lo_[j];
      xb_[i] = v;
    }

    // Rows infeasible at the all-lower start get an artificial basic column.
    for (int i = 0; i < m_; ++i) {
      if (!(xb_[i] < S(0))) continue;
      int art = ncols_;
      for (int r = 0; r < m_; ++r) t_[r].push_back(S(0));
      lo_.push_back(S(0));
      up_.push_back(S(0));
      has_up_.push_back(0);
      fixed_.push_back(0);
      artificial_col_.push_back(1);
      vstat_.push_back(kBasic);
      ++ncols_;

      for (int j = 0; j < ncols_; ++j) t_[i][j] = S(0) - t_[i][j];
      t_[i][art] = S(1);
      xb_[i] = S(0) - xb_[i];
      vstat_[basic_[i]] = kAtLower;  // slack leaves at its lower bound 0
      basic_[i] = art;
      artificials_.push_back(art);
    }
  }

  bool init_warm(const std::vector<std::vector<S>>& a, const std::vector<S>& b,
                 const std::vector<int>& warm_basic, const std::vector<std::int8_t>& warm_vstat) {
    ncols_ = n_ + m_;
    if (static_cast<int>(warm_basic.size()) != m_) return false;
    if (static_cast<int>(warm_vstat.size()) < ncols_) return false;
    for (int v : warm_basic)
      if (v < 0 || v >= ncols_) return false;  // rejects artificials too

    lo_.assign(ncols_, S(0));
    up_.assign(ncols_, S(0));
    has_up_.assign(ncols_, 1);
    fixed_.assign(ncols_, 0);
    artificial_col_.assign(ncols_, 0);
    artificials_.clear();
    for (int j = 0; j < n_; ++j) {
      lo_[j] = S(-1);
      up_[j] = S(1);
    }
    for (int j = n_; j < ncols_; ++j) {
      lo_[j] = S(0);
      has_up_[j] = 0;
    }
    vstat_.assign(warm_vstat.begin(), warm_vstat.begin() + ncols_);
    basic_ = warm_basic;
    int basic_count = 0;
    for (int j = 0; j < ncols_; ++j)
      if (vstat_[j] == kBasic) ++basic_count;
    if (basic_count != m_) return false;
    for (int i = 0; i < m_; ++i)
      if (vstat_[basic_[i]] != kBasic) return false;

    // Gauss-Jordan: reduce the basis columns of [A | I | rhs] to identity,
    // which leaves B^{-1}[A|I] and the exact basic values behind.
    std::vector<std::vector<S>> w(m_, std::vector<S>(ncols_ + 1, S(0)));
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) w[i][j] = a[i][j];
      w[i][n_ + i] = S(1);
      S rhs = b[i];
      for (int j = 0; j < ncols_; ++j) {
        if (vstat_[j] == kBasic) continue;
        S v = val(j);
        if (v == S(0)) continue;
        rhs -= (j < n_ ? a[i][j] : (j - n_ == i ? S(1) : S(0))) * v;
      }
      w[i][ncols_] = rhs;
    }
    for (int k = 0; k < m_; ++k) {
      const int bv = basic_[k];  // row k becomes the unit row of this variable
      int prow = -1;
      S best{};
      for (int i = k; i < m_; ++i) {
        S mag = sabs(w[i][bv]);
        if (mag > cfg_.piv_tol && (prow < 0 || mag > best)) {
          prow = i;
          best = mag;
        }
      }
      if (prow < 0) return false;  // singular basis
      std::swap(w[k], w[prow]);
      S piv = w[k][bv];
      for (auto& e : w[k]) e = e / piv;
      for (int i = 0; i < m_; ++i) {
        if (i == k) continue;
        S f = w[i][bv];
        if (f == S(0)) continue;
        for (int j = 0; j <= ncols_; ++j) w[i][j] -= f * w[k][j];
      }
    }
    t_.assign(m_, std::vector<S>(ncols_, S(0)));
    xb_.assign(m_, S(0));
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < ncols_; ++j) t_[i][j] = w[i][j];
      xb_[i] = w[i][ncols_];
    }
    for (int i = 0; i < m_; ++i) {
      int v = basic_[i];
      if (xb_[i] < lo_[v] - cfg_.feas_tol) return false;
      if (has_up_[v] && xb_[i] > up_[v] + cfg_.feas_tol) return false;
    }
    return true;
  }

  std::vector<S> full_cost(const std::vector<S>& c) const {
    std::vector<S> cc(ncols_, S(0));
    for (int j = 0; j < n_ && j < static_cast<int>(c.size()); ++j) cc[j] = c[j];
    return cc;
  }

  S val(int j) const { return vstat_[j] == kAtUpper ? up_[j] : lo_[j]; }

  void build_objective(const std::vector<S>& c) {
    zrow_.assign(ncols_, S(0));
    for (int j = 0; j < ncols_; ++j) {
      if (vstat_[j] == kBasic) continue;
      S d = c[j];
      for (int i = 0; i < m_; ++i) {
        const S& cb = c[basic_[i]];
        if (cb == S(0)) continue;
        const S& tij = t_[i][j];
        if (tij == S(0)) continue;
        d -= cb * tij;
      }
      zrow_[j] = d;
    }
    zval_ = S(0);
    for (int i = 0; i < m_; ++i)
      if (!(c[basic_[i]] == S(0))) zval_ += c[basic_[i]] * xb_[i];
    for (int j = 0; j < ncols_; ++j) {
      if (vstat_[j] == kBasic || c[j] == S(0)) continue;
      S v = val(j);
      if (!(v == S(0))) zval_ += c[j] * v;
    }
  }

  void pin_artificials() {
    for (int j : artificials_) fixed_[j] = 1;
    for (int i = 0; i < m_; ++i) {
      if (!artificial_col_[basic_[i]]) continue;
      // Degenerate swap: move the zero-valued artificial out if any usable
      // column exists in its row; otherwise the row is redundant and inert.
      int q = -1;
      for (int j = 0; j < ncols_; ++j) {
        if (vstat_[j] == kBasic || fixed_[j] || artificial_col_[j]) continue;
        if (sabs(t_[i][j]) > cfg_.piv_tol) {
          q = j;
          break;
        }
      }
      if (q < 0) continue;
      S entering_val = val(q);
      pivot(i, q, kAtLower);
      xb_[i] = entering_val;
    }
  }

  void pivot(int r, int q, std::int8_t leave_to) {
    S piv = t_[r][q];
    for (int j = 0; j < ncols_; ++j) t_[r][j] = t_[r][j] / piv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      S f = t_[i][q];
      if (f == S(0)) continue;
      for (int j = 0; j < ncols_; ++j) t_[i][j] -= f * t_[r][j];
    }
    S zf = zrow_[q];
    if (!(zf == S(0)))
      for (int j = 0; j < ncols_; ++j) zrow_[j] -= zf * t_[r][j];
    zrow_[q] = S(0);
    int vleave = basic_[r];
    basic_[r] = q;
    vstat_[q] = kBasic;
    vstat_[vleave] = leave_to;
    if (artificial_col_[vleave]) fixed_[vleave] = 1;  // artificials never re-enter
    ++pivots_;
  }

  // One iteration. Returns false when no eligible entering column remains
  // (optimal) or an unbounded ray was hit (flagged, defensive only).
  bool step() {
    int q = -1;
    S best{};
    for (int j = 0; j < ncols_; ++j) {
      if (vstat_[j] == kBasic || fixed_[j]) continue;
      bool elig = (vstat_[j] == kAtLower && zrow_[j] > cfg_.rc_tol) ||
                  (vstat_[j] == kAtUpper && zrow_[j] < -cfg_.rc_tol);
      if (!elig) continue;
      if (bland_mode_) {
        q = j;
        break;
      }
      S mag = sabs(zrow_[j]);
      if (q < 0 || mag > best) {
        q = j;
        best = mag;
      }
    }
    if (q < 0) return false;

    const bool increasing = vstat_[q] == kAtLower;

    bool has_delta = false;
    S delta{};
    int leave_row = -1;  // -1: bound flip of q itself
    std::int8_t leave_to = kAtLower;
    if (has_up_[q]) {
      delta = up_[q] - lo_[q];
      has_delta = true;
    }
    for (int i = 0; i < m_; ++i) {
      const S& w = t_[i][q];
      S d = increasing ? w : S(-w);
      int v = basic_[i];
      S lim{};
      std::int8_t to;
      if (d > cfg_.piv_tol) {
        S room = xb_[i] - lo_[v];
        if (room < S(0)) room = S(0);
        lim = room / d;
        to = kAtLower;
      } else if (d < -cfg_.piv_tol && has_up_[v]) {
        S room = up_[v] - xb_[i];
        if (room < S(0)) room = S(0);
        lim = room / (S(0) - d);
        to = kAtUpper;
      } else {
        continue;
      }
      bool take = false;
      if (!has_delta || lim < delta) {
        take = true;
      } else if (leave_row >= 0 && lim == delta) {
        // Ties: Bland leaves the smallest variable index, otherwise prefer
        // the larger pivot magnitude.
        take = bland_mode_ ? basic_[i] < basic_[leave_row]
                           : sabs(t_[i][q]) > sabs(t_[leave_row][q]);
      }
      if (take) {
        delta = lim;
        has_delta = true;
        leave_row = i;
        leave_to = to;
      }
    }

    if (!has_delta) {
      // z is independent of slacks and the structurals are boxed, so a true
      // ray cannot exist; treat as a numerical failure.
      unbounded_ = true;
      return false;
    }

    S move = increasing ? delta : S(-delta);
    for (int i = 0; i < m_; ++i) {
      const S& w = t_[i][q];
      if (!(w == S(0))) xb_[i] -= move * w;
    }
    zval_ += zrow_[q] * move;

    if (leave_row < 0) {
      vstat_[q] = increasing ? kAtUpper : kAtLower;
    } else {
      S entering_val = val(q) + move;
      pivot(leave_row, q, leave_to);
      xb_[leave_row] = entering_val;
    }

    if (delta > stall_eps()) stall_ = 0;
    else ++stall_;
    if (!bland_mode_ && stall_ > 60 + m_) bland_mode_ = true;
    return true;
  }

  static S stall_eps() {
    if constexpr (std::is_same_v<S, double>) return 1e-12;
    else return S(0);
  }

  LoopEnd run_loop() {
    unbounded_ = false;
    for (long it = 0; it < cfg_.iter_cap; ++it)
      if (!step()) return unbounded_ ? LoopEnd::Unbounded : LoopEnd::Optimal;
    return LoopEnd::IterLimit;
  }

  SimplexResult<S> finish(SimplexStatus st) {
    SimplexResult<S> r;
    r.status = st;
    r.pivots = pivots_;
    r.basic = basic_;
    r.vstat = vstat_;
    r.value = zval_;
    if (st == SimplexStatus::Optimal) {
      r.x.assign(n_, S(0));
      std::vector<int> row_of(ncols_, -1);
      for (int i = 0; i < m_; ++i) row_of[basic_[i]] = i;
      for (int j = 0; j < n_; ++j)
        r.x[j] = vstat_[j] == kBasic ? xb_[row_of[j]] : val(j);
    }
    return r;
  }

  Config cfg_{};
  int n_ = 0, m_ = 0, ncols_ = 0;
  std::vector<std::vector<S>> t_;
  std::vector<S> xb_, lo_, up_, zrow_;
  std::vector<int> basic_;
  std::vector<std::int8_t> vstat_;
  std::vector<std::uint8_t> has_up_, fixed_, artificial_col_;
  std::vector<int> artificials_;
  S zval_{};
  bool bland_mode_ = false;
  bool unbounded_ = false;
  long pivots_ = 0;
  int stall_ = 0;
};

}  // namespace nnequiv::detail
