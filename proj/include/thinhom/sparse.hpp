#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thinhom/errors.hpp"

namespace thinhom {

class CsrMatrix {
 public:
  CsrMatrix() = default;

  CsrMatrix(size_t n, std::vector<size_t> row_ptr, std::vector<int> cols,
            std::vector<double> vals, bool symmetric)
      : n_(n),
        row_ptr_(std::move(row_ptr)),
        cols_(std::move(cols)),
        vals_(std::move(vals)),
        symmetric_(symmetric) {}

  size_t size() const { return n_; }
  bool symmetric() const { return symmetric_; }
  const std::vector<size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& cols() const { return cols_; }
  const std::vector<double>& vals() const { return vals_; }
  std::vector<double>& vals() { return vals_; }

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n_, 0.0);
    for (size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        acc += vals_[k] * x[cols_[k]];
      }
      y[i] = acc;
    }
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(n_, 0.0);
    for (size_t i = 0; i < n_; ++i) {
      for (size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        if (cols_[k] == static_cast<int>(i)) d[i] = vals_[k];
      }
    }
    return d;
  }

  double entry(size_t i, size_t j) const {
    for (size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (cols_[k] == static_cast<int>(j)) return vals_[k];
    }
    return 0.0;
  }

 private:
  size_t n_ = 0;
  std::vector<size_t> row_ptr_{0};
  std::vector<int> cols_;
  std::vector<double> vals_;
  bool symmetric_ = false;
};

// Accumulates duplicate (i, j) contributions, then compresses row by row.
class CsrBuilder {
 public:
  explicit CsrBuilder(size_t n) : rows_(n) {}

  void add(size_t i, size_t j, double v) { rows_[i].push_back({static_cast<int>(j), v}); }

  size_t size() const { return rows_.size(); }

  CsrMatrix build(bool symmetric = true) {
    size_t n = rows_.size();
    std::vector<size_t> row_ptr(n + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    size_t nnz_bound = 0;
    for (const auto& r : rows_) nnz_bound += r.size();
    cols.reserve(nnz_bound);
    vals.reserve(nnz_bound);
    for (size_t i = 0; i < n; ++i) {
      auto& row = rows_[i];
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (size_t k = 0; k < row.size();) {
        int j = row[k].first;
        double acc = 0.0;
        while (k < row.size() && row[k].first == j) {
          acc += row[k].second;
          ++k;
        }
        cols.push_back(j);
        vals.push_back(acc);
      }
      row_ptr[i + 1] = cols.size();
    }
    return CsrMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals), symmetric);
  }

 private:
  std::vector<std::vector<std::pair<int, double>>> rows_;
};

struct SolveReport {
  int iterations = 0;
  double rhs_norm = 0.0;
  double final_residual = 0.0;           // converged quantity: see solve_cg
  bool converged = false;
  std::vector<double> residual_history;  // preconditioned residual norm per iteration
};

class SolveError : public Error {
 public:
  SolveError(const std::string& msg, SolveReport r) : Error(msg), report(std::move(r)) {}

  SolveReport report;
};

// Symmetric elimination of prescribed unknowns: constrained rows and columns
// are zeroed, the diagonal is set to 1, and column contributions move to the
// right-hand side, so the solved values match the prescription exactly.
inline void eliminate_dirichlet(CsrMatrix& A, std::vector<double>& b,
                                const std::vector<std::pair<size_t, double>>& constraints) {
  if (constraints.empty()) return;
  size_t n = A.size();
  std::vector<char> constrained(n, 0);
  std::vector<double> value(n, 0.0);
  for (const auto& [node, val] : constraints) {
    if (node >= n) throw ArgumentError("eliminate_dirichlet: node out of range");
    constrained[node] = 1;
    value[node] = val;
  }
  const auto& row_ptr = A.row_ptr();
  const auto& cols = A.cols();
  auto& vals = A.vals();
  for (size_t i = 0; i < n; ++i) {
    bool row_constrained = constrained[i];
    for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      size_t j = static_cast<size_t>(cols[k]);
      if (row_constrained) {
        vals[k] = (j == i) ? 1.0 : 0.0;
      } else if (constrained[j]) {
        b[i] -= vals[k] * value[j];
        vals[k] = 0.0;
      }
    }
    if (row_constrained) b[i] = value[i];
  }
}

struct SolveOptions {
  double tol = 1e-10;
  long max_iter = 0;  // 0: 20 * n
  std::optional<size_t> pin;
  const std::vector<double>* x0 = nullptr;
};

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

// Jacobi-preconditioned conjugate gradients, realized as plain CG on the
// symmetrically scaled system D^(-1/2) A D^(-1/2). The scaled residual norm
// equals the preconditioned residual norm sqrt(r' D^(-1) r) of the original
// system; convergence is declared when it falls below tol times the scaled
// right-hand-side norm. For singular compatible systems (pure Neumann /
// periodic), pass `pin` to ground one unknown at zero; the right-hand side is
// then required to be orthogonal to constants.
inline SolveResult solve_cg(const CsrMatrix& A_in, const std::vector<double>& b_in,
                            SolveOptions opt = {}) {
  size_t n = A_in.size();
  if (b_in.size() != n) throw ArgumentError("solve_cg: size mismatch");

  double bnorm2 = 0.0, bsum = 0.0;
  for (double v : b_in) {
    bnorm2 += v * v;
    bsum += v;
  }
  double bnorm = std::sqrt(bnorm2);

  if (opt.pin && std::abs(bsum) > 1e-8 * std::max(bnorm, 1e-300)) {
    throw ArgumentError("solve_cg: singular system with incompatible right-hand side (sum " +
                        std::to_string(bsum) + ")");
  }

  CsrMatrix A = A_in;
  std::vector<double> b = b_in;
  if (opt.pin) eliminate_dirichlet(A, b, {{*opt.pin, 0.0}});

  std::vector<double> scale = A.diagonal();
  for (double& d : scale) {
    if (!(d > 0.0)) {
      throw SolveError("solve_cg: nonpositive diagonal entry; system is not SPD", {});
    }
    d = 1.0 / std::sqrt(d);
  }
  {
    const auto& row_ptr = A.row_ptr();
    const auto& cols = A.cols();
    auto& vals = A.vals();
    for (size_t i = 0; i < n; ++i) {
      for (size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
        vals[k] *= scale[i] * scale[cols[k]];
      }
    }
  }
  double sbnorm2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    b[i] *= scale[i];
    sbnorm2 += b[i] * b[i];
  }
  double denom = sbnorm2 > 0.0 ? std::sqrt(sbnorm2) : 1.0;

  long max_iter = opt.max_iter > 0 ? opt.max_iter : 20L * static_cast<long>(n);
  std::vector<double> x(n, 0.0);
  if (opt.x0) {
    if (opt.x0->size() != n) throw ArgumentError("solve_cg: bad initial guess size");
    for (size_t i = 0; i < n; ++i) x[i] = (*opt.x0)[i] / scale[i];
    if (opt.pin) x[*opt.pin] = 0.0;
  }

  SolveReport report;
  report.rhs_norm = bnorm;

  std::vector<double> r(n), p(n), Ap(n);
  // Recomputes r = b - A x from the iterate and returns its squared norm.
  auto true_residual = [&]() {
    A.multiply(x, r);
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
      r[i] = b[i] - r[i];
      s += r[i] * r[i];
    }
    return s;
  };
  double rr = true_residual();
  p = r;
  report.residual_history.push_back(std::sqrt(rr));

  long it = 0;
  double target = opt.tol * denom;
  int confirmations = 0;
  while (it < max_iter) {
    if (std::sqrt(rr) <= target) {
      // The recurrence claims convergence; confirm against the iterate. On
      // drift, restart from the recomputed residual; give up after repeated
      // restarts fail to push the confirmed residual below the target.
      double s = true_residual();
      rr = s;
      if (std::sqrt(s) <= target || ++confirmations >= 8) break;
      p = r;
      report.residual_history.push_back(std::sqrt(rr));
    }
    A.multiply(p, Ap);
    double pAp = 0.0;
    for (size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
    if (!(pAp > 0.0)) {
      report.iterations = static_cast<int>(it);
      report.final_residual = std::sqrt(rr) / denom;
      throw SolveError("solve_cg: nonpositive curvature; system is not SPD", report);
    }
    double alpha = rr / pAp;
    for (size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    double rr_new = 0.0;
    for (size_t i = 0; i < n; ++i) rr_new += r[i] * r[i];
    double beta = rr_new / rr;
    for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
    ++it;
    report.residual_history.push_back(std::sqrt(rr));
  }

  report.iterations = static_cast<int>(it);
  report.final_residual = std::sqrt(rr) / denom;
  report.converged = std::sqrt(rr) <= target;
  if (!report.converged) {
    char res[32];
    std::snprintf(res, sizeof res, "%.3e", report.final_residual);
    throw SolveError("solve_cg: no convergence after " + std::to_string(it) +
                         " iterations (relative residual " + res + ")",
                     report);
  }
  for (size_t i = 0; i < n; ++i) x[i] *= scale[i];
  return {std::move(x), std::move(report)};
}

}  // namespace thinhom
