#pragma once

#include <vector>

// Small SPD solvers shared by the variance-functional evaluator, the path
// conditional sampler and the radial solver. The envelope (profile) storage
// keeps row i in columns [first[i], i]; Cholesky produces no fill outside the
// envelope, so banded, block and dense matrices are all the same code path.

namespace polaron {

class EnvelopeSpd {
 public:
  explicit EnvelopeSpd(std::vector<int> first_col);

  int size() const { return n_; }
  int first(int i) const { return first_[i]; }

  double& at(int i, int j);  // j in [first[i], i]
  void add(int i, int j, double v) { at(i, j) += v; }

  // In-place Cholesky A = L L^T. Throws std::runtime_error if a pivot fails.
  void factor();
  bool factored() const { return factored_; }

  void solve_lower(std::vector<double>& x) const;  // L y = x
  void solve_upper(std::vector<double>& x) const;  // L^T y = x
  void solve(std::vector<double>& x) const;        // A y = x

  // Largest i - first[i]; reported as the effective bandwidth.
  int profile_width() const;

 private:
  int n_ = 0;
  std::vector<int> first_;
  std::vector<long long> offset_;
  std::vector<double> a_;
  bool factored_ = false;
};

// Thomas algorithm for an SPD tridiagonal system; diag/sub are not modified.
std::vector<double> solve_tridiag_spd(const std::vector<double>& diag,
                                      const std::vector<double>& sub,
                                      const std::vector<double>& rhs);

// Dense row-major Cholesky for small systems; a is overwritten with the
// factor (lower triangle), which dense_cholesky_resolve can reuse.
void dense_cholesky_solve(std::vector<double>& a, int n, std::vector<double>& rhs);
void dense_cholesky_resolve(const std::vector<double>& factored, int n, std::vector<double>& rhs);

}  // namespace polaron
