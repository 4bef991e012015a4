#include "polaron/lina.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polaron {

EnvelopeSpd::EnvelopeSpd(std::vector<int> first_col) : first_(std::move(first_col)) {
  n_ = static_cast<int>(first_.size());
  offset_.resize(n_ + 1);
  offset_[0] = 0;
  for (int i = 0; i < n_; ++i) {
    if (first_[i] < 0 || first_[i] > i) throw std::invalid_argument("EnvelopeSpd: bad profile");
    offset_[i + 1] = offset_[i] + (i - first_[i] + 1);
  }
  a_.assign(static_cast<std::size_t>(offset_[n_]), 0.0);
}

double& EnvelopeSpd::at(int i, int j) {
  return a_[static_cast<std::size_t>(offset_[i] + (j - first_[i]))];
}

int EnvelopeSpd::profile_width() const {
  int w = 0;
  for (int i = 0; i < n_; ++i) w = std::max(w, i - first_[i]);
  return w;
}

void EnvelopeSpd::factor() {
  for (int i = 0; i < n_; ++i) {
    double* row_i = &a_[static_cast<std::size_t>(offset_[i])];
    const int fi = first_[i];
    for (int j = fi; j < i; ++j) {
      const double* row_j = &a_[static_cast<std::size_t>(offset_[j])];
      const int fj = first_[j];
      const int k0 = std::max(fi, fj);
      double s = row_i[j - fi];
      for (int k = k0; k < j; ++k) s -= row_i[k - fi] * row_j[k - fj];
      row_i[j - fi] = s / row_j[j - fj];
    }
    double s = row_i[i - fi];
    for (int k = fi; k < i; ++k) s -= row_i[k - fi] * row_i[k - fi];
    if (!(s > 0.0)) throw std::runtime_error("EnvelopeSpd: matrix not positive definite");
    row_i[i - fi] = std::sqrt(s);
  }
  factored_ = true;
}

void EnvelopeSpd::solve_lower(std::vector<double>& x) const {
  for (int i = 0; i < n_; ++i) {
    const double* row_i = &a_[static_cast<std::size_t>(offset_[i])];
    const int fi = first_[i];
    double s = x[i];
    for (int k = fi; k < i; ++k) s -= row_i[k - fi] * x[k];
    x[i] = s / row_i[i - fi];
  }
}

void EnvelopeSpd::solve_upper(std::vector<double>& x) const {
  for (int i = n_ - 1; i >= 0; --i) {
    const double* row_i = &a_[static_cast<std::size_t>(offset_[i])];
    const int fi = first_[i];
    x[i] /= row_i[i - fi];
    const double xi = x[i];
    for (int k = fi; k < i; ++k) x[k] -= row_i[k - fi] * xi;
  }
}

void EnvelopeSpd::solve(std::vector<double>& x) const {
  solve_lower(x);
  solve_upper(x);
}

std::vector<double> solve_tridiag_spd(const std::vector<double>& diag,
                                      const std::vector<double>& sub,
                                      const std::vector<double>& rhs) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> c(n > 0 ? n - 1 : 0), d(n), x(n);
  if (n == 0) return x;
  d[0] = diag[0];
  for (int k = 0; k + 1 < n; ++k) {
    if (!(d[k] > 0.0)) throw std::runtime_error("solve_tridiag_spd: not SPD");
    c[k] = sub[k] / d[k];
    d[k + 1] = diag[k + 1] - sub[k] * c[k];
  }
  if (!(d[n - 1] > 0.0)) throw std::runtime_error("solve_tridiag_spd: not SPD");
  x[0] = rhs[0];
  for (int k = 1; k < n; ++k) x[k] = rhs[k] - c[k - 1] * x[k - 1];
  for (int k = 0; k < n; ++k) x[k] /= d[k];
  for (int k = n - 2; k >= 0; --k) x[k] -= c[k] * x[k + 1];
  return x;
}

void dense_cholesky_solve(std::vector<double>& a, int n, std::vector<double>& rhs) {
  for (int j = 0; j < n; ++j) {
    double s = a[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      double v = a[static_cast<std::size_t>(j) * n + k];
      s -= v * v;
    }
    if (!(s > 0.0)) throw std::runtime_error("dense_cholesky_solve: not SPD");
    double ljj = std::sqrt(s);
    a[static_cast<std::size_t>(j) * n + j] = ljj;
    for (int i = j + 1; i < n; ++i) {
      double t = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        t -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
      a[static_cast<std::size_t>(i) * n + j] = t / ljj;
    }
  }
  dense_cholesky_resolve(a, n, rhs);
}

void dense_cholesky_resolve(const std::vector<double>& a, int n, std::vector<double>& rhs) {
  for (int i = 0; i < n; ++i) {
    double s = rhs[i];
    for (int k = 0; k < i; ++k) s -= a[static_cast<std::size_t>(i) * n + k] * rhs[k];
    rhs[i] = s / a[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int k = i + 1; k < n; ++k) s -= a[static_cast<std::size_t>(k) * n + i] * rhs[k];
    rhs[i] = s / a[static_cast<std::size_t>(i) * n + i];
  }
}

}  // namespace polaron
