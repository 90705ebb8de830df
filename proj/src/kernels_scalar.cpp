#include <cmath>
#include <limits>

#include "bayesrl/kernels.hpp"

namespace bayesrl::kernels {
namespace {

void affine2(double* out, const double* base, const double* x, const double* y, double a,
             double b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = base[i] + a * x[i] + b * y[i];
}

void outer_sum(double* out, const double* row, std::size_t nr, const double* col,
               std::size_t nc) {
  for (std::size_t i = 0; i < nr; ++i) {
    double* dst = out + i * nc;
    for (std::size_t j = 0; j < nc; ++j) dst[j] = row[i] + col[j];
  }
}

double max_value(const double* x, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] > m) m = x[i];
  return m;
}

double exp_shift_sum(double* out, const double* in, double shift, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double arg = in[i] - shift;
    out[i] = arg < kExpFlushBelow ? 0.0 : std::exp(arg);
    sum += out[i];
  }
  return sum;
}

void add_scalar(double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] += c;
}

void scale(double* x, double c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= c;
}

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double hellinger_sq(const double* p, const double* q, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    s += d * d;
  }
  return s;
}

void add_squared_diff(double* acc, const double* x, double q, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - q;
    acc[i] += d * d;
  }
}

constexpr KernelTable kScalar{
    Backend::scalar, affine2, outer_sum,   max_value,    exp_shift_sum,
    add_scalar,      scale,   dot,         hellinger_sq, add_squared_diff,
};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace bayesrl::kernels
