#pragma once

// Data-parallel inner loops used by the posterior, planner and metric code.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant compiled in its own translation unit. The variant is chosen once at
// runtime from CPUID (override with BAYESRL_KERNELS=scalar|avx2 or
// set_backend). The two variants agree to within a few ulp; they are not
// bit-identical because the vector code reassociates sums and uses FMA.

#include <cstddef>
#include <span>
#include <string_view>

namespace bayesrl::kernels {

/// Inputs below this are mapped to exactly 0 by exp_shift_sum in every backend.
inline constexpr double kExpFlushBelow = -708.0;

enum class Backend { scalar, avx2 };

struct KernelTable {
  Backend backend;
  // out[i] = base[i] + a * x[i] + b * y[i]
  void (*affine2)(double* out, const double* base, const double* x, const double* y, double a,
                  double b, std::size_t n);
  // out[i * nc + j] = row[i] + col[j]
  void (*outer_sum)(double* out, const double* row, std::size_t nr, const double* col,
                    std::size_t nc);
  // max over x; -inf for n == 0
  double (*max_value)(const double* x, std::size_t n);
  // out[i] = exp(in[i] - shift) (0 when the argument is below kExpFlushBelow); returns sum
  double (*exp_shift_sum)(double* out, const double* in, double shift, std::size_t n);
  void (*add_scalar)(double* x, double c, std::size_t n);
  void (*scale)(double* x, double c, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i (sqrt(p[i]) - sqrt(q[i]))^2
  double (*hellinger_sq)(const double* p, const double* q, std::size_t n);
  // acc[i] += (x[i] - q)^2
  void (*add_squared_diff)(double* acc, const double* x, double q, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Backend backend);
Backend active_backend();
/// Throws DomainError if the backend is not available on this machine.
void set_backend(Backend backend);
Backend parse_backend(std::string_view name);
std::string_view backend_name(Backend backend);

const KernelTable& active();

// Span front-ends over the active table.
void affine2(std::span<double> out, std::span<const double> base, std::span<const double> x,
             std::span<const double> y, double a, double b);
void outer_sum(std::span<double> out, std::span<const double> row, std::span<const double> col);
double max_value(std::span<const double> x);
double exp_shift_sum(std::span<double> out, std::span<const double> in, double shift);
void add_scalar(std::span<double> x, double c);
void scale(std::span<double> x, double c);
double dot(std::span<const double> x, std::span<const double> y);
double hellinger_sq(std::span<const double> p, std::span<const double> q);
void add_squared_diff(std::span<double> acc, std::span<const double> x, double q);

}  // namespace bayesrl::kernels
