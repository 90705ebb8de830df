#include "bayesrl/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "bayesrl/errors.hpp"

namespace bayesrl::kernels {

#ifndef BAYESRL_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

const KernelTable* table_for(Backend backend) {
  return backend == Backend::avx2 ? avx2_table() : &scalar_table();
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("BAYESRL_KERNELS")) {
    const std::string_view name(env);
    if (name == "scalar") return &scalar_table();
    if (name == "avx2" && cpu_supports(Backend::avx2)) return avx2_table();
  }
  return cpu_supports(Backend::avx2) ? avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DomainError(std::string(what) + ": length mismatch");
}

}  // namespace

bool cpu_supports(Backend backend) {
  switch (backend) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(BAYESRL_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return current().load()->backend; }

void set_backend(Backend backend) {
  if (!cpu_supports(backend))
    throw DomainError("kernel backend '" + std::string(backend_name(backend)) +
                      "' is not available on this machine");
  current().store(table_for(backend));
}

Backend parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::scalar;
  if (name == "avx2") return Backend::avx2;
  throw DomainError("unknown kernel backend '" + std::string(name) + "'");
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::avx2 ? "avx2" : "scalar";
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void affine2(std::span<double> out, std::span<const double> base, std::span<const double> x,
             std::span<const double> y, double a, double b) {
  check_same_size(out.size(), base.size(), "affine2");
  check_same_size(out.size(), x.size(), "affine2");
  check_same_size(out.size(), y.size(), "affine2");
  active().affine2(out.data(), base.data(), x.data(), y.data(), a, b, out.size());
}

void outer_sum(std::span<double> out, std::span<const double> row, std::span<const double> col) {
  check_same_size(out.size(), row.size() * col.size(), "outer_sum");
  active().outer_sum(out.data(), row.data(), row.size(), col.data(), col.size());
}

double max_value(std::span<const double> x) { return active().max_value(x.data(), x.size()); }

double exp_shift_sum(std::span<double> out, std::span<const double> in, double shift) {
  check_same_size(out.size(), in.size(), "exp_shift_sum");
  return active().exp_shift_sum(out.data(), in.data(), shift, in.size());
}

void add_scalar(std::span<double> x, double c) { active().add_scalar(x.data(), c, x.size()); }

void scale(std::span<double> x, double c) { active().scale(x.data(), c, x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  check_same_size(x.size(), y.size(), "dot");
  return active().dot(x.data(), y.data(), x.size());
}

double hellinger_sq(std::span<const double> p, std::span<const double> q) {
  check_same_size(p.size(), q.size(), "hellinger_sq");
  return active().hellinger_sq(p.data(), q.data(), p.size());
}

void add_squared_diff(std::span<double> acc, std::span<const double> x, double q) {
  check_same_size(acc.size(), x.size(), "add_squared_diff");
  active().add_squared_diff(acc.data(), x.data(), q, x.size());
}

}  // namespace bayesrl::kernels
