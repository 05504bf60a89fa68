#include "poik.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "poik/dist_core.hpp"
#include "poik/median_solver.hpp"
#include "poik/oracle.hpp"
#include "poik/scaling_fit.hpp"
#include "poik/verify.hpp"

namespace {

thread_local std::string g_last_error;

poik_status map_code(poik::errc c) {
  switch (c) {
    case poik::errc::invalid_argument: return POIK_ERR_INVALID_ARGUMENT;
    case poik::errc::domain_error: return POIK_ERR_DOMAIN;
    case poik::errc::guard_exceeded: return POIK_ERR_GUARD_EXCEEDED;
    case poik::errc::allocation_bound: return POIK_ERR_ALLOCATION_BOUND;
    case poik::errc::out_of_range: return POIK_ERR_OUT_OF_RANGE;
    case poik::errc::bracket_failure: return POIK_ERR_BRACKET_FAILURE;
    case poik::errc::singular_system: return POIK_ERR_SINGULAR_SYSTEM;
  }
  return POIK_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into status codes + the thread-local
// error message.
template <typename Fn>
poik_status guarded(Fn&& fn) {
  try {
    fn();
    return POIK_OK;
  } catch (const poik::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return POIK_ERR_ALLOCATION_BOUND;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return POIK_ERR_INTERNAL;
  }
}

poik_status fail(poik_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

poik_solve_result to_c(const poik::MedianSolveResult& r) {
  poik_solve_result out{};
  out.k = r.k;
  out.nu = r.nu;
  out.lambda_star = r.lambda_star;
  out.mu_star = r.mu_star;
  out.residual = r.residual;
  out.bracket_lo = r.bracket_lo;
  out.bracket_hi = r.bracket_hi;
  out.iterations = r.iterations;
  out.used_cdf_bisection = r.used_cdf_bisection ? 1 : 0;
  return out;
}

poik::DeltaFit from_c(const poik_delta_fit& f) {
  return poik::DeltaFit{f.slope, f.intercept, f.inv_k_coefficient};
}

poik::SeriesFit from_c(const poik_series_fit& f) {
  poik::SeriesFit s;
  s.a0 = f.a0;
  s.a1 = {f.a1_const, f.a1_inv};
  s.a2 = {f.a2_const, f.a2_inv};
  s.a3 = {f.a3_const, f.a3_inv};
  return s;
}

} // namespace

struct poik_dist {
  poik::Params params;
};

struct poik_table {
  poik::PmfTable table;
};

extern "C" {

const char* poik_status_name(poik_status s) {
  switch (s) {
    case POIK_OK: return "ok";
    case POIK_ERR_INVALID_ARGUMENT: return "invalid argument";
    case POIK_ERR_DOMAIN: return "domain error";
    case POIK_ERR_GUARD_EXCEEDED: return "guard exceeded";
    case POIK_ERR_ALLOCATION_BOUND: return "allocation bound";
    case POIK_ERR_OUT_OF_RANGE: return "out of range";
    case POIK_ERR_BRACKET_FAILURE: return "bracket failure";
    case POIK_ERR_SINGULAR_SYSTEM: return "singular system";
    case POIK_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case POIK_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* poik_last_error(void) { return g_last_error.c_str(); }

poik_status poik_dist_create(int64_t k, double lambda, poik_dist** out) {
  if (!out) return fail(POIK_ERR_INVALID_ARGUMENT, "out pointer is null");
  *out = nullptr;
  return guarded([&] { *out = new poik_dist{poik::Params(k, lambda)}; });
}

void poik_dist_destroy(poik_dist* d) { delete d; }

int64_t poik_dist_k(const poik_dist* d) { return d->params.k; }
double poik_dist_lambda(const poik_dist* d) { return d->params.lambda; }
int64_t poik_dist_kappa(const poik_dist* d) { return d->params.kappa(); }
double poik_dist_mean(const poik_dist* d) { return poik::mean(d->params); }
double poik_dist_variance(const poik_dist* d) { return poik::variance(d->params); }
int64_t poik_dist_support_bound(const poik_dist* d) { return poik::support_bound(d->params); }

poik_status poik_dist_median(const poik_dist* d, int64_t* out) {
  if (!d || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = poik::median(d->params); });
}

poik_status poik_dist_mode(const poik_dist* d, int64_t* modes, size_t capacity, size_t* count,
                           double* peak_probability) {
  if (!d || !count) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const poik::ModeSet m = poik::mode(d->params);
    *count = m.modes.size();
    if (peak_probability) *peak_probability = m.peak_probability;
    if (modes) {
      if (capacity < m.modes.size()) {
        throw poik::Error(poik::errc::invalid_argument, "mode buffer too small");
      }
      std::memcpy(modes, m.modes.data(), m.modes.size() * sizeof(int64_t));
    }
  });
}

poik_status poik_pmf_combinatorial(const poik_dist* d, int64_t n, double* out) {
  if (!d || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = poik::pmf_combinatorial(d->params, n); });
}

poik_status poik_table_create(const poik_dist* d, int64_t n_max, int64_t entry_cap,
                              poik_table** out) {
  if (!d || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  *out = nullptr;
  return guarded([&] {
    *out = new poik_table{poik::PmfTable::build(
        d->params, n_max, entry_cap > 0 ? entry_cap : poik::kDefaultTableCap)};
  });
}

void poik_table_destroy(poik_table* t) { delete t; }

int64_t poik_table_n_max(const poik_table* t) { return t->table.n_max(); }

poik_status poik_table_prob(const poik_table* t, int64_t n, double* out) {
  if (!t || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = t->table.prob(n); });
}

poik_status poik_table_log_prob(const poik_table* t, int64_t n, double* out) {
  if (!t || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = t->table.log_prob(n); });
}

poik_status poik_table_cdf(const poik_table* t, int64_t n, double* out) {
  if (!t || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = t->table.cdf(n); });
}

poik_status poik_median_equation_gap(int64_t k, int64_t nu, double lambda, double* out) {
  if (!out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = poik::median_equation_gap(k, nu, lambda); });
}

poik_status poik_solve_lambda_star(int64_t k, int64_t nu, poik_solve_result* out) {
  if (!out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = to_c(poik::solve_lambda_star(k, nu)); });
}

poik_status poik_lambda_star_approx(int64_t k, int64_t nu, int order, double* out) {
  if (!out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = poik::lambda_star_approx(k, nu, order); });
}

poik_status poik_verify_boundary(const poik_solve_result* r, int* ok) {
  if (!r || !ok) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    poik::MedianSolveResult rr;
    rr.k = r->k;
    rr.nu = r->nu;
    rr.lambda_star = r->lambda_star;
    rr.mu_star = r->mu_star;
    rr.residual = r->residual;
    rr.iterations = r->iterations;
    rr.bracket_lo = r->bracket_lo;
    rr.bracket_hi = r->bracket_hi;
    rr.used_cdf_bisection = r->used_cdf_bisection != 0;
    *ok = poik::verify_boundary(rr) ? 1 : 0;
  });
}

int64_t poik_base_median(int64_t n, int64_t k) { return poik::base_median(n, k); }

poik_status poik_mode_conjecture(int64_t n, int64_t k, int64_t* out) {
  if (!out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = poik::mode_conjecture(n, k); });
}

poik_delta_fit poik_paper_delta_fit(void) {
  const poik::DeltaFit f = poik::paper_delta_fit();
  return poik_delta_fit{f.slope, f.intercept, f.inv_k_coefficient};
}

poik_series_fit poik_paper_series_fit(void) {
  const poik::SeriesFit f = poik::paper_series_fit();
  return poik_series_fit{f.a0,          f.a1.constant, f.a1.inv_k1, f.a2.constant,
                         f.a2.inv_k1,   f.a3.constant, f.a3.inv_k1};
}

poik_status poik_delta_k_eval(const poik_delta_fit* f, int64_t k, double* out) {
  if (!f || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = poik::delta_k_eval(from_c(*f), k); });
}

poik_status poik_mu_series_eval(const poik_series_fit* f, int64_t k, int64_t nu, double* out) {
  if (!f || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] { *out = poik::mu_series_eval(from_c(*f), k, nu); });
}

poik_status poik_fit_delta_k(const int64_t* k, const double* mu_star, size_t count,
                             poik_delta_fit* out) {
  if (!k || !mu_star || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    std::vector<poik::DeltaSample> samples(count);
    for (size_t i = 0; i < count; ++i) samples[i] = {k[i], mu_star[i]};
    const poik::DeltaFit f = poik::fit_delta_k(samples);
    *out = poik_delta_fit{f.slope, f.intercept, f.inv_k_coefficient};
  });
}

poik_status poik_fit_mu_series(const int64_t* k, const int64_t* nu, const double* mu_star,
                               size_t count, poik_series_fit* out) {
  if (!k || !nu || !mu_star || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    std::vector<poik::SeriesSample> samples(count);
    for (size_t i = 0; i < count; ++i) samples[i] = {k[i], nu[i], mu_star[i]};
    const poik::SeriesFit f = poik::fit_mu_series(samples);
    *out = poik_series_fit{f.a0,        f.a1.constant, f.a1.inv_k1, f.a2.constant,
                           f.a2.inv_k1, f.a3.constant, f.a3.inv_k1};
  });
}

poik_status poik_residuals_delta_k(const poik_delta_fit* f, const int64_t* k,
                                   const double* mu_star, size_t count, double* residuals,
                                   poik_residual_summary* summary) {
  if (!f || !k || !mu_star || !summary) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    std::vector<poik::DeltaSample> samples(count);
    for (size_t i = 0; i < count; ++i) samples[i] = {k[i], mu_star[i]};
    const poik::ResidualReport rep = poik::residual_report(from_c(*f), samples);
    if (residuals) {
      std::memcpy(residuals, rep.residual.data(), rep.residual.size() * sizeof(double));
    }
    *summary = poik_residual_summary{rep.max_abs, rep.bias};
  });
}

poik_status poik_residuals_mu_series(const poik_series_fit* f, const int64_t* k,
                                     const int64_t* nu, const double* mu_star, size_t count,
                                     double* residuals, poik_residual_summary* summary) {
  if (!f || !k || !nu || !mu_star || !summary) {
    return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  }
  return guarded([&] {
    std::vector<poik::SeriesSample> samples(count);
    for (size_t i = 0; i < count; ++i) samples[i] = {k[i], nu[i], mu_star[i]};
    const poik::ResidualReport rep = poik::residual_report(from_c(*f), samples);
    if (residuals) {
      std::memcpy(residuals, rep.residual.data(), rep.residual.size() * sizeof(double));
    }
    *summary = poik_residual_summary{rep.max_abs, rep.bias};
  });
}

int64_t poik_default_sweep_n_lo(int64_t k) { return poik::default_sweep_n_lo(k); }

poik_status poik_sweep_base_median_diff(int64_t k, int64_t n_lo, int64_t n_hi, int jobs,
                                        poik_sweep_record* out, size_t capacity,
                                        size_t* count) {
  if (!count) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  const int64_t lo = n_lo < 0 ? poik::default_sweep_n_lo(k) : n_lo;
  if (k < 1 || n_hi < lo) return fail(POIK_ERR_INVALID_ARGUMENT, "empty sweep range");
  const size_t needed = static_cast<size_t>(n_hi - lo + 1);
  *count = needed;
  if (!out) return POIK_OK;
  if (capacity < needed) return fail(POIK_ERR_BUFFER_TOO_SMALL, "sweep buffer too small");
  return guarded([&] {
    const auto rows = poik::sweep_base_median_diff(k, lo, n_hi, jobs);
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out[i] = poik_sweep_record{r.k, r.n, r.median, r.base_median, r.scaled_diff,
                                 r.scaled_mean};
    }
  });
}

poik_status poik_sweep_nu_mu(int64_t k, int64_t nu_hi, int jobs, poik_solve_result* out,
                             size_t capacity, size_t* count) {
  if (!count) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  if (k < 1 || nu_hi < 0) return fail(POIK_ERR_INVALID_ARGUMENT, "bad sweep range");
  const size_t needed = static_cast<size_t>(nu_hi) + 1;
  *count = needed;
  if (!out) return POIK_OK;
  if (capacity < needed) return fail(POIK_ERR_BUFFER_TOO_SMALL, "sweep buffer too small");
  return guarded([&] {
    const auto rows = poik::sweep_nu_mu(k, nu_hi, jobs);
    for (size_t i = 0; i < rows.size(); ++i) out[i] = to_c(rows[i]);
  });
}

poik_status poik_sample(const poik_dist* d, uint64_t seed, size_t count, int64_t* out) {
  if (!d || !out) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const auto batch = poik::oracle::sample(d->params, seed, static_cast<int64_t>(count));
    std::memcpy(out, batch.values.data(), batch.values.size() * sizeof(int64_t));
  });
}

poik_status poik_verify(int full, uint64_t seed, poik_report_fn report, void* user,
                        int* failures) {
  if (!failures) return fail(POIK_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    poik::VerifyOptions opts;
    opts.full = full != 0;
    opts.seed = seed;
    *failures = poik::run_verify(opts, [&](const std::string& line) {
      if (report) report(line.c_str(), user);
    });
  });
}

} // extern "C"
