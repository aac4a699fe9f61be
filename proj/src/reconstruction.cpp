#include "sqz/reconstruction.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "sqz/errors.hpp"

namespace sqz {

namespace {

void check_shared_grid(std::span<const FilterFunction> filters) {
  if (filters.empty()) throw ValidationError("no filters supplied");
  const auto& g0 = filters.front().omega;
  if (g0.size() < 2) throw ValidationError("filter grid too small");
  for (const auto& f : filters)
    if (f.omega != g0) throw ValidationError("filters must share one frequency grid");
}

double trapz_product(const FilterFunction& a, const FilterFunction& b) {
  double s = 0.0;
  for (std::size_t i = 1; i < a.omega.size(); ++i)
    s += 0.5 * (a.values[i] * b.values[i] + a.values[i - 1] * b.values[i - 1]) *
         (a.omega[i] - a.omega[i - 1]);
  return s;
}

} // namespace

int Gramian::retained() const {
  if (eigenvalues.empty()) return 0;
  const double lambda_max = eigenvalues.back();
  int n = 0;
  for (double l : eigenvalues)
    if (l > cutoff * lambda_max) ++n;
  return n;
}

double Gramian::condition_number() const {
  const double lambda_max = eigenvalues.back();
  double lambda_min = lambda_max;
  for (double l : eigenvalues)
    if (l > cutoff * lambda_max) lambda_min = std::min(lambda_min, l);
  return lambda_max / lambda_min;
}

Gramian gramian(std::span<const FilterFunction> filters, double cutoff) {
  check_shared_grid(filters);
  const int k = static_cast<int>(filters.size());

  Eigen::MatrixXd a(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) {
      const double v = trapz_product(filters[static_cast<std::size_t>(i)],
                                     filters[static_cast<std::size_t>(j)]);
      a(i, j) = v;
      a(j, i) = v;
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success)
    throw NumericalError("Gramian eigendecomposition failed");

  Gramian g;
  g.size = k;
  g.cutoff = cutoff;
  g.matrix.resize(static_cast<std::size_t>(k * k));
  g.eigenvalues.resize(static_cast<std::size_t>(k));
  g.eigenvectors.resize(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i) {
    g.eigenvalues[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    for (int j = 0; j < k; ++j) {
      g.matrix[static_cast<std::size_t>(i * k + j)] = a(i, j);
      // row i of the stored eigenvector matrix = i-th eigenvector
      g.eigenvectors[static_cast<std::size_t>(i * k + j)] = solver.eigenvectors()(j, i);
    }
  }

  const double lambda_max = g.eigenvalues.back();
  if (g.eigenvalues.front() < -1e-10 * lambda_max)
    throw NumericalError("Gramian has a significantly negative eigenvalue: " +
                         std::to_string(g.eigenvalues.front()));
  return g;
}

std::vector<FilterFunction> transformed_filters(const Gramian& gram,
                                                std::span<const FilterFunction> filters) {
  check_shared_grid(filters);
  if (static_cast<int>(filters.size()) != gram.size)
    throw ValidationError("Gramian size does not match the filter count");
  const double lambda_max = gram.eigenvalues.back();
  if (gram.retained() == 0)
    throw NumericalError(
        "all Gramian eigenvalues truncated; reconstruction impossible (lambda_max = " +
        std::to_string(lambda_max) + ")");

  const std::size_t n = filters.front().omega.size();
  const int k = gram.size;
  std::vector<FilterFunction> out(static_cast<std::size_t>(k));

  // coeff[k][i] = sum_l (1/lambda_l) V_lk V_li over retained l
  std::vector<double> coeff(static_cast<std::size_t>(k * k), 0.0);
  for (int l = 0; l < k; ++l) {
    const double lambda = gram.eigenvalues[static_cast<std::size_t>(l)];
    if (lambda <= gram.cutoff * lambda_max) continue;
    for (int kk = 0; kk < k; ++kk)
      for (int i = 0; i < k; ++i)
        coeff[static_cast<std::size_t>(kk * k + i)] +=
            gram.eigvec(l, kk) * gram.eigvec(l, i) / lambda;
  }

  for (int kk = 0; kk < k; ++kk) {
    auto& f = out[static_cast<std::size_t>(kk)];
    f.omega = filters.front().omega;
    f.values.assign(n, 0.0);
    for (int i = 0; i < k; ++i) {
      const double c = coeff[static_cast<std::size_t>(kk * k + i)];
      if (c == 0.0) continue;
      const auto& src = filters[static_cast<std::size_t>(i)].values;
      for (std::size_t p = 0; p < n; ++p) f.values[p] += c * src[p];
    }
  }
  return out;
}

std::vector<double> reconstruction_error(std::span<const ChiEstimate> estimates,
                                         std::span<const FilterFunction> transformed) {
  if (estimates.size() != transformed.size())
    throw ValidationError("estimate / transformed-filter count mismatch");
  check_shared_grid(transformed);
  const std::size_t n = transformed.front().omega.size();
  std::vector<double> err(n, 0.0);
  for (std::size_t k = 0; k < estimates.size(); ++k)
    for (std::size_t p = 0; p < n; ++p)
      err[p] += std::abs(transformed[k].values[p]) * estimates[k].spread;
  return err;
}

ReconstructionResult reconstruct(std::span<const ChiEstimate> estimates,
                                 std::span<const FilterFunction> transformed,
                                 const Gramian& gram, std::span<const double> reference,
                                 double band_lo, double band_hi) {
  if (estimates.size() != transformed.size())
    throw ValidationError("estimate / transformed-filter count mismatch");
  check_shared_grid(transformed);

  ReconstructionResult result;
  result.omega = transformed.front().omega;
  const std::size_t n = result.omega.size();
  result.spectrum.assign(n, 0.0);
  for (std::size_t k = 0; k < estimates.size(); ++k)
    for (std::size_t p = 0; p < n; ++p)
      result.spectrum[p] += estimates[k].mean * transformed[k].values[p];

  result.error = reconstruction_error(estimates, transformed);
  result.error_rss.assign(n, 0.0);
  for (std::size_t k = 0; k < estimates.size(); ++k)
    for (std::size_t p = 0; p < n; ++p) {
      const double term = transformed[k].values[p] * estimates[k].spread;
      result.error_rss[p] += term * term;
    }
  for (auto& v : result.error_rss) v = std::sqrt(v);

  result.retained_eigenvalues = gram.retained();
  result.truncated_eigenvalues = gram.size - gram.retained();
  result.condition_number = gram.condition_number();
  if (result.condition_number > 1e8)
    throw NumericalError("Gramian condition number " +
                         std::to_string(result.condition_number) +
                         " exceeds 1e8; reconstruction would amplify noise");

  if (!reference.empty()) {
    if (reference.size() != n)
      throw ValidationError("reference spectrum must share the filter grid");
    const bool restrict = band_hi > band_lo;
    double num = 0.0, den = 0.0;
    for (std::size_t p = 1; p < n; ++p) {
      const double mid = 0.5 * (result.omega[p] + result.omega[p - 1]);
      if (restrict && (mid < band_lo || mid > band_hi)) continue;
      const double dw = result.omega[p] - result.omega[p - 1];
      const double d0 = result.spectrum[p - 1] - reference[p - 1];
      const double d1 = result.spectrum[p] - reference[p];
      num += 0.5 * (d0 * d0 + d1 * d1) * dw;
      den += 0.5 * (reference[p - 1] * reference[p - 1] + reference[p] * reference[p]) * dw;
    }
    if (den > 0.0) result.relative_l2_error = std::sqrt(num / den);
  }
  return result;
}

} // namespace sqz
