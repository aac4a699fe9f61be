#pragma once

#include <span>
#include <vector>

#include "sqz/control.hpp"
#include "sqz/estimators.hpp"

namespace sqz {

/// Pairwise filter overlaps A_kl = int F_k F_l dw with eigendecomposition.
struct Gramian {
  int size = 0;
  std::vector<double> matrix;       // row-major K x K
  std::vector<double> eigenvalues;  // ascending
  std::vector<double> eigenvectors; // row l = eigenvector of eigenvalues[l]
  double cutoff = 1e-10;            // relative eigenvalue truncation threshold

  double entry(int k, int l) const { return matrix[static_cast<std::size_t>(k * size + l)]; }
  double eigvec(int l, int k) const {
    return eigenvectors[static_cast<std::size_t>(l * size + k)];
  }
  int retained() const;
  double condition_number() const; // over retained eigenvalues
};

struct ReconstructionResult {
  std::vector<double> omega;
  std::vector<double> spectrum;          // S_rec
  std::vector<double> error;             // dS_rec, absolute-value convention
  std::vector<double> error_rss;         // root-sum-square variant
  int retained_eigenvalues = 0;
  int truncated_eigenvalues = 0;
  double condition_number = 0.0;
  double relative_l2_error = -1.0;       // vs reference, when provided
};

Gramian gramian(std::span<const FilterFunction> filters, double cutoff = 1e-10);

/// Transformed filters F~_k(w) = sum_{i,l} (1/lambda_l) V_lk V_li F_i(w),
/// eigenvalues below cutoff*lambda_max excluded. Biorthogonal to the inputs on
/// the retained subspace.
std::vector<FilterFunction> transformed_filters(const Gramian& gram,
                                                std::span<const FilterFunction> filters);

/// S_rec(w) = sum_k chi_k F~_k(w); optional reference spectrum for the
/// relative L2 error, optionally restricted to [band_lo, band_hi].
ReconstructionResult reconstruct(std::span<const ChiEstimate> estimates,
                                 std::span<const FilterFunction> transformed,
                                 const Gramian& gram,
                                 std::span<const double> reference = {},
                                 double band_lo = 0.0, double band_hi = -1.0);

/// dS_rec(w) = sum_k |F~_k(w)| * dchi_k.
std::vector<double> reconstruction_error(std::span<const ChiEstimate> estimates,
                                         std::span<const FilterFunction> transformed);

} // namespace sqz
