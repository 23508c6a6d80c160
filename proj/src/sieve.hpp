#pragma once

#include <cstdint>
#include <vector>

#include "dataset.hpp"
#include "families.hpp"

namespace uinfer {

// j_hat is the first level whose test does not reject; every earlier level
// was rejected. log_statistics holds one entry per tested level. When every
// tested level rejects, j_hat = levels_tested + 1 acts as a sentinel.
struct SieveResult {
  std::size_t j_hat = 0;
  std::vector<double> log_statistics;
  std::size_t levels_tested = 0;
};

// Walks an ordered list of nested model classes with one fixed split. At
// level j the null fit comes from levels[j-1] on d0 and the competing fit
// from levels[j] on d1; H_j is rejected iff the log ratio on d0 strictly
// exceeds log(1/alpha). No multiplicity correction: a wrong selection
// requires the first miss to happen exactly at the true level. Tests run for
// j = 1..levels.size()-1.
SieveResult select_model(const std::vector<FamilySpec>& levels,
                         const Dataset& data, const DataSplit& split,
                         double alpha, const EmOptions& em = {});

// Mixture-order sieve: levels k = 1..j_max+1, all scales fixed at sigma when
// fixed_sigma is set.
SieveResult select_mixture_order(const Dataset& data, const DataSplit& split,
                                 double alpha, std::size_t j_max,
                                 bool fixed_sigma, double sigma,
                                 const EmOptions& em = {});

}  // namespace uinfer
