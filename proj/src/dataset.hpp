#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rng.hpp"

namespace uinfer {

// Row-major dense storage; every observation has the same dimension and all
// entries are finite.
struct Dataset {
  std::size_t dim = 1;
  std::vector<double> values;

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * dim, dim};
  }
  double scalar(std::size_t i) const { return values[i * dim]; }
  void append(std::span<const double> y) {
    values.insert(values.end(), y.begin(), y.end());
  }
};

Dataset dataset_from_scalars(std::vector<double> v);
Dataset dataset_create(const double* values, std::size_t n, std::size_t dim);

// CSV layout: header "y1,...,yd", one observation per row. Parse errors carry
// 1-based line numbers and map to the invalid-input code.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);
Dataset parse_csv(const std::string& text);
void write_csv(std::ostream& out, const Dataset& data);

struct DataSplit {
  std::vector<std::size_t> d0;
  std::vector<std::size_t> d1;
};

// d0 takes the first ceil(n/2) indices.
DataSplit first_half_split(std::size_t n);
// Uniformly random half/half partition; both sides returned sorted.
DataSplit seeded_split(std::size_t n, std::uint64_t seed);
DataSplit swapped(const DataSplit& s);

// Fold j collects indices congruent to j mod K.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k);
// One random K-fold partition (round-robin over a shuffled order).
std::vector<std::vector<std::size_t>> random_kfold_indices(std::size_t n,
                                                           std::size_t k,
                                                           Rng& rng);

}  // namespace uinfer
