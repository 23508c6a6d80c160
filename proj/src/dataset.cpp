#include "dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "error.hpp"

namespace uinfer {

namespace {

std::string trimmed(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trimmed(line.substr(start)));
      break;
    }
    out.push_back(trimmed(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_field(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* b = field.data();
  const char* e = b + field.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || field.empty()) {
    throw_invalid("line " + std::to_string(line_no) + ": cannot parse '" +
                  field + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw_invalid("line " + std::to_string(line_no) + ": non-finite value '" +
                  field + "'");
  }
  return v;
}

}  // namespace

Dataset dataset_from_scalars(std::vector<double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw_invalid("dataset: non-finite value");
  }
  Dataset d;
  d.dim = 1;
  d.values = std::move(v);
  return d;
}

Dataset dataset_create(const double* values, std::size_t n, std::size_t dim) {
  if (dim == 0) throw_invalid("dataset: dimension must be >= 1");
  if (n == 0) throw_invalid("dataset: need at least one observation");
  for (std::size_t i = 0; i < n * dim; ++i) {
    if (!std::isfinite(values[i])) throw_invalid("dataset: non-finite value");
  }
  Dataset d;
  d.dim = dim;
  d.values.assign(values, values + n * dim);
  return d;
}

Dataset read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  Dataset data;
  bool header_seen = false;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!header_seen) {
      auto fields = split_fields(line);
      dim = fields.size();
      const bool bare_scalar = (dim == 1 && fields[0] == "y");
      if (!bare_scalar) {
        for (std::size_t j = 0; j < dim; ++j) {
          if (fields[j] != "y" + std::to_string(j + 1)) {
            const std::string want =
                dim == 1 ? "y or y1" : "y1,...,y" + std::to_string(dim);
            throw_invalid("line 1: expected header " + want + ", got '" +
                          fields[j] + "'");
          }
        }
      }
      data.dim = dim;
      header_seen = true;
      continue;
    }
    if (trimmed(line).empty()) {
      throw_invalid("line " + std::to_string(line_no) + ": empty row");
    }
    auto fields = split_fields(line);
    if (fields.size() != dim) {
      throw_invalid("line " + std::to_string(line_no) + ": expected " +
                    std::to_string(dim) + " fields, got " +
                    std::to_string(fields.size()));
    }
    for (const auto& f : fields) data.values.push_back(parse_field(f, line_no));
  }
  if (!header_seen) throw_invalid("line 1: missing header");
  if (data.values.empty()) throw_invalid("line 1: no observations after header");
  return data;
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_invalid("cannot open '" + path + "'");
  return read_csv(in);
}

Dataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.dim; ++j) {
    out << (j ? "," : "") << "y" << (j + 1);
  }
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto row = data.row(i);
    for (std::size_t j = 0; j < data.dim; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

DataSplit first_half_split(std::size_t n) {
  if (n < 2) throw_invalid("split: need at least 2 observations");
  DataSplit s;
  std::size_t m0 = (n + 1) / 2;
  for (std::size_t i = 0; i < n; ++i) {
    (i < m0 ? s.d0 : s.d1).push_back(i);
  }
  return s;
}

DataSplit seeded_split(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw_invalid("split: need at least 2 observations");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  DataSplit s;
  std::size_t m0 = (n + 1) / 2;
  s.d0.assign(perm.begin(), perm.begin() + m0);
  s.d1.assign(perm.begin() + m0, perm.end());
  std::sort(s.d0.begin(), s.d0.end());
  std::sort(s.d1.begin(), s.d1.end());
  return s;
}

DataSplit swapped(const DataSplit& s) { return DataSplit{s.d1, s.d0}; }

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k) {
  if (k < 2 || k > n) throw_invalid("kfold: need 2 <= K <= n");
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(i);
  return folds;
}

std::vector<std::vector<std::size_t>> random_kfold_indices(std::size_t n,
                                                           std::size_t k,
                                                           Rng& rng) {
  if (k < 2 || k > n) throw_invalid("kfold: need 2 <= K <= n");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(perm[i]);
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

}  // namespace uinfer
