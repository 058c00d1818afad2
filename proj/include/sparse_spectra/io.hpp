#pragma once

// Data ingestion: dense CSV (raw observations, covariance, correlation, or
// rectangular), Matrix Market exchange files, covariance/correlation
// estimation from raw tables, CSV writing, and the bundled Pitprops
// correlation matrix (the classic 13-feature timber dataset used as the
// standard benchmark for sparse PCA).

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sparse_spectra/core.hpp"

namespace sparse_spectra {

enum class DatasetKind { raw_observations, covariance, correlation, rectangular };

inline std::string to_string(DatasetKind k) {
  switch (k) {
    case DatasetKind::raw_observations: return "raw_observations";
    case DatasetKind::covariance: return "covariance";
    case DatasetKind::correlation: return "correlation";
    case DatasetKind::rectangular: return "rectangular";
  }
  return "unknown";
}

inline DatasetKind dataset_kind_from_string(const std::string& s) {
  if (s == "raw_observations" || s == "raw") return DatasetKind::raw_observations;
  if (s == "covariance") return DatasetKind::covariance;
  if (s == "correlation") return DatasetKind::correlation;
  if (s == "rectangular") return DatasetKind::rectangular;
  throw ValidationError("unknown dataset kind '" + s + "'");
}

struct Dataset {
  DatasetKind kind = DatasetKind::covariance;
  Matrix values{0, 0};
  std::optional<std::vector<std::string>> feature_names;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }

  // The symmetric matrix view for covariance/correlation datasets.
  SymMatrix sym() const {
    if (kind != DatasetKind::covariance && kind != DatasetKind::correlation)
      throw ValidationError("dataset of kind " + to_string(kind) +
                            " has no symmetric-matrix view");
    return SymMatrix(values);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size())
      throw ValidationError("non-numeric cell at row " + std::to_string(row + 1) +
                            ", column " + std::to_string(col + 1) + ": '" + cell + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw ValidationError("non-numeric cell at row " + std::to_string(row + 1) +
                          ", column " + std::to_string(col + 1) + ": '" + cell + "'");
  }
}

// Symmetry / unit-diagonal validation with 1-based indices in messages.
inline void validate_kind(const Matrix& m, DatasetKind kind) {
  if (kind != DatasetKind::covariance && kind != DatasetKind::correlation) return;
  if (m.rows() != m.cols())
    throw ValidationError("a " + to_string(kind) + " matrix must be square, got " +
                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > SymMatrix::kSymmetryTol * (1.0 + std::abs(m(i, j))))
        throw ValidationError(
            "asymmetric entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
            ")/(" + std::to_string(j + 1) + "," + std::to_string(i + 1) + "): " +
            std::to_string(m(i, j)) + " vs " + std::to_string(m(j, i)));
  if (kind == DatasetKind::correlation)
    for (std::size_t i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, i) - 1.0) > 1e-8)
        throw ValidationError("correlation diagonal entry " + std::to_string(i + 1) +
                              " is " + std::to_string(m(i, i)) + ", expected 1");
}

}  // namespace detail

inline Dataset parse_csv(const std::string& text, DatasetKind kind, bool has_header) {
  std::istringstream in(text);
  std::string line;
  std::optional<std::vector<std::string>> names;
  std::vector<std::vector<double>> rows;
  std::size_t expected_cols = 0;
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (has_header && !names) {
      names = std::vector<std::string>(cells.begin(), cells.end());
      expected_cols = cells.size();
      continue;
    }
    if (expected_cols == 0) expected_cols = cells.size();
    if (cells.size() != expected_cols)
      throw ValidationError("ragged CSV: row " + std::to_string(data_row + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(expected_cols));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      row[c] = detail::parse_cell(cells[c], data_row, c);
    rows.push_back(std::move(row));
    ++data_row;
  }
  if (rows.empty()) throw ValidationError("CSV contains no data rows");
  Matrix m(rows.size(), expected_cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < expected_cols; ++c) m(r, c) = rows[r][c];
  detail::validate_kind(m, kind);
  Dataset ds;
  ds.kind = kind;
  ds.values = std::move(m);
  ds.feature_names = std::move(names);
  return ds;
}

inline Dataset load_csv(const std::string& path, DatasetKind kind, bool has_header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), kind, has_header);
}

inline std::string format_csv(const Dataset& ds) {
  std::string out;
  auto fmt = [](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  if (ds.feature_names) {
    for (std::size_t c = 0; c < ds.feature_names->size(); ++c) {
      if (c) out += ",";
      out += (*ds.feature_names)[c];
    }
    out += "\n";
  }
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t c = 0; c < ds.cols(); ++c) {
      if (c) out += ",";
      out += fmt(ds.values(r, c));
    }
    out += "\n";
  }
  return out;
}

inline void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << format_csv(ds);
  if (!out) throw ValidationError("failed writing CSV to '" + path + "'");
}

// Sample covariance or correlation from a raw observation table (rows =
// observations, columns = features); two-pass estimator.
inline SymMatrix covariance_from_raw(const Dataset& raw, DatasetKind mode,
                                     unsigned ddof = 1) {
  if (raw.kind != DatasetKind::raw_observations)
    throw ValidationError("covariance_from_raw expects raw observations");
  if (mode != DatasetKind::covariance && mode != DatasetKind::correlation)
    throw ValidationError("mode must be covariance or correlation");
  if (ddof > 1) throw ValidationError("ddof must be 0 or 1");
  const std::size_t obs = raw.rows(), p = raw.cols();
  if (obs < 2) throw ValidationError("need at least 2 observations");
  std::vector<double> mean(p, 0.0);
  for (std::size_t r = 0; r < obs; ++r)
    for (std::size_t c = 0; c < p; ++c) mean[c] += raw.values(r, c);
  for (double& v : mean) v /= static_cast<double>(obs);
  Matrix cov(p, p);
  for (std::size_t r = 0; r < obs; ++r)
    for (std::size_t a = 0; a < p; ++a) {
      const double da = raw.values(r, a) - mean[a];
      for (std::size_t b = a; b < p; ++b)
        cov(a, b) += da * (raw.values(r, b) - mean[b]);
    }
  const double denom = static_cast<double>(obs - ddof);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      cov(a, b) /= denom;
      cov(b, a) = cov(a, b);
    }
  if (mode == DatasetKind::correlation) {
    for (std::size_t a = 0; a < p; ++a)
      if (cov(a, a) <= 0.0) {
        const std::string label = raw.feature_names && a < raw.feature_names->size()
                                      ? (*raw.feature_names)[a]
                                      : std::to_string(a + 1);
        throw ValidationError("constant column '" + label +
                              "' has zero variance; correlation undefined");
      }
    Matrix corr(p, p);
    for (std::size_t a = 0; a < p; ++a) {
      corr(a, a) = 1.0;
      for (std::size_t b = a + 1; b < p; ++b) {
        corr(a, b) = cov(a, b) / std::sqrt(cov(a, a) * cov(b, b));
        corr(b, a) = corr(a, b);
      }
    }
    return SymMatrix(std::move(corr));
  }
  return SymMatrix(std::move(cov));
}

// Matrix Market exchange format: coordinate or array, real/integer fields,
// general or symmetric storage (symmetric triangles expanded). Pattern files
// carry no values and are rejected.
inline Dataset parse_matrix_market(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty Matrix Market input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix")
    throw ValidationError("malformed Matrix Market header: " + line);
  if (format != "coordinate" && format != "array")
    throw ValidationError("unsupported Matrix Market format '" + format + "'");
  if (field == "pattern")
    throw ValidationError("pattern Matrix Market files carry no values");
  if (field != "real" && field != "integer" && field != "double")
    throw ValidationError("unsupported Matrix Market field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    throw ValidationError("unsupported Matrix Market symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  auto next_content = [&](std::string& out) {
    while (std::getline(in, out)) {
      if (!out.empty() && out.back() == '\r') out.pop_back();
      const std::string t = detail::trim(out);
      if (t.empty() || t[0] == '%') continue;
      out = t;
      return true;
    }
    return false;
  };

  std::string sizes;
  if (!next_content(sizes)) throw ValidationError("missing Matrix Market size line");
  std::istringstream size_in(sizes);
  long long rows = 0, cols = 0, nnz = 0;
  if (!(size_in >> rows >> cols)) throw ValidationError("malformed size line: " + sizes);
  if (rows <= 0 || cols <= 0) throw ValidationError("matrix dimensions must be positive");
  if (symmetric && rows != cols)
    throw ValidationError("symmetric Matrix Market file must be square");

  Matrix m(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  if (format == "coordinate") {
    if (!(size_in >> nnz)) throw ValidationError("coordinate size line needs nnz");
    std::vector<char> seen(static_cast<std::size_t>(rows * cols), 0);
    std::string entry;
    for (long long e = 0; e < nnz; ++e) {
      if (!next_content(entry))
        throw ValidationError("expected " + std::to_string(nnz) + " entries, got " +
                              std::to_string(e));
      std::istringstream ein(entry);
      long long i = 0, j = 0;
      double v = 0.0;
      if (!(ein >> i >> j >> v)) throw ValidationError("malformed entry: " + entry);
      if (i < 1 || i > rows || j < 1 || j > cols)
        throw ValidationError("entry index out of range: " + entry);
      const std::size_t r = static_cast<std::size_t>(i - 1);
      const std::size_t c = static_cast<std::size_t>(j - 1);
      if (seen[r * static_cast<std::size_t>(cols) + c])
        throw ValidationError("duplicate coordinate entry at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      seen[r * static_cast<std::size_t>(cols) + c] = 1;
      m(r, c) = v;
      if (symmetric && r != c) {
        seen[c * static_cast<std::size_t>(cols) + r] = 1;
        m(c, r) = v;
      }
    }
  } else {
    // array: column-major; symmetric stores the lower triangle per column.
    std::string entry;
    for (long long j = 0; j < cols; ++j) {
      const long long start = symmetric ? j : 0;
      for (long long i = start; i < rows; ++i) {
        if (!next_content(entry)) throw ValidationError("array data ended early");
        std::istringstream ein(entry);
        double v = 0.0;
        if (!(ein >> v)) throw ValidationError("malformed array value: " + entry);
        m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
        if (symmetric && i != j) m(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = v;
      }
    }
  }
  Dataset ds;
  ds.kind = symmetric ? DatasetKind::covariance : DatasetKind::rectangular;
  ds.values = std::move(m);
  return ds;
}

inline Dataset load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open Matrix Market file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_matrix_market(buffer.str());
}

// The Pitprops correlation matrix (13 physical properties of timber props),
// the standard small benchmark for sparse PCA.
inline const std::vector<std::string>& pitprops_names() {
  static const std::vector<std::string> names{
      "topdiam", "length", "moist",   "testsg", "ovensg", "ringtop", "ringbut",
      "bowmax",  "bowdist", "whorls", "clear",  "knots",  "diaknot"};
  return names;
}

inline Dataset pitprops() {
  // Lower triangle by rows (unit diagonal implied).
  static const std::array<double, 78> lower = {
      0.954,
      0.364, 0.297,
      0.342, 0.284, 0.882,
      -0.129, -0.118, -0.148, 0.220,
      0.313, 0.291, 0.153, 0.381, 0.364,
      0.496, 0.503, -0.029, 0.174, 0.296, 0.813,
      0.424, 0.419, -0.054, -0.059, 0.004, 0.090, 0.372,
      0.592, 0.648, 0.125, 0.137, -0.039, 0.211, 0.465, 0.482,
      0.545, 0.569, -0.081, -0.014, 0.037, 0.274, 0.679, 0.557, 0.526,
      0.084, 0.076, 0.162, 0.097, 0.091, -0.036, -0.113, 0.061, 0.085, -0.319,
      -0.019, -0.036, 0.220, 0.169, -0.145, 0.024, -0.232, -0.357, -0.127, -0.368,
      0.029,
      0.134, 0.144, 0.126, 0.015, -0.208, -0.329, -0.424, -0.202, -0.076, -0.291,
      0.007, 0.184};
  Matrix m(13, 13);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < 13; ++i) {
    m(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      m(i, j) = lower[pos];
      m(j, i) = lower[pos];
      ++pos;
    }
  }
  Dataset ds;
  ds.kind = DatasetKind::correlation;
  ds.values = std::move(m);
  ds.feature_names = pitprops_names();
  return ds;
}

}  // namespace sparse_spectra
