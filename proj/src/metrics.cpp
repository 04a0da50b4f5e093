#include "covergen/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "covergen/errors.hpp"
#include "covergen/kernels.hpp"

namespace covergen {

namespace {

kernels::ConstMatrixView view_of(const FeatureMatrix& m) {
  return {std::span<const double>(m.data(), static_cast<std::size_t>(m.size())), static_cast<std::size_t>(m.rows()),
          static_cast<std::size_t>(m.cols())};
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

GaussianStats gaussian_stats(const FeatureMatrix& features) {
  if (features.rows() < 2) throw ContractError("gaussian_stats needs at least 2 samples");
  if (!features.allFinite()) throw NumericError("gaussian_stats: non-finite feature value");

  const auto d = features.cols();
  GaussianStats out;
  out.mu.resize(d);
  FeatureMatrix cov(d, d);
  kernels::parallel::column_moments(view_of(features),
                                    std::span<double>(out.mu.data(), static_cast<std::size_t>(d)),
                                    {std::span<double>(cov.data(), static_cast<std::size_t>(cov.size())),
                                     static_cast<std::size_t>(d), static_cast<std::size_t>(d)});
  out.cov = cov;
  return out;
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ContractError("matrix_sqrt_psd: matrix is not square");
  if (!m.allFinite()) throw NumericError("matrix_sqrt_psd: non-finite entry");
  const double asym = max_abs(m - m.transpose());
  if (asym > 1e-8 * (1.0 + max_abs(m)))
    throw NumericError("matrix_sqrt_psd: matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");

  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("matrix_sqrt_psd: eigendecomposition failed");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

double fid(const GaussianStats& a, const GaussianStats& b) {
  const auto d = a.mu.size();
  if (b.mu.size() != d || a.cov.rows() != d || a.cov.cols() != d || b.cov.rows() != d || b.cov.cols() != d)
    throw ContractError("fid: dimension mismatch");

  const double mean_term = (a.mu - b.mu).squaredNorm();
  const Eigen::MatrixXd sqrt_a = matrix_sqrt_psd(a.cov);
  Eigen::MatrixXd inner = sqrt_a * b.cov * sqrt_a;
  inner = 0.5 * (inner + inner.transpose());
  const double cross = matrix_sqrt_psd(inner).trace();
  const double value = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross;
  return value < 0.0 ? 0.0 : value;
}

InceptionScore inception_score(const ProbMatrix& probs, int splits) {
  const auto n = probs.rows();
  const auto classes = probs.cols();
  if (splits < 1) throw ContractError("inception_score: splits must be >= 1");
  if (n < splits) throw ContractError("inception_score: fewer rows than splits");
  if (classes < 1) throw ContractError("inception_score: no classes");
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = probs.row(r);
    if (!row.allFinite() || row.minCoeff() < 0.0)
      throw ContractError("inception_score: row " + std::to_string(r) + " has a negative or non-finite entry");
    if (std::abs(row.sum() - 1.0) > 1e-6)
      throw ContractError("inception_score: row " + std::to_string(r) + " does not sum to 1");
  }

  std::vector<double> scores;
  Eigen::Index begin = 0;
  for (int k = 0; k < splits; ++k) {
    // Remainder rows go to the leading splits.
    const Eigen::Index size = n / splits + (k < n % splits ? 1 : 0);
    const FeatureMatrix part = probs.middleRows(begin, size);
    begin += size;

    const auto view = view_of(part);
    std::vector<double> marginal(static_cast<std::size_t>(classes));
    kernels::parallel::column_means(view, marginal);
    std::vector<double> kl(static_cast<std::size_t>(size));
    kernels::parallel::row_kl_to(view, marginal, kl);
    double sum = 0.0;
    for (double v : kl) sum += v;
    scores.push_back(std::exp(sum / static_cast<double>(size)));
  }

  InceptionScore out;
  for (double s : scores) out.mean += s;
  out.mean /= static_cast<double>(scores.size());
  double var = 0.0;
  for (double s : scores) var += (s - out.mean) * (s - out.mean);
  out.std = std::sqrt(var / static_cast<double>(scores.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Matrix files

namespace {

std::filesystem::path sidecar_of(const std::filesystem::path& file) {
  std::filesystem::path p = file;
  p += ".json";
  return p;
}

bool parse_csv_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t i = 0;
  while (i <= line.size()) {
    std::size_t j = line.find(',', i);
    if (j == std::string::npos) j = line.size();
    std::string_view cell(line.data() + i, j - i);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) return false;
    out.push_back(v);
    i = j + 1;
  }
  return true;
}

FeatureMatrix read_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open " + file.string());
  std::vector<double> values, row;
  std::size_t cols = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!parse_csv_row(line, row)) {
      if (rows == 0 && line_no == 1) continue;  // header
      throw InputError(file.string() + ":" + std::to_string(line_no) + ": not a numeric row");
    }
    if (rows == 0) cols = row.size();
    if (row.size() != cols)
      throw InputError(file.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                       " columns, got " + std::to_string(row.size()));
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  FeatureMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), m.data());
  return m;
}

FeatureMatrix read_raw(const std::filesystem::path& file) {
  std::ifstream side(sidecar_of(file));
  if (!side) throw InputError("missing sidecar " + sidecar_of(file).string());
  const auto meta = nlohmann::json::parse(side, nullptr, false);
  if (meta.is_discarded() || !meta.contains("rows") || !meta.contains("cols") || !meta["rows"].is_number_unsigned() ||
      !meta["cols"].is_number_unsigned())
    throw InputError(sidecar_of(file).string() + ": expected {\"rows\": r, \"cols\": c}");
  const auto rows = meta["rows"].get<std::size_t>(), cols = meta["cols"].get<std::size_t>();

  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError("cannot open " + file.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != rows * cols * 4)
    throw InputError(file.string() + ": size " + std::to_string(bytes.size()) + " does not match " +
                     std::to_string(rows) + "x" + std::to_string(cols) + " float32");
  FeatureMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows * cols; ++i) {
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[i * 4 + b]);
    m.data()[i] = std::bit_cast<float>(bits);
  }
  return m;
}

}  // namespace

FeatureMatrix read_matrix(const std::filesystem::path& file) {
  return file.extension() == ".csv" ? read_csv(file) : read_raw(file);
}

void write_matrix(const FeatureMatrix& m, const std::filesystem::path& file) {
  if (file.extension() == ".csv") {
    std::ofstream out(file);
    if (!out) throw PersistenceError("cannot write " + file.string());
    out.precision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
      out << '\n';
    }
    return;
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw PersistenceError("cannot write " + file.string());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(m.data()[i]));
    const char le[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                        static_cast<char>((bits >> 16) & 0xff), static_cast<char>(bits >> 24)};
    out.write(le, 4);
  }
  std::ofstream(sidecar_of(file)) << nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}}.dump() << '\n';
}

}  // namespace covergen
