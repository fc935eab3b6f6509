#include "ktk/embedding.hpp"

#include <cmath>
#include <fstream>
#include <string>
#include <utility>

#include "json.hpp"
#include "ktk/eigen.hpp"
#include "ktk/errors.hpp"
#include "ktk/gram_ops.hpp"

namespace ktk {

namespace {

constexpr const char* kFormatTag = "ktk-embedding-model";

// Relative cutoff below which trailing eigenvalues are treated as numerically
// zero and dropped from the model.
constexpr double kEigRelFloor = 1e-10;

nlohmann::json spec_to_json(const KernelSpec& spec) {
  nlohmann::json j;
  j["family"] = kernel_family_name(spec.family);
  if (spec.gamma)
    j["gamma"] = *spec.gamma;
  else
    j["gamma"] = nullptr;
  j["intercept"] = spec.intercept;
  j["degree"] = spec.degree;
  return j;
}

KernelSpec spec_from_json(const nlohmann::json& j) {
  KernelSpec spec;
  spec.family = kernel_family_from_name(j.at("family").get<std::string>());
  if (!j.at("gamma").is_null()) spec.gamma = j.at("gamma").get<double>();
  spec.intercept = j.at("intercept").get<double>();
  spec.degree = j.at("degree").get<int>();
  spec.validate();
  return spec;
}

}  // namespace

EmbeddingModel::EmbeddingModel(KernelSpec spec, DataMatrix x)
    : spec_(std::move(spec)), x_(std::move(x)) {}

EmbeddingModel EmbeddingModel::fit(const GramMatrix& k, const KernelSpec& spec,
                                   const DataMatrix& x, std::size_t p) {
  spec.validate();
  const std::size_t n = x.size();
  if (k.order() != n)
    fail(errc::dimension_mismatch, "gram matrix is order " + std::to_string(k.order()) +
                                       " but data has " + std::to_string(n) + " samples");
  if (k.centered())
    fail(errc::invalid_spec, "fit expects the uncentered training gram matrix");
  if (p < 1) fail(errc::invalid_spec, "number of components must be at least 1");
  if (p > n)
    fail(errc::invalid_spec, "requested " + std::to_string(p) + " components from " +
                                 std::to_string(n) + " samples");

  EmbeddingModel model(spec, x);
  model.requested_p_ = p;

  // Centering means of the uncentered Gram; stored so out-of-sample kernel
  // columns can be centered consistently later.
  model.training_row_means_.assign(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum += k(i, j);
    model.training_row_means_[i] = sum / static_cast<double>(n);
    grand += sum;
  }
  model.training_grand_mean_ = grand / static_cast<double>(n * n);

  const GramMatrix centered = double_center(k);
  const EigenSystem eig = eigh(centered.matrix());

  const double top = eig.eigenvalues.front();
  if (!(top > 0.0))
    fail(errc::no_positive_spectrum,
         "centered gram matrix has no positive eigenvalue (largest is " + std::to_string(top) +
             ")");
  const double floor = kEigRelFloor * top;
  std::size_t keep = 0;
  while (keep < p && eig.eigenvalues[keep] >= floor) ++keep;

  model.eigenvalues_.assign(eig.eigenvalues.begin(), eig.eigenvalues.begin() + keep);
  model.eigenvectors_ = Matrix(n, keep);
  for (std::size_t c = 0; c < keep; ++c) {
    auto dst = model.eigenvectors_.column(c);
    auto src = eig.eigenvectors.column(c);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return model;
}

EmbeddingModel EmbeddingModel::fit(const KernelSpec& spec, const DataMatrix& x, std::size_t p) {
  return fit(gram(spec, x), spec, x, p);
}

double EmbeddingModel::eigenvalue(std::size_t k) const {
  if (k >= eigenvalues_.size())
    fail(errc::index_out_of_range, "component " + std::to_string(k) + " of " +
                                       std::to_string(eigenvalues_.size()));
  return eigenvalues_[k];
}

std::span<const double> EmbeddingModel::eigenvector(std::size_t k) const {
  if (k >= eigenvalues_.size())
    fail(errc::index_out_of_range, "component " + std::to_string(k) + " of " +
                                       std::to_string(eigenvalues_.size()));
  return eigenvectors_.column(k);
}

Matrix EmbeddingModel::embed_training() const {
  const std::size_t n_samples = n();
  Matrix y(p(), n_samples);
  for (std::size_t k = 0; k < p(); ++k) {
    const double scale = std::sqrt(eigenvalues_[k]);
    auto v = eigenvectors_.column(k);
    for (std::size_t i = 0; i < n_samples; ++i) y(k, i) = scale * v[i];
  }
  return y;
}

std::vector<double> EmbeddingModel::centered_column(std::span<const double> x) const {
  const std::size_t n_samples = n();
  std::vector<double> col(n_samples);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    col[i] = eval_kernel(spec_, x_.sample(i), x);
    sum += col[i];
  }
  const double col_mean = sum / static_cast<double>(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    col[i] = col[i] - col_mean - training_row_means_[i] + training_grand_mean_;
  return col;
}

std::vector<double> EmbeddingModel::embed_out_of_sample(std::span<const double> x) const {
  const std::vector<double> col = centered_column(x);
  std::vector<double> y(p());
  for (std::size_t k = 0; k < p(); ++k) {
    auto v = eigenvectors_.column(k);
    double dot = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) dot += v[i] * col[i];
    y[k] = dot / std::sqrt(eigenvalues_[k]);
  }
  return y;
}

double EmbeddingModel::eigenfunction_value(std::span<const double> x, std::size_t k) const {
  if (k >= eigenvalues_.size())
    fail(errc::index_out_of_range, "component " + std::to_string(k) + " of " +
                                       std::to_string(eigenvalues_.size()));
  const std::vector<double> col = centered_column(x);
  auto v = eigenvectors_.column(k);
  double dot = 0.0;
  for (std::size_t i = 0; i < col.size(); ++i) dot += v[i] * col[i];
  return std::sqrt(static_cast<double>(n())) / eigenvalues_[k] * dot;
}

double EmbeddingModel::operator_eigenvalue(std::size_t k) const {
  return eigenvalue(k) / static_cast<double>(n());
}

void EmbeddingModel::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["format"] = kFormatTag;
  j["version"] = kFormatVersion;
  j["kernel"] = spec_to_json(spec_);
  j["n"] = n();
  j["dim"] = dim();
  j["requested_components"] = requested_p_;
  j["eigenvalues"] = eigenvalues_;
  nlohmann::json vectors = nlohmann::json::array();
  for (std::size_t k = 0; k < p(); ++k) {
    auto v = eigenvectors_.column(k);
    vectors.push_back(std::vector<double>(v.begin(), v.end()));
  }
  j["eigenvectors"] = vectors;
  j["row_means"] = training_row_means_;
  j["grand_mean"] = training_grand_mean_;
  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < n(); ++i) {
    auto s = x_.sample(i);
    samples.push_back(std::vector<double>(s.begin(), s.end()));
  }
  j["training_data"] = samples;

  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) fail(errc::io_error, "failed writing " + path.string());
}

EmbeddingModel EmbeddingModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_model, path.string() + " is not valid JSON: " + e.what());
  }

  try {
    if (!j.contains("format") || j.at("format").get<std::string>() != kFormatTag)
      fail(errc::corrupt_model, path.string() + " is not an embedding model file");
    const int version = j.at("version").get<int>();
    if (version != kFormatVersion)
      fail(errc::version_mismatch, path.string() + " has model format version " +
                                       std::to_string(version) + ", expected " +
                                       std::to_string(kFormatVersion));

    const KernelSpec spec = spec_from_json(j.at("kernel"));
    const std::size_t n = j.at("n").get<std::size_t>();
    const std::size_t dim = j.at("dim").get<std::size_t>();
    const auto& samples = j.at("training_data");
    if (samples.size() != n) fail(errc::corrupt_model, "training data sample count mismatch");
    Matrix values(dim, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto sample = samples.at(i).get<std::vector<double>>();
      if (sample.size() != dim) fail(errc::corrupt_model, "training data dimension mismatch");
      std::copy(sample.begin(), sample.end(), values.column(i).begin());
    }

    EmbeddingModel model(spec, DataMatrix(std::move(values)));
    model.requested_p_ = j.at("requested_components").get<std::size_t>();
    model.eigenvalues_ = j.at("eigenvalues").get<std::vector<double>>();
    const std::size_t p = model.eigenvalues_.size();
    if (p < 1 || p > n || model.requested_p_ < p)
      fail(errc::corrupt_model, "implausible component count");
    for (double ev : model.eigenvalues_)
      if (!(ev > 0.0)) fail(errc::corrupt_model, "non-positive stored eigenvalue");

    const auto& vectors = j.at("eigenvectors");
    if (vectors.size() != p) fail(errc::corrupt_model, "eigenvector count mismatch");
    model.eigenvectors_ = Matrix(n, p);
    for (std::size_t k = 0; k < p; ++k) {
      const auto v = vectors.at(k).get<std::vector<double>>();
      if (v.size() != n) fail(errc::corrupt_model, "eigenvector length mismatch");
      std::copy(v.begin(), v.end(), model.eigenvectors_.column(k).begin());
    }

    model.training_row_means_ = j.at("row_means").get<std::vector<double>>();
    if (model.training_row_means_.size() != n)
      fail(errc::corrupt_model, "row mean length mismatch");
    model.training_grand_mean_ = j.at("grand_mean").get<double>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::corrupt_model, path.string() + " is missing or mistypes a field: " + e.what());
  } catch (const Error& e) {
    if (e.code() == errc::corrupt_model || e.code() == errc::version_mismatch) throw;
    fail(errc::corrupt_model, path.string() + ": " + e.what());
  }
}

}  // namespace ktk
