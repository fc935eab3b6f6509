// Batch front end over CSV files. Each subcommand reads CSV (rows are
// samples for data files), runs one library operation, and writes the
// result plus a JSON metadata sidecar next to the output file. Outputs are
// deterministic: same argv, inputs, and seed give byte-identical files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ktk/csv.hpp"
#include "ktk/dependence.hpp"
#include "ktk/eigen.hpp"
#include "ktk/embedding.hpp"
#include "ktk/errors.hpp"
#include "ktk/gram_ops.hpp"
#include "ktk/kernels.hpp"
#include "ktk/matrix.hpp"
#include "ktk/nystrom.hpp"

namespace {

using nlohmann::json;

int exit_code_for(ktk::errc code) {
  switch (code) {
    case ktk::errc::invalid_spec:
    case ktk::errc::index_out_of_range:
    case ktk::errc::too_many_landmarks:
      return 1;  // bad request
    case ktk::errc::no_convergence:
    case ktk::errc::not_positive_definite:
    case ktk::errc::nonpositive_diagonal:
    case ktk::errc::no_positive_spectrum:
    case ktk::errc::nonpositive_eigenvalue:
      return 3;  // numerical failure
    default:
      return 2;  // bad data
  }
}

// Flags shared by every kernel-evaluating subcommand.
struct KernelFlags {
  std::string family = "rbf";
  std::string gamma = "auto";
  double intercept = 1.0;
  int degree = 3;

  void attach(CLI::App* cmd) {
    cmd->add_option("--kernel", family,
                    "kernel family: linear, rbf, laplacian, sigmoid, polynomial, cosine, "
                    "chi_squared")
        ->capture_default_str();
    cmd->add_option("--gamma", gamma, "kernel width, a number or 'auto' (1/n_features)")
        ->capture_default_str();
    cmd->add_option("--c", intercept, "intercept for sigmoid and polynomial")
        ->capture_default_str();
    cmd->add_option("--degree", degree, "polynomial degree")->capture_default_str();
  }

  ktk::KernelSpec spec() const {
    ktk::KernelSpec s;
    s.family = ktk::kernel_family_from_name(family);
    if (gamma != "auto") {
      try {
        std::size_t used = 0;
        const double value = std::stod(gamma, &used);
        if (used != gamma.size()) throw std::invalid_argument(gamma);
        s.gamma = value;
      } catch (const std::exception&) {
        ktk::fail(ktk::errc::invalid_spec, "--gamma must be a number or 'auto', got '" + gamma +
                                               "'");
      }
    }
    s.intercept = intercept;
    s.degree = degree;
    s.validate();
    return s;
  }

  json meta(const ktk::KernelSpec& s, std::size_t dim) const {
    json j;
    j["family"] = ktk::kernel_family_name(s.family);
    j["gamma_request"] = gamma;
    j["gamma"] = s.resolve_gamma(dim);
    j["intercept"] = s.intercept;
    j["degree"] = s.degree;
    return j;
  }
};

struct LoadedData {
  ktk::DataMatrix data;
  json meta;
};

LoadedData load_data(const std::string& path) {
  const ktk::CsvTable table = ktk::read_csv(path);
  json meta;
  meta["path"] = path;
  meta["had_header"] = table.had_header;
  meta["rows_are_samples"] = true;
  meta["n_samples"] = table.values.rows();
  meta["n_features"] = table.values.cols();
  return {ktk::DataMatrix::from_rows(table.values), std::move(meta)};
}

ktk::Matrix load_square_matrix(const std::string& path) {
  const ktk::CsvTable table = ktk::read_csv(path);
  if (table.values.rows() != table.values.cols())
    ktk::fail(ktk::errc::shape_mismatch,
              path + " is " + std::to_string(table.values.rows()) + "x" +
                  std::to_string(table.values.cols()) + ", expected a square matrix");
  return table.values;
}

void write_meta(const std::string& output_path, const json& meta) {
  const std::filesystem::path sidecar = output_path + ".meta.json";
  std::ofstream out(sidecar);
  if (!out) ktk::fail(ktk::errc::io_error, "cannot open " + sidecar.string() + " for writing");
  out << meta.dump(2) << '\n';
  if (!out) ktk::fail(ktk::errc::io_error, "failed writing " + sidecar.string());
}

// Result + sidecar when --output is given, bare result on stdout otherwise.
void emit_matrix(const std::optional<std::string>& output, const ktk::Matrix& values, json meta) {
  if (output) {
    ktk::write_csv(*output, values);
    meta["output"] = *output;
    write_meta(*output, meta);
  } else {
    ktk::write_csv(std::cout, values);
  }
}

void emit_scalar(const std::optional<std::string>& output, double value, json meta) {
  ktk::Matrix cell(1, 1);
  cell(0, 0) = value;
  emit_matrix(output, cell, std::move(meta));
}

void emit_json(const std::optional<std::string>& output, const json& body, json meta) {
  if (output) {
    std::ofstream out(*output);
    if (!out) ktk::fail(ktk::errc::io_error, "cannot open " + *output + " for writing");
    out << body.dump(2) << '\n';
    if (!out) ktk::fail(ktk::errc::io_error, "failed writing " + *output);
    meta["output"] = *output;
    write_meta(*output, meta);
  } else {
    std::cout << body.dump(2) << '\n';
  }
}

json base_meta(const std::string& command, const std::vector<std::string>& inputs) {
  json meta;
  meta["tool"] = "ktk";
  meta["command"] = command;
  meta["inputs"] = inputs;
  return meta;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kernel methods toolkit: Gram matrices, spectral embedding, Nystrom "
               "approximation, and dependence statistics over CSV data"};
  app.require_subcommand(1);

  std::string input;
  std::string input_y;
  std::optional<std::string> output;
  KernelFlags kernel;

  // gram
  auto* gram_cmd = app.add_subcommand("gram", "kernel matrix of one dataset");
  bool center_flag = false;
  std::string normalize_method = "none";
  double t_power = 1.0;
  {
    gram_cmd->add_option("input", input, "data CSV, rows are samples")->required();
    gram_cmd->add_option("-o,--output", output, "output CSV (stdout if omitted)");
    kernel.attach(gram_cmd);
    gram_cmd->add_flag("--center", center_flag, "double-center the kernel matrix");
    gram_cmd->add_option("--normalize", normalize_method, "none, cosine, or tmean")
        ->capture_default_str();
    gram_cmd->add_option("--t", t_power, "power for --normalize tmean (0 = geometric mean)")
        ->capture_default_str();
  }

  // center
  auto* center_cmd = app.add_subcommand("center", "double-center a square kernel matrix");
  double symmetry_tol = 1e-10;
  {
    center_cmd->add_option("input", input, "kernel matrix CSV")->required();
    center_cmd->add_option("-o,--output", output, "output CSV (stdout if omitted)");
    center_cmd->add_option("--tol", symmetry_tol, "relative symmetry tolerance")
        ->capture_default_str();
  }

  // normalize
  auto* normalize_cmd = app.add_subcommand("normalize", "normalize a square kernel matrix");
  std::string method = "cosine";
  {
    normalize_cmd->add_option("input", input, "kernel matrix CSV")->required();
    normalize_cmd->add_option("-o,--output", output, "output CSV (stdout if omitted)");
    normalize_cmd->add_option("--method", method, "cosine or tmean")->capture_default_str();
    normalize_cmd->add_option("--t", t_power, "power for tmean (0 = geometric mean)")
        ->capture_default_str();
    normalize_cmd->add_option("--tol", symmetry_tol, "relative symmetry tolerance")
        ->capture_default_str();
  }

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "symmetry and PSD report for a matrix");
  double psd_tol = 1e-8;
  {
    validate_cmd->add_option("input", input, "kernel matrix CSV")->required();
    validate_cmd->add_option("-o,--output", output, "report JSON (stdout if omitted)");
    validate_cmd->add_option("--tol", psd_tol, "PSD tolerance, relative to max|K|")
        ->capture_default_str();
  }

  // from-distance
  auto* fromdist_cmd =
      app.add_subcommand("from-distance", "centered kernel from a squared-distance matrix");
  {
    fromdist_cmd->add_option("input", input, "distance matrix CSV")->required();
    fromdist_cmd->add_option("-o,--output", output, "output CSV (stdout if omitted)");
    fromdist_cmd->add_option("--tol", symmetry_tol, "distance matrix validation tolerance")
        ->capture_default_str();
  }

  // embed
  auto* embed_cmd = app.add_subcommand("embed", "spectral embedding of a dataset");
  std::size_t components = 2;
  std::optional<std::string> model_path;
  {
    embed_cmd->add_option("input", input, "data CSV, rows are samples")->required();
    embed_cmd->add_option("-o,--output", output, "embedding CSV, rows are samples");
    kernel.attach(embed_cmd);
    embed_cmd->add_option("-p,--components", components, "number of embedding components")
        ->required();
    embed_cmd->add_option("--save-model", model_path, "also save the fitted model as JSON");
  }

  // oos-embed
  auto* oos_cmd = app.add_subcommand("oos-embed", "embed new points with a saved model");
  std::string oos_model;
  std::optional<std::int64_t> component;
  {
    oos_cmd->add_option("input", input, "query data CSV, rows are samples")->required();
    oos_cmd->add_option("-o,--output", output, "embedding CSV, rows are samples");
    oos_cmd->add_option("--model", oos_model, "model JSON written by embed --save-model")
        ->required();
    oos_cmd->add_option("--component", component, "emit only this component (0-based)");
  }

  // nystrom
  auto* nystrom_cmd =
      app.add_subcommand("nystrom", "low-rank kernel completion from landmark columns");
  std::size_t landmark_count = 0;
  std::string strategy = "uniform";
  std::uint64_t seed = 0;
  double pinv_threshold = ktk::NystromModel::kDefaultPinvThreshold;
  {
    nystrom_cmd->add_option("input", input, "data CSV, rows are samples")->required();
    nystrom_cmd->add_option("-o,--output", output, "completed kernel CSV (stdout if omitted)");
    kernel.attach(nystrom_cmd);
    nystrom_cmd->add_option("-m,--m", landmark_count, "number of landmarks")->required();
    nystrom_cmd->add_option("--strategy", strategy, "uniform or greedy_pivot")
        ->capture_default_str();
    nystrom_cmd->add_option("--seed", seed, "seed for uniform landmark sampling")
        ->capture_default_str();
    nystrom_cmd->add_option("--pinv-threshold", pinv_threshold,
                            "relative eigenvalue cutoff for the landmark block pseudo-inverse")
        ->capture_default_str();
  }

  // hsic
  auto* hsic_cmd = app.add_subcommand("hsic", "Hilbert-Schmidt independence criterion");
  {
    hsic_cmd->add_option("input_x", input, "data CSV for X, rows are samples")->required();
    hsic_cmd->add_option("input_y", input_y, "data CSV for Y, paired with X")->required();
    hsic_cmd->add_option("-o,--output", output, "scalar output (stdout if omitted)");
    kernel.attach(hsic_cmd);
  }

  // mmd
  auto* mmd_cmd = app.add_subcommand("mmd", "squared maximum mean discrepancy");
  {
    mmd_cmd->add_option("input_x", input, "data CSV for the first sample")->required();
    mmd_cmd->add_option("input_y", input_y, "data CSV for the second sample")->required();
    mmd_cmd->add_option("-o,--output", output, "scalar output (stdout if omitted)");
    kernel.attach(mmd_cmd);
  }

  // eig
  auto* eig_cmd = app.add_subcommand("eig", "eigendecomposition of a symmetric matrix");
  double jacobi_tol = 1e-10;
  int max_sweeps = 50;
  std::optional<std::string> vectors_path;
  {
    eig_cmd->add_option("input", input, "symmetric matrix CSV")->required();
    eig_cmd->add_option("-o,--output", output, "eigenvalue CSV, one per row, descending");
    eig_cmd->add_option("--vectors", vectors_path, "also write eigenvectors (columns) here");
    eig_cmd->add_option("--tol", jacobi_tol, "off-diagonal convergence tolerance")
        ->capture_default_str();
    eig_cmd->add_option("--max-sweeps", max_sweeps, "Jacobi sweep limit")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gram_cmd) {
      LoadedData loaded = load_data(input);
      const ktk::KernelSpec spec = kernel.spec();
      ktk::GramMatrix k = ktk::gram(spec, loaded.data);
      if (normalize_method == "cosine")
        k = ktk::cosine_normalize(k);
      else if (normalize_method == "tmean")
        k = ktk::generalized_normalize(k, t_power);
      else if (normalize_method != "none")
        ktk::fail(ktk::errc::invalid_spec,
                  "--normalize must be none, cosine, or tmean, got '" + normalize_method + "'");
      if (center_flag) k = ktk::double_center(k);
      json meta = base_meta("gram", {input});
      meta["data"] = loaded.meta;
      meta["kernel"] = kernel.meta(spec, loaded.data.dim());
      meta["normalization"] = normalize_method;
      if (normalize_method == "tmean") meta["t"] = t_power;
      meta["centered"] = center_flag;
      emit_matrix(output, k.matrix(), std::move(meta));
    } else if (*center_cmd) {
      const ktk::GramMatrix k =
          ktk::GramMatrix::from_matrix(load_square_matrix(input), false, symmetry_tol);
      json meta = base_meta("center", {input});
      meta["order"] = k.order();
      meta["tolerances"]["symmetry"] = symmetry_tol;
      meta["centered"] = true;
      emit_matrix(output, ktk::double_center(k).matrix(), std::move(meta));
    } else if (*normalize_cmd) {
      const ktk::GramMatrix k =
          ktk::GramMatrix::from_matrix(load_square_matrix(input), false, symmetry_tol);
      ktk::GramMatrix result(k.order());
      if (method == "cosine")
        result = ktk::cosine_normalize(k);
      else if (method == "tmean")
        result = ktk::generalized_normalize(k, t_power);
      else
        ktk::fail(ktk::errc::invalid_spec,
                  "--method must be cosine or tmean, got '" + method + "'");
      json meta = base_meta("normalize", {input});
      meta["order"] = k.order();
      meta["method"] = method;
      if (method == "tmean") meta["t"] = t_power;
      meta["tolerances"]["symmetry"] = symmetry_tol;
      emit_matrix(output, result.matrix(), std::move(meta));
    } else if (*validate_cmd) {
      const ktk::Matrix m = load_square_matrix(input);
      const ktk::MercerReport report = ktk::validate_mercer(m, psd_tol);
      json body;
      body["symmetric"] = report.symmetric;
      body["psd"] = report.psd;
      body["min_eigenvalue"] = report.min_eigenvalue;
      body["max_eigenvalue"] = report.max_eigenvalue;
      body["tolerance"] = report.tolerance_used;
      json meta = base_meta("validate", {input});
      meta["order"] = m.rows();
      meta["tolerances"]["psd"] = psd_tol;
      emit_json(output, body, std::move(meta));
    } else if (*fromdist_cmd) {
      const ktk::DistanceMatrix d =
          ktk::DistanceMatrix::from_matrix(load_square_matrix(input), symmetry_tol);
      const ktk::GramMatrix k = ktk::kernel_from_distance(d);
      json meta = base_meta("from-distance", {input});
      meta["order"] = d.order();
      meta["tolerances"]["distance"] = symmetry_tol;
      meta["centered"] = true;
      emit_matrix(output, k.matrix(), std::move(meta));
    } else if (*embed_cmd) {
      LoadedData loaded = load_data(input);
      const ktk::KernelSpec spec = kernel.spec();
      const ktk::EmbeddingModel model = ktk::EmbeddingModel::fit(spec, loaded.data, components);
      json meta = base_meta("embed", {input});
      meta["data"] = loaded.meta;
      meta["kernel"] = kernel.meta(spec, loaded.data.dim());
      meta["components_requested"] = model.requested_p();
      meta["components_kept"] = model.p();
      if (model.truncated())
        meta["notices"].push_back(
            "kept " + std::to_string(model.p()) + " of " + std::to_string(model.requested_p()) +
            " components; the rest of the spectrum is numerically zero");
      std::vector<double> eigenvalues(model.p());
      for (std::size_t k = 0; k < model.p(); ++k) eigenvalues[k] = model.eigenvalue(k);
      meta["eigenvalues"] = eigenvalues;
      if (model_path) {
        model.save(*model_path);
        meta["model"] = *model_path;
      }
      emit_matrix(output, ktk::transpose(model.embed_training()), std::move(meta));
    } else if (*oos_cmd) {
      const ktk::EmbeddingModel model = ktk::EmbeddingModel::load(oos_model);
      LoadedData loaded = load_data(input);
      if (loaded.data.dim() != model.dim())
        ktk::fail(ktk::errc::dimension_mismatch,
                  input + " has " + std::to_string(loaded.data.dim()) +
                      " features but the model expects " + std::to_string(model.dim()));
      if (component) {
        if (*component < 0 || static_cast<std::size_t>(*component) >= model.p())
          ktk::fail(ktk::errc::index_out_of_range,
                    "--component " + std::to_string(*component) + " but the model keeps " +
                        std::to_string(model.p()) + " components");
      }
      const std::size_t n_query = loaded.data.size();
      const std::size_t width = component ? 1 : model.p();
      ktk::Matrix result(n_query, width);
      for (std::size_t i = 0; i < n_query; ++i) {
        const std::vector<double> y = model.embed_out_of_sample(loaded.data.sample(i));
        if (component)
          result(i, 0) = y[static_cast<std::size_t>(*component)];
        else
          for (std::size_t kcol = 0; kcol < width; ++kcol) result(i, kcol) = y[kcol];
      }
      json meta = base_meta("oos-embed", {input});
      meta["data"] = loaded.meta;
      meta["model"] = oos_model;
      meta["components"] = model.p();
      if (component) meta["component"] = *component;
      emit_matrix(output, result, std::move(meta));
    } else if (*nystrom_cmd) {
      LoadedData loaded = load_data(input);
      const ktk::KernelSpec spec = kernel.spec();
      const ktk::DataKernelProvider provider(spec, loaded.data);
      const std::vector<std::size_t> landmarks = ktk::select_landmarks(
          provider, landmark_count, ktk::landmark_strategy_from_name(strategy), seed);
      const ktk::NystromModel model = ktk::NystromModel::build(provider, landmarks,
                                                               pinv_threshold);
      const ktk::GramMatrix completed = model.complete();
      // Exact kernel for the error report; fine at CLI scale even though the
      // approximation itself never needs it.
      const ktk::GramMatrix full = ktk::gram(spec, loaded.data);
      json meta = base_meta("nystrom", {input});
      meta["data"] = loaded.meta;
      meta["kernel"] = kernel.meta(spec, loaded.data.dim());
      meta["m"] = landmark_count;
      meta["strategy"] = strategy;
      meta["seed"] = seed;
      meta["pinv_threshold"] = pinv_threshold;
      meta["landmarks"] = model.landmarks();
      meta["reconstruction_error"] = ktk::reconstruction_error(full, completed);
      emit_matrix(output, completed.matrix(), std::move(meta));
    } else if (*hsic_cmd) {
      LoadedData x = load_data(input);
      LoadedData y = load_data(input_y);
      const ktk::KernelSpec spec = kernel.spec();
      const double value = ktk::hsic(ktk::gram(spec, x.data), ktk::gram(spec, y.data));
      json meta = base_meta("hsic", {input, input_y});
      meta["data_x"] = x.meta;
      meta["data_y"] = y.meta;
      meta["kernel_x"] = kernel.meta(spec, x.data.dim());
      meta["kernel_y"] = kernel.meta(spec, y.data.dim());
      meta["normalization"] = "1/(n-1)^2";
      meta["statistic"] = value;
      emit_scalar(output, value, std::move(meta));
    } else if (*mmd_cmd) {
      LoadedData x = load_data(input);
      LoadedData y = load_data(input_y);
      if (x.data.dim() != y.data.dim())
        ktk::fail(ktk::errc::dimension_mismatch,
                  input + " has " + std::to_string(x.data.dim()) + " features but " + input_y +
                      " has " + std::to_string(y.data.dim()));
      const ktk::KernelSpec spec = kernel.spec();
      const ktk::Matrix kxx = ktk::gram(spec, x.data).matrix();
      const ktk::Matrix kyy = ktk::gram(spec, y.data).matrix();
      const ktk::Matrix kxy = ktk::gram_between(spec, x.data, y.data);
      const double value = ktk::mmd2(kxx, kyy, kxy);
      json meta = base_meta("mmd", {input, input_y});
      meta["data_x"] = x.meta;
      meta["data_y"] = y.meta;
      meta["kernel"] = kernel.meta(spec, x.data.dim());
      meta["estimator"] = "biased-v";
      meta["equal_sample_sizes"] = x.data.size() == y.data.size();
      if (x.data.size() != y.data.size())
        meta["notices"].push_back(
            "sample sizes differ; per-block means generalize the equal-size estimator");
      meta["statistic"] = value;
      emit_scalar(output, value, std::move(meta));
    } else if (*eig_cmd) {
      const ktk::Matrix m = load_square_matrix(input);
      ktk::JacobiOptions options;
      options.tol = jacobi_tol;
      options.max_sweeps = max_sweeps;
      const ktk::EigenSystem eig = ktk::eigh(m, options);
      ktk::Matrix eigenvalues(eig.eigenvalues.size(), 1);
      for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i)
        eigenvalues(i, 0) = eig.eigenvalues[i];
      if (vectors_path) ktk::write_csv(*vectors_path, eig.eigenvectors);
      json meta = base_meta("eig", {input});
      meta["order"] = m.rows();
      meta["tolerances"]["off_diagonal"] = jacobi_tol;
      meta["max_sweeps"] = max_sweeps;
      if (vectors_path) meta["eigenvectors"] = *vectors_path;
      emit_matrix(output, eigenvalues, std::move(meta));
    }
    return 0;
  } catch (const ktk::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
