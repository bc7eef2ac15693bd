#include "sdm/decoder/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace sdm {
namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index cols_if_empty) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, cols_if_empty);
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(r.size()) != cols) throw std::invalid_argument("ragged matrix in model file");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = r.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

nlohmann::json stats_json(const std::vector<SolverStats>& stats) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : stats)
    out.push_back({{"epochs", s.epochs}, {"converged", s.converged}, {"final_violation", s.final_violation}});
  return out;
}

std::vector<SolverStats> stats_from_json(const nlohmann::json& j) {
  std::vector<SolverStats> out;
  for (const auto& s : j)
    out.push_back({s.at("epochs").get<int>(), s.at("converged").get<bool>(), s.at("final_violation").get<double>()});
  return out;
}

}  // namespace

nlohmann::json to_json(const FeatureProvenance& p) {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : p.bands) bands.push_back({b.low, b.high});
  return {{"trial", p.trial}, {"rank", p.rank}, {"base", to_string(p.base)}, {"bands", bands}};
}

FeatureProvenance provenance_from_json(const nlohmann::json& j) {
  FeatureProvenance p;
  p.trial = j.value("trial", -1);
  p.rank = j.value("rank", 0);
  p.base = parse_feature_layout(j.value("base", std::string("sdm")));
  if (j.contains("bands"))
    for (const auto& b : j.at("bands")) p.bands.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  return p;
}

nlohmann::json to_json(const LinearModel& m) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& [a, b] : m.outputs_classes) outputs.push_back({a, b});
  return {{"kind", "linear"},
          {"regularization", to_string(m.regularization)},
          {"scheme", to_string(m.scheme)},
          {"layout", to_string(m.provenance.base)},
          {"hyperparameters", m.hyperparameters},
          {"classes", m.classes},
          {"outputs", outputs},
          {"features", m.features()},
          {"weights", matrix_json(m.weights)},
          {"bias", vector_json(m.bias)},
          {"provenance", to_json(m.provenance)},
          {"solver", stats_json(m.stats)},
          {"notes", m.notes}};
}

LinearModel linear_model_from_json(const nlohmann::json& j) {
  if (j.value("kind", std::string()) != "linear") throw std::invalid_argument("not a linear model document");
  LinearModel m;
  m.regularization = parse_regularization(j.at("regularization").get<std::string>());
  m.scheme = parse_multiclass_scheme(j.at("scheme").get<std::string>());
  m.hyperparameters = j.at("hyperparameters").get<std::vector<double>>();
  m.classes = j.at("classes").get<std::vector<int>>();
  for (const auto& o : j.at("outputs")) m.outputs_classes.emplace_back(o.at(0).get<int>(), o.at(1).get<int>());
  m.weights = matrix_from_json(j.at("weights"), static_cast<Eigen::Index>(m.outputs_classes.size()));
  m.bias = vector_from_json(j.at("bias"));
  if (m.weights.cols() != m.bias.size()) throw std::invalid_argument("model bias does not match weights");
  if (j.contains("features") && j.at("features").get<Eigen::Index>() != m.weights.rows())
    throw std::invalid_argument("model feature count does not match weights");
  m.provenance = provenance_from_json(j.at("provenance"));
  if (j.contains("solver")) m.stats = stats_from_json(j.at("solver"));
  if (j.contains("notes")) m.notes = j.at("notes").get<std::vector<std::string>>();
  return m;
}

nlohmann::json to_json(const KernelModel& m) {
  nlohmann::json machines = nlohmann::json::array();
  for (const auto& k : m.machines)
    machines.push_back({{"positive", k.positive}, {"negative", k.negative}, {"coef", vector_json(k.coef)}, {"bias", k.bias}});
  return {{"kind", "kernel"},
          {"cost", m.cost},
          {"classes", m.classes},
          {"retained", m.retained},
          {"machines", machines},
          {"solver", stats_json(m.stats)}};
}

KernelModel kernel_model_from_json(const nlohmann::json& j) {
  if (j.value("kind", std::string()) != "kernel") throw std::invalid_argument("not a kernel model document");
  KernelModel m;
  m.cost = j.at("cost").get<double>();
  m.classes = j.at("classes").get<std::vector<int>>();
  m.retained = j.at("retained").get<std::vector<Eigen::Index>>();
  for (const auto& k : j.at("machines")) {
    BinaryKernelMachine b{k.at("positive").get<int>(), k.at("negative").get<int>(), vector_from_json(k.at("coef")),
                          k.at("bias").get<double>()};
    if (b.coef.size() != static_cast<Eigen::Index>(m.retained.size()))
      throw std::invalid_argument("kernel machine does not match retained samples");
    m.machines.push_back(std::move(b));
  }
  if (j.contains("solver")) m.stats = stats_from_json(j.at("solver"));
  return m;
}

void save_model(const LinearModel& model, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write model file " + file.string());
  out << to_json(model).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing model file " + file.string());
}

LinearModel load_linear_model(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open model file " + file.string());
  return linear_model_from_json(nlohmann::json::parse(in));
}

}  // namespace sdm
