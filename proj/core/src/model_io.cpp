#include "colcfg/model_io.hpp"

#include <fstream>

#include "colcfg/errors.hpp"
#include "json_util.hpp"

namespace colcfg {

namespace {

using detail::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw ValidationError(std::string("model: bad shape for ") + what);
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError(std::string("model: bad shape for ") + what);
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index size, const char* what) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != size) throw ValidationError(std::string("model: bad size for ") + what);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), size);
}

ScaleOutFeatures theta_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  if (values.size() != 4) throw ValidationError("model: theta must have 4 entries");
  ScaleOutFeatures theta{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (values[i] < 0.0) throw ValidationError("model: parametric coefficients must be >= 0");
    theta[i] = values[i];
  }
  return theta;
}

json params_to_json(const TrainedModel& model) {
  if (const auto* p = std::get_if<ParametricParams>(&model.params)) return json{{"theta", p->theta}};
  if (const auto* p = std::get_if<SimilarityParams>(&model.params)) {
    return json{{"theta", p->theta},
                {"query", detail::to_json(p->query)},
                {"weights",
                 {{"w_job", p->weights.w_job},
                  {"w_dataset", p->weights.w_dataset},
                  {"w_machine", p->weights.w_machine},
                  {"local_boost", p->weights.local_boost}}},
                {"rows_used", p->rows_used}};
  }
  const auto& p = std::get<NeuralParams>(model.params);
  return json{{"seed", p.seed},
              {"encoding_dim", p.autoencoder.input_dim()},
              {"latent_dim", p.autoencoder.latent_dim()},
              {"hidden_dim", p.hidden_dim()},
              {"enc_w", matrix_to_json(p.autoencoder.enc_w)},
              {"enc_b", vector_to_json(p.autoencoder.enc_b)},
              {"dec_w", matrix_to_json(p.autoencoder.dec_w)},
              {"dec_b", vector_to_json(p.autoencoder.dec_b)},
              {"w1", matrix_to_json(p.head.w1)},
              {"b1", vector_to_json(p.head.b1)},
              {"w2", vector_to_json(p.head.w2)},
              {"b2", p.head.b2},
              {"feature_mean", vector_to_json(p.feature_mean)},
              {"feature_scale", vector_to_json(p.feature_scale)},
              {"target_mean", p.target_mean},
              {"target_scale", p.target_scale}};
}

NeuralParams neural_from_json(const json& j) {
  NeuralParams p;
  p.seed = j.at("seed").get<std::uint64_t>();
  const auto d = j.at("encoding_dim").get<Eigen::Index>();
  const auto l = j.at("latent_dim").get<Eigen::Index>();
  const auto h = j.at("hidden_dim").get<Eigen::Index>();
  p.autoencoder.enc_w = matrix_from_json(j.at("enc_w"), l, d, "enc_w");
  p.autoencoder.enc_b = vector_from_json(j.at("enc_b"), l, "enc_b");
  p.autoencoder.dec_w = matrix_from_json(j.at("dec_w"), d, l, "dec_w");
  p.autoencoder.dec_b = vector_from_json(j.at("dec_b"), d, "dec_b");
  p.head.w1 = matrix_from_json(j.at("w1"), h, l + 4, "w1");
  p.head.b1 = vector_from_json(j.at("b1"), h, "b1");
  p.head.w2 = vector_from_json(j.at("w2"), h, "w2");
  p.head.b2 = j.at("b2").get<double>();
  p.feature_mean = vector_from_json(j.at("feature_mean"), 4, "feature_mean");
  p.feature_scale = vector_from_json(j.at("feature_scale"), 4, "feature_scale");
  p.target_mean = j.at("target_mean").get<double>();
  p.target_scale = j.at("target_scale").get<double>();
  return p;
}

}  // namespace

std::string model_to_json_line(const TrainedModel& model) {
  if (!model.trained()) throw ValidationError("cannot serialize an untrained model");
  json j = {{"format", "colcfg.model"},
            {"version", kModelFormatVersion},
            {"kind", std::string(to_string(model.kind))},
            {"params", params_to_json(model)},
            {"training_fingerprint", model.training_fingerprint},
            {"val_error", {{"mape", model.val_error.mape}, {"mae", model.val_error.mae}}}};
  return j.dump();
}

TrainedModel model_from_json_line(std::string_view line) {
  const auto j = detail::parse_json(line, "model");
  try {
    if (j.value("format", std::string{}) != "colcfg.model") throw ValidationError("not a colcfg model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ValidationError("unsupported model format version " + std::to_string(version));
    }
    TrainedModel model;
    model.kind = parse_model_kind(j.at("kind").get<std::string>());
    const auto& params = j.at("params");
    switch (model.kind) {
      case ModelKind::parametric_nnls:
        model.params = ParametricParams{theta_from_json(params.at("theta"))};
        break;
      case ModelKind::similarity_weighted: {
        SimilarityParams p;
        p.theta = theta_from_json(params.at("theta"));
        p.query = detail::context_from_json(params.at("query"));
        const auto& w = params.at("weights");
        p.weights.w_job = w.at("w_job").get<double>();
        p.weights.w_dataset = w.at("w_dataset").get<double>();
        p.weights.w_machine = w.at("w_machine").get<double>();
        p.weights.local_boost = w.at("local_boost").get<double>();
        p.rows_used = params.at("rows_used").get<std::size_t>();
        model.params = std::move(p);
        break;
      }
      case ModelKind::neural:
        model.params = neural_from_json(params);
        break;
    }
    model.training_fingerprint = j.at("training_fingerprint").get<std::string>();
    model.val_error.mape = j.at("val_error").at("mape").get<double>();
    model.val_error.mae = j.at("val_error").at("mae").get<double>();
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << model_to_json_line(model) << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return model_from_json_line(line);
  }
  throw ValidationError("empty model file " + path.string());
}

}  // namespace colcfg
