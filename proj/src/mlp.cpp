#include "locodyn/mlp.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "locodyn/errors.hpp"

namespace locodyn {

using nlohmann::json;

int Mlp::param_count() const {
  int count = 0;
  for (int l = 0; l < num_layers(); ++l)
    count += static_cast<int>(weights[l].size() + biases[l].size());
  return count;
}

Mlp net_init(uint64_t seed, const MlpConfig& cfg) {
  if (cfg.sizes.size() < 2) throw ConfigError("network needs at least one layer");
  Mlp net;
  net.cfg = cfg;
  std::mt19937_64 rng(seed);
  for (size_t l = 0; l + 1 < cfg.sizes.size(); ++l) {
    const int in = cfg.sizes[l];
    const int out = cfg.sizes[l + 1];
    // fan-in scaled uniform: U(-1/sqrt(in), 1/sqrt(in))
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd W(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) W(r, c) = u(rng);
    net.weights.push_back(std::move(W));
    net.biases.push_back(Eigen::VectorXd::Zero(out));
  }
  net.in_mean = Eigen::VectorXd::Zero(cfg.sizes.front());
  net.in_std = Eigen::VectorXd::Ones(cfg.sizes.front());
  net.out_mean = Eigen::VectorXd::Zero(cfg.sizes.back());
  net.out_std = Eigen::VectorXd::Ones(cfg.sizes.back());
  return net;
}

void fit_normalization(Mlp& net, const Eigen::MatrixXd& inputs,
                       const Eigen::MatrixXd& outputs) {
  if (inputs.cols() != net.input_dim() || outputs.cols() != net.output_dim())
    throw InvalidParameterError("normalization data has wrong dimensions");
  if (inputs.rows() < 2) throw InvalidParameterError("need at least 2 samples");
  const auto stats = [](const Eigen::MatrixXd& m, Eigen::VectorXd& mean,
                        Eigen::VectorXd& std) {
    mean = m.colwise().mean();
    Eigen::MatrixXd centered = m.rowwise() - mean.transpose();
    std = (centered.array().square().colwise().sum() / (m.rows() - 1))
              .sqrt()
              .matrix();
    for (int i = 0; i < std.size(); ++i)
      if (std[i] < 1e-10) std[i] = 1.0;  // constant feature
  };
  stats(inputs, net.in_mean, net.in_std);
  stats(outputs, net.out_mean, net.out_std);
}

namespace {

inline double leaky(double x, double slope) { return x >= 0.0 ? x : slope * x; }
inline double leaky_grad(double x, double slope) { return x >= 0.0 ? 1.0 : slope; }

}  // namespace

Eigen::VectorXd net_forward_cached(const Mlp& net, const Eigen::VectorXd& input,
                                   MlpCache& cache) {
  if (input.size() != net.input_dim())
    throw InvalidParameterError("network input has wrong dimension");
  const int L = net.num_layers();
  cache.pre.resize(L);
  cache.act.resize(L);
  cache.input_norm =
      (input - net.in_mean).cwiseQuotient(net.in_std);

  Eigen::VectorXd h = cache.input_norm;
  for (int l = 0; l < L; ++l) {
    cache.pre[l] = net.weights[l] * h + net.biases[l];
    if (l + 1 < L) {
      h = cache.pre[l].unaryExpr(
          [&](double x) { return leaky(x, net.cfg.leaky_slope); });
    } else {
      h = cache.pre[l];  // linear output layer
    }
    cache.act[l] = h;
  }
  cache.valid = true;
  return net.out_mean + net.out_std.cwiseProduct(h);
}

Eigen::VectorXd net_forward(const Mlp& net, const Eigen::VectorXd& input) {
  MlpCache cache;
  return net_forward_cached(net, input, cache);
}

void MlpGrad::init_like(const Mlp& net) {
  dW.clear();
  db.clear();
  for (int l = 0; l < net.num_layers(); ++l) {
    dW.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    db.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
}

void MlpGrad::set_zero() {
  for (auto& m : dW) m.setZero();
  for (auto& v : db) v.setZero();
}

void MlpGrad::add(const MlpGrad& other, double scale) {
  for (size_t l = 0; l < dW.size(); ++l) {
    dW[l] += scale * other.dW[l];
    db[l] += scale * other.db[l];
  }
}

double MlpGrad::squared_norm() const {
  double s = 0.0;
  for (const auto& m : dW) s += m.squaredNorm();
  for (const auto& v : db) s += v.squaredNorm();
  return s;
}

void net_backward(const Mlp& net, const MlpCache& cache,
                  const Eigen::VectorXd& dL_dout, MlpGrad& grad) {
  if (!cache.valid) throw InvalidParameterError("net_backward: missing forward cache");
  if (dL_dout.size() != net.output_dim())
    throw InvalidParameterError("net_backward: gradient has wrong dimension");
  if (grad.dW.empty()) grad.init_like(net);

  const int L = net.num_layers();
  // chain through output de-normalization
  Eigen::VectorXd delta = net.out_std.cwiseProduct(dL_dout);
  for (int l = L - 1; l >= 0; --l) {
    if (l + 1 < L) {
      // activation gradient of layer l's output
      for (int i = 0; i < delta.size(); ++i)
        delta[i] *= leaky_grad(cache.pre[l][i], net.cfg.leaky_slope);
    }
    const Eigen::VectorXd& input_act = l == 0 ? cache.input_norm : cache.act[l - 1];
    grad.dW[l].noalias() += delta * input_act.transpose();
    grad.db[l] += delta;
    if (l > 0) delta = net.weights[l].transpose() * delta;
  }
}

void SgdOptimizer::step(Mlp& net, const MlpGrad& grad) {
  if (!initialized) {
    velocity.init_like(net);
    initialized = true;
  }
  double scale = 1.0;
  const double norm = std::sqrt(grad.squared_norm());
  if (clip_norm > 0.0 && norm > clip_norm) scale = clip_norm / norm;
  for (int l = 0; l < net.num_layers(); ++l) {
    velocity.dW[l] = momentum * velocity.dW[l] - learning_rate * scale * grad.dW[l];
    velocity.db[l] = momentum * velocity.db[l] - learning_rate * scale * grad.db[l];
    net.weights[l] += velocity.dW[l];
    net.biases[l] += velocity.db[l];
  }
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const int rows = static_cast<int>(j.size());
  const int cols = rows > 0 ? static_cast<int>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

}  // namespace

void save_checkpoint(const Mlp& net, const std::string& path) {
  json j;
  j["schema"] = "locodyn.checkpoint.v1";
  j["sizes"] = net.cfg.sizes;
  j["leaky_slope"] = net.cfg.leaky_slope;
  json layers = json::array();
  for (int l = 0; l < net.num_layers(); ++l) {
    json layer;
    layer["weights"] = matrix_to_json(net.weights[l]);
    layer["biases"] = vector_to_json(net.biases[l]);
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  j["in_mean"] = vector_to_json(net.in_mean);
  j["in_std"] = vector_to_json(net.in_std);
  j["out_mean"] = vector_to_json(net.out_mean);
  j["out_std"] = vector_to_json(net.out_std);

  std::ofstream out(path);
  if (!out) throw DataFormatError("cannot write checkpoint: " + path);
  out << j.dump(1) << "\n";
}

Mlp load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataFormatError("malformed checkpoint " + path + ": " + e.what());
  }
  if (j.value("schema", "") != "locodyn.checkpoint.v1")
    throw DataFormatError("unsupported checkpoint schema in " + path);

  Mlp net;
  net.cfg.sizes = j.at("sizes").get<std::vector<int>>();
  net.cfg.leaky_slope = j.at("leaky_slope").get<double>();
  for (const json& layer : j.at("layers")) {
    net.weights.push_back(matrix_from_json(layer.at("weights")));
    net.biases.push_back(vector_from_json(layer.at("biases")));
  }
  net.in_mean = vector_from_json(j.at("in_mean"));
  net.in_std = vector_from_json(j.at("in_std"));
  net.out_mean = vector_from_json(j.at("out_mean"));
  net.out_std = vector_from_json(j.at("out_std"));
  if (static_cast<int>(net.weights.size()) + 1 !=
      static_cast<int>(net.cfg.sizes.size()))
    throw DataFormatError("checkpoint layer count mismatch in " + path);
  return net;
}

}  // namespace locodyn
