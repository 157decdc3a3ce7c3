#ifndef COIL_SERIALIZE_HPP
#define COIL_SERIALIZE_HPP

#include <json.hpp>
#include <string>

#include "coil/io.hpp"
#include "coil/vae.hpp"

namespace coil {

using nlohmann::json;

namespace detail {

inline json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline MatrixXd matrix_from_json(const json& rows, Eigen::Index nr,
                                 Eigen::Index nc, const char* name) {
  if (static_cast<Eigen::Index>(rows.size()) != nr)
    throw std::invalid_argument(std::string("bad row count for ") + name);
  MatrixXd m(nr, nc);
  for (Eigen::Index r = 0; r < nr; ++r) {
    const json& row = rows.at(r);
    if (static_cast<Eigen::Index>(row.size()) != nc)
      throw std::invalid_argument(std::string("bad column count for ") + name);
    for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

inline json vector_to_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline VectorXd vector_from_json(const json& arr, Eigen::Index n,
                                 const char* name) {
  if (static_cast<Eigen::Index>(arr.size()) != n)
    throw std::invalid_argument(std::string("bad length for ") + name);
  VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = arr.at(i).get<double>();
  return v;
}

}  // namespace detail

inline constexpr const char* kVaeModelSchema = "coil-vae-model/1";

inline json vae_to_json(const VaeModel& model) {
  json j;
  j["schema"] = kVaeModelSchema;
  j["input_dim"] = model.arch.input_dim;
  j["latent_dim"] = model.arch.latent_dim;
  j["hidden_dim"] = model.arch.hidden_dim;
  j["final_loss"] = model.final_loss;
  j["training_seed"] = model.training_seed;
  j["epochs_trained"] = model.epochs_trained;
  j["weights"] = {
      {"w_enc", detail::matrix_to_json(model.w_enc)},
      {"b_enc", detail::vector_to_json(model.b_enc)},
      {"w_mu", detail::matrix_to_json(model.w_mu)},
      {"b_mu", detail::vector_to_json(model.b_mu)},
      {"w_logvar", detail::matrix_to_json(model.w_logvar)},
      {"b_logvar", detail::vector_to_json(model.b_logvar)},
      {"w_dec", detail::matrix_to_json(model.w_dec)},
      {"b_dec", detail::vector_to_json(model.b_dec)},
      {"w_out", detail::matrix_to_json(model.w_out)},
      {"b_out", detail::vector_to_json(model.b_out)},
  };
  return j;
}

inline VaeModel vae_from_json(const json& j) {
  if (j.at("schema").get<std::string>() != kVaeModelSchema)
    throw std::invalid_argument("unsupported model schema");
  VaeModel model;
  model.arch.input_dim = j.at("input_dim").get<int>();
  model.arch.latent_dim = j.at("latent_dim").get<int>();
  model.arch.hidden_dim = j.at("hidden_dim").get<int>();
  model.arch.validate();
  model.final_loss = j.at("final_loss").get<double>();
  model.training_seed = j.at("training_seed").get<std::uint64_t>();
  model.epochs_trained = j.at("epochs_trained").get<int>();
  const json& w = j.at("weights");
  const int d = model.arch.input_dim, l = model.arch.latent_dim,
            h = model.arch.hidden_dim;
  model.w_enc = detail::matrix_from_json(w.at("w_enc"), h, d, "w_enc");
  model.b_enc = detail::vector_from_json(w.at("b_enc"), h, "b_enc");
  model.w_mu = detail::matrix_from_json(w.at("w_mu"), l, h, "w_mu");
  model.b_mu = detail::vector_from_json(w.at("b_mu"), l, "b_mu");
  model.w_logvar = detail::matrix_from_json(w.at("w_logvar"), l, h, "w_logvar");
  model.b_logvar = detail::vector_from_json(w.at("b_logvar"), l, "b_logvar");
  model.w_dec = detail::matrix_from_json(w.at("w_dec"), h, l, "w_dec");
  model.b_dec = detail::vector_from_json(w.at("b_dec"), h, "b_dec");
  model.w_out = detail::matrix_from_json(w.at("w_out"), d, h, "w_out");
  model.b_out = detail::vector_from_json(w.at("b_out"), d, "b_out");
  return model;
}

inline void save_vae(const VaeModel& model, const std::string& path) {
  write_text_file(path, vae_to_json(model).dump(2) + "\n");
}

inline VaeModel load_vae(const std::string& path) {
  return vae_from_json(json::parse(read_text_file(path)));
}

}  // namespace coil

#endif
