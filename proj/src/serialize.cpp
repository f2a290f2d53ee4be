#include "latreg/serialize.hpp"

#include "latreg/errors.hpp"

#include <cstdio>
#include <cstdlib>

namespace latreg {

using nlohmann::json;

std::string double_to_string(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double double_from_string(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw IoError("cannot parse float: " + s);
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(double_to_string(v[i]));
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  Eigen::Index i = 0;
  for (const auto& e : j) v[i++] = double_from_string(e.get<std::string>());
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index jj = 0; jj < m.cols(); ++jj) arr.push_back(double_to_string(m(i, jj)));
  return arr;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw IoError("matrix entry count mismatch");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index idx = 0;
  for (const auto& e : j) {
    m(idx / cols, idx % cols) = double_from_string(e.get<std::string>());
    ++idx;
  }
  return m;
}

json basis_to_json(const LatticeBasis& basis) {
  return json{{"d", basis.dim()}, {"entries", matrix_to_json(basis.matrix())}};
}

LatticeBasis basis_from_json(const json& j) {
  const int d = j.at("d").get<int>();
  return LatticeBasis(matrix_from_json(j.at("entries"), d, d));
}

json bdd_instance_to_json(const BinaryBddInstance& inst) {
  json j{{"d", inst.basis.dim()},
         {"entries", matrix_to_json(inst.basis.matrix())},
         {"target", vector_to_json(inst.target)},
         {"alpha", double_to_string(inst.alpha)}};
  if (inst.hidden) {
    json z = json::array();
    for (Eigen::Index i = 0; i < inst.hidden->z.size(); ++i) z.push_back(inst.hidden->z[i]);
    j["hidden"] = json{{"z", z}, {"e", vector_to_json(inst.hidden->e)}};
  } else {
    j["hidden"] = nullptr;
  }
  return j;
}

BinaryBddInstance bdd_instance_from_json(const json& j) {
  const int d = j.at("d").get<int>();
  BinaryBddInstance inst{LatticeBasis(matrix_from_json(j.at("entries"), d, d)),
                         vector_from_json(j.at("target")),
                         double_from_string(j.at("alpha").get<std::string>()),
                         std::nullopt, std::nullopt};
  if (!j.at("hidden").is_null()) {
    const auto& h = j.at("hidden");
    HiddenWitness w;
    w.z.resize(h.at("z").size());
    Eigen::Index i = 0;
    for (const auto& e : h.at("z")) w.z[i++] = e.get<int>();
    w.e = vector_from_json(h.at("e"));
    inst.hidden = std::move(w);
  }
  return inst;
}

json slr_instance_to_json(const SlrInstance& inst) {
  return json{{"m", inst.x.rows()},
              {"n", inst.x.cols()},
              {"k", inst.k},
              {"delta", double_to_string(inst.delta)},
              {"X", matrix_to_json(inst.x)},
              {"y", vector_to_json(inst.y)},
              {"provenance", inst.provenance}};
}

SlrInstance slr_instance_from_json(const json& j) {
  const auto rows = j.at("m").get<Eigen::Index>();
  const auto cols = j.at("n").get<Eigen::Index>();
  SlrInstance inst;
  inst.x = matrix_from_json(j.at("X"), rows, cols);
  inst.y = vector_from_json(j.at("y"));
  inst.delta = double_from_string(j.at("delta").get<std::string>());
  inst.k = j.at("k").get<int>();
  inst.provenance = j.at("provenance").get<std::string>();
  if (inst.y.size() != rows) throw IoError("y length mismatch");
  return inst;
}

json transcript_to_json(const ReductionTranscript& tr) {
  return json{{"params",
               json{{"lambda1_hat", double_to_string(tr.params.lambda1_hat)},
                    {"delta", double_to_string(tr.params.delta)},
                    {"gamma", double_to_string(tr.params.gamma)},
                    {"Z", double_to_string(tr.params.z_scale)},
                    {"m", tr.params.m},
                    {"m1", tr.params.m1},
                    {"shape", json{{"d", tr.params.shape.d}, {"k", tr.params.shape.k}}}}},
              {"R", matrix_to_json(tr.gaussian_rows)},
              {"flood_noise", vector_to_json(tr.flood_noise)},
              {"sigma_flood", double_to_string(tr.sigma_flood)},
              {"rng_seed", tr.rng_seed},
              {"basis_hash", tr.basis_hash},
              {"target_hash", tr.target_hash}};
}

ReductionTranscript transcript_from_json(const json& j) {
  ReductionTranscript tr;
  const auto& p = j.at("params");
  tr.params.lambda1_hat = double_from_string(p.at("lambda1_hat").get<std::string>());
  tr.params.delta = double_from_string(p.at("delta").get<std::string>());
  tr.params.gamma = double_from_string(p.at("gamma").get<std::string>());
  tr.params.z_scale = double_from_string(p.at("Z").get<std::string>());
  tr.params.m = p.at("m").get<int>();
  tr.params.m1 = p.at("m1").get<int>();
  tr.params.shape = GadgetShape::make(p.at("shape").at("d").get<int>(),
                                      p.at("shape").at("k").get<int>());
  tr.gaussian_rows = matrix_from_json(j.at("R"), tr.params.m1, tr.params.shape.d);
  tr.flood_noise = vector_from_json(j.at("flood_noise"));
  tr.sigma_flood = double_from_string(j.at("sigma_flood").get<std::string>());
  tr.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  tr.basis_hash = j.at("basis_hash").get<std::uint64_t>();
  tr.target_hash = j.at("target_hash").get<std::uint64_t>();
  return tr;
}

json clwe_sample_to_json(const ClweSample& sample, bool include_secrets) {
  json j{{"m", sample.a.rows()},
         {"n", sample.a.cols()},
         {"A", matrix_to_json(sample.a)},
         {"b", vector_to_json(sample.b)},
         {"gamma_clwe", double_to_string(sample.gamma_clwe)},
         {"beta", double_to_string(sample.beta)},
         {"provenance", sample.provenance}};
  if (include_secrets && sample.hidden_secret)
    j["hidden_s"] = vector_to_json(*sample.hidden_secret);
  else
    j["hidden_s"] = nullptr;
  return j;
}

ClweSample clwe_sample_from_json(const json& j) {
  ClweSample s;
  const auto rows = j.at("m").get<Eigen::Index>();
  const auto cols = j.at("n").get<Eigen::Index>();
  s.a = matrix_from_json(j.at("A"), rows, cols);
  s.b = vector_from_json(j.at("b"));
  s.gamma_clwe = double_from_string(j.at("gamma_clwe").get<std::string>());
  s.beta = double_from_string(j.at("beta").get<std::string>());
  s.provenance = j.at("provenance").get<std::string>();
  if (j.contains("hidden_s") && !j.at("hidden_s").is_null())
    s.hidden_secret = vector_from_json(j.at("hidden_s"));
  return s;
}

json solve_result_to_json(const SolveResult& result) {
  return json{{"theta", vector_to_json(result.theta)},
              {"objective", double_to_string(result.objective)},
              {"sweeps_used", result.sweeps_used},
              {"converged", result.converged}};
}

}  // namespace latreg
