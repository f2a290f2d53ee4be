#pragma once

#include "latreg/clwe.hpp"
#include "latreg/lattice.hpp"
#include "latreg/reduction.hpp"
#include "latreg/solvers.hpp"

#include <json.hpp>

#include <string>

namespace latreg {

/// Doubles travel as 17-significant-digit decimal strings so that a
/// round-trip through text reproduces the exact bit pattern.
std::string double_to_string(double v);
double double_from_string(const std::string& s);

nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);  // row-major entries
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols);

nlohmann::json basis_to_json(const LatticeBasis& basis);
LatticeBasis basis_from_json(const nlohmann::json& j);

nlohmann::json bdd_instance_to_json(const BinaryBddInstance& inst);
BinaryBddInstance bdd_instance_from_json(const nlohmann::json& j);

nlohmann::json slr_instance_to_json(const SlrInstance& inst);
SlrInstance slr_instance_from_json(const nlohmann::json& j);

nlohmann::json transcript_to_json(const ReductionTranscript& tr);
ReductionTranscript transcript_from_json(const nlohmann::json& j);

nlohmann::json clwe_sample_to_json(const ClweSample& sample, bool include_secrets);
ClweSample clwe_sample_from_json(const nlohmann::json& j);

nlohmann::json solve_result_to_json(const SolveResult& result);

}  // namespace latreg
