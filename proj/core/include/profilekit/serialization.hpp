#pragma once

#include <nlohmann/json.hpp>

#include "profilekit/distribution.hpp"
#include "profilekit/entropy_proxy.hpp"
#include "profilekit/estimators.hpp"
#include "profilekit/exact_oracle.hpp"
#include "profilekit/profile.hpp"

namespace profilekit {

// Canonical forms:
//   Profile              {"n": 5, "pairs": [[1, 1], [2, 2]]}
//   DiscreteDistribution {"support": [...], "probs": [...]}  (supports up to 10^6)
//                        {"first_label": 1, "runs": [[p, count], ...]}  (any size)

void to_json(nlohmann::json& j, const Profile& profile);
void from_json(const nlohmann::json& j, Profile& profile);

/// Dense form when the support has at most 10^6 labels, run form otherwise.
void to_json(nlohmann::json& j, const DiscreteDistribution& p);
/// Accepts both forms. Dense supports must be consecutive integers; use
/// distribution_from_json_labels for arbitrary labels.
void from_json(const nlohmann::json& j, DiscreteDistribution& p);

/// Dense form with arbitrary (string or integer) labels: the distribution is
/// relabeled 0..k-1 in the given order and the original labels are returned.
DiscreteDistribution distribution_from_json_labels(const nlohmann::json& j, std::vector<std::string>* labels = nullptr);

void to_json(nlohmann::json& j, const HsReport& report);
void to_json(nlohmann::json& j, const EnReport& report);
void to_json(nlohmann::json& j, const ProfileDistribution& dist);
void to_json(nlohmann::json& j, const NaturalEstimate& estimate);
void to_json(nlohmann::json& j, const LossReport& report);

}  // namespace profilekit
