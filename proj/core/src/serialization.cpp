#include "profilekit/serialization.hpp"

#include <stdexcept>

namespace profilekit {

using nlohmann::json;

void to_json(json& j, const Profile& profile) {
  json pairs = json::array();
  for (const auto& e : profile.pairs()) pairs.push_back({e.multiplicity, e.prevalence});
  j = json{{"n", profile.length()}, {"pairs", std::move(pairs)}};
}

void from_json(const json& j, Profile& profile) {
  std::vector<ProfileEntry> pairs;
  for (const auto& pair : j.at("pairs")) {
    if (!pair.is_array() || pair.size() != 2) throw std::invalid_argument("profile JSON: pairs must be [mu, phi]");
    pairs.push_back({pair[0].get<std::uint64_t>(), pair[1].get<std::uint64_t>()});
  }
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].multiplicity <= pairs[i - 1].multiplicity) {
      throw std::invalid_argument("profile JSON: multiplicities must be strictly increasing");
    }
  }
  profile = Profile::from_pairs(std::move(pairs));
  if (j.contains("n") && j.at("n").get<std::uint64_t>() != profile.length()) {
    throw std::invalid_argument("profile JSON: n does not equal sum of mu * phi");
  }
}

void to_json(json& j, const DiscreteDistribution& p) {
  if (p.support_size() <= 1'000'000) {
    json support = json::array();
    for (Symbol x = p.first_label(); x <= p.last_label(); ++x) support.push_back(x);
    j = json{{"support", std::move(support)}, {"probs", p.dense()}};
  } else {
    json runs = json::array();
    for (const auto& run : p.runs()) runs.push_back({run.probability, run.count});
    j = json{{"first_label", p.first_label()}, {"runs", std::move(runs)}};
  }
  if (p.truncated_mass() > 0.0) j["truncated_mass"] = p.truncated_mass();
}

void from_json(const json& j, DiscreteDistribution& p) {
  if (j.contains("runs")) {
    std::vector<ProbabilityRun> runs;
    for (const auto& r : j.at("runs")) runs.push_back({r.at(0).get<double>(), r.at(1).get<std::uint64_t>()});
    p = DiscreteDistribution::from_runs(std::move(runs), j.value("first_label", Symbol{0}));
    return;
  }
  const auto probs = j.at("probs").get<std::vector<double>>();
  Symbol first = 0;
  if (j.contains("support")) {
    const auto& support = j.at("support");
    if (support.size() != probs.size()) throw std::invalid_argument("distribution JSON: support/probs length mismatch");
    if (!support.empty()) {
      first = support[0].get<Symbol>();
      for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i].get<Symbol>() != first + static_cast<Symbol>(i)) {
          throw std::invalid_argument("distribution JSON: integer support must be consecutive");
        }
      }
    }
  }
  p = DiscreteDistribution::from_probabilities(probs, first);
  if (j.contains("truncated_mass")) p = p.with_truncated_mass(j.at("truncated_mass").get<double>());
}

DiscreteDistribution distribution_from_json_labels(const json& j, std::vector<std::string>* labels) {
  const auto probs = j.at("probs").get<std::vector<double>>();
  if (labels) {
    labels->clear();
    if (j.contains("support")) {
      for (const auto& s : j.at("support")) labels->push_back(s.is_string() ? s.get<std::string>() : s.dump());
      if (labels->size() != probs.size()) throw std::invalid_argument("distribution JSON: support/probs length mismatch");
    } else {
      for (std::size_t i = 0; i < probs.size(); ++i) labels->push_back(std::to_string(i));
    }
  }
  return DiscreteDistribution::from_probabilities(probs, 0);
}

void to_json(json& j, const HsReport& report) {
  json terms = json::array();
  for (const auto& t : report.terms) {
    terms.push_back({{"j", t.j}, {"count", t.count}, {"cap", t.cap}, {"term", t.term}});
  }
  j = json{{"n", report.n}, {"total", report.total}, {"degenerate", report.degenerate}, {"terms", std::move(terms)}};
}

void to_json(json& j, const EnReport& report) {
  j = json{{"value", report.value},
           {"truncation_error_bound", report.truncation_error_bound},
           {"window_lo", report.window_lo},
           {"window_hi", report.window_hi}};
}

void to_json(json& j, const ProfileDistribution& dist) {
  json entries = json::array();
  for (const auto& [profile, prob] : dist.entries) entries.push_back({{"profile", profile}, {"probability", prob}});
  j = json{{"n", dist.n}, {"k", dist.k}, {"entries", std::move(entries)}};
}

void to_json(json& j, const NaturalEstimate& estimate) {
  json classes = json::array();
  for (const auto& [mu, phi] : estimate.prevalence) {
    classes.push_back({{"mu", mu}, {"phi", phi}, {"q", estimate.q(mu)}});
  }
  j = json{{"method", estimate.method}, {"n", estimate.n}, {"classes", std::move(classes)}};
  if (estimate.alphabet_size) j["alphabet_size"] = *estimate.alphabet_size;
}

void to_json(json& j, const LossReport& report) {
  j = json{{"kl", report.kl}, {"l1", report.l1}, {"entropy_gap", report.entropy_gap}, {"excess_kl", report.excess_kl}};
}

}  // namespace profilekit
