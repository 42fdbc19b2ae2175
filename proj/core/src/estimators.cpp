#include "profilekit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "profilekit/exact_oracle.hpp"

namespace profilekit {

namespace {

NaturalEstimate skeleton(const Profile& profile, std::optional<std::uint64_t> alphabet_size, std::string method) {
  NaturalEstimate est;
  est.method = std::move(method);
  est.n = profile.length();
  est.alphabet_size = alphabet_size;
  for (const auto& e : profile.pairs()) est.prevalence[e.multiplicity] = e.prevalence;
  if (alphabet_size) {
    const std::uint64_t distinct = profile.distinct_symbols();
    if (distinct > *alphabet_size) throw std::invalid_argument("estimator: more distinct symbols than the alphabet size");
    if (*alphabet_size > distinct) est.prevalence[0] = *alphabet_size - distinct;
  }
  return est;
}

void normalize(NaturalEstimate& est) {
  const double mass = est.total_mass();
  if (!(mass > 0.0)) throw std::domain_error("estimator: zero total mass");
  for (auto& [mu, q] : est.per_class) q /= mass;
}

}  // namespace

double NaturalEstimate::q(std::uint64_t mu) const noexcept {
  auto it = per_class.find(mu);
  return it == per_class.end() ? 0.0 : it->second;
}

double NaturalEstimate::total_mass() const noexcept {
  long double total = 0;
  for (const auto& [mu, phi] : prevalence) total += static_cast<long double>(phi) * q(mu);
  return static_cast<double>(total);
}

double NaturalEstimate::entropy() const noexcept {
  long double h = 0;
  for (const auto& [mu, phi] : prevalence) {
    const double qm = q(mu);
    if (qm > 0.0) h -= static_cast<long double>(phi) * qm * std::log(qm);
  }
  return static_cast<double>(h);
}

NaturalEstimate empirical(const Profile& profile, std::optional<std::uint64_t> alphabet_size) {
  if (profile.length() == 0) throw std::invalid_argument("empirical: empty sample");
  NaturalEstimate est = skeleton(profile, alphabet_size, "empirical");
  const double n = static_cast<double>(profile.length());
  for (const auto& [mu, phi] : est.prevalence) est.per_class[mu] = static_cast<double>(mu) / n;
  return est;
}

NaturalEstimate good_turing(const Profile& profile, std::optional<std::uint64_t> alphabet_size) {
  if (profile.length() == 0) throw std::invalid_argument("good_turing: empty sample");
  NaturalEstimate est = skeleton(profile, alphabet_size, "good_turing");
  const double n = static_cast<double>(profile.length());
  for (const auto& [mu, phi] : est.prevalence) {
    double class_mass = 0.0;
    if (mu == 0) {
      class_mass = static_cast<double>(profile.prevalence(1)) / n;
    } else if (const std::uint64_t next = profile.prevalence(mu + 1); next > 0) {
      class_mass = static_cast<double>(mu + 1) * static_cast<double>(next) / n;
    } else {
      class_mass = static_cast<double>(mu) * static_cast<double>(phi) / n;
    }
    est.per_class[mu] = class_mass / static_cast<double>(phi);
  }
  normalize(est);
  return est;
}

NaturalEstimate dirichlet(const Profile& profile, double beta, std::uint64_t alphabet_size) {
  if (!(beta >= 0.0)) throw std::invalid_argument("dirichlet: beta must be >= 0");
  if (alphabet_size == 0) throw std::invalid_argument("dirichlet: alphabet size must be >= 1");
  NaturalEstimate est = skeleton(profile, alphabet_size, "dirichlet");
  const double denom = static_cast<double>(profile.length()) + beta * static_cast<double>(alphabet_size);
  if (!(denom > 0.0)) throw std::invalid_argument("dirichlet: beta = 0 requires a nonempty sample");
  for (const auto& [mu, phi] : est.prevalence) est.per_class[mu] = (static_cast<double>(mu) + beta) / denom;
  return est;
}

NaturalEstimate james_stein(const Profile& profile, std::uint64_t alphabet_size) {
  if (profile.length() == 0) throw std::invalid_argument("james_stein: empty sample");
  NaturalEstimate est = skeleton(profile, alphabet_size, "james_stein");
  const double n = static_cast<double>(profile.length());
  const double target = 1.0 / static_cast<double>(alphabet_size);
  long double sum_sq = 0, spread = 0;
  for (const auto& [mu, phi] : est.prevalence) {
    const double qhat = static_cast<double>(mu) / n;
    sum_sq += static_cast<long double>(phi) * qhat * qhat;
    spread += static_cast<long double>(phi) * (target - qhat) * (target - qhat);
  }
  double lambda = 1.0;
  if (n > 1.0 && spread > 0) {
    lambda = static_cast<double>((1.0L - sum_sq) / (static_cast<long double>(n - 1.0) * spread));
    lambda = std::clamp(lambda, 0.0, 1.0);
  }
  for (const auto& [mu, phi] : est.prevalence) {
    est.per_class[mu] = lambda * target + (1.0 - lambda) * static_cast<double>(mu) / n;
  }
  return est;
}

NaturalEstimate with_floor(const NaturalEstimate& estimate, double q_min) {
  if (!estimate.alphabet_size) throw std::invalid_argument("with_floor: requires a known alphabet");
  if (!(q_min >= 0.0)) throw std::invalid_argument("with_floor: q_min must be >= 0");
  NaturalEstimate out = estimate;
  for (const auto& [mu, phi] : out.prevalence) out.per_class[mu] = std::max(out.q(mu), q_min);
  normalize(out);
  return out;
}

double default_floor(std::uint64_t n) noexcept {
  const double nd = static_cast<double>(std::max<std::uint64_t>(n, 1));
  return 1.0 / (nd * nd * nd * nd);
}

ClassMasses class_masses(const DiscreteDistribution& p, const SampleCounts& counts) {
  std::vector<std::pair<Symbol, std::uint64_t>> seen(counts.counts().begin(), counts.counts().end());
  std::sort(seen.begin(), seen.end());
  ClassMasses out;
  long double seen_mass = 0;
  std::map<std::uint64_t, long double> acc;
  for (const auto& [label, mu] : seen) {
    if (!p.contains(label)) throw std::invalid_argument("class_masses: sampled label outside the distribution's support");
    const double px = p.probability(label);
    acc[mu] += px;
    ++out.prevalence[mu];
    seen_mass += px;
  }
  long double total = 0, neg_entropy = 0;
  for (const auto& run : p.runs()) {
    if (run.probability <= 0.0) continue;
    total += static_cast<long double>(run.probability) * run.count;
    neg_entropy += static_cast<long double>(run.count) * run.probability * std::log(run.probability);
  }
  const std::uint64_t unseen = p.support_size() - seen.size();
  if (unseen > 0) {
    out.prevalence[0] = unseen;
    acc[0] = std::max(0.0L, total - seen_mass);
  }
  for (const auto& [mu, m] : acc) out.mass[mu] = static_cast<double>(m);
  out.neg_entropy = static_cast<double>(neg_entropy);
  return out;
}

OracleResult best_natural_oracle(const DiscreteDistribution& p, const SampleCounts& counts) {
  const ClassMasses cm = class_masses(p, counts);
  OracleResult r;
  r.estimate.method = "best_natural";
  r.estimate.n = counts.length();
  r.estimate.alphabet_size = p.support_size();
  r.estimate.prevalence = cm.prevalence;
  long double cross = 0;
  for (const auto& [mu, mass] : cm.mass) {
    const double phi = static_cast<double>(cm.prevalence.at(mu));
    const double q = mass / phi;
    r.estimate.per_class[mu] = q;
    if (mass > 0.0) cross += static_cast<long double>(mass) * std::log(q);
  }
  r.min_kl = static_cast<double>(static_cast<long double>(cm.neg_entropy) - cross);
  return r;
}

double kl(const DiscreteDistribution& p, const SampleCounts& counts, const NaturalEstimate& estimate) {
  const ClassMasses cm = class_masses(p, counts);
  long double cross = 0;
  for (const auto& [mu, mass] : cm.mass) {
    if (mass <= 0.0) continue;
    const double q = estimate.q(mu);
    if (q <= 0.0) return std::numeric_limits<double>::infinity();
    cross += static_cast<long double>(mass) * std::log(q);
  }
  return static_cast<double>(static_cast<long double>(cm.neg_entropy) - cross);
}

double excess_loss(const DiscreteDistribution& p, const SampleCounts& counts, const NaturalEstimate& estimate) {
  const ClassMasses cm = class_masses(p, counts);
  long double excess = 0;
  for (const auto& [mu, mass] : cm.mass) {
    if (mass <= 0.0) continue;
    const double class_q = static_cast<double>(cm.prevalence.at(mu)) * estimate.q(mu);
    if (class_q <= 0.0) return std::numeric_limits<double>::infinity();
    excess += static_cast<long double>(mass) * std::log(mass / class_q);
  }
  return static_cast<double>(excess);
}

LossReport loss_report(const DiscreteDistribution& p, const SampleCounts& counts, const NaturalEstimate& estimate) {
  LossReport r;
  r.kl = kl(p, counts, estimate);
  r.excess_kl = excess_loss(p, counts, estimate);
  r.entropy_gap = std::abs(entropy(p) - estimate.entropy());
  const double q0 = estimate.q(0);
  long double l1 = 0;
  for (const auto& run : p.runs()) l1 += static_cast<long double>(run.count) * std::abs(run.probability - q0);
  for (const auto& [label, mu] : counts.counts()) {
    const double px = p.probability(label);
    l1 += std::abs(px - estimate.q(mu)) - std::abs(px - q0);
  }
  r.l1 = static_cast<double>(l1);
  return r;
}

std::vector<double> expand(const NaturalEstimate& estimate, const DiscreteDistribution& p, const SampleCounts& counts) {
  if (p.support_size() > 10'000'000) throw std::length_error("expand: support too large");
  std::vector<double> q(p.support_size(), estimate.q(0));
  for (const auto& [label, mu] : counts.counts()) {
    if (!p.contains(label)) throw std::invalid_argument("expand: sampled label outside the distribution's support");
    q[static_cast<std::size_t>(label - p.first_label())] = estimate.q(mu);
  }
  return q;
}

double entropy(const DiscreteDistribution& p) {
  long double h = 0;
  for (const auto& run : p.runs()) {
    if (run.probability > 0.0) h -= static_cast<long double>(run.count) * run.probability * std::log(run.probability);
  }
  return static_cast<double>(h);
}

double entropy(std::span<const double> p) {
  long double h = 0;
  for (double x : p) {
    if (x > 0.0) h -= static_cast<long double>(x) * std::log(x);
  }
  return static_cast<double>(h);
}

double entropy_gap(std::span<const double> p, std::span<const double> q) { return std::abs(entropy(p) - entropy(q)); }

double entropy_decomposition_residual(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("entropy_decomposition_residual: size mismatch");
  long double kl_pq = 0, cross = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (q[i] <= 0.0) throw std::invalid_argument("entropy_decomposition_residual: q must have full support");
    const long double lq = std::log(static_cast<long double>(q[i]));
    if (p[i] > 0.0) kl_pq += p[i] * (std::log(static_cast<long double>(p[i])) - lq);
    cross += (static_cast<long double>(p[i]) - q[i]) * lq;
  }
  const long double lhs = static_cast<long double>(entropy(q)) - entropy(p);
  return static_cast<double>(lhs - (kl_pq + cross));
}

CollisionResult collision_tester(const Profile& profile, std::uint64_t k, double epsilon) {
  const std::uint64_t n = profile.length();
  if (n < 2) throw std::invalid_argument("collision_tester: requires n >= 2");
  if (k == 0) throw std::invalid_argument("collision_tester: k must be >= 1");
  const double nd = static_cast<double>(n);
  const double collisions = static_cast<double>(profile.sum_squared_multiplicities()) - nd;
  CollisionResult r;
  r.statistic = static_cast<double>(k) * collisions / (nd * nd - nd);
  r.threshold = 1.0 + 3.0 * epsilon * epsilon / 4.0;
  r.reject = r.statistic >= r.threshold;
  return r;
}

PmlTestResult pml_uniformity_tester(const Profile& profile, std::uint64_t k, double epsilon, const PmlSolver& solver) {
  if (k < 2) throw std::invalid_argument("pml_uniformity_tester: k must be >= 2");
  const double kd = static_cast<double>(k);
  const double n = static_cast<double>(profile.length());
  PmlTestResult r;
  r.multiplicity_threshold = 3.0 * std::max(1.0, n / kd) * std::log(kd);
  r.distance_threshold = 3.0 * epsilon / (4.0 * std::sqrt(kd));
  if (static_cast<double>(profile.max_multiplicity()) >= r.multiplicity_threshold) {
    r.reject = true;
    r.by_max_multiplicity = true;
    return r;
  }
  std::vector<double> pml = solver(profile);
  std::sort(pml.begin(), pml.end(), std::greater<>());
  const std::size_t len = std::max<std::size_t>(pml.size(), k);
  long double sq = 0;
  for (std::size_t i = 0; i < len; ++i) {
    const double a = i < pml.size() ? pml[i] : 0.0;
    const double u = i < k ? 1.0 / kd : 0.0;
    sq += static_cast<long double>(a - u) * (a - u);
  }
  r.distance = static_cast<double>(std::sqrt(sq));
  r.reject = r.distance >= r.distance_threshold;
  return r;
}

ExtremumProbe local_extremum_check(const Profile& profile, std::uint64_t k, Rng& rng, std::uint32_t directions,
                                   double step) {
  if (profile.distinct_symbols() < 2) throw std::invalid_argument("local_extremum_check: profile must be non-constant");
  if (profile.distinct_symbols() > k) throw std::invalid_argument("local_extremum_check: more distinct symbols than k");
  if (directions == 0) throw std::invalid_argument("local_extremum_check: need at least one direction");
  const double kd = static_cast<double>(k);
  if (!(step > 0.0 && step * std::sqrt(kd) < 0.5 / kd)) {
    throw std::invalid_argument("local_extremum_check: step leaves the simplex");
  }

  ExtremumProbe probe;
  probe.statistic = collision_tester(profile, k, 0.0).statistic;
  probe.predicted_local_min = probe.statistic > 1.0;
  probe.directions = directions;

  const std::vector<double> uniform(k, 1.0 / kd);
  const double centre = profile_probability_direct(uniform, profile);
  std::vector<double> v(k), plus(k), minus(k);
  probe.min_second_difference = std::numeric_limits<double>::infinity();
  probe.max_second_difference = -std::numeric_limits<double>::infinity();
  for (std::uint32_t d = 0; d < directions; ++d) {
    double mean = 0.0;
    for (auto& x : v) mean += (x = rng.normal());
    mean /= kd;
    double norm = 0.0;
    for (auto& x : v) {
      x -= mean;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < k; ++i) {
      plus[i] = uniform[i] + step * v[i] / norm;
      minus[i] = uniform[i] - step * v[i] / norm;
    }
    const double second =
        (profile_probability_direct(plus, profile) + profile_probability_direct(minus, profile) - 2.0 * centre) /
        (step * step);
    probe.min_second_difference = std::min(probe.min_second_difference, second);
    probe.max_second_difference = std::max(probe.max_second_difference, second);
    if (second > 0.0) ++probe.positive_directions;
  }
  probe.probed_local_min = 2 * probe.positive_directions > directions;
  probe.agrees = probe.probed_local_min == probe.predicted_local_min;
  return probe;
}

double median_boost(std::span<const double> estimates) {
  if (estimates.empty()) throw std::invalid_argument("median_boost: no estimates");
  std::vector<double> v(estimates.begin(), estimates.end());
  const std::size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

std::uint64_t median_trick_copies(double beta, double alpha) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("median_trick_copies: beta must lie in (0, 1)");
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("median_trick_copies: alpha must lie in (0, 1/2)");
  return 4 * static_cast<std::uint64_t>(std::ceil(std::log(1.0 / beta) / std::log(1.0 / (2.0 * alpha))));
}

}  // namespace profilekit
