#include "profilekit/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "profilekit/entropy_proxy.hpp"

namespace profilekit {

namespace {

constexpr double kMassTolerance = 1e-9;
constexpr std::uint64_t kDenseLimit = 10'000'000;
constexpr double kPowerLawTailMass = 1e-10;

std::vector<ProbabilityRun> merge_runs(std::vector<ProbabilityRun> runs) {
  std::vector<ProbabilityRun> out;
  out.reserve(runs.size());
  for (const auto& r : runs) {
    if (r.count == 0) continue;
    if (!out.empty() && out.back().probability == r.probability)
      out.back().count += r.count;
    else
      out.push_back(r);
  }
  return out;
}

// Appends 1/n^2 filler symbols carrying `mass`, plus one remainder symbol so
// the total is exact.
void append_filler(std::vector<ProbabilityRun>& runs, long double mass, std::uint64_t n) {
  if (mass <= 0) return;
  const long double n2 = static_cast<long double>(n) * static_cast<long double>(n);
  const auto filler = static_cast<std::uint64_t>(std::floor(mass * n2));
  const long double remainder = mass - static_cast<long double>(filler) / n2;
  if (filler > 0) runs.push_back({static_cast<double>(1.0L / n2), filler});
  if (remainder > 0) runs.push_back({static_cast<double>(remainder), 1});
}

// Calls fn(length, probs) over maximal label segments on which every input
// is constant, in increasing label order, covering the union of label ranges.
template <class Fn>
void for_each_common_segment(std::span<const DiscreteDistribution* const> dists, Fn&& fn) {
  std::vector<Symbol> cuts;
  for (const auto* d : dists) {
    for (std::size_t r = 0; r < d->runs().size(); ++r) cuts.push_back(d->run_first_label(r));
    cuts.push_back(d->last_label() + 1);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> probs(dists.size());
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    for (std::size_t i = 0; i < dists.size(); ++i) probs[i] = dists[i]->probability(cuts[c]);
    fn(cuts[c], static_cast<std::uint64_t>(cuts[c + 1] - cuts[c]), std::span<const double>(probs));
  }
}

}  // namespace

// --- DiscreteDistribution -------------------------------------------------------

DiscreteDistribution DiscreteDistribution::from_probabilities(std::span<const double> probs, Symbol first_label) {
  std::vector<ProbabilityRun> runs;
  runs.reserve(probs.size());
  for (double p : probs) runs.push_back({p, 1});
  return from_runs(std::move(runs), first_label);
}

DiscreteDistribution DiscreteDistribution::from_runs(std::vector<ProbabilityRun> runs, Symbol first_label) {
  long double total = 0;
  for (const auto& r : runs) {
    if (!std::isfinite(r.probability) || r.probability < 0.0 || r.probability > 1.0)
      throw std::invalid_argument("distribution: probability outside [0, 1]");
    total += static_cast<long double>(r.probability) * static_cast<long double>(r.count);
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kMassTolerance)
    throw std::invalid_argument("distribution: probabilities sum to " + std::to_string(static_cast<double>(total)));
  DiscreteDistribution d;
  d.first_label_ = first_label;
  d.runs_ = merge_runs(std::move(runs));
  if (d.runs_.empty()) throw std::invalid_argument("distribution: empty support");
  d.index_runs();
  return d;
}

void DiscreteDistribution::index_runs() {
  run_offsets_.resize(runs_.size());
  std::uint64_t offset = 0;
  for (std::size_t r = 0; r < runs_.size(); ++r) {
    run_offsets_[r] = offset;
    offset += runs_[r].count;
  }
  support_size_ = offset;
}

std::uint64_t DiscreteDistribution::positive_support_size() const noexcept {
  std::uint64_t k = 0;
  for (const auto& r : runs_)
    if (r.probability > 0.0) k += r.count;
  return k;
}

bool DiscreteDistribution::contains(Symbol label) const noexcept {
  return !runs_.empty() && label >= first_label_ && label <= last_label();
}

std::size_t DiscreteDistribution::run_of(Symbol label) const noexcept {
  const auto index = static_cast<std::uint64_t>(label - first_label_);
  auto it = std::upper_bound(run_offsets_.begin(), run_offsets_.end(), index);
  return static_cast<std::size_t>(it - run_offsets_.begin()) - 1;
}

double DiscreteDistribution::probability(Symbol label) const noexcept {
  if (!contains(label)) return 0.0;
  return runs_[run_of(label)].probability;
}

std::vector<double> DiscreteDistribution::dense() const {
  if (support_size_ > kDenseLimit) throw std::length_error("distribution: dense view limited to 10^7 symbols");
  std::vector<double> out;
  out.reserve(support_size_);
  for (const auto& r : runs_) out.insert(out.end(), r.count, r.probability);
  return out;
}

DiscreteDistribution DiscreteDistribution::with_truncated_mass(double mass) const {
  DiscreteDistribution d = *this;
  d.truncated_mass_ = mass;
  return d;
}

// --- Families -----------------------------------------------------------------

DiscreteDistribution make_uniform(std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("make_uniform: k must be >= 1");
  return DiscreteDistribution::from_runs({{1.0 / static_cast<double>(k), k}}, 1);
}

long double power_law_normalizer(double alpha, std::uint64_t k) {
  long double sum = 0;
  for (std::uint64_t i = k; i >= 1; --i) sum += std::pow(static_cast<long double>(i), -static_cast<long double>(alpha));
  return sum;
}

DiscreteDistribution make_power_law(double alpha, std::optional<std::uint64_t> k, std::uint64_t max_support) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("make_power_law: alpha must be >= 0");
  if (k && *k == 0) throw std::invalid_argument("make_power_law: k must be >= 1");
  if (!k && alpha <= 1.0) throw std::invalid_argument("make_power_law: infinite support needs alpha > 1");

  std::uint64_t support = 0;
  long double tail = 0;  // mass beyond `support`, unnormalized
  if (k) {
    support = *k;
  } else {
    // Tail beyond K is about K^(1-alpha)/(alpha-1); pick K so that it is below
    // 1e-10 of the total (total >= 1), capped at max_support.
    const double needed = std::pow(kPowerLawTailMass * (alpha - 1.0), -1.0 / (alpha - 1.0));
    support = needed >= static_cast<double>(max_support) ? max_support
                                                          : std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(needed)));
    // Euler-Maclaurin estimate of sum_{i > K} i^-alpha.
    const long double kk = static_cast<long double>(support);
    tail = std::pow(kk, 1.0L - alpha) / (alpha - 1.0L) - 0.5L * std::pow(kk, -static_cast<long double>(alpha)) +
           alpha / 12.0L * std::pow(kk, -static_cast<long double>(alpha) - 1.0L);
  }
  const long double normalizer = power_law_normalizer(alpha, support);
  std::vector<ProbabilityRun> runs;
  runs.reserve(alpha == 0.0 ? 1 : support);
  for (std::uint64_t i = 1; i <= support; ++i) {
    const long double weight = std::pow(static_cast<long double>(i), -static_cast<long double>(alpha));
    runs.push_back({static_cast<double>(weight / normalizer), 1});
  }
  auto dist = DiscreteDistribution::from_runs(std::move(runs), 1);
  return dist.with_truncated_mass(static_cast<double>(tail / (normalizer + tail)));
}

DiscreteDistribution make_histogram(std::span<const std::uint64_t> part_sizes, std::span<const double> part_masses) {
  if (part_sizes.size() != part_masses.size() || part_sizes.empty())
    throw std::invalid_argument("make_histogram: part lists must be nonempty and of equal length");
  std::vector<ProbabilityRun> runs;
  for (std::size_t i = 0; i < part_sizes.size(); ++i) {
    if (part_sizes[i] == 0) throw std::invalid_argument("make_histogram: part of size 0");
    runs.push_back({part_masses[i] / static_cast<double>(part_sizes[i]), part_sizes[i]});
  }
  return DiscreteDistribution::from_runs(std::move(runs), 1);
}

DiscreteDistribution histogram_lower_bound_instance(std::uint64_t t, std::uint64_t n) {
  if (t == 0) throw std::invalid_argument("histogram instance: t must be >= 1");
  if (n < 3) throw std::invalid_argument("histogram instance: n must be >= 3");
  const double nd = static_cast<double>(n);
  const double log_n = std::log(nd);

  if (t == 1) {
    // Uniform with its probability in I_j for j ~ n^(1/3).
    const auto j = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(std::cbrt(nd))));
    const double edge = interval_upper_edge(j, nd);
    const auto k = edge >= 1.0 ? std::uint64_t{1} : static_cast<std::uint64_t>(std::ceil(1.0 / edge));
    return DiscreteDistribution::from_runs({{1.0 / static_cast<double>(k), k}}, 1);
  }

  // Groups of ceil(j ln n) symbols with probability j^2 ln(n)/n for j in [first, last].
  auto groups = [&](std::uint64_t first, std::uint64_t last, std::vector<ProbabilityRun>& runs) {
    long double mass = 0;
    for (std::uint64_t j = first; j <= last; ++j) {
      const auto copies = static_cast<std::uint64_t>(std::ceil(static_cast<double>(j) * log_n));
      const double value = interval_upper_edge(j, nd);
      runs.push_back({value, copies});
      mass += static_cast<long double>(value) * copies;
    }
    return mass;
  };

  const double n0 = std::pow(nd, 0.25) / (2.0 * std::sqrt(log_n));
  std::vector<ProbabilityRun> group_runs;
  std::vector<ProbabilityRun> runs;
  if (static_cast<double>(t) < n0) {
    const double s_max = std::cbrt(nd / (static_cast<double>(t) * log_n * log_n)) - static_cast<double>(t);
    const auto s = s_max <= 0.0 ? std::uint64_t{0} : static_cast<std::uint64_t>(std::floor(s_max));
    const long double mass = groups(s + 1, s + t - 1, group_runs);
    if (mass > 1.0L) throw std::invalid_argument("histogram instance: group mass exceeds 1 for t=" + std::to_string(t));
    append_filler(runs, 1.0L - mass, n);
  } else {
    const auto n0_int = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(n0)));
    const long double mass = n0_int >= 2 ? groups(1, n0_int - 1, group_runs) : 0.0L;
    if (mass >= 1.0L) throw std::invalid_argument("histogram instance: group mass exceeds 1 for t=" + std::to_string(t));
    const std::uint64_t copies = t - n0_int + 1;
    runs.push_back({static_cast<double>((1.0L - mass) / copies), copies});
  }
  runs.insert(runs.end(), group_runs.begin(), group_runs.end());
  return DiscreteDistribution::from_runs(std::move(runs), 1);
}

std::uint64_t adversarial_scale(double target_dimension, std::uint64_t n) {
  if (n < 3) throw std::invalid_argument("adversarial instance: n must be >= 3");
  const double s = std::sqrt(std::max(0.0, target_dimension) / std::log(static_cast<double>(n)));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(s)));
}

DiscreteDistribution excess_loss_adversarial_instance(double target_dimension, std::uint64_t n,
                                                      std::span<const std::uint8_t> coin_flips) {
  const std::uint64_t s = adversarial_scale(target_dimension, n);
  if (coin_flips.size() < s + 1)
    throw std::invalid_argument("adversarial instance: need " + std::to_string(s + 1) + " coin flips");
  const long double nd = static_cast<long double>(n);
  const long double log_n = std::log(nd);
  std::vector<ProbabilityRun> group_runs;
  long double mass = 0;
  for (std::uint64_t i = s; i <= 2 * s; ++i) {
    const long double id = static_cast<long double>(i);
    const auto copies = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(id * log_n)));
    long double scaled = id * id * log_n * log_n;
    if (coin_flips[i - s]) scaled += id * log_n;
    const long double value = scaled / nd;
    group_runs.push_back({static_cast<double>(value), copies});
    mass += value * copies;
  }
  if (mass > 1.0L)
    throw std::invalid_argument("adversarial instance: total mass exceeds 1 (target dimension too large for n)");
  std::vector<ProbabilityRun> runs;
  append_filler(runs, 1.0L - mass, n);
  runs.insert(runs.end(), group_runs.begin(), group_runs.end());
  return DiscreteDistribution::from_runs(std::move(runs), 1);
}

// --- Continuous models ----------------------------------------------------------

double ContinuousModel::interval_mass(double a, double b) const {
  if (survival && cdf(a) > 0.5) return survival(a) - survival(b);
  return cdf(b) - cdf(a);
}

ContinuousModel gaussian_model(double mean, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_model: sigma must be > 0");
  const double scale = sigma * std::sqrt(2.0);
  ContinuousModel m;
  m.cdf = [=](double x) { return 0.5 * std::erfc(-(x - mean) / scale); };
  m.survival = [=](double x) { return 0.5 * std::erfc((x - mean) / scale); };
  m.pdf = [=](double x) {
    const double z = (x - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
  };
  m.mean = mean;
  m.variance = sigma * sigma;
  return m;
}

ContinuousModel laplace_model(double location, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace_model: scale must be > 0");
  ContinuousModel m;
  m.cdf = [=](double x) {
    return x < location ? 0.5 * std::exp((x - location) / scale) : 1.0 - 0.5 * std::exp(-(x - location) / scale);
  };
  m.survival = [=](double x) {
    return x >= location ? 0.5 * std::exp(-(x - location) / scale) : 1.0 - 0.5 * std::exp((x - location) / scale);
  };
  m.pdf = [=](double x) { return std::exp(-std::fabs(x - location) / scale) / (2.0 * scale); };
  m.mean = location;
  m.variance = 2.0 * scale * scale;
  return m;
}

ContinuousModel exponential_model(double rate, double origin) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential_model: rate must be > 0");
  ContinuousModel m;
  m.cdf = [=](double x) { return x <= origin ? 0.0 : -std::expm1(-rate * (x - origin)); };
  m.survival = [=](double x) { return x <= origin ? 1.0 : std::exp(-rate * (x - origin)); };
  m.pdf = [=](double x) { return x < origin ? 0.0 : rate * std::exp(-rate * (x - origin)); };
  m.mean = origin + 1.0 / rate;
  m.variance = 1.0 / (rate * rate);
  return m;
}

std::int64_t nearest_integer(double x) noexcept { return static_cast<std::int64_t>(std::ceil(x - 0.5)); }

DiscreteDistribution discretize(const ContinuousModel& model, double tail_epsilon, std::uint64_t max_range) {
  if (!model.cdf) throw std::invalid_argument("discretize: model has no cdf");
  if (!(tail_epsilon > 0.0 && tail_epsilon < 1.0)) throw std::invalid_argument("discretize: tail_epsilon in (0, 1)");

  auto checked_cdf = [&](double x) {
    const double v = model.cdf(x);
    if (!(v >= -1e-15 && v <= 1.0 + 1e-15)) throw std::invalid_argument("discretize: cdf leaves [0, 1]");
    return v;
  };
  auto cell = [&](std::int64_t z) {
    const double a = static_cast<double>(z) - 0.5;
    checked_cdf(a);
    checked_cdf(a + 1.0);
    const double mass = model.interval_mass(a, a + 1.0);
    if (mass < -1e-15) throw std::invalid_argument("discretize: cdf is decreasing");
    return std::max(0.0, mass);
  };
  auto left_tail = [&](std::int64_t lo) { return checked_cdf(static_cast<double>(lo) - 0.5); };
  auto right_tail = [&](std::int64_t hi) {
    const double x = static_cast<double>(hi) + 0.5;
    return model.survival ? model.survival(x) : 1.0 - checked_cdf(x);
  };

  // Climb from the cell containing the mean to a local mode.
  std::int64_t z = nearest_integer(model.mean);
  double pz = cell(z);
  for (std::uint64_t steps = 0; steps < max_range; ++steps) {
    if (double up = cell(z + 1); up > pz) {
      ++z;
      pz = up;
    } else if (double down = cell(z - 1); down > pz) {
      --z;
      pz = down;
    } else {
      break;
    }
  }

  std::vector<double> left;   // cells z-1, z-2, ... (reversed at the end)
  std::vector<double> right;  // cells z, z+1, ...
  right.push_back(pz);
  std::int64_t lo = z, hi = z;
  double next_left = cell(lo - 1), next_right = cell(hi + 1);
  while (left_tail(lo) + right_tail(hi) > tail_epsilon) {
    if (static_cast<std::uint64_t>(hi - lo + 1) >= max_range)
      throw std::invalid_argument("discretize: support window exceeds max_range");
    if (next_left >= next_right && next_left > 0.0) {
      left.push_back(next_left);
      --lo;
      next_left = cell(lo - 1);
    } else if (next_right > 0.0) {
      right.push_back(next_right);
      ++hi;
      next_right = cell(hi + 1);
    } else {
      break;  // remaining tail mass is not representable in double
    }
  }
  std::vector<double> probs(left.rbegin(), left.rend());
  probs.insert(probs.end(), right.begin(), right.end());
  long double total = 0;
  for (double p : probs) total += p;
  for (double& p : probs) p = static_cast<double>(p / total);
  auto dist = DiscreteDistribution::from_probabilities(probs, lo);
  return dist.with_truncated_mass(static_cast<double>(1.0L - total));
}

// --- Shape and moments ----------------------------------------------------------

LogConcavity is_log_concave(const DiscreteDistribution& p) {
  const auto runs = p.runs();
  std::size_t first = 0, last = runs.size();
  while (first < runs.size() && runs[first].probability == 0.0) ++first;
  while (last > first && runs[last - 1].probability == 0.0) --last;
  if (first == last) return {false, std::nullopt};
  for (std::size_t r = first; r < last; ++r)
    if (runs[r].probability == 0.0) return {false, p.run_first_label(r)};

  const Symbol lo = p.run_first_label(first);
  const Symbol hi = p.run_first_label(last - 1) + static_cast<Symbol>(runs[last - 1].count) - 1;
  auto check = [&](Symbol x) {
    if (x <= lo || x >= hi) return true;
    const double px = p.probability(x);
    return px * px >= p.probability(x - 1) * p.probability(x + 1) * (1.0 - 1e-12);
  };
  // Inside a run the inequality is an equality; only run edges can fail.
  for (std::size_t r = first; r < last; ++r) {
    const Symbol start = p.run_first_label(r);
    const Symbol end = start + static_cast<Symbol>(runs[r].count) - 1;
    if (!check(start)) return {false, start};
    if (end != start && !check(end)) return {false, end};
  }
  return {true, std::nullopt};
}

bool is_unimodal(const DiscreteDistribution& p) {
  std::vector<double> values;
  for (const auto& r : p.runs()) values.push_back(r.probability);
  while (!values.empty() && values.back() == 0.0) values.pop_back();
  auto begin = std::find_if(values.begin(), values.end(), [](double v) { return v > 0.0; });
  constexpr double kRel = 1e-12;
  bool falling = false;
  for (auto it = begin; it != values.end() && std::next(it) != values.end(); ++it) {
    const double a = *it, b = *std::next(it);
    if (b < a * (1.0 - kRel)) {
      falling = true;
    } else if (b > a * (1.0 + kRel) && falling) {
      return false;
    }
  }
  return true;
}

Moments moments(const DiscreteDistribution& p) {
  long double mean = 0;
  for (std::size_t r = 0; r < p.runs().size(); ++r) {
    const long double c = p.runs()[r].count;
    const long double z0 = p.run_first_label(r);
    mean += p.runs()[r].probability * (c * z0 + c * (c - 1) / 2);
  }
  long double variance = 0;
  for (std::size_t r = 0; r < p.runs().size(); ++r) {
    const long double c = p.runs()[r].count;
    const long double d = static_cast<long double>(p.run_first_label(r)) - mean;
    const long double s1 = c * (c - 1) / 2;
    const long double s2 = (c - 1) * c * (2 * c - 1) / 6;
    variance += p.runs()[r].probability * (c * d * d + 2 * d * s1 + s2);
  }
  return {static_cast<double>(mean), static_cast<double>(variance)};
}

DiscreteDistribution mixture(std::span<const DiscreteDistribution> components, std::span<const double> weights) {
  if (components.empty() || components.size() != weights.size())
    throw std::invalid_argument("mixture: need one weight per component");
  long double total = 0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture: negative weight");
    total += w;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kMassTolerance)
    throw std::invalid_argument("mixture: weights must sum to 1");

  std::vector<const DiscreteDistribution*> ptrs;
  for (const auto& c : components) ptrs.push_back(&c);
  std::vector<ProbabilityRun> runs;
  Symbol first = 0;
  bool have_first = false;
  for_each_common_segment(std::span<const DiscreteDistribution* const>(ptrs),
                          [&](Symbol start, std::uint64_t length, std::span<const double> probs) {
                            if (!have_first) {
                              first = start;
                              have_first = true;
                            }
                            long double v = 0;
                            for (std::size_t i = 0; i < probs.size(); ++i) v += weights[i] * probs[i];
                            runs.push_back({static_cast<double>(v), length});
                          });
  return DiscreteDistribution::from_runs(std::move(runs), first);
}

double l1_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const DiscreteDistribution* ptrs[] = {&p, &q};
  long double total = 0;
  for_each_common_segment(std::span<const DiscreteDistribution* const>(ptrs),
                          [&](Symbol, std::uint64_t length, std::span<const double> v) {
                            total += static_cast<long double>(std::fabs(v[0] - v[1])) * length;
                          });
  return static_cast<double>(total);
}

double weighted_hamming(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const DiscreteDistribution* ptrs[] = {&p, &q};
  long double total = 0;
  for_each_common_segment(std::span<const DiscreteDistribution* const>(ptrs),
                          [&](Symbol, std::uint64_t length, std::span<const double> v) {
                            if (v[0] != v[1]) total += static_cast<long double>(std::max(v[0], v[1])) * length;
                          });
  return static_cast<double>(total);
}

}  // namespace profilekit
