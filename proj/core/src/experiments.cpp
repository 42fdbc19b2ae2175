#include "profilekit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "profilekit/codec.hpp"
#include "profilekit/entropy_proxy.hpp"
#include "profilekit/estimators.hpp"
#include "profilekit/exact_oracle.hpp"
#include "profilekit/random.hpp"
#include "profilekit/sampling.hpp"

namespace profilekit {

namespace {

enum SuiteId : std::uint64_t { kConcentration = 1, kProxy = 2, kFamily = 3, kCompression = 4, kInference = 5 };

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("family: bad number '" + s + "'");
  return v;
}

std::uint64_t to_count(const std::string& s) {
  const double v = to_double(s);
  if (!(v >= 1.0) || v != std::floor(v) || v > 1e15) throw std::invalid_argument("family: bad count '" + s + "'");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> to_doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(to_double(part));
  return out;
}

double param(const FamilySpec& f, std::size_t i) {
  if (i >= f.params.size()) throw std::invalid_argument("family '" + f.text + "': missing parameter");
  return to_double(f.params[i]);
}

struct Stats {
  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> values;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    values.push_back(x);
  }
  double mean() const { return values.empty() ? 0.0 : sum / static_cast<double>(values.size()); }
  double variance() const {
    const double m = mean();
    double acc = 0.0;
    for (double x : values) acc += (x - m) * (x - m);
    return values.size() > 1 ? acc / static_cast<double>(values.size() - 1) : 0.0;
  }
  double standard_error() const {
    return values.size() > 1 ? std::sqrt(variance() / static_cast<double>(values.size())) : 0.0;
  }
  /// Standard error of the sample variance, sqrt((m4 - s^4) / T).
  double variance_standard_error() const {
    if (values.size() < 2) return 0.0;
    const double m = mean(), v = variance();
    double m4 = 0.0;
    for (double x : values) m4 += std::pow(x - m, 4);
    m4 /= static_cast<double>(values.size());
    return std::sqrt(std::max(0.0, m4 - v * v) / static_cast<double>(values.size()));
  }
};

SuiteRecord make_record(std::string tag, const std::string& family, std::uint64_t n, std::string statistic,
                        double value, std::string relation, double bound, double margin = 0.0) {
  SuiteRecord r;
  r.tag = std::move(tag);
  r.family = family;
  r.n = n;
  r.statistic = std::move(statistic);
  r.value = value;
  r.relation = std::move(relation);
  r.bound = bound;
  r.margin = margin;
  if (r.relation == "<=") {
    r.pass = value <= bound + margin;
  } else if (r.relation == ">=") {
    r.pass = value >= bound - margin;
  } else {
    r.pass = true;  // "report": informational
  }
  return r;
}

SuiteRecord failure_record(const std::string& tag, const std::string& family, std::uint64_t n, const std::exception& e) {
  SuiteRecord r;
  r.tag = tag;
  r.family = family;
  r.n = n;
  r.statistic = "error";
  r.relation = "report";
  r.pass = false;
  r.note = e.what();
  return r;
}

template <class Body>
SuiteReport run_cases(const std::string& suite, const ExperimentConfig& config, Body body) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = suite;
  report.seed = config.seed;
  report.include_timing = config.include_timing;
  std::uint64_t case_index = 0;
  for (const auto& text : config.families) {
    const FamilySpec family = parse_family(text);
    for (std::uint64_t n : config.n_grid) {
      try {
        body(report, family, n, case_index);
      } catch (const std::exception& e) {
        report.records.push_back(failure_record(suite, text, n, e));
      }
      ++case_index;
    }
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// Moves the mass of a random symbol set S (total mass <= budget) onto one
// member of S. h_W(p, q) <= 2 * mass(S) and l1(p, q) <= 2 * mass(S).
DiscreteDistribution perturb(const DiscreteDistribution& p, double budget, Rng& rng) {
  std::vector<double> q = p.dense();
  std::vector<std::size_t> order(q.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  double moved = 0.0;
  std::vector<std::size_t> chosen;
  for (std::size_t idx : order) {
    if (q[idx] <= 0.0 || moved + q[idx] > budget) continue;
    moved += q[idx];
    chosen.push_back(idx);
  }
  if (chosen.size() >= 2) {
    for (std::size_t i = 1; i < chosen.size(); ++i) q[chosen[i]] = 0.0;
    q[chosen[0]] = moved;
  }
  return DiscreteDistribution::from_probabilities(q, p.first_label());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

FamilySpec parse_family(const std::string& text) {
  FamilySpec f;
  f.text = text;
  auto parts = split(text, ':');
  if (parts.empty() || parts[0].empty()) throw std::invalid_argument("family: empty descriptor");
  f.kind = parts[0];
  f.params.assign(parts.begin() + 1, parts.end());
  static const std::map<std::string, std::pair<std::size_t, std::size_t>> arity = {
      {"uniform", {1, 1}},     {"powerlaw", {2, 2}}, {"gaussian", {1, 2}},    {"laplace", {1, 1}},
      {"exponential", {1, 1}}, {"gmix", {1, 1}},     {"histlb", {1, 1}},      {"adversarial", {1, 1}},
      {"probs", {1, 1}},       {"point", {0, 0}}};
  auto it = arity.find(f.kind);
  if (it == arity.end()) throw std::invalid_argument("family: unknown kind '" + f.kind + "'");
  if (f.params.size() < it->second.first || f.params.size() > it->second.second) {
    throw std::invalid_argument("family '" + text + "': wrong number of parameters");
  }
  return f;
}

DiscreteDistribution make_family(const FamilySpec& f, std::uint64_t n, std::uint64_t seed) {
  if (f.kind == "uniform") return make_uniform(to_count(f.params[0]));
  if (f.kind == "point") return make_uniform(1);
  if (f.kind == "powerlaw") {
    const double alpha = param(f, 0);
    if (f.params[1] == "inf") return make_power_law(alpha, std::nullopt);
    return make_power_law(alpha, to_count(f.params[1]));
  }
  if (f.kind == "gaussian") {
    const double mu = f.params.size() > 1 ? param(f, 1) : 0.0;
    return discretize(gaussian_model(mu, param(f, 0)));
  }
  if (f.kind == "laplace") return discretize(laplace_model(0.0, param(f, 0)));
  if (f.kind == "exponential") return discretize(exponential_model(param(f, 0)));
  if (f.kind == "gmix") {
    const auto sigmas = to_doubles(f.params[0]);
    std::vector<DiscreteDistribution> components;
    std::vector<double> weights(sigmas.size(), 1.0 / static_cast<double>(sigmas.size()));
    double centre = 0.0;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      if (i > 0) centre += 10.0 * (sigmas[i - 1] + sigmas[i]);
      components.push_back(discretize(gaussian_model(centre, sigmas[i])));
    }
    return mixture(components, weights);
  }
  if (f.kind == "histlb") return histogram_lower_bound_instance(to_count(f.params[0]), n);
  if (f.kind == "adversarial") {
    const double d = param(f, 0);
    const std::uint64_t s = adversarial_scale(d, n);
    Rng rng(seed);
    std::vector<std::uint8_t> flips(s + 1);
    for (auto& b : flips) b = static_cast<std::uint8_t>(rng.below(2));
    return excess_loss_adversarial_instance(d, n, flips);
  }
  if (f.kind == "probs") {
    const auto probs = to_doubles(f.params[0]);
    return DiscreteDistribution::from_probabilities(probs, 1);
  }
  throw std::invalid_argument("family: unknown kind '" + f.kind + "'");
}

double ExperimentConfig::tolerance(const std::string& key, double fallback) const {
  auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw std::invalid_argument("config: trials must be >= 1");
  if (!std::is_sorted(n_grid.begin(), n_grid.end())) throw std::invalid_argument("config: n grid must be ascending");
  for (auto n : n_grid) {
    if (n == 0) throw std::invalid_argument("config: n must be >= 1");
  }
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
  if (j.contains("families")) c.families = j.at("families").get<std::vector<std::string>>();
  if (j.contains("n_grid")) c.n_grid = j.at("n_grid").get<std::vector<std::uint64_t>>();
  if (j.contains("trials")) c.trials = j.at("trials").get<std::uint64_t>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("tolerances")) c.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
  if (j.contains("output_json")) c.output_json = j.at("output_json").get<std::string>();
  if (j.contains("output_csv")) c.output_csv = j.at("output_csv").get<std::string>();
  if (j.contains("include_timing")) c.include_timing = j.at("include_timing").get<bool>();
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"suite", c.suite},         {"families", c.families},     {"n_grid", c.n_grid},
                     {"trials", c.trials},       {"seed", c.seed},             {"tolerances", c.tolerances},
                     {"output_json", c.output_json}, {"output_csv", c.output_csv}, {"include_timing", c.include_timing}};
}

ExperimentConfig default_config(const std::string& suite) {
  ExperimentConfig c;
  c.suite = suite;
  if (suite == "concentration") {
    c.families = {"uniform:100", "powerlaw:1.5:1000", "gaussian:30"};
    c.n_grid = {10000};
    c.trials = 500;
  } else if (suite == "proxy") {
    c.families = {"uniform:100", "uniform:10000", "powerlaw:1:1000", "powerlaw:2:inf", "gaussian:30", "gaussian:300"};
    c.n_grid = {1024, 4096, 16384};
    c.trials = 4;
  } else if (suite == "family") {
    c.families = {"gaussian:10",       "gaussian:100",   "gaussian:1000",  "gmix:10,100", "powerlaw:0.8:1000",
                  "powerlaw:2:inf", "histlb:1",       "histlb:8"};
    c.n_grid = {10000, 1000000};
    c.trials = 1;
  } else if (suite == "compression") {
    c.families = {"uniform:2", "probs:0.7,0.3", "probs:0.5,0.3,0.2", "uniform:1000", "powerlaw:1.5:1000"};
    c.n_grid = {8, 1000, 100000};
    c.trials = 20;
  } else if (suite == "inference") {
    c.families = {"uniform:100", "uniform:1000", "powerlaw:1.5:1000", "gaussian:30", "adversarial:15"};
    c.n_grid = {10000, 100000};
    c.trials = 100;
  } else {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  return c;
}

std::size_t SuiteReport::passed() const noexcept {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.pass; }));
}

double SuiteReport::pass_rate() const noexcept {
  return records.empty() ? 1.0 : static_cast<double>(passed()) / static_cast<double>(records.size());
}

double frequency_margin(double frequency, std::uint64_t trials) noexcept {
  return 3.0 * std::sqrt(std::max(0.0, frequency * (1.0 - frequency)) / static_cast<double>(trials));
}

SuiteReport run_concentration_suite(const ExperimentConfig& config) {
  return run_cases("concentration", config, [&](SuiteReport& report, const FamilySpec& family, std::uint64_t n,
                                                std::uint64_t case_index) {
    const DiscreteDistribution p = make_family(family, n, derive_seed(config.seed, {kConcentration, case_index, 0}));
    const double e_n = en(p, n).value;
    const double log_n = std::log(static_cast<double>(n));
    const double root_n = std::sqrt(static_cast<double>(n));
    Stats dims;
    std::uint64_t outside = 0;
    const double gammas[] = {0.5, 1.0, 2.0};
    std::uint64_t upper[3] = {0, 0, 0};
    std::uint64_t lower = 0;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      Rng rng(derive_seed(config.seed, {kConcentration, case_index, t + 1}));
      const auto d = static_cast<double>(sample_profile(p, n, rng).dimension());
      dims.add(d);
      if (d < e_n / 2.0 - 4.0 * log_n || d > 2.0 * e_n + 3.0 * log_n) ++outside;
      for (int g = 0; g < 3; ++g) {
        if (d / (1.0 + gammas[g]) >= e_n) ++upper[g];
      }
      if (d / 0.5 <= e_n) ++lower;
    }
    const double trials = static_cast<double>(config.trials);
    const double rate = static_cast<double>(outside) / trials;
    auto rec = make_record("concentration-window", family.text, n, "violation_rate", rate, "<=", 6.0 / root_n,
                           frequency_margin(rate, config.trials));
    rec.note = "E_n=" + format_double(e_n);
    report.records.push_back(rec);
    for (int g = 0; g < 3; ++g) {
      const double f = static_cast<double>(upper[g]) / trials;
      const double gamma = gammas[g];
      const double bound = std::min(1.0, 3.0 * root_n * std::exp(-std::min(gamma * gamma, gamma) * e_n / 3.0));
      report.records.push_back(make_record("upper-tail", family.text, n, "freq_gamma_" + format_double(gamma), f,
                                           "<=", bound, frequency_margin(f, config.trials)));
    }
    const double f_low = static_cast<double>(lower) / trials;
    report.records.push_back(make_record("lower-tail", family.text, n, "freq_gamma_0.5", f_low, "<=",
                                         std::min(1.0, 3.0 * root_n * std::exp(-0.25 * e_n / 2.0)),
                                         frequency_margin(f_low, config.trials)));
    report.records.push_back(make_record("efron-stein", family.text, n, "variance", dims.variance(), "<=", dims.mean(),
                                         3.0 * dims.variance_standard_error()));
  });
}

SuiteReport run_proxy_suite(const ExperimentConfig& config) {
  const double c_lo = config.tolerance("sandwich_c_lo", 0.76);
  const double c_hi = config.tolerance("sandwich_c_hi", 2.1);
  const double lip_c = config.tolerance("lipschitz_c", 4.0);
  auto report = run_cases("proxy", config, [&](SuiteReport& report, const FamilySpec& family, std::uint64_t n,
                                               std::uint64_t case_index) {
    const DiscreteDistribution p = make_family(family, n, derive_seed(config.seed, {kProxy, case_index, 0}));
    const double nd = static_cast<double>(n);
    const double h = hs(p, nd).total;
    const double e = en(p, n).value;
    const double ratio = e / h;
    report.records.push_back(
        make_record("proxy-sandwich", family.text, n, "en_over_hs_times_sqrt_ln_n", ratio * std::sqrt(std::log(nd)), ">=", c_lo));
    report.records.push_back(make_record("proxy-sandwich", family.text, n, "en_over_hs", ratio, "<=", c_hi));
    report.records.push_back(make_record("proxy-ceiling", family.text, n, "hs", h, "<=", 3.0 * std::sqrt(nd * std::log(nd))));
    if (p.support_size() <= 1'000'000) {
      for (std::uint64_t t = 0; t < config.trials; ++t) {
        Rng rng(derive_seed(config.seed, {kProxy, case_index, t + 1}));
        const double eps = std::max(1.0 / nd, std::pow(2.0, -static_cast<double>(t + 2)));
        const DiscreteDistribution q = perturb(p, eps / 2.0, rng);
        const double hq = hs(q, nd).total;
        const double hw = weighted_hamming(p, q);
        const double l1 = l1_distance(p, q);
        if (hw > 0.0) {
          const double scale = std::sqrt(std::max(hw, 1.0 / nd) * nd);
          report.records.push_back(
              make_record("hamming-lipschitz", family.text, n, "hs_change_over_sqrt_eps_n", std::abs(h - hq) / scale, "<=", lip_c));
        }
        if (l1 > 0.0) {
          const double lo = hq / 3.0, hi = 3.0 * hq;
          const double gap = h < lo ? lo - h : (h > hi ? h - hi : 0.0);
          report.records.push_back(make_record("l1-lipschitz", family.text, n, "hs_gap_over_eps_n_2_3",
                                               gap / std::pow(l1 * nd, 2.0 / 3.0), "<=", lip_c));
        }
      }
    }
  });
  // Monotonicity and scaling over consecutive grid points with m >= 32.
  std::uint64_t case_index = 1'000'000;
  for (const auto& text : config.families) {
    const FamilySpec family = parse_family(text);
    for (std::size_t i = 0; i + 1 < config.n_grid.size(); ++i) {
      const std::uint64_t m = config.n_grid[i], n = config.n_grid[i + 1];
      if (m < 32 || m == n) continue;
      try {
        const DiscreteDistribution p = make_family(family, n, derive_seed(config.seed, {kProxy, case_index++, 0}));
        const double hm = hs(p, static_cast<double>(m)).total;
        const double hn = hs(p, static_cast<double>(n)).total;
        auto mono = make_record("monotonicity", text, n, "hs_n_minus_hs_m", hn - hm, ">=", 0.0);
        mono.note = "m=" + std::to_string(m);
        report.records.push_back(mono);
        auto scale = make_record("scaling", text, n, "hs_n", hn, "<=",
                                 hs_scale_upper(hm, static_cast<double>(m), static_cast<double>(n)));
        scale.note = "m=" + std::to_string(m);
        report.records.push_back(scale);
      } catch (const std::exception& e) {
        report.records.push_back(failure_record("scaling", text, n, e));
      }
    }
  }
  return report;
}

SuiteReport run_family_suite(const ExperimentConfig& config) {
  const double gaussian_c = config.tolerance("gaussian_c", 0.62);
  const double histogram_c = config.tolerance("histogram_c", 0.027);
  return run_cases("family", config, [&](SuiteReport& report, const FamilySpec& family, std::uint64_t n,
                                         std::uint64_t case_index) {
    const DiscreteDistribution p = make_family(family, n, derive_seed(config.seed, {kFamily, case_index, 0}));
    const double nd = static_cast<double>(n);
    const double log_n = std::log(nd);
    const double h = hs(p, nd).total;
    if (family.kind == "gaussian") {
      const double sigma = param(family, 0);
      const double mu = family.params.size() > 1 ? param(family, 1) : 0.0;
      const Moments m = moments(p);
      report.records.push_back(make_record("discretization-moments", family.text, n, "abs_mean_shift",
                                           std::abs(m.mean - mu), "<=", 0.5));
      report.records.push_back(make_record("discretization-moments", family.text, n, "variance", m.variance, ">=",
                                           sigma * sigma / 2.0 - 1.0));
      report.records.push_back(make_record("discretization-moments", family.text, n, "variance", m.variance, "<=",
                                           2.0 * sigma * sigma + 1.0));
      report.records.push_back(make_record("discretization-shape", family.text, n, "log_concave",
                                           is_log_concave(p).log_concave ? 1.0 : 0.0, ">=", 1.0));
      const double factor = log_concave_bound(sigma, nd).shape_factor;
      report.records.push_back(make_record("log-concave", family.text, n, "hs_over_factor", h / factor, "<=", gaussian_c * log_n));
      report.records.push_back(
          make_record("gaussian-lower", family.text, n, "hs_over_factor", h / factor, ">=", 1.0 / (gaussian_c * log_n)));
    } else if (family.kind == "gmix") {
      const auto sigmas = to_doubles(family.params[0]);
      const double factor = mixture_bound(sigmas, nd).shape_factor;
      report.records.push_back(make_record("mixture", family.text, n, "hs_over_factor", h / factor, "<=", gaussian_c * log_n));
    } else if (family.kind == "powerlaw") {
      const double alpha = param(family, 0);
      std::optional<double> k;
      if (family.params[1] != "inf") k = param(family, 1);
      auto rec = make_record("power-law", family.text, n, "hs", h, "<=", power_law_bound(alpha, k, nd));
      if (p.truncated_mass() > 0.0) rec.note = "truncated_mass=" + format_double(p.truncated_mass());
      report.records.push_back(rec);
    } else if (family.kind == "histlb") {
      const double t = param(family, 0);
      const double target = std::min(std::cbrt(nd * t * t * log_n), std::sqrt(nd));
      report.records.push_back(make_record("histogram", family.text, n, "hs_over_target", h / target, ">=", histogram_c));
    }
    report.records.push_back(make_record("proxy-ceiling", family.text, n, "hs", h, "<=", 3.0 * std::sqrt(nd * log_n)));
  });
}

SuiteReport run_compression_suite(const ExperimentConfig& config) {
  return run_cases("compression", config, [&](SuiteReport& report, const FamilySpec& family, std::uint64_t n,
                                              std::uint64_t case_index) {
    const DiscreteDistribution p = make_family(family, n, derive_seed(config.seed, {kCompression, case_index, 0}));
    std::uint64_t roundtrip_failures = 0, budget_failures = 0, stream_failures = 0, size_mismatches = 0;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      Rng rng(derive_seed(config.seed, {kCompression, case_index, t + 1}));
      const std::vector<Symbol> xs = sample(p, n, rng);
      const Profile batch = profile_of(xs);
      SymbolStreamEncoder<Symbol> stream;
      stream.feed_all(xs);
      if (!(stream.finalize() == batch)) ++stream_failures;
      const EncodedProfile enc = encode_block(batch);
      if (!(decode_block(enc.bytes) == batch)) ++roundtrip_failures;
      if (enc.size_bits() > encoded_size_budget_bits(batch)) ++budget_failures;
      if (enc.size_bits() != encoded_size_bits(batch)) ++size_mismatches;
    }
    report.records.push_back(make_record("codec-roundtrip", family.text, n, "failures", static_cast<double>(roundtrip_failures), "<=", 0.0));
    report.records.push_back(make_record("codec-size", family.text, n, "budget_failures", static_cast<double>(budget_failures), "<=", 0.0));
    report.records.push_back(make_record("codec-size", family.text, n, "size_mismatches", static_cast<double>(size_mismatches), "<=", 0.0));
    report.records.push_back(
        make_record("streaming-equivalence", family.text, n, "failures", static_cast<double>(stream_failures), "<=", 0.0));
    if (n <= 10 && p.positive_support_size() <= 4) {
      const ProfileDistribution dist = profile_distribution_exact(p, n);
      double expected_nats = 0.0;
      for (const auto& [profile, prob] : dist.entries) {
        expected_nats += prob * static_cast<double>(encoded_size_bits(profile)) * std::log(2.0);
      }
      report.records.push_back(make_record("entropy-limit", family.text, n, "profile_entropy",
                                           profile_entropy_exact(dist), "<=", expected_nats + 1.0));
    }
  });
}

SuiteReport run_inference_suite(const ExperimentConfig& config) {
  const double epsilon = config.tolerance("tester_epsilon", 0.5);
  return run_cases("inference", config, [&](SuiteReport& report, const FamilySpec& family, std::uint64_t n,
                                            std::uint64_t case_index) {
    const DiscreteDistribution p = make_family(family, n, derive_seed(config.seed, {kInference, case_index, 0}));
    const std::uint64_t k = p.support_size();
    std::uint64_t violations = 0;
    double max_residual = 0.0;
    Stats gt_excess, dims, collision;
    double sum_sq = 0.0;
    for (const auto& run : p.runs()) sum_sq += static_cast<double>(run.count) * run.probability * run.probability;
    for (std::uint64_t t = 0; t < config.trials; ++t) {
      Rng rng(derive_seed(config.seed, {kInference, case_index, t + 1}));
      const SampleCounts counts = sample_counts(p, n, rng);
      const Profile profile = counts.profile();
      const OracleResult oracle = best_natural_oracle(p, counts);
      const double floor = default_floor(n);
      const NaturalEstimate estimates[] = {
          with_floor(empirical(profile, k), floor), with_floor(good_turing(profile, k), floor),
          dirichlet(profile, 1.0, k), with_floor(james_stein(profile, k), floor)};
      for (const auto& est : estimates) {
        if (kl(p, counts, est) < oracle.min_kl - 1e-12) ++violations;
      }
      gt_excess.add(excess_loss(p, counts, estimates[1]));
      dims.add(static_cast<double>(profile.dimension()));
      if (k <= 100'000) {
        const auto pd = p.dense();
        const auto qd = expand(estimates[2], p, counts);
        max_residual = std::max(max_residual, std::abs(entropy_decomposition_residual(pd, qd)));
      }
      if (n >= 2) collision.add(collision_tester(profile, k, epsilon).statistic);
    }
    report.records.push_back(make_record("oracle-dominance", family.text, n, "violations", static_cast<double>(violations), "<=", 0.0));
    if (k <= 100'000) {
      report.records.push_back(make_record("entropy-decomposition", family.text, n, "max_residual", max_residual, "<=", 1e-10));
    }
    auto excess = make_record(family.kind == "adversarial" ? "adversarial-excess" : "excess-loss", family.text, n,
                              "mean_gt_excess", gt_excess.mean(), "report", dims.mean() / static_cast<double>(n));
    excess.note = "bound column is mean(D_n)/n";
    report.records.push_back(excess);
    if (n >= 2) {
      report.records.push_back(make_record("collision-identity", family.text, n, "abs_mean_T_minus_k_sum_p2",
                                           std::abs(collision.mean() - static_cast<double>(k) * sum_sq), "<=", 0.0,
                                           3.0 * collision.standard_error()));
    }
    if (family.kind == "uniform" && n >= 2) {
      // Collision tester ROC point: uniform vs. a +-epsilon two-level perturbation.
      std::vector<double> far(k, 1.0 / static_cast<double>(k));
      for (std::size_t i = 0; i + 1 < k; i += 2) {
        far[i] *= 1.0 + epsilon;
        far[i + 1] *= 1.0 - epsilon;
      }
      const DiscreteDistribution q = DiscreteDistribution::from_probabilities(far, 1);
      std::uint64_t false_reject = 0, true_reject = 0;
      for (std::uint64_t t = 0; t < config.trials; ++t) {
        Rng rng(derive_seed(config.seed, {kInference, case_index, 1'000'000 + t}));
        if (collision_tester(sample_profile(p, n, rng), k, epsilon).reject) ++false_reject;
        if (collision_tester(sample_profile(q, n, rng), k, epsilon).reject) ++true_reject;
      }
      const double trials = static_cast<double>(config.trials);
      report.records.push_back(make_record("tester-roc", family.text, n, "false_reject_rate",
                                           static_cast<double>(false_reject) / trials, "report", 0.0));
      report.records.push_back(make_record("tester-roc", family.text, n, "true_reject_rate",
                                           static_cast<double>(true_reject) / trials, "report", 0.0));
    }
  });
}

SuiteReport run_suite(const ExperimentConfig& config) {
  if (config.suite == "concentration") return run_concentration_suite(config);
  if (config.suite == "proxy") return run_proxy_suite(config);
  if (config.suite == "family") return run_family_suite(config);
  if (config.suite == "compression") return run_compression_suite(config);
  if (config.suite == "inference") return run_inference_suite(config);
  throw std::invalid_argument("unknown suite '" + config.suite + "'");
}

std::string emit_report(const SuiteReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : report.records) {
      records.push_back({{"tag", r.tag},           {"family", r.family}, {"n", r.n},
                         {"statistic", r.statistic}, {"value", r.value}, {"relation", r.relation},
                         {"bound", r.bound},       {"margin", r.margin}, {"pass", r.pass},
                         {"note", r.note}});
    }
    nlohmann::json j{{"suite", report.suite},
                     {"seed", report.seed},
                     {"records", std::move(records)},
                     {"summary", {{"cases", report.records.size()}, {"passed", report.passed()}, {"pass_rate", report.pass_rate()}}}};
    if (report.include_timing) j["wall_clock_seconds"] = report.wall_clock_seconds;
    return j.dump(2) + "\n";
  }
  std::string out = "suite,tag,family,n,statistic,value,relation,bound,margin,pass,note\n";
  for (const auto& r : report.records) {
    out += csv_escape(report.suite) + ',' + csv_escape(r.tag) + ',' + csv_escape(r.family) + ',' + std::to_string(r.n) +
           ',' + csv_escape(r.statistic) + ',' + format_double(r.value) + ',' + csv_escape(r.relation) + ',' +
           format_double(r.bound) + ',' + format_double(r.margin) + ',' + (r.pass ? "1" : "0") + ',' + csv_escape(r.note) +
           '\n';
  }
  return out;
}

void write_report(const SuiteReport& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << emit_report(report, format);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace profilekit
