#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "profilekit/codec.hpp"
#include "profilekit/distribution.hpp"
#include "profilekit/entropy_proxy.hpp"
#include "profilekit/estimators.hpp"
#include "profilekit/exact_oracle.hpp"
#include "profilekit/experiments.hpp"
#include "profilekit/profile.hpp"
#include "profilekit/random.hpp"
#include "profilekit/sampling.hpp"
#include "profilekit/serialization.hpp"

using nlohmann::json;
using namespace profilekit;

namespace {

constexpr std::uint64_t kDefaultSeed = 0x5EED;

// Precedence: --seed, then PROFILEKIT_SEED, then the config file, then the built-in default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::optional<std::uint64_t> config_seed = {}) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PROFILEKIT_SEED"); env && *env) {
    std::size_t used = 0;
    const std::string text(env);
    const std::uint64_t value = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument("PROFILEKIT_SEED is not an integer: " + text);
    return value;
  }
  return config_seed.value_or(kDefaultSeed);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

// Input stream for a path; "-" is stdin.
class Input {
 public:
  explicit Input(const std::string& path, bool binary = false) {
    if (path == "-") return;
    file_ = std::make_unique<std::ifstream>(path, binary ? std::ios::binary : std::ios::in);
    if (!*file_) throw std::runtime_error("cannot open " + path);
  }
  std::istream& get() { return file_ ? *file_ : std::cin; }

 private:
  std::unique_ptr<std::ifstream> file_;
};

class Output {
 public:
  explicit Output(const std::string& path, bool binary = false) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
    if (!*file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void write_text(const std::string& path, const std::string& text) {
  Output out(path);
  out.get() << text;
  if (text.empty() || text.back() != '\n') out.get() << '\n';
}

// Distribution selection shared by the verbs that take one.
struct FamilyOptions {
  std::string family;
  std::string dist_file;
  std::optional<double> alpha, sigma, mu, scale, rate;
  std::optional<std::uint64_t> k, t;

  void attach(CLI::App* app) {
    app->add_option("--family,--p", family,
                    "family kind (uniform, powerlaw, gaussian, laplace, exponential, histlb, adversarial, point) "
                    "or a full descriptor such as powerlaw:1.5:1000");
    app->add_option("--dist-file", dist_file, "distribution JSON {\"support\": [...], \"probs\": [...]}");
    app->add_option("--alpha", alpha, "power-law exponent");
    app->add_option("--k", k, "support size");
    app->add_option("--sigma", sigma, "Gaussian standard deviation");
    app->add_option("--mu", mu, "Gaussian mean");
    app->add_option("--scale", scale, "Laplace scale");
    app->add_option("--rate", rate, "exponential rate");
    app->add_option("--t", t, "histogram pieces (histlb) or dimension (adversarial)");
  }

  bool given() const { return !family.empty() || !dist_file.empty(); }

  std::string descriptor() const {
    if (family.find(':') != std::string::npos || family == "point") return family;
    auto need = [&](const auto& value, const char* flag) {
      if (!value) throw std::invalid_argument("--family " + family + " needs " + flag);
      std::ostringstream s;
      s << *value;
      return s.str();
    };
    if (family == "uniform") return "uniform:" + need(k, "--k");
    if (family == "powerlaw") return "powerlaw:" + need(alpha, "--alpha") + ":" + (k ? std::to_string(*k) : "inf");
    if (family == "gaussian") return "gaussian:" + need(sigma, "--sigma") + (mu ? ":" + need(mu, "--mu") : "");
    if (family == "laplace") return "laplace:" + need(scale, "--scale");
    if (family == "exponential") return "exponential:" + need(rate, "--rate");
    if (family == "histlb") return "histlb:" + need(t, "--t");
    if (family == "adversarial") return "adversarial:" + need(t, "--t");
    throw std::invalid_argument("unknown family " + family);
  }

  DiscreteDistribution build(std::uint64_t n, std::uint64_t seed, std::vector<std::string>* labels = nullptr) const {
    if (!dist_file.empty()) return distribution_from_json_labels(read_json_file(dist_file), labels);
    if (family.empty()) throw std::invalid_argument("a distribution is required: --family or --dist-file");
    return make_family(parse_family(descriptor()), n, seed);
  }
};

void add_format(CLI::App* app, std::string& format) {
  app->add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
}

// ---- verbs ------------------------------------------------------------------

struct CompressArgs {
  std::string in = "-", out = "-";
  bool bytes = false;
};

void run_compress(const CompressArgs& a) {
  Input input(a.in, a.bytes);
  std::istream& in = input.get();
  EncodedProfile encoded;
  if (a.bytes) {
    SymbolStreamEncoder<char> enc;
    for (char c; in.get(c);) enc.feed(c);
    encoded = enc.encoder().finalize_encoded();
  } else {
    SymbolStreamEncoder<std::string> enc;
    for (std::string token; in >> token;) enc.feed(token);
    encoded = enc.encoder().finalize_encoded();
  }
  Output output(a.out, true);
  output.get().write(reinterpret_cast<const char*>(encoded.bytes.data()), static_cast<std::streamsize>(encoded.bytes.size()));
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  Input input(path, true);
  std::istream& in = input.get();
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string profile_csv(const Profile& p) {
  std::string csv = "multiplicity,prevalence\n";
  for (const auto& e : p.pairs()) csv += std::to_string(e.multiplicity) + "," + std::to_string(e.prevalence) + "\n";
  return csv;
}

struct DecompressArgs {
  std::string in = "-", out = "-", format = "json";
};

void run_decompress(const DecompressArgs& a) {
  const Profile p = decode_block(read_bytes(a.in));
  write_text(a.out, a.format == "csv" ? profile_csv(p) : json(p).dump(2));
}

struct StatsArgs {
  std::string in = "-", out = "-", format = "json";
  bool prfl = false, bytes = false;
};

void run_stats(const StatsArgs& a) {
  Profile p;
  if (a.prfl) {
    p = decode_block(read_bytes(a.in));
  } else if (a.bytes) {
    const auto raw = read_bytes(a.in);
    SymbolStreamEncoder<std::uint8_t> enc;
    enc.feed_all(raw);
    p = enc.finalize();
  } else {
    Input input(a.in);
    SymbolStreamEncoder<std::string> enc;
    for (std::string token; input.get() >> token;) enc.feed(token);
    p = enc.finalize();
  }
  const std::uint64_t bits = encoded_size_bits(p), budget = encoded_size_budget_bits(p);
  if (a.format == "csv") {
    write_text(a.out, "n,dimension,max_dimension,encoded_bits,budget_bits\n" + std::to_string(p.length()) + "," +
                          std::to_string(p.dimension()) + "," + std::to_string(max_dimension_bound(p.length())) + "," +
                          std::to_string(bits) + "," + std::to_string(budget));
    return;
  }
  std::uint64_t symbols = 0;
  for (const auto& e : p.pairs()) symbols += e.prevalence;
  const json j{{"n", p.length()},
               {"dimension", p.dimension()},
               {"distinct_symbols", symbols},
               {"max_dimension", max_dimension_bound(p.length())},
               {"encoded_bits", bits},
               {"budget_bits", budget},
               {"profile", p}};
  write_text(a.out, j.dump(2));
}

struct HsArgs {
  FamilyOptions family;
  double n = 0;
  std::string out = "-", format = "json";
  std::optional<std::uint64_t> seed;
};

void run_hs(const HsArgs& a) {
  const auto p = a.family.build(static_cast<std::uint64_t>(a.n), resolve_seed(a.seed));
  const HsReport r = hs(p, a.n);
  if (a.format == "csv") {
    std::string csv = "j,count,cap,term\n";
    for (const auto& t : r.terms) {
      csv += std::to_string(t.j) + "," + json(t.count).dump() + "," + json(t.cap).dump() + "," + json(t.term).dump() + "\n";
    }
    write_text(a.out, csv);
  } else {
    write_text(a.out, json(r).dump(2));
  }
}

struct EnArgs {
  FamilyOptions family;
  std::uint64_t n = 0;
  double tol = 1e-6;
  bool with_hs = false;
  std::string out = "-";
  std::optional<std::uint64_t> seed;
};

void run_en(const EnArgs& a) {
  const auto p = a.family.build(a.n, resolve_seed(a.seed));
  json j = en(p, a.n, a.tol);
  if (a.with_hs) {
    const double h = hs(p, static_cast<double>(a.n)).total;
    j["hs"] = h;
    j["ratio"] = j.at("value").get<double>() / h;
  }
  write_text(a.out, j.dump(2));
}

struct OracleArgs {
  FamilyOptions family;
  std::uint64_t n = 0;
  std::uint64_t max_states = 10'000'000;
  std::string out = "-";
  std::optional<std::uint64_t> seed;
};

void run_oracle(const OracleArgs& a) {
  const auto p = a.family.build(a.n, resolve_seed(a.seed));
  const ProfileDistribution dist = profile_distribution_exact(p, a.n, a.max_states);
  const DimensionMoments moments = dimension_moments_exact(dist);
  const json j{{"n", a.n},
               {"k", dist.k},
               {"profile_entropy", profile_entropy_exact(dist)},
               {"dimension_mean", moments.mean},
               {"dimension_variance", moments.variance},
               {"distribution", dist}};
  write_text(a.out, j.dump(2));
}

// Sample from --sample (tokens must be support labels) or drawn from the distribution.
SampleCounts load_or_draw_sample(const std::string& sample_path, const DiscreteDistribution& p,
                                 const std::vector<std::string>& labels, std::uint64_t n, Rng& rng) {
  if (sample_path.empty()) {
    if (n == 0) throw std::invalid_argument("--n is required when no --sample is given");
    return sample_counts(p, n, rng);
  }
  std::unordered_map<std::string, Symbol> index;
  if (labels.empty()) {
    for (Symbol s = p.first_label(); s <= p.last_label(); ++s) index[std::to_string(s)] = s;
  } else {
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = p.first_label() + static_cast<Symbol>(i);
  }
  Input input(sample_path);
  SampleCounts counts;
  for (std::string token; input.get() >> token;) {
    const auto it = index.find(token);
    if (it == index.end()) throw std::invalid_argument("sample symbol '" + token + "' is not in the distribution's support");
    counts.add(it->second);
  }
  return counts;
}

struct EstimateArgs {
  FamilyOptions family;
  std::string method = "gt", alpha_file, sample, out = "-";
  std::uint64_t n = 0;
  double beta = 1.0;
  bool no_floor = false;
  std::optional<std::uint64_t> seed;
};

void run_estimate(EstimateArgs a) {
  if (!a.alpha_file.empty()) a.family.dist_file = a.alpha_file;
  const std::uint64_t seed = resolve_seed(a.seed);
  std::vector<std::string> labels;
  const auto p = a.family.build(a.n, derive_seed(seed, {0}), &labels);
  Rng rng(derive_seed(seed, {1}));
  const SampleCounts counts = load_or_draw_sample(a.sample, p, labels, a.n, rng);
  if (counts.length() == 0) throw std::invalid_argument("empty sample");
  const Profile profile = counts.profile();
  const std::uint64_t k = p.support_size();
  NaturalEstimate est;
  if (a.method == "empirical") {
    est = empirical(profile, k);
  } else if (a.method == "gt") {
    est = good_turing(profile, k);
  } else if (a.method == "dirichlet") {
    est = dirichlet(profile, a.beta, k);
  } else {
    est = james_stein(profile, k);
  }
  if (!a.no_floor && a.method != "dirichlet") est = with_floor(est, default_floor(counts.length()));
  const OracleResult oracle = best_natural_oracle(p, counts);
  const json j{{"method", a.method},
               {"n", counts.length()},
               {"alphabet_size", k},
               {"loss", loss_report(p, counts, est)},
               {"oracle_min_kl", oracle.min_kl},
               {"estimate", est}};
  write_text(a.out, j.dump(2));
}

struct UniformityArgs {
  FamilyOptions family;
  std::string mode = "collision", sample, out = "-";
  std::uint64_t n = 0;
  std::optional<std::uint64_t> alphabet;
  double epsilon = 0.5;
  std::uint64_t grid = 40;
  std::optional<std::uint64_t> seed;
};

void run_uniformity(const UniformityArgs& a) {
  Profile profile;
  std::uint64_t k = a.alphabet.value_or(0);
  if (!a.sample.empty()) {
    Input input(a.sample);
    SymbolStreamEncoder<std::string> enc;
    for (std::string token; input.get() >> token;) enc.feed(token);
    profile = enc.finalize();
  } else {
    if (!a.family.given() || a.n == 0) throw std::invalid_argument("give --sample, or --family/--dist-file with --n");
    const std::uint64_t seed = resolve_seed(a.seed);
    const auto p = a.family.build(a.n, derive_seed(seed, {0}));
    Rng rng(derive_seed(seed, {1}));
    profile = sample_profile(p, a.n, rng);
    if (k == 0) k = p.support_size();
  }
  if (k == 0) throw std::invalid_argument("--alphabet is required with --sample");
  json j{{"mode", a.mode}, {"n", profile.length()}, {"alphabet_size", k}, {"epsilon", a.epsilon}};
  if (a.mode == "collision") {
    const CollisionResult r = collision_tester(profile, k, a.epsilon);
    j["statistic"] = r.statistic;
    j["threshold"] = r.threshold;
    j["reject"] = r.reject;
  } else {
    const std::uint64_t grid = a.grid;
    const PmlTestResult r = pml_uniformity_tester(profile, k, a.epsilon, [k, grid](const Profile& phi) {
      return pml_brute(phi, k, grid).probabilities;
    });
    j["reject"] = r.reject;
    j["by_max_multiplicity"] = r.by_max_multiplicity;
    j["multiplicity_threshold"] = r.multiplicity_threshold;
    j["distance"] = r.distance;
    j["distance_threshold"] = r.distance_threshold;
  }
  write_text(a.out, j.dump(2));
}

struct SimulateArgs {
  std::string suite, config, out = "-", format = "csv", json_out, csv_out;
  std::vector<std::string> families;
  std::vector<std::uint64_t> n_grid;
  std::optional<std::uint64_t> trials, seed;
  std::vector<std::string> tolerances;
  bool timing = false;
};

int run_simulate(const SimulateArgs& a) {
  ExperimentConfig config = default_config(a.suite);
  std::optional<std::uint64_t> config_seed;
  if (!a.config.empty()) {
    json j = read_json_file(a.config);
    if (!j.contains("suite")) j["suite"] = a.suite;
    config = j.get<ExperimentConfig>();
    if (config.suite != a.suite) {
      throw std::invalid_argument("config is for suite '" + config.suite + "' but simulate was given '" + a.suite + "'");
    }
    if (j.contains("seed")) config_seed = config.seed;
  }
  config.seed = resolve_seed(a.seed, config_seed);
  if (!a.families.empty()) config.families = a.families;
  if (!a.n_grid.empty()) config.n_grid = a.n_grid;
  if (a.trials) config.trials = *a.trials;
  for (const auto& kv : a.tolerances) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--tolerance expects key=value, got " + kv);
    config.tolerances[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  if (!a.json_out.empty()) config.output_json = a.json_out;
  if (!a.csv_out.empty()) config.output_csv = a.csv_out;
  if (a.timing) config.include_timing = true;
  config.validate();

  const SuiteReport report = run_suite(config);
  if (!config.output_json.empty()) write_report(report, config.output_json, ReportFormat::json);
  if (!config.output_csv.empty()) write_report(report, config.output_csv, ReportFormat::csv);
  if (config.output_json.empty() && config.output_csv.empty()) {
    write_text(a.out, emit_report(report, a.format == "json" ? ReportFormat::json : ReportFormat::csv));
  }
  std::cerr << report.suite << ": " << report.passed() << "/" << report.records.size() << " records pass\n";
  return report.passed() == report.records.size() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"profilekit: sample profiles, their entropy proxies, codecs and estimators"};
  app.require_subcommand(1);

  CompressArgs compress;
  auto* c = app.add_subcommand("compress", "encode the profile of a symbol stream as a PRFL v1 block");
  c->add_option("--in", compress.in, "whitespace-separated symbols ('-' for stdin)");
  c->add_option("--out", compress.out, "PRFL output ('-' for stdout)");
  c->add_flag("--bytes", compress.bytes, "treat every input byte as a symbol");

  DecompressArgs decompress;
  auto* d = app.add_subcommand("decompress", "decode a PRFL v1 block to its profile");
  d->add_option("--in", decompress.in, "PRFL input ('-' for stdin)");
  d->add_option("--out", decompress.out);
  add_format(d, decompress.format);

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "profile statistics of a symbol stream or PRFL block");
  s->add_option("--in", stats.in);
  s->add_option("--out", stats.out);
  s->add_flag("--prfl", stats.prfl, "input is a PRFL block");
  s->add_flag("--bytes", stats.bytes, "treat every input byte as a symbol");
  add_format(s, stats.format);

  HsArgs hs_args;
  auto* h = app.add_subcommand("hs", "the interval proxy H^S_n(p)");
  hs_args.family.attach(h);
  h->add_option("--n", hs_args.n, "sample size")->required()->check(CLI::PositiveNumber);
  h->add_option("--out", hs_args.out);
  h->add_option("--seed", hs_args.seed);
  add_format(h, hs_args.format);

  EnArgs en_args;
  auto* e = app.add_subcommand("en", "the Poissonized expected dimension E_n(p)");
  en_args.family.attach(e);
  e->add_option("--n", en_args.n, "sample size")->required()->check(CLI::PositiveNumber);
  e->add_option("--tol", en_args.tol, "truncation tolerance");
  e->add_flag("--with-hs", en_args.with_hs, "also report H^S_n and E_n / H^S_n");
  e->add_option("--out", en_args.out);
  e->add_option("--seed", en_args.seed);

  OracleArgs oracle;
  auto* o = app.add_subcommand("oracle", "exact profile distribution by enumeration (small n and k)");
  oracle.family.attach(o);
  o->add_option("--n", oracle.n, "sample size")->required();
  o->add_option("--max-states", oracle.max_states, "enumeration guard");
  o->add_option("--out", oracle.out);
  o->add_option("--seed", oracle.seed);

  EstimateArgs estimate;
  auto* est = app.add_subcommand("estimate", "fit a natural estimator and report its losses against the truth");
  estimate.family.attach(est);
  est->add_option("--method", estimate.method)->check(CLI::IsMember({"gt", "empirical", "dirichlet", "js"}));
  est->add_option("--alpha-file", estimate.alpha_file, "true distribution JSON (same as --dist-file)");
  est->add_option("--sample", estimate.sample, "sample file of support labels; drawn from the distribution if absent");
  est->add_option("--n", estimate.n, "sample size to draw");
  est->add_option("--beta", estimate.beta, "Dirichlet pseudo-count");
  est->add_flag("--no-floor", estimate.no_floor, "leave unseen symbols at zero probability");
  est->add_option("--out", estimate.out);
  est->add_option("--seed", estimate.seed);

  UniformityArgs uniformity;
  auto* u = app.add_subcommand("test-uniformity", "collision or PML uniformity tester");
  uniformity.family.attach(u);
  u->add_option("--mode", uniformity.mode)->check(CLI::IsMember({"collision", "pml"}));
  u->add_option("--sample", uniformity.sample, "sample file of whitespace-separated symbols");
  u->add_option("--n", uniformity.n, "sample size to draw");
  u->add_option("--alphabet", uniformity.alphabet, "alphabet size k (defaults to the distribution's support)");
  u->add_option("--epsilon", uniformity.epsilon, "distance parameter");
  u->add_option("--grid", uniformity.grid, "PML search grid cells");
  u->add_option("--out", uniformity.out);
  u->add_option("--seed", uniformity.seed);

  SimulateArgs simulate;
  auto* sim = app.add_subcommand("simulate", "run a verification suite");
  sim->add_option("suite", simulate.suite)
      ->required()
      ->check(CLI::IsMember({"concentration", "proxy", "family", "compression", "inference"}));
  sim->add_option("--config", simulate.config, "JSON config; flags override its fields");
  sim->add_option("--families", simulate.families, "family descriptors");
  sim->add_option("--n-grid", simulate.n_grid, "ascending sample sizes");
  sim->add_option("--trials", simulate.trials);
  sim->add_option("--seed", simulate.seed);
  sim->add_option("--tolerance", simulate.tolerances, "key=value tolerance override");
  sim->add_option("--json", simulate.json_out, "write the JSON report here");
  sim->add_option("--csv", simulate.csv_out, "write the CSV report here");
  sim->add_flag("--timing", simulate.timing, "include wall-clock time in the report");
  sim->add_option("--out", simulate.out, "report destination when neither --json nor --csv is given");
  add_format(sim, simulate.format);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c) run_compress(compress);
    if (*d) run_decompress(decompress);
    if (*s) run_stats(stats);
    if (*h) run_hs(hs_args);
    if (*e) run_en(en_args);
    if (*o) run_oracle(oracle);
    if (*est) run_estimate(estimate);
    if (*u) run_uniformity(uniformity);
    if (*sim) return run_simulate(simulate);
  } catch (const DecodeError& err) {
    std::cerr << "profilekit: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "profilekit: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
