// frostman: generators, coverings, gauges, and certification as
// reproducible command-line runs. Exit codes: 0 ok, 2 hypothesis
// violated, 3 precondition failure, 4 decay violation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "frostman/frostman.hpp"
#include "frostman/json_io.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kExitHypothesis = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitDecay = 4;

using frostman::io::json;

int thread_cap() {
  const char* env = std::getenv("FROSTMAN_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw frostman::precondition_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// temp + rename so consumers never see a partial file
void atomic_write(const std::string& path, const std::string& data) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw frostman::error("cannot write " + tmp);
    out << data;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw frostman::error("cannot rename " + tmp + " -> " + path);
}

std::string hash_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(frostman::fnv1a(data)));
  return buf;
}

struct Manifest {
  std::string command;
  json args = json::object();
  std::uint64_t seed = 0;
  json input_hashes = json::object();
  std::vector<std::string> outputs;

  void add_input(const std::string& path, const std::string& content) {
    input_hashes[path] = hash_hex(content);
  }

  void write() const {
    json j;
    j["command"] = command;
    j["args"] = args;
    j["seed"] = seed;
    j["tool_version"] = kToolVersion;
    j["threads"] = thread_cap();
    j["input_hashes"] = input_hashes;
    j["outputs"] = outputs;
    std::string path = outputs.empty() ? command + ".manifest.json"
                                       : outputs.front() + ".manifest.json";
    atomic_write(path, j.dump(2) + "\n");
  }
};

frostman::RadialProfile profile_from_spec(const std::string& spec) {
  // "plateau" | "power_tail:p" | "power_log_tail:p:s"
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(tok);
  if (parts.empty() || parts[0] == "plateau")
    return frostman::RadialProfile::plateau();
  if (parts[0] == "power_tail" && parts.size() == 2)
    return frostman::RadialProfile::power_tail(std::stod(parts[1]));
  if (parts[0] == "power_log_tail" && parts.size() == 3)
    return frostman::RadialProfile::power_log_tail(std::stod(parts[1]),
                                                   std::stod(parts[2]));
  throw frostman::parameter_error("bad profile spec: " + spec);
}

frostman::RadialProfile profile_from_json(const json& j) {
  const std::string kind = j.value("kind", "plateau");
  frostman::RadialProfile p;
  if (kind == "plateau")
    p = frostman::RadialProfile::plateau();
  else if (kind == "power_tail")
    p = frostman::RadialProfile::power_tail(j.at("p").get<double>());
  else if (kind == "power_log_tail")
    p = frostman::RadialProfile::power_log_tail(j.at("p").get<double>(),
                                                j.at("s").get<double>());
  else
    throw frostman::parameter_error("unknown profile kind: " + kind);
  if (j.contains("scale")) p = p.scaled(j.at("scale").get<double>());
  return p;
}

// very small expression evaluator for grid samples: "x", "x^N",
// "sin(x)", "exp(x)", or a numeric constant
double eval_expr(const std::string& expr, double x) {
  if (expr == "x") return x;
  if (expr.rfind("x^", 0) == 0) return std::pow(x, std::stod(expr.substr(2)));
  if (expr == "sin(x)") return std::sin(x);
  if (expr == "exp(x)") return std::exp(x);
  return std::stod(expr);
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

int run_gen(const std::string& kind, int level, int dim, double ratio,
            double beta, int n, const std::string& expr, int m, double h,
            std::uint64_t seed, double sign_mix, const std::string& out) {
  Manifest man;
  man.command = "gen";
  man.args = {{"kind", kind}, {"level", level}, {"dim", dim},
              {"ratio", ratio}, {"beta", beta}, {"n", n},
              {"f", expr}, {"m", m}, {"h", h}, {"sign_mix", sign_mix}};
  man.seed = seed;

  json payload;
  if (kind == "cantor") {
    const auto mu = frostman::meas::generate_cantor(level, dim, ratio);
    payload = frostman::io::to_json(mu);
    payload["resolution"] = frostman::meas::cantor_resolution(level, dim, ratio);
  } else if (kind == "power_law") {
    payload = frostman::io::to_json(frostman::meas::generate_power_law(beta, n));
  } else if (kind == "grid_gradient") {
    std::vector<double> samples(n);
    for (int i = 0; i < n; ++i) samples[i] = eval_expr(expr, i * h);
    const auto comps =
        frostman::meas::generate_grid_gradient(samples, {n}, {m}, h);
    payload = frostman::io::to_json(comps.at(0));
  } else if (kind == "random") {
    payload =
        frostman::io::to_json(frostman::meas::generate_random(seed, n, dim, sign_mix));
  } else {
    throw frostman::parameter_error("gen: unknown kind " + kind);
  }
  man.outputs.push_back(out);
  atomic_write(out, payload.dump(2) + "\n");
  man.write();
  return 0;
}

int run_supercover(const std::string& cloud_path, double alpha,
                   const std::string& gauge_path, double eps, double a,
                   const std::string& mode, double q, std::uint64_t seed,
                   const std::string& out) {
  Manifest man;
  man.command = "supercover";
  man.args = {{"cloud", cloud_path}, {"alpha", alpha}, {"eps", eps},
              {"a", a}, {"mode", mode}, {"q", q}};
  man.seed = seed;
  const std::string cloud_raw = read_file(cloud_path);
  man.add_input(cloud_path, cloud_raw);
  const auto cloud = frostman::io::cloud_from_json(json::parse(cloud_raw));

  std::pair<frostman::BallFamily, frostman::CoveringReport> result;
  if (mode == "geometric") {
    result = frostman::cover::supercover_geometric(cloud, alpha, eps, a, seed);
  } else if (mode == "bounded") {
    frostman::RadiusGauge rg = frostman::RadiusGauge::power(alpha);
    if (!gauge_path.empty()) {
      const std::string graw = read_file(gauge_path);
      man.add_input(gauge_path, graw);
      rg = frostman::RadiusGauge::from_gauge(
          frostman::io::gauge_from_json(json::parse(graw)));
    }
    result = frostman::cover::supercover_bounded(cloud, rg, eps, a, q, seed);
  } else {
    throw frostman::parameter_error("supercover: unknown mode " + mode);
  }

  json payload;
  payload["family"] = frostman::io::to_json(result.first);
  payload["report"] = frostman::io::to_json(result.second);
  man.outputs.push_back(out);
  atomic_write(out, payload.dump(2) + "\n");
  man.write();

  if (!result.second.valid_supercover) return kExitDecay;
  if (mode == "geometric") {
    // measured C against the theoretical closed-form bound
    const double log_c = result.second.constants.at("log_C");
    const double log_c_bound = result.second.constants.at("log_C_bound");
    if (log_c > log_c_bound + 1e-9) return kExitDecay;
  }
  return 0;
}

frostman::FrostmanHypothesis hypothesis_from_json(const json& j, double alpha) {
  frostman::FrostmanHypothesis hyp;
  hyp.profile = j.contains("profile") ? profile_from_json(j.at("profile"))
                                      : frostman::RadialProfile::plateau();
  if (j.contains("gauge_sum") && j.at("gauge_sum").contains("alpha"))
    hyp.gauge_sum = frostman::RadiusGauge::power(
        j.at("gauge_sum").at("alpha").get<double>());
  else if (j.contains("gauge_sum"))
    hyp.gauge_sum = frostman::RadiusGauge::from_gauge(
        frostman::io::gauge_from_json(j.at("gauge_sum")));
  else
    hyp.gauge_sum = frostman::RadiusGauge::power(alpha);
  hyp.weight = j.contains("weight")
                   ? frostman::io::gauge_from_json(j.at("weight"))
                   : frostman::GaugeFunction::identity(1e9);
  hyp.constant = j.value("constant", 1.0);
  return hyp;
}

int run_certify(const std::string& lemma, const std::string& measure_path,
                const std::string& set_path, double alpha,
                const std::string& gauge_path, double eps, double constant,
                const std::string& profile_spec, std::uint64_t seed,
                const std::string& out) {
  Manifest man;
  man.command = "certify";
  man.args = {{"lemma", lemma}, {"measure", measure_path}, {"set", set_path},
              {"alpha", alpha}, {"eps", eps}, {"constant", constant},
              {"profile", profile_spec}};
  man.seed = seed;

  const std::string mraw = read_file(measure_path);
  man.add_input(measure_path, mraw);
  const auto mu = frostman::io::measure_from_json(json::parse(mraw));
  const std::string sraw = read_file(set_path);
  man.add_input(set_path, sraw);
  const auto target = frostman::io::cloud_from_json(json::parse(sraw));

  frostman::FrostmanHypothesis hyp;
  hyp.profile = profile_from_spec(profile_spec);
  hyp.gauge_sum = frostman::RadiusGauge::power(alpha);
  hyp.weight = frostman::GaugeFunction::identity(1e9);
  hyp.constant = constant;
  if (!gauge_path.empty()) {
    const std::string graw = read_file(gauge_path);
    man.add_input(gauge_path, graw);
    hyp.weight = frostman::io::gauge_from_json(json::parse(graw));
  }

  frostman::Certificate cert;
  if (lemma == "teor1")
    cert = frostman::frost::certify_teor1(mu, target, alpha, eps, hyp, seed);
  else if (lemma == "teor2")
    cert = frostman::frost::certify_teor2(
        mu, target, frostman::RadiusGauge::power(alpha), eps, hyp, seed);
  else if (lemma == "teor3")
    cert = frostman::frost::certify_teor3(mu, target, alpha, eps, hyp, seed);
  else
    throw frostman::parameter_error("certify: unknown lemma " + lemma);

  const std::string text = frostman::io::to_json(cert).dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) {
    man.outputs.push_back(out);
    atomic_write(out, text);
  }
  man.write();
  return cert.valid ? 0 : kExitHypothesis;
}

int run_check(const std::string& measure_path, const std::string& hyp_path,
              int iters, std::uint64_t seed) {
  Manifest man;
  man.command = "check";
  man.args = {{"measure", measure_path}, {"hypothesis", hyp_path},
              {"iters", iters}};
  man.seed = seed;
  const std::string mraw = read_file(measure_path);
  man.add_input(measure_path, mraw);
  const json mj = json::parse(mraw);
  const auto mu = frostman::io::measure_from_json(mj);
  const std::string hraw = read_file(hyp_path);
  man.add_input(hyp_path, hraw);
  const auto hyp = hypothesis_from_json(json::parse(hraw), 1.0);

  // radii probe down to the cloud's resolution when declared
  const double r_min = mj.value("resolution", 0.0);
  const auto res =
      frostman::frost::adversarial_search(mu, hyp, seed, iters, 8, r_min);
  json j;
  j["worst_ratio"] = std::isfinite(res.worst_ratio)
                         ? json(res.worst_ratio)
                         : json("inf");
  j["hypothesis_violated"] = res.hypothesis_violated;
  j["witness_family"] = frostman::io::to_json(res.witness_family);
  std::cout << j.dump(2) << "\n";
  man.write();
  return res.hypothesis_violated ? kExitHypothesis : 0;
}

int run_energy(const std::string& measure_path, const std::string& alphas_csv,
               int level_lo, int level_hi, int dim,
               const std::string& out) {
  Manifest man;
  man.command = "energy";
  man.args = {{"measure", measure_path}, {"alphas", alphas_csv},
              {"levels", std::to_string(level_lo) + ":" + std::to_string(level_hi)},
              {"dim", dim}};
  const auto alphas = parse_list(alphas_csv);

  std::ostringstream csv;
  csv << "alpha,level,energy,rel_change\n";
  if (!measure_path.empty()) {
    const std::string mraw = read_file(measure_path);
    man.add_input(measure_path, mraw);
    const auto mu = frostman::io::measure_from_json(json::parse(mraw));
    for (double al : alphas)
      csv << al << ",-," << frostman::meas::energy_integral(mu, al) << ",-\n";
  } else {
    for (double al : alphas) {
      double prev = 0.0;
      for (int lvl = level_lo; lvl <= level_hi; ++lvl) {
        const auto mu = frostman::meas::generate_cantor(lvl, dim);
        const double e = frostman::meas::energy_integral(mu, al);
        const double rel = lvl == level_lo ? 0.0 : (e - prev) / prev;
        csv << al << "," << lvl << "," << e << "," << rel << "\n";
        prev = e;
      }
    }
  }
  if (!out.empty()) {
    man.outputs.push_back(out);
    atomic_write(out, csv.str());
  } else {
    std::cout << csv.str();
  }
  man.write();
  return 0;
}

// desk-scale lower-dimension estimate: largest alpha on the grid whose
// energy values are Cauchy across refinement levels and whose teor1
// certification passes at the finest level
int run_dim(const std::string& kind, double beta, int dim,
            const std::string& alphas_csv, double eps, double constant,
            std::uint64_t seed, const std::string& out) {
  Manifest man;
  man.command = "dim";
  man.args = {{"kind", kind}, {"beta", beta}, {"dim", dim},
              {"alphas", alphas_csv}, {"eps", eps}, {"constant", constant}};
  man.seed = seed;
  const auto alphas = parse_list(alphas_csv);

  const auto measure_at = [&](int level) {
    if (kind == "cantor") return frostman::meas::generate_cantor(level, dim);
    if (kind == "power_law")
      return frostman::meas::generate_power_law(beta, 1 << level);
    throw frostman::parameter_error("dim: unknown kind " + kind);
  };
  const auto resolution_at = [&](int level) {
    if (kind == "cantor")
      return frostman::meas::cantor_resolution(level, dim);
    return 1.0 / (1 << level);
  };

  const int level_lo = 4, level_hi = 7;
  json table = json::array();
  double estimate = 0.0;
  for (double al : alphas) {
    // energy Cauchy test across refinement levels
    double prev = 0.0;
    double rel = 1e9;
    for (int lvl = level_lo; lvl <= level_hi; ++lvl) {
      const double e = frostman::meas::energy_integral(measure_at(lvl), al);
      if (lvl > level_lo) rel = std::abs(e - prev) / std::max(prev, 1e-300);
      prev = e;
    }
    const bool cauchy = rel < 0.25;

    bool certified = false;
    try {
      const auto mu = measure_at(level_hi);
      frostman::PointCloud target = mu.support_cloud(resolution_at(level_hi));
      frostman::FrostmanHypothesis hyp;
      hyp.profile = frostman::RadialProfile::plateau();
      hyp.gauge_sum = frostman::RadiusGauge::power(al);
      hyp.weight = frostman::GaugeFunction::identity(1e9);
      hyp.constant = constant;
      const auto cert =
          frostman::frost::certify_teor1(mu, target, al, eps, hyp, seed);
      certified = cert.valid;
    } catch (const frostman::error&) {
      certified = false;
    }
    json row;
    row["alpha"] = al;
    row["energy_rel_change"] = rel;
    row["energy_cauchy"] = cauchy;
    row["certified"] = certified;
    table.push_back(row);
    if (cauchy && certified) estimate = std::max(estimate, al);
  }
  json j;
  j["estimate"] = estimate;
  j["table"] = table;
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) {
    man.outputs.push_back(out);
    atomic_write(out, text);
  }
  man.write();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frostman: coverings, gauges, and Frostman certificates"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate an example measure");
  std::string gen_kind = "cantor", gen_expr = "x^2", gen_out = "measure.json";
  int gen_level = 5, gen_dim = 1, gen_n = 100, gen_m = 1;
  double gen_ratio = 1.0 / 3.0, gen_beta = 0.5, gen_h = 0.1, gen_mix = 0.0;
  std::uint64_t gen_seed = 1;
  gen->add_option("--kind", gen_kind, "cantor|power_law|grid_gradient|random");
  gen->add_option("--level", gen_level);
  gen->add_option("--dim", gen_dim);
  gen->add_option("--ratio", gen_ratio);
  gen->add_option("--beta", gen_beta);
  gen->add_option("--n", gen_n);
  gen->add_option("--f", gen_expr, "x | x^N | sin(x) | exp(x) | constant");
  gen->add_option("--m", gen_m);
  gen->add_option("--step", gen_h);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--sign-mix", gen_mix);
  gen->add_option("--out", gen_out);

  // supercover
  auto* sc = app.add_subcommand("supercover", "build a supercovering");
  std::string sc_cloud, sc_gauge, sc_mode = "geometric", sc_out = "cover.json";
  double sc_alpha = 1.0, sc_eps = 0.1, sc_a = 1.0, sc_q = 0.5;
  std::uint64_t sc_seed = 1;
  sc->add_option("--cloud", sc_cloud)->required();
  sc->add_option("--alpha", sc_alpha);
  sc->add_option("--gauge", sc_gauge);
  sc->add_option("--eps", sc_eps);
  sc->add_option("--a", sc_a);
  sc->add_option("--mode", sc_mode, "geometric|bounded");
  sc->add_option("--q", sc_q);
  sc->add_option("--seed", sc_seed);
  sc->add_option("--out", sc_out);

  // certify
  auto* ce = app.add_subcommand("certify", "run a certification pipeline");
  std::string ce_lemma, ce_measure, ce_set, ce_gauge, ce_out;
  std::string ce_profile = "plateau";
  double ce_alpha = 1.0, ce_eps = 0.1, ce_constant = 4.0;
  std::uint64_t ce_seed = 1;
  ce->add_option("--lemma", ce_lemma, "teor1|teor2|teor3")->required();
  ce->add_option("--measure", ce_measure)->required();
  ce->add_option("--set", ce_set)->required();
  ce->add_option("--alpha", ce_alpha);
  ce->add_option("--gauge", ce_gauge);
  ce->add_option("--eps", ce_eps);
  ce->add_option("--constant", ce_constant);
  ce->add_option("--profile", ce_profile,
                 "plateau | power_tail:p | power_log_tail:p:s");
  ce->add_option("--seed", ce_seed);
  ce->add_option("--out", ce_out);

  // check
  auto* ch = app.add_subcommand("check", "adversarial hypothesis search");
  std::string ch_measure, ch_hyp;
  int ch_iters = 1000;
  std::uint64_t ch_seed = 1;
  ch->add_option("--measure", ch_measure)->required();
  ch->add_option("--hypothesis", ch_hyp)->required();
  ch->add_option("--iters", ch_iters);
  ch->add_option("--seed", ch_seed);

  // energy
  auto* en = app.add_subcommand("energy", "energy integral sweep");
  std::string en_measure, en_alphas = "0.5,0.6,0.7", en_out;
  int en_lo = 4, en_hi = 8, en_dim = 1;
  en->add_option("--measure", en_measure);
  en->add_option("--alphas", en_alphas);
  en->add_option("--level-lo", en_lo);
  en->add_option("--level-hi", en_hi);
  en->add_option("--dim", en_dim);
  en->add_option("--out", en_out);

  // dim
  auto* dm = app.add_subcommand("dim", "lower-dimension estimate");
  std::string dm_kind = "cantor", dm_alphas = "0.4,0.5,0.6", dm_out;
  double dm_beta = 0.5, dm_eps = 0.1, dm_constant = 4.0;
  int dm_dim = 1;
  std::uint64_t dm_seed = 1;
  dm->add_option("--kind", dm_kind, "cantor|power_law");
  dm->add_option("--beta", dm_beta);
  dm->add_option("--dim", dm_dim);
  dm->add_option("--alphas", dm_alphas);
  dm->add_option("--eps", dm_eps);
  dm->add_option("--constant", dm_constant);
  dm->add_option("--seed", dm_seed);
  dm->add_option("--out", dm_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return run_gen(gen_kind, gen_level, gen_dim, gen_ratio, gen_beta, gen_n,
                     gen_expr, gen_m, gen_h, gen_seed, gen_mix, gen_out);
    if (sc->parsed())
      return run_supercover(sc_cloud, sc_alpha, sc_gauge, sc_eps, sc_a,
                            sc_mode, sc_q, sc_seed, sc_out);
    if (ce->parsed())
      return run_certify(ce_lemma, ce_measure, ce_set, ce_alpha, ce_gauge,
                         ce_eps, ce_constant, ce_profile, ce_seed, ce_out);
    if (ch->parsed()) return run_check(ch_measure, ch_hyp, ch_iters, ch_seed);
    if (en->parsed())
      return run_energy(en_measure, en_alphas, en_lo, en_hi, en_dim, en_out);
    if (dm->parsed())
      return run_dim(dm_kind, dm_beta, dm_dim, dm_alphas, dm_eps, dm_constant,
                     dm_seed, dm_out);
  } catch (const frostman::divergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const frostman::budget_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const frostman::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const frostman::parameter_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const frostman::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDecay;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return 0;
}
