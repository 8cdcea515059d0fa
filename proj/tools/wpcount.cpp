#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "wpc/asymptotics.hpp"
#include "wpc/enumeration.hpp"
#include "wpc/local_analysis.hpp"
#include "wpc/morphism.hpp"
#include "wpc/report.hpp"
#include "wpc/volume.hpp"

using namespace wpc;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kAnalysis = 3, kBudget = 4 };

struct Globals {
  std::string config;
  int threads = 1;
  std::string out;
  std::string format = "json";
};

struct Outputs {
  std::map<std::string, std::string> files;  ///< name -> contents
};

std::vector<Rational> parse_ladder(const std::string& text) {
  std::vector<Rational> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  if (out.empty()) throw std::invalid_argument("empty ladder");
  return out;
}

void write_outputs(const Globals& g, const std::string& sub, const Outputs& outs,
                   std::map<std::string, std::string> flags, std::vector<std::uint64_t> seeds, double seconds) {
  if (g.out.empty()) return;
  std::filesystem::create_directories(g.out);
  RunManifest m;
  m.config_digest = digest_hex(read_file(g.config));
  m.subcommand = sub;
  flags["threads"] = std::to_string(g.threads);
  flags["format"] = g.format;
  m.flags = std::move(flags);
  m.seeds = std::move(seeds);
  m.seconds = seconds;
  for (const auto& [name, body] : outs.files) {
    bool is_csv = name.size() > 4 && name.substr(name.size() - 4) == ".csv";
    if (is_csv && g.format == "json") continue;
    if (!is_csv && g.format == "csv") continue;
    std::ofstream f(std::filesystem::path(g.out) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + name);
    f << body;
    m.output_digests[name] = digest_hex(body);
  }
  std::ofstream f(std::filesystem::path(g.out) / "manifest.json", std::ios::binary);
  f << m.to_json().dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Point counting for morphisms of weighted projective spaces over Q"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "morphism config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--out", g.out, "directory for report files and the run manifest");
  app.add_option("--format", g.format, "report files to write")->check(CLI::IsMember({"json", "csv", "both"}));
  app.fallthrough();

  auto* validate = app.add_subcommand("validate", "check the morphism conditions");
  auto* analyze = app.add_subcommand("analyze", "discrepancy set, local profiles, census and C_phi");
  auto* constant = app.add_subcommand("constant", "leading constant of the asymptotic");
  int grid = kDefaultGrid;
  constant->add_option("--grid", grid, "Gauss-Legendre nodes per panel")->check(CLI::Range(4, 1 << 16));

  auto* volume = app.add_subcommand("volume", "volume of the region {|f_j| <= 1}");
  std::string method = "slice";
  std::uint64_t samples = 10'000'000, seed = 1;
  std::string dump_path;
  int dump_res = 400;
  volume->add_option("--method", method)->check(CLI::IsMember({"slice", "mc", "both"}));
  volume->add_option("--grid", grid)->check(CLI::Range(4, 1 << 16));
  volume->add_option("--samples", samples);
  volume->add_option("--seed", seed);
  volume->add_option("--dump-region-grid", dump_path, "write a,b rows of region grid points");
  volume->add_option("--dump-resolution", dump_res)->check(CLI::Range(2, 1 << 14));

  auto* count = app.add_subcommand("count", "exact count N(T)");
  std::string t_text;
  bool by_disc = false;
  CountOptions copts;
  std::uint64_t moebius_cut = 0;
  count->add_option("--T", t_text, "height bound (integer, p/q or decimal)")->required();
  count->add_flag("--by-discrepancy", by_disc);
  count->add_option("--budget", copts.budget, "max x1 values times |D|");
  count->add_option("--checkpoint", copts.checkpoint);
  count->add_option("--slab-size", copts.slab_size)->check(CLI::Range(std::int64_t(1), std::int64_t(1) << 40));
  count->add_flag("--exclude-singular", copts.exclude_singular, "X1(2) only: skip b = 0 and 8b = 3a^2");
  count->add_option("--moebius-cut", moebius_cut, "also run the Moebius cross-check with this cut");

  auto* verify = app.add_subcommand("verify", "full pipeline against exact counts");
  std::string ladder_text;
  verify->add_option("--ladder", ladder_text, "comma separated thresholds")->required();
  verify->add_option("--grid", grid)->check(CLI::Range(4, 1 << 16));
  verify->add_option("--budget", copts.budget);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (g.config.empty()) {
    std::cerr << "error: --config is required\n";
    return kUsage;
  }
  copts.threads = g.threads;

  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
  std::map<std::string, std::string> flags;
  std::vector<std::uint64_t> seeds;
  Outputs outs;
  Json result;
  std::string sub = app.get_subcommands().front()->get_name();

  try {
    if (validate->parsed()) {
      MorphismSpec spec = parse_morphism_unchecked(read_file(g.config));
      CommonZeroVerdict v = validate_no_common_zero(spec);
      result = to_json(spec);
      result["common_zero"] = to_json(v);
      result["valid"] = v.pass;
      if (!v.pass) {
        result["failed_condition"] = 2;
        std::cout << result.dump(2) << "\n";
        return kInvalid;
      }
    } else {
      MorphismSpec spec = load_morphism(g.config);
      if (analyze->parsed()) {
        result = to_json(global_analysis(spec, g.threads));
      } else if (constant->parsed()) {
        GlobalAnalysis an = global_analysis(spec, g.threads);
        VolumeEstimate vol = volume_slice(spec, grid, 1, g.threads);
        result = to_json(leading_constant(an.c_phi, vol.value, spec));
        result["volume_error"] = round12(vol.error);
        flags["grid"] = std::to_string(grid);
      } else if (volume->parsed()) {
        result = Json::object();
        if (method == "slice" || method == "both") result["slice"] = to_json(volume_slice(spec, grid, 1, g.threads));
        if (method == "mc" || method == "both") {
          result["monte_carlo"] = to_json(volume_monte_carlo(spec, samples, seed, 1.0, g.threads));
          seeds.push_back(seed);
          flags["samples"] = std::to_string(samples);
        }
        if (!dump_path.empty()) dump_region_grid(spec, dump_path, dump_res);
        flags["method"] = method;
        flags["grid"] = std::to_string(grid);
      } else if (count->parsed()) {
        Rational T = parse_rational(t_text);
        GlobalAnalysis an = global_analysis(spec, g.threads);
        CountResult c = count_exact(spec, an, T, copts);
        result = to_json(c, T);
        if (!by_disc) result.erase("by_discrepancy");
        if (moebius_cut > 0) result["moebius"] = to_json(moebius_crosscheck(spec, an, T, moebius_cut));
        flags["T"] = t_text;
        flags["budget"] = std::to_string(copts.budget);
        if (copts.exclude_singular) flags["exclude_singular"] = "true";
      } else if (verify->parsed()) {
        std::vector<Rational> ladder = parse_ladder(ladder_text);
        GlobalAnalysis an = global_analysis(spec, g.threads);
        VolumeEstimate vol = volume_slice(spec, grid, 1, g.threads);
        AsymptoticPrediction pred = leading_constant(an.c_phi, vol.value, spec);
        CountReport rep = convergence_report(spec, an, pred, ladder, copts);
        result = to_json(rep);
        outs.files["verify.csv"] = to_csv(rep);
        flags["ladder"] = ladder_text;
        flags["grid"] = std::to_string(grid);
      }
    }
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBudget;
  } catch (const InvalidMorphism& e) {
    std::cerr << "error: invalid morphism, condition (" << e.condition() << "): " << e.what() << "\n";
    return kInvalid;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysis;
  }

  std::string body = result.dump(2) + "\n";
  std::cout << body;
  outs.files[sub + ".json"] = body;
  try {
    write_outputs(g, sub, outs, flags, seeds, elapsed());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
