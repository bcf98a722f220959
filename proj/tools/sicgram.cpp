// Command-line front end: search, classify, verify, reference, report.
//
// Exit codes: 0 success, 1 verification failures, 2 usage error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "sicgram/atlas.hpp"
#include "sicgram/classify.hpp"
#include "sicgram/json_io.hpp"
#include "sicgram/search.hpp"
#include "sicgram/weyl_heisenberg.hpp"

namespace {

using namespace sicgram;

constexpr int kOk = 0;
constexpr int kFailures = 1;
constexpr int kUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

int run_search(int n, std::uint64_t trials, std::uint64_t seed, const std::string& store_path, int max_iter,
               int refine_digits, int threads, bool quiet) {
  SearchConfig config;
  config.n = n;
  config.seed = seed;
  config.max_iterations = max_iter;
  config.refine_digits = refine_digits;
  config.threads = threads;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Atlas atlas = Atlas::open(store_path);
  for (const auto& issue : atlas.load_issues()) {
    std::cerr << store_path << ":" << issue.line << ": " << issue.message << "\n";
  }
  const BatchSummary summary = batch_search(n, trials, config, atlas, [&](const TrialReport& r) {
    if (quiet) return;
    std::cerr << "trial " << r.outcome.trial << ": " << to_string(r.outcome.status) << " S=" << r.outcome.report.s;
    if (r.classification) std::cerr << " island=" << r.classification->island_hash << " " << r.verdict;
    std::cerr << "\n";
  });
  Json out = encode(summary);
  out["n"] = n;
  out["seed"] = seed;
  std::cout << out.dump(2) << "\n";
  return summary.store_errors > 0 ? kFailures : kOk;
}

int run_classify(const std::string& in_path) {
  std::ifstream in(in_path);
  if (!in) throw UsageError("cannot read " + in_path);
  std::string line;
  std::size_t number = 0;
  int status = kOk;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      if (j.value("kind", "solution") == "batch") continue;
      const PhaseVector phases = decode_phase_vector(j);
      Json out = encode(classify(phases));
      out["line"] = number;
      out["n"] = phases.n();
      std::cout << out.dump() << "\n";
    } catch (const std::exception& e) {
      std::cerr << in_path << ":" << number << ": " << e.what() << "\n";
      status = kFailures;
    }
  }
  return status;
}

int run_verify(const std::string& store_path, bool skip_hessian) {
  if (!std::filesystem::exists(store_path)) throw UsageError("no such store: " + store_path);
  const Atlas atlas = Atlas::open(store_path);
  VerifyOptions options;
  options.hessian = !skip_hessian;
  const VerifyReport report = verify_atlas(atlas, options);
  std::cout << encode(report).dump(2) << "\n";
  return report.ok() ? kOk : kFailures;
}

int run_reference(int n, const std::string& out_path) {
  try {
    require_dimension(n);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Fiducial& fid = reference_fiducial(n);
  Json out = encode(wh_gram(fid).phases);
  out["fiducial"] = encode(fid);
  std::ofstream file(out_path);
  if (!file) throw std::runtime_error("cannot write " + out_path);
  file << out.dump(2) << "\n";
  return kOk;
}

template <class Map>
std::string census_text(const Map& m) {
  std::string s;
  for (const auto& [k, v] : m) s += (s.empty() ? "" : ", ") + std::to_string(k) + ":" + std::to_string(v);
  return s.empty() ? "-" : s;
}

int run_report(const std::string& store_path, int n, const std::string& format) {
  if (!std::filesystem::exists(store_path)) throw UsageError("no such store: " + store_path);
  const AtlasReport r = report(Atlas::open(store_path), n);
  if (format == "json") {
    std::cout << encode(r).dump(2) << "\n";
    return kOk;
  }
  std::cout << "dimension            " << r.n << "\n"
            << "solutions            " << r.solutions << "\n"
            << "distinct islands     " << r.distinct_islands << "\n"
            << "matched to reference " << r.matched << " (" << r.matched_fraction << ")\n"
            << "generating sets      " << census_text(r.gen_set_census) << "\n"
            << "automorphism orders  " << census_text(r.aut_group_order_census) << "\n"
            << "H orders             " << census_text(r.h_order_census) << "\n"
            << "trials               " << r.trials << "\n"
            << "local minima         " << r.local_minima << " (rate " << r.local_minimum_rate << ")\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical search and classification of SIC Gram matrices"};
  app.require_subcommand(1);

  int n = 4;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  std::string store;
  int max_iter = 20000;
  int refine_digits = 0;
  int threads = 1;
  bool quiet = false;
  auto* search = app.add_subcommand("search", "Random-restart search; appends solutions to the store");
  search->add_option("--n", n, "Hilbert-space dimension")->required();
  search->add_option("--trials", trials, "Number of random starts")->required();
  search->add_option("--seed", seed, "Master seed");
  search->add_option("--store", store, "JSON-lines atlas")->required();
  search->add_option("--max-iter", max_iter, "Conjugate-gradient iteration limit");
  search->add_option("--refine-digits", refine_digits, "Extended-precision refinement digits (0 = off)");
  search->add_option("--threads", threads, "Worker threads");
  search->add_flag("--quiet", quiet, "No per-trial progress on stderr");

  std::string in_path;
  auto* classify_cmd = app.add_subcommand("classify", "Classify phase vectors or stored solutions");
  classify_cmd->add_option("--in", in_path, "JSON-lines file with {\"n\", \"phases\"} objects")->required();

  bool skip_hessian = false;
  auto* verify = app.add_subcommand("verify", "Re-verify every record in a store");
  verify->add_option("--store", store, "JSON-lines atlas")->required();
  verify->add_flag("--skip-hessian", skip_hessian, "Skip the Hessian null-space check");

  std::string out_path;
  auto* reference = app.add_subcommand("reference", "Write the Weyl-Heisenberg reference Gram");
  reference->add_option("--n", n, "Hilbert-space dimension")->required();
  reference->add_option("--out", out_path, "Output JSON file")->required();

  std::string format = "text";
  auto* report_cmd = app.add_subcommand("report", "Summarize a store for one dimension");
  report_cmd->add_option("--store", store, "JSON-lines atlas")->required();
  report_cmd->add_option("--n", n, "Hilbert-space dimension")->required();
  report_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*search) return run_search(n, trials, seed, store, max_iter, refine_digits, threads, quiet);
    if (*classify_cmd) return run_classify(in_path);
    if (*verify) return run_verify(store, skip_hessian);
    if (*reference) return run_reference(n, out_path);
    if (*report_cmd) return run_report(store, n, format);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailures;
  }
  return kUsage;
}
