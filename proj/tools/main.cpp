#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nnb/basis.hpp"
#include "nnb/json_io.hpp"
#include "nnb/verify.hpp"

#include <omp.h>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolations = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitIo = 3;

// Maps the library's exceptions onto the exit-code contract: malformed
// documents and invalid parameters are 2, file-system trouble is 3.
template <typename F>
int run_guarded(F&& f) {
  try {
    return f();
  } catch (const nnb::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int resolve_threads(const std::string& flag) {
  std::string value = flag;
  if (value.empty()) {
    if (const char* env = std::getenv("NONNEG_BASIS_THREADS")) value = env;
  }
  if (value.empty() || value == "auto") return omp_get_max_threads();
  try {
    std::size_t pos = 0;
    int n = std::stoi(value, &pos);
    if (pos != value.size() || n < 1) throw std::invalid_argument(value);
    return n;
  } catch (const std::exception&) {
    throw std::invalid_argument("--threads expects a positive integer or \"auto\"");
  }
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty())
    std::cout << text;
  else
    nnb::write_text_file(output_path, text);
}

int cmd_basis_show(std::int64_t index, const std::string& format) {
  if (index < 1) {
    std::cerr << "error: index must be >= 1\n";
    return kExitBadInput;
  }
  return run_guarded([&] {
    nnb::BasisBlock blk = nnb::make_block(nnb::Permutation::identity(),
                                          static_cast<std::uint64_t>(index));
    if (format == "csv")
      std::cout << nnb::block_to_csv(blk);
    else
      std::cout << nnb::block_to_json(blk).dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_analyze(const std::string& input, std::int64_t kmax,
                const std::string& output) {
  return run_guarded([&] {
    nnb::StepFunction f = nnb::function_from_json(
        nlohmann::json::parse(nnb::read_text_file(input)));
    nnb::BasisContext ctx;
    nnb::Expansion e = nnb::analyze(ctx, f);
    nlohmann::json doc = nnb::expansion_to_json(e, ctx.permutation());
    if (kmax >= 0) {
      // --kmax trims the emitted Schauder list; the block list stays intact
      // so the document still synthesizes back to f.
      nlohmann::json trimmed = nlohmann::json::array();
      for (const auto& entry : doc["schauder"])
        if (entry["k"].get<std::int64_t>() <= kmax) trimmed.push_back(entry);
      doc["schauder"] = std::move(trimmed);
    }
    emit(doc.dump(2) + "\n", output);
    return kExitOk;
  });
}

int cmd_synthesize(const std::string& input, const std::string& output) {
  return run_guarded([&] {
    nnb::Expansion e = nnb::expansion_from_json(
        nlohmann::json::parse(nnb::read_text_file(input)));
    nnb::BasisContext ctx;
    nnb::StepFunction f = nnb::synthesize(ctx, e);
    emit(nnb::function_to_json(f).dump(2) + "\n", output);
    return kExitOk;
  });
}

int cmd_partial_sums(const std::string& input, std::int64_t kmax,
                     const std::string& output) {
  if (kmax < 1) {
    std::cerr << "error: --kmax must be >= 1\n";
    return kExitBadInput;
  }
  return run_guarded([&] {
    nnb::StepFunction f = nnb::function_from_json(
        nlohmann::json::parse(nnb::read_text_file(input)));
    nnb::BasisContext ctx;
    auto profile = nnb::partial_sum_profile(ctx, f,
                                            static_cast<std::uint64_t>(kmax));
    std::ostringstream csv;
    csv << "k,ratio,ratio_float\n";
    for (std::size_t k = 0; k < profile.size(); ++k)
      csv << (k + 1) << ',' << nnb::to_fraction_string(profile[k]) << ','
          << nnb::format_double(profile[k].get_d()) << '\n';
    emit(csv.str(), output);
    return kExitOk;
  });
}

int cmd_verify(const std::string& suite, std::uint64_t trials,
               std::uint64_t seed, const std::string& threads_flag,
               std::uint64_t imax, double p, const std::string& output) {
  return run_guarded([&] {
    nnb::SuiteConfig cfg;
    cfg.suite = suite;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.imax = imax;
    cfg.p = p;
    cfg.threads = resolve_threads(threads_flag);
    nnb::BasisContext ctx;
    nnb::VerifyReport report = nnb::run_suite(ctx, cfg);
    emit(nnb::report_to_json(report).dump() + "\n", output);
    return report.violations == 0 ? kExitOk : kExitViolations;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-negative Schauder basis toolkit for dyadic step functions"};
  app.require_subcommand(1);

  auto* basis_cmd = app.add_subcommand("basis", "Inspect basis elements");
  basis_cmd->require_subcommand(1);
  auto* show_cmd =
      basis_cmd->add_subcommand("show", "Print one block (u, h, x, y)");
  std::int64_t show_index = 0;
  std::string show_format = "json";
  show_cmd->add_option("--index", show_index, "Block index (1-based)")
      ->required();
  show_cmd->add_option("--format", show_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* analyze_cmd =
      app.add_subcommand("analyze", "Expand a step function over the blocks");
  std::string analyze_in, analyze_out;
  std::int64_t analyze_kmax = -1;
  analyze_cmd->add_option("--input", analyze_in, "Function JSON file")
      ->required();
  analyze_cmd->add_option("--kmax", analyze_kmax,
                          "Keep only Schauder coefficients with k <= K");
  analyze_cmd->add_option("--output", analyze_out, "Expansion JSON file")
      ->required();

  auto* synth_cmd =
      app.add_subcommand("synthesize", "Rebuild a function from an expansion");
  std::string synth_in, synth_out;
  synth_cmd->add_option("--input", synth_in, "Expansion JSON file")
      ->required();
  synth_cmd->add_option("--output", synth_out, "Function JSON file")
      ->required();

  auto* sums_cmd = app.add_subcommand(
      "partial-sums", "Emit norm ratios of the first K partial sums");
  std::string sums_in, sums_out;
  std::int64_t sums_kmax = 0;
  sums_cmd->add_option("--input", sums_in, "Function JSON file")->required();
  sums_cmd->add_option("--kmax", sums_kmax, "Number of partial sums")
      ->required();
  sums_cmd->add_option("--output", sums_out, "Profile CSV file");

  auto* verify_cmd =
      app.add_subcommand("verify", "Run a seeded verification suite");
  std::string verify_suite;
  std::uint64_t verify_trials = 0, verify_seed = 0, verify_imax = 0;
  double verify_p = 0.0;
  std::string verify_threads, verify_out;
  verify_cmd
      ->add_option("suite", verify_suite,
                   "One of: fdd, prop2, norms, projections, chain, "
                   "rademacher, disjoint-lp, permutation")
      ->required();
  verify_cmd->add_option("--trials", verify_trials, "Trial count");
  verify_cmd->add_option("--seed", verify_seed, "Run seed");
  verify_cmd->add_option("--threads", verify_threads,
                         "Worker count or \"auto\"");
  verify_cmd->add_option("--imax", verify_imax,
                         "Index bound for norms/prop2/permutation");
  verify_cmd->add_option("--p", verify_p, "Exponent for rademacher/disjoint-lp");
  verify_cmd->add_option("--output", verify_out, "Write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitBadInput;
  }

  if (show_cmd->parsed()) return cmd_basis_show(show_index, show_format);
  if (analyze_cmd->parsed())
    return cmd_analyze(analyze_in, analyze_kmax, analyze_out);
  if (synth_cmd->parsed()) return cmd_synthesize(synth_in, synth_out);
  if (sums_cmd->parsed())
    return cmd_partial_sums(sums_in, sums_kmax, sums_out);
  if (verify_cmd->parsed())
    return cmd_verify(verify_suite, verify_trials, verify_seed, verify_threads,
                      verify_imax, verify_p, verify_out);
  return kExitBadInput;
}
