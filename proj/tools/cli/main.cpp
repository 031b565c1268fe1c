// hardy: configuration-driven experiment runner.
//
// Exit status: 0 all checks pass, 1 a check failed or the run broke down,
// 2 configuration error. Errors print one line "error: <reason>" on stderr.

#include <chrono>
#include <cstdio>
#include <memory>
#include <optional>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiments.hpp"
#include "hardy/errors.hpp"
#include "hardy/kernels.hpp"
#include "record.hpp"

using namespace hardy;
using namespace hardy::cli;

namespace {

struct Flags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::optional<double> h;
  std::optional<int> refine;
};

int fail(RunRecord& rec, const OutputDir* dir, int code, const std::string& reason) {
  rec.exit_code = code;
  rec.status = code == 1 ? "fail" : "error";
  rec.reason = reason;
  fmt::print(stderr, "error: {}\n", reason);
  if (dir) dir->append_record(rec);
  return code;
}

int run(const std::string& kind, const Flags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.kind = kind;
  std::unique_ptr<OutputDir> dir;
  const auto finish_time = [&] {
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  try {
    dir = std::make_unique<OutputDir>(f.out);
  } catch (const std::exception& e) {
    // Another run holds the directory; its record must not be disturbed.
    return fail(rec, nullptr, 2, e.what());
  }
  try {
    ExperimentConfig cfg = load_config(f.config, kind);
    if (f.seed) cfg.seed = *f.seed;
    if (f.h) {
      if (!(*f.h > 0.0)) throw ConfigurationError("--h must be positive");
      cfg.h = *f.h;
    }
    if (f.refine) {
      if (*f.refine < 0 || *f.refine > 4) throw ConfigurationError("--refine must be in [0, 4]");
      cfg.refine = *f.refine;
    }
    rec.seed = cfg.seed;
    for (const auto& [k, v] : cfg.entries) rec.config[k] = v;
    rec.config["grid.h"] = format_number(cfg.h);
    rec.config["grid.refine"] = std::to_string(cfg.refine);
    rec.config["experiment.seed"] = std::to_string(cfg.seed);
    if (f.threads > 0) set_thread_count(f.threads);
    rec.config["threads"] = std::to_string(thread_count());

    run_experiment(cfg, *dir, rec);
    finish_time();
    rec.exit_code = rec.all_pass() ? 0 : 1;
    rec.status = rec.all_pass() ? "pass" : "fail";
    dir->append_record(rec);
    for (const Check& c : rec.checks)
      fmt::print("{} {} value {} bound {}\n", c.pass ? "PASS" : "FAIL", c.name, format_number(c.value),
                 format_number(c.bound));
    return rec.exit_code;
  } catch (const ConfigurationError& e) {
    finish_time();
    return fail(rec, dir.get(), 2, e.what());
  } catch (const PreconditionError& e) {
    finish_time();
    return fail(rec, dir.get(), 2, e.what());
  } catch (const DomainError& e) {
    finish_time();
    return fail(rec, dir.get(), 2, e.what());
  } catch (const std::exception& e) {
    finish_time();
    return fail(rec, dir.get(), 1, e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for Hardy-potential elliptic problems"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  Flags flags;
  std::string selected;
  for (const std::string& kind : experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind, "Run the " + kind + " experiment");
    sub->set_help_flag("--help", "Print this help message and exit");
    sub->add_option("--config", flags.config, "Flat key = value config file");
    sub->add_option("--out", flags.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", flags.seed, "Seed (overrides experiment.seed)");
    sub->add_option("--threads", flags.threads, "OpenMP threads");
    sub->add_option("--h", flags.h, "Grid spacing (overrides grid.h)");
    sub->add_option("--refine", flags.refine, "Refinement levels (overrides grid.refine)");
    sub->callback([&selected, kind] { selected = kind; });
  }
  std::string rec_a, rec_b;
  CLI::App* cmp = app.add_subcommand("compare", "Relative differences between two run records");
  cmp->add_option("a", rec_a, "run.jsonl or output directory")->required();
  cmp->add_option("b", rec_b, "run.jsonl or output directory")->required();
  cmp->callback([&selected] { selected = "compare"; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (selected == "compare") {
    try {
      int n = 0;
      const std::string table = compare_records(rec_a, rec_b, &n);
      if (n == 0)
        fmt::print("no differences\n");
      else
        fmt::print("{}", table);
      return 0;
    } catch (const ConfigurationError& e) {
      fmt::print(stderr, "error: {}\n", e.what());
      return 2;
    }
  }
  return run(selected, flags);
}
