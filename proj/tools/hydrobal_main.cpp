#include <cstdio>
#include <iostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "hydrobal/pipeline.hpp"

namespace {

using namespace hydrobal;

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kInfeasible = 3, kIo = 4 };

int report(const char* kind, const std::exception& e, int code) {
  fmt::print(stderr, "hydrobal: {}: {}\n", kind, e.what());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind-hydro portfolio balancing pipeline"};
  app.require_subcommand(1);

  pipeline::LoadOptions opts;
  std::string config, out;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration (JSON)");
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_flag("--mps-dump", opts.mps_dump, "also write the optimization models as MPS");
    sub->add_option("--seed", seed, "generate a random test instance instead of reading --config");
  };

  auto* da = app.add_subcommand("day-ahead", "solve the day-ahead schedule and write the commitment");
  auto* rf = app.add_subcommand("reforecast", "re-solve with the late inflow forecast, write raw imbalances");
  auto* qt = app.add_subcommand("quotes", "synthesize the intraday quote ladder");
  auto* rb = app.add_subcommand("rebalance", "re-optimize against the quotes under the commitment");
  auto* rn = app.add_subcommand("run", "full pipeline and four-scenario comparison");
  auto* va = app.add_subcommand("validate", "check the configuration and inputs");
  std::string mode = "plant";
  rb->add_option("--mode", mode, "plant or portfolio")->check(CLI::IsMember({"plant", "portfolio"}));
  for (auto* sub : {da, rf, qt, rb, rn, va}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    auto* sub = app.get_subcommands().front();
    if (!config.empty()) opts.config = config;
    if (!out.empty()) opts.out = out;
    if (sub->count("--seed") > 0) opts.seed = seed;
    const pipeline::Context ctx = pipeline::load(opts);

    pipeline::Outputs files;
    if (sub == da) {
      files = pipeline::day_ahead(ctx);
    } else if (sub == rf) {
      files = pipeline::reforecast(ctx);
    } else if (sub == qt) {
      files = pipeline::quotes(ctx);
    } else if (sub == rb) {
      files = pipeline::rebalance(ctx, mode == "plant" ? LoadMode::Plant : LoadMode::Portfolio);
    } else if (sub == rn) {
      files = pipeline::run(ctx);
    } else {
      std::cout << pipeline::describe(ctx) << "ok\n";
      return kOk;
    }
    pipeline::commit(ctx.out, files);
    for (const auto& [name, content] : files) fmt::print("wrote {}\n", (ctx.out / name).string());
    if (sub == rn) std::cout << files.at("scenarios.txt");
    return kOk;
  } catch (const ValidationError& e) {
    return report("validation error", e, kValidation);
  } catch (const DomainError& e) {
    return report("validation error", e, kValidation);
  } catch (const InfeasibleError& e) {
    return report("infeasible", e, kInfeasible);
  } catch (const UnboundedError& e) {
    return report("unbounded", e, kInfeasible);
  } catch (const IoError& e) {
    return report("io error", e, kIo);
  } catch (const std::exception& e) {
    return report("error", e, kFailure);
  }
}
