#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pastegen/errors.hpp"
#include "pastegen/runner.hpp"

namespace {

// Exit codes: 0 success, 1 validation/parse, 2 runtime with skips, 3 fatal I/O.
enum ExitCode { kOk = 0, kBadInput = 1, kRuntimeSkips = 2, kFatal = 3 };

int cmd_generate(const std::string& config_path, int workers_override,
                 long long seed_override) {
  pastegen::GenerationConfig cfg = pastegen::parse_config(config_path);
  if (workers_override > 0) cfg.workers = workers_override;
  if (seed_override >= 0) cfg.global_seed = static_cast<std::uint64_t>(seed_override);

  pastegen::RunStats stats = pastegen::run_generate(cfg, std::cerr);
  std::cout << "wrote " << stats.images_written << " images to "
            << (cfg.output_dir / "images").string() << '\n';
  if (stats.images_failed > 0 || stats.instances_skipped > 0) {
    std::cout << "skipped: " << stats.images_failed << " images, "
              << stats.instances_skipped << " instances\n";
    return kRuntimeSkips;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cut-and-paste dataset generator with a domain-gap meter"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "generate an annotated dataset");
  std::string gen_config;
  int gen_workers = 0;
  long long gen_seed = -1;
  gen->add_option("--config", gen_config, "JSON config file")->required();
  gen->add_option("--workers", gen_workers, "override worker count");
  gen->add_option("--seed", gen_seed, "override global seed");

  // gapmeter
  auto* gap = app.add_subcommand("gapmeter", "measure foreground/background domain gaps");
  pastegen::GapmeterOptions opts;
  std::string gap_source, gap_target, gap_out = "gap_report.json", gap_features;
  std::string gap_simplify = "gray";
  long long gap_seed = 0;
  bool no_scene_disjoint = false;
  gap->add_option("--source", gap_source, "source image set directory")->required();
  gap->add_option("--target", gap_target, "target image set directory")->required();
  gap->add_option("--out", gap_out, "report output file");
  gap->add_flag("--before-after", opts.before_after,
                "also measure with the balancing transforms applied to the source");
  gap->add_option("--n-patches", opts.n_patches, "patches per region per domain");
  gap->add_option("--epochs", opts.hp.epochs, "training epochs");
  gap->add_option("--lr", opts.hp.lr, "learning rate");
  gap->add_option("--momentum", opts.hp.momentum, "SGD momentum");
  gap->add_option("--batch", opts.hp.batch_size, "batch size");
  gap->add_option("--seed", gap_seed, "random seed");
  gap->add_option("--features-out", gap_features, "dump fc2 features as CSV");
  gap->add_flag("--no-scene-disjoint", no_scene_disjoint,
                "split patches without scene disjointness");
  gap->add_option("--after-simplify", gap_simplify,
                  "simplification for the 'after' row (gray, blur, quantize)");

  // preview
  auto* prev = app.add_subcommand("preview", "contact sheet of sample composites");
  std::string prev_config, prev_out = "preview.png";
  int prev_k = 1;
  prev->add_option("--config", prev_config, "JSON config file")->required();
  prev->add_option("-k", prev_k, "number of samples");
  prev->add_option("--out", prev_out, "contact sheet file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_config, gen_workers, gen_seed);
    if (gap->parsed()) {
      opts.source_dir = gap_source;
      opts.target_dir = gap_target;
      opts.out_file = gap_out;
      opts.features_file = gap_features;
      opts.seed = static_cast<std::uint64_t>(gap_seed);
      opts.split.scene_disjoint = !no_scene_disjoint;
      opts.after_simplify.steps = {
          {pastegen::simplify_method_from_string(gap_simplify), 2.0}};
      pastegen::run_gapmeter(opts, std::cerr);
      std::cout << "report written to " << opts.out_file.string() << '\n';
      return kOk;
    }
    if (prev->parsed()) {
      pastegen::GenerationConfig cfg = pastegen::parse_config(prev_config);
      pastegen::RunStats stats = pastegen::run_preview(cfg, prev_k, prev_out, std::cout);
      std::cout << "contact sheet written to " << prev_out << '\n';
      return stats.instances_skipped > 0 ? kRuntimeSkips : kOk;
    }
  } catch (const pastegen::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const pastegen::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadInput;
  } catch (const pastegen::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFatal;
  }
  return kOk;
}
