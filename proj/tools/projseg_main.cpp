// projseg: render point clouds into views, score them, fuse scores back onto
// the points and evaluate.
//
//   projseg render   --config run.cfg
//   projseg score    --config run.cfg [--scorer baseline|external]
//   projseg fuse     --config run.cfg
//   projseg eval     --predictions P --labels GT [--output DIR]
//   projseg pipeline --config run.cfg
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 scorer failure.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "projseg/config.hpp"
#include "projseg/error.hpp"
#include "projseg/external_scorer.hpp"
#include "projseg/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string output;
  std::optional<int> views;
  std::string scorer;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "pipeline configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output", o.output, "output directory (overrides paths.output)");
  cmd->add_option("--views", o.views, "views per orbit (overrides orbit.angles)")->check(CLI::PositiveNumber);
  cmd->add_option("--scorer", o.scorer, "scorer (overrides scorer.kind)")->check(CLI::IsMember({"baseline", "external"}));
  cmd->add_option("--jobs", o.jobs, "worker threads, 0 = all cores (overrides run.jobs)")->check(CLI::NonNegativeNumber);
}

projseg::PipelineConfig resolve(const Overrides& o) {
  auto cfg = projseg::load_config(o.config);
  if (!o.output.empty()) cfg.output_dir = o.output;
  if (o.views) cfg.angles_per_orbit = *o.views;
  if (o.scorer == "baseline") cfg.scorer = projseg::ScorerKind::Baseline;
  if (o.scorer == "external") cfg.scorer = projseg::ScorerKind::External;
  if (o.jobs) cfg.jobs = *o.jobs;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projective point cloud semantic segmentation"};
  app.require_subcommand(1);
  Overrides o;

  auto* render = app.add_subcommand("render", "plan, render and filter views");
  auto* score = app.add_subcommand("score", "score every kept view");
  auto* fuse = app.add_subcommand("fuse", "fuse view scores onto points");
  auto* pipeline = app.add_subcommand("pipeline", "render, score, fuse and evaluate");
  for (auto* cmd : {render, score, fuse, pipeline}) add_common(cmd, o);

  auto* eval = app.add_subcommand("eval", "compare predictions with ground truth");
  std::string predictions, labels, eval_output;
  eval->add_option("--predictions", predictions, "predicted labels file")->required();
  eval->add_option("--labels", labels, "ground-truth labels file")->required();
  eval->add_option("--output", eval_output, "directory for metrics.txt and metrics.kv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*eval) {
      const auto report = projseg::cmd_eval(predictions, labels, eval_output);
      std::cout << projseg::format_report_text(report);
      return 0;
    }
    const auto cfg = resolve(o);
    if (*render) {
      const auto s = projseg::cmd_render(cfg);
      std::cout << "rendered " << s.planned << " views, kept " << s.kept << "\n";
    } else if (*score) {
      projseg::cmd_score(cfg);
    } else if (*fuse) {
      projseg::cmd_fuse(cfg);
    } else if (*pipeline) {
      projseg::cmd_pipeline(cfg);
      if (!cfg.labels_path.empty()) {
        const projseg::OutputLayout out{cfg.output_dir};
        std::cout << projseg::format_report_text(projseg::cmd_eval(out.predictions(), cfg.labels_path, ""));
      }
    }
    return 0;
  } catch (const projseg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const projseg::ScorerError& e) {
    std::cerr << "scorer error: " << e.what() << "\n";
    return 3;
  } catch (const projseg::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
