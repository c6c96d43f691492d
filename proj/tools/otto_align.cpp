// otto-align: null-aware word alignment and hallucination/omission scoring
// over precomputed word embeddings.

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "otto/pipeline.h"

namespace {

using otto::RunConfig;

// "-" selects stdin/stdout.
class Input {
 public:
  explicit Input(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ifstream>(path);
    if (!*file_) throw otto::Error("cannot open " + path);
  }
  std::istream& get() { return file_ ? *file_ : std::cin; }

 private:
  std::unique_ptr<std::ifstream> file_;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw otto::Error("cannot open " + path + " for writing");
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void report_summary(const char* cmd, const otto::RunSummary& s) {
  std::cerr << cmd << ": " << s.records << " records, " << s.failed << " failed, " << s.warned
            << " with solver warnings" << (s.aborted ? " (stopped: --strict)" : "") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word alignment with adaptive null alignment, and MT hallucination/omission scores"};
  app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string strategy = "ottawa";
  std::string null_distance = "median";

  app.add_option("--strategy", strategy, "greedy | assignment | ot | pot | ottawa")
      ->check(CLI::IsMember({"greedy", "assignment", "ot", "pot", "ottawa"}))
      ->capture_default_str();
  app.add_option("--epsilon", cfg.aligner.solver.epsilon, "entropic regularization")->capture_default_str();
  app.add_option("--max-iters", cfg.aligner.solver.max_iterations, "Sinkhorn iteration cap")
      ->capture_default_str();
  app.add_option("--tol", cfg.aligner.solver.tolerance, "L1 marginal residual for convergence")
      ->capture_default_str();
  app.add_flag("!--no-log-domain", cfg.aligner.solver.log_domain, "use plain scaling iterations");
  app.add_option("--pot-mass", cfg.aligner.pot_mass, "partial OT transported mass")->capture_default_str();
  app.add_option("--pot-tau", cfg.aligner.pot_tau, "partial OT threshold, as a fraction of max(1/m,1/n)")
      ->capture_default_str();
  app.add_flag("--pot-tau-absolute", cfg.aligner.pot_tau_absolute, "treat --pot-tau as an absolute mass");
  app.add_option("--null-distance", null_distance, "median | mean of pairwise costs")
      ->check(CLI::IsMember({"median", "mean"}))
      ->capture_default_str();
  app.add_flag("--paper-literal-eq78", cfg.scores.paper_literal_eq78,
               "pair hallucination with the source-side unaligned ratio and omission with the target side");
  app.add_flag("--normalize-before-pool", cfg.read.normalize_before_pool,
               "unit-normalize token vectors before mean pooling");
  app.add_flag("--emit-null", cfg.emit_null, "append i-∅ / ∅-j tokens for null assignments");
  app.add_flag("--strict", cfg.strict, "stop at the first bad record");
  app.add_option("--jobs", cfg.jobs, "worker threads")
      ->envname("OTTO_ALIGN_JOBS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string input = "-", output = "-";

  auto* align_cmd = app.add_subcommand("align", "write one Pharaoh alignment line per record");
  align_cmd->add_option("input", input, "embedding records (JSONL), - for stdin")->required();
  align_cmd->add_option("-o,--output", output, "alignment file, - for stdout");

  auto* detect_cmd = app.add_subcommand("detect", "write one JSON score object per record (OTTAWA)");
  detect_cmd->add_option("input", input, "embedding records (JSONL), - for stdin")->required();
  detect_cmd->add_option("-o,--output", output, "scores file, - for stdout");

  std::string pred, gold, scores, labels, format = "json";
  auto* aer_cmd = app.add_subcommand("eval-aer", "alignment error rate against gold alignments");
  aer_cmd->add_option("predicted", pred, "Pharaoh alignment file")->required()->check(CLI::ExistingFile);
  aer_cmd->add_option("gold", gold, "gold file (i-j sure, i?j possible)")->required()->check(CLI::ExistingFile);
  aer_cmd->add_option("--format", format, "json | text")->check(CLI::IsMember({"json", "text"}));

  auto* auc_cmd = app.add_subcommand("eval-auc", "ROC AUC of detect scores against severity labels");
  auc_cmd->add_option("scores", scores, "detect output")->required()->check(CLI::ExistingFile);
  auc_cmd->add_option("labels", labels, "label lines keyed by pair_id")->required()->check(CLI::ExistingFile);
  auc_cmd->add_option("--format", format, "json | text")->check(CLI::IsMember({"json", "text"}));

  std::string pair_id;
  std::size_t index = 0;
  auto* inspect_cmd = app.add_subcommand("inspect", "print cost matrix, null geometry, plans and alignment");
  inspect_cmd->add_option("input", input, "embedding records (JSONL)")->required();
  auto* id_opt = inspect_cmd->add_option("--pair-id", pair_id, "record to show");
  inspect_cmd->add_option("--index", index, "0-based record index (default 0)")->excludes(id_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.aligner.strategy = otto::parse_strategy(strategy);
    cfg.aligner.null_distance =
        null_distance == "mean" ? otto::NullDistance::Mean : otto::NullDistance::Median;
    cfg.check();

    if (*align_cmd || *detect_cmd) {
      Input in(input);
      Output out(output);
      const bool is_align = static_cast<bool>(*align_cmd);
      const otto::RunSummary s = is_align ? otto::run_align(in.get(), out.get(), std::cerr, cfg)
                                          : otto::run_detect(in.get(), out.get(), std::cerr, cfg);
      out.get().flush();
      report_summary(is_align ? "align" : "detect", s);
      return s.exit_code();
    }

    if (*aer_cmd || *auc_cmd) {
      Input a(*aer_cmd ? pred : scores);
      Input b(*aer_cmd ? gold : labels);
      const nlohmann::json report = *aer_cmd ? otto::eval_aer(a.get(), b.get()) : otto::eval_auc(a.get(), b.get());
      std::cout << (format == "text" ? otto::report_text(report) : report.dump(2) + "\n");
      return 0;
    }

    if (*inspect_cmd) {
      Input in(input);
      otto::RecordReader reader(in.get(), cfg.read);
      std::size_t k = 0;
      while (auto r = reader.next()) {
        const bool hit = id_opt->count() > 0 ? r->pair_id == pair_id : k == index;
        if (hit) {
          std::cout << otto::inspect_record(*r, cfg);
          return 0;
        }
        ++k;
      }
      std::cerr << "inspect: record not found\n";
      return 2;
    }
  } catch (const otto::JoinMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
