// tools/cli.cc

// Copyright 2026  The jdapot Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif
#include "jdapot/adapt_model.h"
#include "jdapot/embedding_set.h"
#include "jdapot/errors.h"
#include "jdapot/jda_trainer.h"
#include "jdapot/matrix_io.h"
#include "jdapot/metrics.h"
#include "jdapot/pca.h"
#include "jdapot/synthetic.h"

namespace jdapot {
namespace cli {

namespace {

std::string Join(const std::filesystem::path &dir, const char *name) {
  return (dir / name).string();
}

std::vector<int> ParseIntList(const std::string &flag, const std::string &text) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw InvalidArgument(flag + ": \"" + item + "\" is not an integer");
    }
  }
  if (values.empty()) throw InvalidArgument(flag + ": empty list");
  return values;
}

std::string FormatCounts(const EmbeddingSet &set) {
  std::map<int, int> counts;
  for (int l : set.labels) counts[l]++;
  std::ostringstream os;
  os << set.NumSamples() << " samples [";
  bool first = true;
  for (auto [label, n] : counts) {
    os << (first ? "" : " ") << label << ":" << n;
    first = false;
  }
  os << "]";
  return os.str();
}

// Sinkhorn / cost / POT flags shared by adapt and export-coupling.
void AddAlignmentFlags(CLI::App *cmd, JdaHyperParams *hp) {
  cmd->add_option("--alpha", hp->alpha, "Weight of the latent-feature distance")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--beta", hp->beta, "Weight of the label distance")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--b", hp->pot.cost_threshold, "POT transport cost threshold")
      ->capture_default_str();
  cmd->add_option("--scale", hp->pot.scale, "POT sigmoid scale")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--epsilon", hp->epsilon,
                  "Absolute Sinkhorn regularisation (0: relative to mean cost)")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--epsilon-relative", hp->epsilon_relative,
                  "Sinkhorn regularisation as a fraction of the mean cost")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--sinkhorn-max-iter", hp->sinkhorn_max_iter)
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--sinkhorn-tol", hp->sinkhorn_tol)
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--pot-weighted-cost", hp->pot_coupling_on_weighted_cost,
                "Solve the POT coupling against cost * weight");
}

int CmdSynth(const SynthConfig &config, const std::string &out_dir, std::ostream &out) {
  config.Check();
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  auto [source, target] = GenerateSynthetic(config);
  SaveEmbeddings(source, Join(dir, "source.csv"));
  SaveEmbeddings(target, Join(dir, "target.csv"));
  out << "source: " << FormatCounts(source) << "; target: " << FormatCounts(target)
      << "\n";
  return kExitOk;
}

struct AdaptFlags {
  std::string source, target, checkpoint, history, init_checkpoint, mode = "jda-pot";
  int latent_dim = 16;
};

int CmdAdapt(const AdaptFlags &flags, JdaHyperParams hp, std::ostream &out) {
  hp.mode = ParseAdaptMode(flags.mode);
  hp.Check();
  EmbeddingSet source = LoadEmbeddings(flags.source, Domain::kSource);
  EmbeddingSet target = LoadEmbeddings(flags.target, Domain::kTarget);
  if (source.Dim() != target.Dim())
    throw DimensionError("source dimension " + std::to_string(source.Dim()) +
                         " differs from target dimension " +
                         std::to_string(target.Dim()));
  AdaptModel initial =
      flags.init_checkpoint.empty()
          ? InitModel(source.Dim(), flags.latent_dim, source.n_classes, hp.seed)
          : LoadCheckpoint(flags.init_checkpoint);
  AdaptResult result = Adapt(source, target, initial, hp);
  SaveCheckpoint(result.model, flags.checkpoint);
  result.history.WriteCsv(flags.history);
  int unconverged = 0;
  for (const auto &r : result.history.records) unconverged += !r.converged;
  const auto &last = result.history.records.empty() ? IterationRecord{}
                                                    : result.history.records.back();
  out << "mode=" << AdaptModeName(hp.mode)
      << " iterations=" << result.history.records.size() << " final_ce=" << last.ce
      << " final_adaptation=" << last.adaptation << " final_total=" << last.total
      << " unconverged_couplings=" << unconverged << "\n";
  return kExitOk;
}

struct EvalFlags {
  std::string checkpoint, test, scores_out;
  double p_target = 0.5;
  double threshold = 0.5;
  bool eer_per_language_mean = false;
  bool all_languages = false;
};

int CmdEval(const EvalFlags &flags, std::ostream &out) {
  AdaptModel model = LoadCheckpoint(flags.checkpoint);
  EmbeddingSet test = LoadEmbeddings(flags.test, Domain::kTarget);
  if (!test.AllLabelsKnown())
    throw InvalidArgument("--test: evaluation needs a fully labelled file");
  if (test.n_classes != model.NumClasses())
    throw DimensionError("test file declares " + std::to_string(test.n_classes) +
                         " classes, model has " + std::to_string(model.NumClasses()));
  Prediction pred = Predict(model, test);
  TrialScores trials{pred.probs, test.labels};
  if (!flags.scores_out.empty()) SaveTrialScores(trials, flags.scores_out);

  TrialScores scored = flags.all_languages ? trials : RestrictToPresentLanguages(trials);
  EerOptions eer_opts;
  eer_opts.per_language_mean = flags.eer_per_language_mean;
  const double eer = Eer(scored, eer_opts);
  const double cavg = scored.NumLanguages() >= 2
                          ? Cavg(scored, flags.p_target, flags.threshold)
                          : 0.0;
  out.precision(6);
  out << std::fixed;
  out << "eer=" << eer << "\n";
  out << "cavg=" << cavg << "\n";
  out << "accuracy=" << Accuracy(pred.labels, test.labels) << "\n";
  return kExitOk;
}

struct ExportFlags {
  std::string checkpoint, source, target, out_dir, out;
  int batch_source = 32, batch_target = 32;
};

std::vector<int> StableOrder(const std::vector<int> &keys) {
  std::vector<int> order(keys.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return keys[a] < keys[b]; });
  return order;
}

Matrix Permute(const Matrix &m, const std::vector<int> &rows, const std::vector<int> &cols) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < rows.size(); i++)
    for (std::size_t j = 0; j < cols.size(); j++)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
  return out;
}

int CmdExportCoupling(const ExportFlags &flags, JdaHyperParams hp, std::ostream &out) {
  hp.mode = AdaptMode::kJdaPot;
  hp.Check();
  AdaptModel model = LoadCheckpoint(flags.checkpoint);
  EmbeddingSet source = LoadEmbeddings(flags.source, Domain::kSource);
  EmbeddingSet target = LoadEmbeddings(flags.target, Domain::kTarget);
  if (!source.AllLabelsKnown()) throw InvalidArgument("--source: needs labels");
  if (flags.batch_source > source.NumSamples())
    throw InvalidArgument("--batch-source " + std::to_string(flags.batch_source) +
                          " exceeds the " + std::to_string(source.NumSamples()) +
                          " source samples");
  if (flags.batch_target > target.NumSamples())
    throw InvalidArgument("--batch-target " + std::to_string(flags.batch_target) +
                          " exceeds the " + std::to_string(target.NumSamples()) +
                          " target samples");

  Rng source_rng = MakeRng(hp.seed, 21), target_rng = MakeRng(hp.seed, 22);
  MiniBatch sb = SampleMiniBatch(source, flags.batch_source, source_rng);
  MiniBatch tb = SampleMiniBatch(target, flags.batch_target, target_rng);
  AlignmentSnapshot snap = ComputeAlignment(model, sb.vectors, sb.labels, tb.vectors, hp);

  const std::vector<int> row_order = StableOrder(sb.labels);
  const std::vector<int> col_order = StableOrder(snap.target_pseudo_labels);
  const Matrix &plan = snap.adaptation.coupling->plan;
  const Matrix &weight = *snap.adaptation.weight;

  std::filesystem::path dir(flags.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + flags.out_dir + ": " + ec.message());
  SaveMatrixCsv(Permute(snap.cost, row_order, col_order), Join(dir, "cost.csv"));
  SaveMatrixCsv(Permute(plan, row_order, col_order), Join(dir, "coupling.csv"));
  SaveMatrixCsv(Permute(weight, row_order, col_order), Join(dir, "weight.csv"));
  SaveMatrixCsv(Permute(plan.cwiseProduct(weight), row_order, col_order),
                Join(dir, "weighted_coupling.csv"));

  std::ofstream order(Join(dir, "order.csv"));
  if (!order) throw IoError("cannot write order.csv in " + flags.out_dir);
  order << "axis,position,sample_index,label,true_label\n";
  for (std::size_t i = 0; i < row_order.size(); i++)
    order << "source," << i << "," << sb.indices[row_order[i]] << ","
          << sb.labels[row_order[i]] << "," << sb.labels[row_order[i]] << "\n";
  for (std::size_t j = 0; j < col_order.size(); j++)
    order << "target," << j << "," << tb.indices[col_order[j]] << ","
          << snap.target_pseudo_labels[col_order[j]] << "," << tb.labels[col_order[j]]
          << "\n";
  if (!order) throw IoError("error writing order.csv");

  const Coupling &c = *snap.adaptation.coupling;
  out << "exported " << plan.rows() << "x" << plan.cols()
      << " matrices; sinkhorn_iterations=" << c.iterations
      << " marginal_error=" << c.marginal_error << "\n";
  return c.converged ? kExitOk : kExitNumeric;
}

int CmdExportPca(const ExportFlags &flags, std::ostream &out) {
  AdaptModel model = LoadCheckpoint(flags.checkpoint);
  EmbeddingSet source = LoadEmbeddings(flags.source, Domain::kSource);
  EmbeddingSet target = LoadEmbeddings(flags.target, Domain::kTarget);
  Matrix zs = Project(model, source.vectors);
  Matrix zt = Project(model, target.vectors);
  Matrix all(zs.rows() + zt.rows(), zs.cols());
  all << zs, zt;
  PcaProjection pca = FitPca(all, 2);
  Matrix proj = pca.Apply(all);

  std::FILE *fp = std::fopen(flags.out.c_str(), "w");
  if (fp == nullptr) throw IoError("cannot open " + flags.out + " for writing");
  std::fprintf(fp, "domain,label,pc1,pc2\n");
  for (Eigen::Index i = 0; i < proj.rows(); i++) {
    const bool is_source = i < zs.rows();
    const int label = is_source ? source.labels[i] : target.labels[i - zs.rows()];
    std::fprintf(fp, "%s,%d,%.17g,%.17g\n", is_source ? "source" : "target", label,
                 proj(i, 0), proj(i, 1));
  }
  bool bad = std::ferror(fp) != 0;
  if (std::fclose(fp) != 0 || bad) throw IoError("error writing " + flags.out);
  out << "wrote " << proj.rows() << " points; explained variance " << pca.explained(0)
      << ", " << pca.explained(1) << "\n";
  return kExitOk;
}

}  // namespace

std::vector<std::string> ExpandConfigFile(const std::vector<std::string> &args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); i++) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return args;

  std::ifstream is(config_path);
  if (!is) throw IoError("cannot open config file " + config_path);
  std::vector<std::string> from_file;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    line_no++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ParseError(config_path, line_no, "expected key=value");
    std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    std::replace(key.begin(), key.end(), '_', '-');
    from_file.push_back("--" + key + "=" + value);
  }
  // Keep the subcommand name first so its flags parse in its scope.
  std::vector<std::string> expanded;
  std::size_t start = 0;
  if (!rest.empty() && rest[0].rfind("-", 0) != 0) expanded.push_back(rest[start++]);
  expanded.insert(expanded.end(), from_file.begin(), from_file.end());
  expanded.insert(expanded.end(), rest.begin() + static_cast<long>(start), rest.end());
  return expanded;
}

int Run(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err) {
  CLI::App app{"jdapot: joint distribution alignment with partial optimal transport"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every command");

  // synth
  SynthConfig synth;
  std::string synth_out, subset_text = "1,2,5,7,8,9";
  auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic source/target pair");
  synth_cmd->add_option("--out-dir", synth_out, "Directory for source.csv and target.csv")
      ->required();
  synth_cmd->add_option("--dim", synth.dim)->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--n-source-classes", synth.n_source_classes)
      ->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--target-subset", subset_text, "Comma-separated target class ids")
      ->capture_default_str();
  synth_cmd->add_option("--samples-source", synth.samples_per_class_source, "Per class")
      ->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--samples-target", synth.samples_per_class_target, "Per class")
      ->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--spread", synth.cluster_spread, "Within-class standard deviation")
      ->check(CLI::PositiveNumber)->capture_default_str();
  synth_cmd->add_option("--separation", synth.mean_separation,
                        "Class-mean distance in units of --spread (>= 4)")
      ->check(CLI::Range(kMinMeanSeparation, 1e6))->capture_default_str();
  synth_cmd->add_option("--rotation", synth.shift_rotation_angle, "Shift angle (radians)")
      ->capture_default_str();
  synth_cmd->add_option("--translation", synth.shift_translation_scale,
                        "Length of the shift translation")->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise_scale, "Additive target noise std")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();

  // adapt
  JdaHyperParams adapt_hp;
  adapt_hp.iterations = 1000;
  AdaptFlags adapt_flags;
  auto *adapt_cmd = app.add_subcommand("adapt", "Train / adapt a model");
  adapt_cmd->add_option("--source", adapt_flags.source, "Labelled source CSV")
      ->required()->check(CLI::ExistingFile);
  adapt_cmd->add_option("--target", adapt_flags.target, "Target CSV (labels ignored)")
      ->required()->check(CLI::ExistingFile);
  adapt_cmd->add_option("--checkpoint", adapt_flags.checkpoint, "Output checkpoint")
      ->required();
  adapt_cmd->add_option("--history", adapt_flags.history, "Output history CSV")->required();
  adapt_cmd->add_option("--init-checkpoint", adapt_flags.init_checkpoint,
                        "Start from this model instead of a fresh one");
  adapt_cmd->add_option("--mode", adapt_flags.mode, "source-only | jda-ot | jda-pot")
      ->check(CLI::IsMember({"source-only", "jda-ot", "jda-pot"}))->capture_default_str();
  adapt_cmd->add_option("--lambda", adapt_hp.lambda, "Weight of the adaptation loss")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  adapt_cmd->add_option("--lr", adapt_hp.learning_rate, "Adam learning rate")
      ->check(CLI::PositiveNumber)->capture_default_str();
  adapt_cmd->add_option("--iterations", adapt_hp.iterations, "Adaptation iterations")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  adapt_cmd->add_option("--pretrain-iterations", adapt_hp.pretrain_iterations,
                        "Source-only iterations before adaptation starts")
      ->check(CLI::NonNegativeNumber)->capture_default_str();
  adapt_cmd->add_option("--inner-steps", adapt_hp.inner_steps, "Adam steps per coupling")
      ->check(CLI::PositiveNumber)->capture_default_str();
  adapt_cmd->add_option("--batch-source", adapt_hp.batch_source)
      ->check(CLI::PositiveNumber)->capture_default_str();
  adapt_cmd->add_option("--batch-target", adapt_hp.batch_target)
      ->check(CLI::PositiveNumber)->capture_default_str();
  adapt_cmd->add_option("--latent-dim", adapt_flags.latent_dim)
      ->check(CLI::Range(2, 1 << 20))->capture_default_str();
  adapt_cmd->add_option("--seed", adapt_hp.seed)->capture_default_str();
  AddAlignmentFlags(adapt_cmd, &adapt_hp);

  // eval
  EvalFlags eval_flags;
  auto *eval_cmd = app.add_subcommand("eval", "Score a labelled test set");
  eval_cmd->add_option("--checkpoint", eval_flags.checkpoint)->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--test", eval_flags.test, "Labelled test CSV")->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--scores-out", eval_flags.scores_out, "Write per-trial scores here");
  eval_cmd->add_option("--p-target", eval_flags.p_target)
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  eval_cmd->add_option("--threshold", eval_flags.threshold, "Cavg decision threshold")
      ->capture_default_str();
  eval_cmd->add_flag("--eer-per-language-mean", eval_flags.eer_per_language_mean,
                     "Average per-language EERs instead of pooling");
  eval_cmd->add_flag("--all-languages", eval_flags.all_languages,
                     "Score every model language, not only those in the test set");

  // export-coupling / export-pca
  JdaHyperParams export_hp;
  ExportFlags export_flags;
  auto *coupling_cmd =
      app.add_subcommand("export-coupling", "Write cost, coupling and weight matrices");
  coupling_cmd->add_option("--checkpoint", export_flags.checkpoint)->required()
      ->check(CLI::ExistingFile);
  coupling_cmd->add_option("--source", export_flags.source)->required()
      ->check(CLI::ExistingFile);
  coupling_cmd->add_option("--target", export_flags.target)->required()
      ->check(CLI::ExistingFile);
  coupling_cmd->add_option("--out-dir", export_flags.out_dir)->required();
  coupling_cmd->add_option("--batch-source", export_flags.batch_source)
      ->check(CLI::PositiveNumber)->capture_default_str();
  coupling_cmd->add_option("--batch-target", export_flags.batch_target)
      ->check(CLI::PositiveNumber)->capture_default_str();
  coupling_cmd->add_option("--seed", export_hp.seed)->capture_default_str();
  AddAlignmentFlags(coupling_cmd, &export_hp);

  auto *pca_cmd = app.add_subcommand("export-pca", "Write a 2-D PCA of latent features");
  pca_cmd->add_option("--checkpoint", export_flags.checkpoint)->required()
      ->check(CLI::ExistingFile);
  pca_cmd->add_option("--source", export_flags.source)->required()->check(CLI::ExistingFile);
  pca_cmd->add_option("--target", export_flags.target)->required()->check(CLI::ExistingFile);
  pca_cmd->add_option("--out", export_flags.out, "Output CSV")->required();

  try {
    std::vector<std::string> args = ExpandConfigFile(raw_args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);

    if (*synth_cmd) {
      synth.target_class_subset = ParseIntList("--target-subset", subset_text);
      for (int c : synth.target_class_subset)
        if (c < 0 || c >= synth.n_source_classes)
          throw InvalidArgument("--target-subset: class " + std::to_string(c) +
                                " outside [0, " + std::to_string(synth.n_source_classes) +
                                ")");
      return CmdSynth(synth, synth_out, out);
    }
    if (*adapt_cmd) return CmdAdapt(adapt_flags, adapt_hp, out);
    if (*eval_cmd) return CmdEval(eval_flags, out);
    if (*coupling_cmd) return CmdExportCoupling(export_flags, export_hp, out);
    if (*pca_cmd) return CmdExportPca(export_flags, out);
    return kExitUsage;
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const ParseError &e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const IoError &e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const DimensionError &e) {
    err << "dimension error: " << e.what() << "\n";
    return kExitDimension;
  } catch (const InvalidArgument &e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError &e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace cli
}  // namespace jdapot
