// depsrl: dependency-based semantic role labeler.
//
// Subcommands: train, predict, eval, ablate, gradcheck. Exit codes: 0 on
// success, 2 usage errors, 3 data errors, 4 numeric failures.

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depsrl/checkpoint.hpp"
#include "depsrl/classifier.hpp"
#include "depsrl/conll.hpp"
#include "depsrl/embeddings.hpp"
#include "depsrl/gradcheck.hpp"
#include "depsrl/report.hpp"
#include "depsrl/trainer.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonModelFlags {
  std::string lang = "english";
  std::string variant = "compositional";
  bool no_pos = false;
  bool no_pred_flag = false;
  double alpha = 0.25;
  double lr = 0.01;
  std::size_t layers = 4;
  std::size_t hidden = 512;
  std::size_t word_dim = 0;  // 0 = language default
  std::size_t pos_dim = 16;
  std::size_t lemma_dim = 100;
  std::size_t role_dim = 128;
  std::size_t lemma_out_dim = 128;
  std::size_t min_lemma_freq = 2;
  bool dropout_trainable_only = false;
  std::uint64_t seed = 1;
  std::string precision = "f64";

  depsrl::ModelConfig to_config(std::size_t pretrained_dim) const {
    depsrl::ModelConfig cfg;
    const std::size_t lang_dim = depsrl::ModelConfig::language_word_dim(lang);
    cfg.d_word_trainable = word_dim ? word_dim : lang_dim;
    cfg.d_word_pretrained = pretrained_dim;
    cfg.d_pos = pos_dim;
    cfg.d_lemma_in = lemma_dim;
    cfg.d_hidden = hidden;
    cfg.d_role = role_dim;
    cfg.d_lemma_out = lemma_out_dim;
    cfg.layers = layers;
    cfg.alpha = alpha;
    cfg.learning_rate = lr;
    cfg.variant = depsrl::classifier_variant_from(variant);
    cfg.use_pos = !no_pos;
    cfg.use_predicate_flag = !no_pred_flag;
    cfg.min_lemma_freq = min_lemma_freq;
    cfg.seed = seed;
    return cfg;
  }
};

struct ScheduleFlags {
  std::size_t epochs = 30;
  std::size_t patience = 5;
  std::size_t batch = 1;
  std::size_t eval_every = 1;
  double clip_norm = 0.0;
  std::size_t threads = 1;

  depsrl::TrainSchedule to_schedule() const {
    depsrl::TrainSchedule s;
    s.max_epochs = epochs;
    s.patience = patience;
    s.batch_size = batch;
    s.eval_every = eval_every;
    s.clip_norm = clip_norm;
    s.threads = threads;
    return s;
  }
};

void add_model_flags(CLI::App* cmd, CommonModelFlags& f) {
  cmd->add_option("--lang", f.lang, "Language preset for word dims")->default_str("english");
  cmd->add_option("--variant", f.variant, "basic | predicate-state | compositional")
      ->default_str("compositional");
  cmd->add_flag("--no-pos", f.no_pos, "Zero out the POS embedding block");
  cmd->add_flag("--no-pred-flag", f.no_pred_flag,
                "Single-pass encoding: hold the predicate flag at zero");
  cmd->add_option("--alpha", f.alpha, "Word dropout rate parameter");
  cmd->add_option("--lr", f.lr, "Adam learning rate");
  cmd->add_option("--layers", f.layers, "Stacked encoder depth");
  cmd->add_option("--hidden", f.hidden, "LSTM hidden width per direction");
  cmd->add_option("--word-dim", f.word_dim, "Trainable word embedding width (0 = language default)");
  cmd->add_option("--pos-dim", f.pos_dim, "POS embedding width");
  cmd->add_option("--lemma-dim", f.lemma_dim, "Input lemma embedding width");
  cmd->add_option("--role-dim", f.role_dim, "Role embedding width");
  cmd->add_option("--lemma-out-dim", f.lemma_out_dim, "Output lemma embedding width");
  cmd->add_option("--min-lemma-freq", f.min_lemma_freq, "Lemmas rarer than this become UNK");
  cmd->add_option("--seed", f.seed, "Seed for all randomness");
  cmd->add_option("--precision", f.precision, "f64 | f32")->check(CLI::IsMember({"f64", "f32"}));
}

void add_schedule_flags(CLI::App* cmd, ScheduleFlags& f) {
  cmd->add_option("--epochs", f.epochs, "Maximum training epochs");
  cmd->add_option("--patience", f.patience, "Dev evaluations without improvement before stopping");
  cmd->add_option("--batch", f.batch, "Instances per optimizer step");
  cmd->add_option("--eval-every", f.eval_every, "Epochs between dev evaluations");
  cmd->add_option("--clip-norm", f.clip_norm, "Global gradient norm clip (0 = off)");
  cmd->add_option("--threads", f.threads, "Worker threads within a batch (1 = deterministic)");
}

std::vector<depsrl::Sentence> read_corpus(const std::string& path) {
  if (path == "-") return depsrl::read_conll2009(std::cin);
  std::ifstream in(path);
  if (!in) throw depsrl::DataError("cannot open '" + path + "'");
  return depsrl::read_conll2009(in);
}

void echo_config(const CLI::App& app) {
  std::cerr << "# resolved configuration\n" << app.config_to_str(true, false) << std::flush;
}

template <class T>
depsrl::PretrainedTable<T> load_embeddings_or_none(const std::string& path) {
  if (path.empty()) return depsrl::PretrainedTable<T>::none();
  std::ifstream in(path);
  if (!in) throw depsrl::DataError("cannot open '" + path + "'");
  return depsrl::load_pretrained<T>(in, 0);
}

// --- train ---

template <class T>
int run_train(const std::string& train_path, const std::string& dev_path,
              const std::string& embeddings_path, const std::string& model_out,
              const CommonModelFlags& mf, const ScheduleFlags& sf) {
  auto train_sents = read_corpus(train_path);
  auto dev_sents = read_corpus(dev_path);
  auto pretrained = load_embeddings_or_none<T>(embeddings_path);
  auto cfg = mf.to_config(pretrained.dim());

  auto ckpt = depsrl::train(train_sents, dev_sents, cfg, sf.to_schedule(), std::move(pretrained),
                            std::cout);

  std::ofstream out(model_out, std::ios::binary);
  if (!out) throw depsrl::DataError("cannot write '" + model_out + "'");
  depsrl::save_checkpoint(ckpt, out);
  std::cout << "best dev_f1=" << ckpt.best_dev_f1 << " at epoch " << ckpt.best_epoch
            << ", model written to " << model_out << "\n";
  return 0;
}

// --- predict ---

template <class T>
int run_predict(const std::string& model_path, const std::string& input_path,
                const std::string& output_path) {
  std::ifstream model_in(model_path, std::ios::binary);
  if (!model_in) throw depsrl::DataError("cannot open '" + model_path + "'");
  auto ckpt = depsrl::load_checkpoint<T>(model_in);

  auto sentences = read_corpus(input_path);
  auto predicted = depsrl::predict_corpus(sentences, ckpt.model);

  if (output_path == "-") {
    depsrl::write_conll2009(predicted, std::cout);
  } else {
    std::ofstream out(output_path);
    if (!out) throw depsrl::DataError("cannot write '" + output_path + "'");
    depsrl::write_conll2009(predicted, out);
  }
  return 0;
}

// --- eval ---

std::map<std::string, char> read_pos_map(const std::string& path) {
  std::map<std::string, char> m;
  if (path.empty()) return m;
  std::ifstream in(path);
  if (!in) throw depsrl::DataError("cannot open '" + path + "'");
  std::string tag, klass;
  while (in >> tag >> klass) {
    if (klass != "V" && klass != "N")
      throw depsrl::DataError("pos map: class for '" + tag + "' must be V or N");
    m[tag] = klass[0];
  }
  return m;
}

int run_eval(const std::string& gold_path, const std::string& pred_path, bool include_senses,
             const std::vector<std::size_t>& bucket_cuts, const std::string& format,
             const std::string& pos_map_path) {
  auto gold = read_corpus(gold_path);
  auto pred = read_corpus(pred_path);
  depsrl::DistanceBuckets buckets =
      bucket_cuts.empty() ? depsrl::DistanceBuckets::standard() : depsrl::DistanceBuckets{bucket_cuts};
  auto rep = depsrl::full_report(gold, pred, include_senses, buckets, read_pos_map(pos_map_path));
  if (format == "kv")
    std::cout << depsrl::format_kv(rep);
  else
    std::cout << depsrl::format_text(rep);
  return 0;
}

// --- ablate ---

template <class T>
int run_ablate(const std::string& train_path, const std::string& dev_path,
               const std::string& embeddings_path, const CommonModelFlags& mf,
               const ScheduleFlags& sf) {
  auto train_sents = read_corpus(train_path);
  auto dev_sents = read_corpus(dev_path);
  auto pretrained = load_embeddings_or_none<T>(embeddings_path);
  const auto base = mf.to_config(pretrained.dim());

  struct Preset {
    const char* name;
    depsrl::ModelConfig cfg;
  };
  std::vector<Preset> presets{
      {"full", base},
      {"w/o pos tags", base.without_pos()},
      {"w/o predicate-specific encoding", base.without_predicate_flag()},
      {"basic classifier", base.with_basic_classifier()},
  };

  // Wiring checks before any training: widths never move, the presets differ
  // exactly where they should.
  auto vocab = depsrl::build_vocab(train_sents, base.min_lemma_freq);
  std::size_t full_count = 0;
  for (const auto& p : presets) {
    auto probe = depsrl::SrlModel<T>::init(p.cfg, vocab, pretrained);
    if (p.cfg.input_width() != base.input_width())
      throw depsrl::ShapeError("ablation preset changed the input width");
    if (p.name == std::string("full")) full_count = probe.parameter_count();
    if (p.cfg.variant == base.variant && probe.parameter_count() != full_count)
      throw depsrl::ShapeError("ablation preset changed the parameter count");
  }

  std::cout << "preset                            P        R        F1\n";
  for (const auto& p : presets) {
    std::ostringstream log;
    auto ckpt = depsrl::train(train_sents, dev_sents, p.cfg, sf.to_schedule(), pretrained, log);
    const auto prf = depsrl::evaluate_dev(dev_sents, ckpt.model);
    std::printf("%-32s  %.4f   %.4f   %.4f\n", p.name, prf.precision, prf.recall, prf.f1);
    std::fflush(stdout);
  }
  return 0;
}

// --- gradcheck ---

std::vector<depsrl::Sentence> gradcheck_fixture() {
  std::istringstream in(
      "1\tthe\t_\tthe\t_\tDT\t_\t_\t0\t_\t_\t_\t_\t_\t_\n"
      "2\tboard\t_\tboard\t_\tNN\t_\t_\t1\t_\t_\t_\t_\t_\tA0\n"
      "3\tapproved\t_\tapprove\t_\tVBD\t_\t_\t2\t_\t_\t_\tY\tapprove.01\t_\n"
      "4\tits\t_\tits\t_\tPRP\t_\t_\t3\t_\t_\t_\t_\t_\t_\n"
      "5\tacquisition\t_\tacquisition\t_\tNN\t_\t_\t3\t_\t_\t_\t_\t_\tA1\n"
      "\n"
      "1\tboard\t_\tboard\t_\tNN\t_\t_\t0\t_\t_\t_\t_\t_\tA1\n"
      "2\tapproved\t_\tapprove\t_\tVBD\t_\t_\t1\t_\t_\t_\tY\tapprove.01\t_\n"
      "\n");
  return depsrl::read_conll2009(in);
}

int run_gradcheck(std::size_t hidden, std::size_t layers, std::uint64_t seed, double tolerance,
                  bool inject_fault) {
  using T = double;
  auto corpus = gradcheck_fixture();
  auto vocab = depsrl::build_vocab(corpus, 1);
  auto pretrained = depsrl::PretrainedTable<T>::make(
      {"the", "board"}, {{0.1, -0.2, 0.3, 0.05, -0.1}, {-0.3, 0.2, 0.0, 0.4, -0.25}});

  double worst = 0.0;
  for (auto variant : {depsrl::ClassifierVariant::basic, depsrl::ClassifierVariant::predicate_state,
                       depsrl::ClassifierVariant::compositional}) {
    depsrl::ModelConfig cfg;
    cfg.d_word_trainable = 6;
    cfg.d_word_pretrained = pretrained.dim();
    cfg.d_pos = 4;
    cfg.d_lemma_in = 5;
    cfg.d_hidden = hidden;
    cfg.d_role = 6;
    cfg.d_lemma_out = 6;
    cfg.layers = layers;
    cfg.alpha = 0.0;
    cfg.variant = variant;
    cfg.min_lemma_freq = 1;
    cfg.seed = seed;

    auto model = depsrl::SrlModel<T>::init(cfg, vocab, pretrained);
    auto insts = depsrl::extract_instances(corpus);
    auto mapped = depsrl::map_instance(insts[0], model.vocab, model.pretrained);

    auto build = [&](depsrl::Tape<T>& tape) -> depsrl::TensorPtr<T> {
      std::mt19937_64 rng(0);
      auto loss = depsrl::instance_loss(tape, mapped, model, depsrl::RunMode::eval, rng);
      if (!inject_fault) return loss;
      // Test fixture: an identity node whose backward rule is wrong by 1%.
      auto out = depsrl::make_tensor<T>({1}, {loss->values[0]});
      out->requires_grad = loss->requires_grad;
      return tape.record(out, [loss, out] {
        if (!loss->requires_grad) return;
        loss->ensure_grad();
        loss->grad[0] += out->grad[0] * 1.01;
      });
    };

    auto report = depsrl::gradient_check<T>(model.named_parameters(), build);
    for (const auto& row : report) {
      std::printf("%-16s %-24s checked=%-6zu max_rel_err=%.3e\n", to_string(variant),
                  row.name.c_str(), row.checked, row.max_rel_err);
      worst = std::max(worst, static_cast<double>(row.max_rel_err));
    }
  }
  std::printf("worst max_rel_err=%.3e tolerance=%.1e\n", worst, tolerance);
  if (worst > tolerance)
    throw depsrl::NumericError("gradient check failed: max relative error above tolerance");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"depsrl: syntax-agnostic dependency-based semantic role labeler"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_config("--config", "", "Read options from a key = value file");
  app.allow_config_extras(false);

  // train
  auto* t = app.add_subcommand("train", "Train a model and keep the best dev checkpoint");
  std::string t_train, t_dev, t_embeddings, t_model_out;
  CommonModelFlags t_mf;
  ScheduleFlags t_sf;
  t->add_option("--train", t_train, "Training corpus")->required();
  t->add_option("--dev", t_dev, "Development corpus for model selection")->required();
  t->add_option("--embeddings", t_embeddings, "Pretrained vector file");
  t->add_option("--model-out", t_model_out, "Checkpoint output path")->required();
  add_model_flags(t, t_mf);
  add_schedule_flags(t, t_sf);

  // predict
  auto* p = app.add_subcommand("predict", "Fill the argument columns of a corpus");
  std::string p_model, p_input = "-", p_output = "-";
  std::string p_precision = "f64";
  p->add_option("--model-in", p_model, "Checkpoint to load")->required();
  p->add_option("--input,--test", p_input, "Input corpus ('-' = stdin)");
  p->add_option("--output", p_output, "Output path ('-' = stdout)");

  // eval
  auto* e = app.add_subcommand("eval", "Score predictions against gold");
  std::string e_gold, e_pred, e_format = "text", e_pos_map;
  bool e_include_senses = false;
  std::vector<std::size_t> e_buckets;
  e->add_option("--gold", e_gold, "Gold corpus")->required();
  e->add_option("--pred", e_pred, "Predicted corpus")->required();
  e->add_flag("--include-senses", e_include_senses,
              "Count predicate senses as labeled items");
  e->add_option("--buckets", e_buckets, "Distance bucket cut points")->delimiter(',');
  e->add_option("--format", e_format, "text | kv")->check(CLI::IsMember({"text", "kv"}));
  e->add_option("--pos-map", e_pos_map, "File of 'TAG V|N' lines for the verbal/nominal split");

  // ablate
  auto* a = app.add_subcommand("ablate", "Train the four ablation presets with a shared seed");
  std::string a_train, a_dev, a_embeddings;
  CommonModelFlags a_mf;
  ScheduleFlags a_sf;
  a->add_option("--train", a_train, "Training corpus")->required();
  a->add_option("--dev", a_dev, "Development corpus")->required();
  a->add_option("--embeddings", a_embeddings, "Pretrained vector file");
  add_model_flags(a, a_mf);
  add_schedule_flags(a, a_sf);

  // gradcheck
  auto* g = app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  std::size_t g_hidden = 8, g_layers = 2;
  std::uint64_t g_seed = 1;
  double g_tol = 1e-4;
  bool g_fault = false;
  g->add_option("--hidden", g_hidden, "Hidden width of the probe model");
  g->add_option("--layers", g_layers, "Depth of the probe model");
  g->add_option("--seed", g_seed, "Seed for the probe model");
  g->add_option("--tolerance", g_tol, "Maximum allowed relative error");
  g->add_flag("--inject-fault", g_fault, "Corrupt one backward rule (harness self-test)")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    echo_config(app);
    if (t->parsed())
      return t_mf.precision == "f32"
                 ? run_train<float>(t_train, t_dev, t_embeddings, t_model_out, t_mf, t_sf)
                 : run_train<double>(t_train, t_dev, t_embeddings, t_model_out, t_mf, t_sf);
    if (p->parsed()) {
      std::ifstream probe(p_model, std::ios::binary);
      if (!probe) throw depsrl::DataError("cannot open '" + p_model + "'");
      const auto width = depsrl::peek_checkpoint_width(probe);
      probe.close();
      return width == sizeof(float) ? run_predict<float>(p_model, p_input, p_output)
                                    : run_predict<double>(p_model, p_input, p_output);
    }
    if (e->parsed())
      return run_eval(e_gold, e_pred, e_include_senses, e_buckets, e_format, e_pos_map);
    if (a->parsed())
      return a_mf.precision == "f32" ? run_ablate<float>(a_train, a_dev, a_embeddings, a_mf, a_sf)
                                     : run_ablate<double>(a_train, a_dev, a_embeddings, a_mf, a_sf);
    if (g->parsed()) return run_gradcheck(g_hidden, g_layers, g_seed, g_tol, g_fault);
  } catch (const depsrl::DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return kExitData;
  } catch (const depsrl::ShapeError& err) {
    std::cerr << "numeric error: " << err.what() << "\n";
    return kExitNumeric;
  } catch (const depsrl::NumericError& err) {
    std::cerr << "numeric error: " << err.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
