#include "smm/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "smm/classify.hpp"
#include "smm/diagnostics.hpp"
#include "smm/errors.hpp"
#include "smm/io.hpp"
#include "smm/metrics.hpp"
#include "smm/parallel.hpp"
#include "smm/selection.hpp"
#include "smm/simulate.hpp"

namespace smm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for problems the user can fix by changing flags or inputs.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CommonFlags {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out_dir = ".";
};

struct SchemeFlags {
  std::string weights = "knn";
  int knn = 3;
  std::string distance = "l2";
  std::string kernel = "gaussian";
  double phi = 100.0;
};

struct SolverFlags {
  double tol = 1e-6;
  int max_iter = 20000;
  std::optional<double> step;
  double fusion_tol = 1e-4;
  int grid = 100;
  bool cold = false;
};

struct FitFlags {
  std::string input;
  std::string format = "auto";
  std::string alphabet;
  std::string unknown = "auto";
  int order = 2;
  double smoothing = 0.5;
};

struct SimulateFlags {
  int setup = 1;
  std::optional<int> order;
  std::vector<long long> lengths = {10000};
  int reps = 50;
  bool diagnostics = false;
};

struct GenerateFlags {
  int setup = 1;
  std::optional<int> order;
  long long length = 10000;
  int count = 1;
};

struct ClassifyFlags {
  std::string refs;
  std::string samples;
  double epsilon = 0.25;
  double smoothing = 0.5;
  int order = 3;
  std::string unknown = "reject";
};

struct MetricsFlags {
  std::string first;
  std::string second;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", f.threads,
                  "Worker threads (0: SMMFIT_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--out-dir", f.out_dir, "Output directory")->capture_default_str();
}

void add_scheme(CLI::App* cmd, SchemeFlags& f) {
  cmd->add_option("--weights", f.weights, "Weight scheme")
      ->check(CLI::IsMember({"knn", "uniform"}))
      ->capture_default_str();
  cmd->add_option("--knn", f.knn, "Nearest neighbours per context")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--distance", f.distance, "Distance for kNN and kernel")
      ->check(CLI::IsMember({"l2", "l1", "linf"}))
      ->capture_default_str();
  cmd->add_option("--kernel", f.kernel, "Kernel")
      ->check(CLI::IsMember({"gaussian", "exponential"}))
      ->capture_default_str();
  cmd->add_option("--phi", f.phi, "Kernel scale")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_solver(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--tol", f.tol, "Relative duality gap tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Iteration cap per solve")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--step", f.step, "Dual step size (default 1/p')");
  cmd->add_option("--fusion-tol", f.fusion_tol, "Relative centroid fusion tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--grid", f.grid, "Number of lambda values")
      ->check(CLI::Range(2, 100000))
      ->capture_default_str();
  cmd->add_flag("--cold", f.cold, "Solve every lambda from a zero start");
}

WeightScheme make_scheme(const SchemeFlags& f) {
  if (f.weights == "uniform") return WeightScheme::uniform();
  return WeightScheme::knn(f.knn, parse_distance(f.distance),
                           parse_kernel(f.kernel), f.phi);
}

SolverConfig make_solver(const SolverFlags& f) {
  SolverConfig c;
  c.dual_gap_tol = f.tol;
  c.max_iter = f.max_iter;
  c.step = f.step;
  c.fusion_tol = f.fusion_tol;
  return c;
}

json scheme_json(const WeightScheme& s) {
  json j;
  j["name"] = s.name();
  j["kind"] = s.kind == WeightKind::uniform ? "uniform" : "knn";
  if (s.kind == WeightKind::knn_kernel) {
    j["k"] = s.k;
    j["distance"] = std::string(to_string(s.distance));
    j["kernel"] = std::string(to_string(s.kernel));
    j["phi"] = s.phi;
  }
  return j;
}

json solver_json(const SolverFlags& f) {
  json j;
  j["dual_gap_tol"] = f.tol;
  j["max_iter"] = f.max_iter;
  j["step"] = f.step ? json(*f.step) : json("1/p'");
  j["fusion_tol"] = f.fusion_tol;
  j["grid_size"] = f.grid;
  j["warm_start"] = !f.cold;
  return j;
}

std::string absolute_string(const std::string& p) {
  return fs::absolute(fs::path(p)).lexically_normal().string();
}

// Accumulates output files in memory so nothing is written unless the whole
// command succeeds.
class OutputSet {
 public:
  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }
  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& f : files_) n.push_back(f.first);
    n.emplace_back("manifest.json");
    return n;
  }
  void commit(const CommonFlags& common, const std::string& command, json config,
              json inputs) const {
    json manifest;
    manifest["tool"] = "smmfit";
    manifest["version"] = kToolVersion;
    manifest["command"] = command;
    manifest["seed"] = common.seed;
    manifest["threads"] = resolve_threads(common.threads);
    manifest["out_dir"] = absolute_string(common.out_dir);
    manifest["config"] = std::move(config);
    manifest["inputs"] = std::move(inputs);
    manifest["outputs"] = names();
    std::error_code ec;
    fs::create_directories(common.out_dir, ec);
    if (ec) throw UsageError("cannot create " + common.out_dir + ": " + ec.message());
    const fs::path dir(common.out_dir);
    for (const auto& [name, content] : files_) write_text_file(dir / name, content);
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

template <class F>
std::string render(F&& writer) {
  std::ostringstream s;
  writer(s);
  return s.str();
}

bool looks_like_fasta(const fs::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".fa" || ext == ".fasta" || ext == ".fna" || ext == ".fas") return true;
  std::ifstream in(path);
  char c = 0;
  while (in.get(c)) {
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '>';
  }
  return false;
}

std::string resolve_format(const std::string& path, const std::string& format) {
  if (format != "auto") return format;
  return looks_like_fasta(path) ? "fasta" : "chars";
}

void require_file(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw UsageError("input file not found: " + path);
}

std::vector<std::vector<std::string>> read_sequences(const std::string& path,
                                                     const std::string& format) {
  require_file(path);
  const std::string fmt = resolve_format(path, format);
  if (fmt == "fasta") {
    std::vector<std::vector<std::string>> out;
    for (const auto& r : read_fasta(path)) out.push_back(char_tokens(r.sequence));
    return out;
  }
  return read_token_file(path, fmt == "words");
}

Alphabet parse_alphabet_flag(const std::string& flag) {
  if (flag.find(',') == std::string::npos) return Alphabet::from_chars(flag);
  std::vector<std::string> symbols;
  std::stringstream s(flag);
  for (std::string tok; std::getline(s, tok, ',');) symbols.push_back(tok);
  return Alphabet(std::move(symbols));
}

// FASTA inputs routinely carry ambiguity codes, so they split by default.
UnknownTokenPolicy parse_policy(const std::string& s, const std::string& format) {
  if (s == "auto") {
    return format == "fasta" ? UnknownTokenPolicy::drop_and_split
                             : UnknownTokenPolicy::reject;
  }
  return s == "split" ? UnknownTokenPolicy::drop_and_split : UnknownTokenPolicy::reject;
}

std::vector<EncodedSequence> encode_all(
    const std::vector<std::vector<std::string>>& sequences, const Alphabet& alphabet,
    UnknownTokenPolicy policy) {
  std::vector<EncodedSequence> runs;
  for (const auto& s : sequences) {
    auto r = encode_runs(s, alphabet, policy);
    for (auto& run : r) {
      if (run.size() > 0) runs.push_back(std::move(run));
    }
  }
  return runs;
}

FitOptions make_fit_options(const SchemeFlags& scheme, const SolverFlags& solver,
                            double smoothing, std::uint64_t seed) {
  FitOptions o;
  o.scheme = make_scheme(scheme);
  o.solver = make_solver(solver);
  o.grid_size = solver.grid;
  o.path.warm_start = !solver.cold;
  o.smoothing = smoothing;
  o.seed = seed;
  return o;
}

int warn_nonconverged(int count, std::ostream& err) {
  if (count == 0) return kExitOk;
  err << "warning: " << count
      << " solve(s) stopped at the iteration cap before reaching the gap tolerance\n";
  return kExitWarning;
}

int run_fit(const CommonFlags& common, const FitFlags& f, const SchemeFlags& sf,
            const SolverFlags& vf, std::ostream& out, std::ostream& err) {
  const auto sequences = read_sequences(f.input, f.format);
  const Alphabet alphabet =
      f.alphabet.empty() ? infer_alphabet(sequences) : parse_alphabet_flag(f.alphabet);
  const std::string format = resolve_format(f.input, f.format);
  const auto runs = encode_all(sequences, alphabet, parse_policy(f.unknown, format));
  const ContextCounts counts =
      count_transitions(runs, f.order, static_cast<int>(alphabet.size()));
  const FitOptions options = make_fit_options(sf, vf, f.smoothing, common.seed);
  const FitResult fit = fit_smm(counts, alphabet, options);

  const LambdaSolution& best = fit.path.best();
  const RecoveryReport report =
      recovery_report(fit.pihat, fit.weights, best.partition.label,
                      &best.group_probs, &options.scheme);
  json diag = report_to_json(report);
  diag["observed_contexts"] = fit.path.observed_contexts;
  diag["context_space"] = counts.context_space();
  diag["sequence_length"] = counts.sequence_length;
  diag["transitions"] = counts.transition_total();
  diag["edges"] = fit.weights.edges.size();
  diag["graph_components"] = fit.weights.component_count();
  diag["selected_index"] = fit.path.selected;
  diag["selected_lambda"] = best.lambda;
  diag["selected_k"] = best.k;
  diag["selected_bic"] = best.bic;
  diag["lambda_in_bounds"] =
      report.lambda_min.has_value() && best.lambda > *report.lambda_min &&
      best.lambda < report.lambda_max;
  diag["nonconverged"] = fit.path.nonconverged;
  diag["nesting_violations"] = fit.path.nesting_violations;
  json grid = json::array();
  for (double g : fit.grid) grid.push_back(g);
  diag["grid"] = grid;

  OutputSet outputs;
  outputs.add("model.json", model_to_json(fit.model).dump(2) + "\n");
  outputs.add("path.csv", render([&](std::ostream& s) { write_path_csv(s, fit.path); }));
  outputs.add("labels.csv", render([&](std::ostream& s) {
    bool single = true;
    for (const auto& sym : alphabet.symbols()) single = single && sym.size() == 1;
    s << "context,label\n";
    for (std::size_t j = 0; j < fit.model.labels.size(); ++j) {
      std::string name;
      for (int c : context_tuple(j, f.order, static_cast<int>(alphabet.size()))) {
        if (!single && !name.empty()) name += ' ';
        name += alphabet.symbol(c);
      }
      s << name << ',' << fit.model.labels[j] << '\n';
    }
  }));
  outputs.add("diagnostics.json", diag.dump(2) + "\n");

  json config;
  config["order"] = f.order;
  config["format"] = format;
  config["alphabet"] = alphabet.symbols();
  config["unknown"] = parse_policy(f.unknown, format) == UnknownTokenPolicy::reject
                          ? "reject"
                          : "split";
  config["smoothing"] = f.smoothing;
  config["scheme"] = scheme_json(options.scheme);
  config["solver"] = solver_json(vf);
  json inputs;
  inputs["sequences"] = absolute_string(f.input);
  outputs.commit(common, "fit", config, inputs);

  out << "selected lambda=" << format_real(best.lambda) << " k=" << best.k
      << " bic=" << format_real(best.bic) << " observed=" << fit.pihat.rows()
      << '\n';
  return warn_nonconverged(fit.path.nonconverged, err);
}

int resolve_setup_order(int setup, const std::optional<int>& order) {
  if (setup == 2) {
    if (order && *order != 3) throw UsageError("setup 2 is defined for --m 3 only");
    return 3;
  }
  const int m = order.value_or(2);
  if (m != 2 && m != 3) throw UsageError("setup 1 is defined for --m 2 or 3");
  return m;
}

int run_simulate(const CommonFlags& common, const SimulateFlags& f,
                 const SchemeFlags& sf, const SolverFlags& vf, std::ostream& out,
                 std::ostream& err) {
  ExperimentConfig config;
  config.setup = f.setup == 1 ? Setup::setup1 : Setup::setup2;
  config.order = resolve_setup_order(f.setup, f.order);
  config.lengths = f.lengths;
  config.replicates = f.reps;
  config.schemes = {make_scheme(sf)};
  config.solver = make_solver(vf);
  config.grid_size = vf.grid;
  config.seed = common.seed;
  config.threads = resolve_threads(common.threads);
  config.diagnostics = f.diagnostics;
  if (vf.cold) throw UsageError("--cold is not supported by simulate");
  const ExperimentSummary result = run_recovery_experiment(config);

  OutputSet outputs;
  outputs.add("replicates.csv",
              render([&](std::ostream& s) { write_records_csv(s, result.records); }));
  outputs.add("summary.csv",
              render([&](std::ostream& s) { write_summary_csv(s, result.summaries); }));
  const std::string table =
      render([&](std::ostream& s) { write_summary_table(s, result.summaries); });
  outputs.add("summary.txt", table);

  json cfg;
  cfg["setup"] = f.setup;
  cfg["order"] = config.order;
  cfg["lengths"] = f.lengths;
  cfg["replicates"] = f.reps;
  cfg["scheme"] = scheme_json(config.schemes.front());
  cfg["solver"] = solver_json(vf);
  cfg["diagnostics"] = f.diagnostics;
  outputs.commit(common, "simulate", cfg, json::object());

  out << table;
  int nonconverged = 0;
  for (const auto& s : result.summaries) nonconverged += s.nonconverged_paths;
  return warn_nonconverged(nonconverged, err);
}

int run_generate(const CommonFlags& common, const GenerateFlags& f,
                 std::ostream& out) {
  const int order = resolve_setup_order(f.setup, f.order);
  Rng rng(common.seed);
  const GroundTruthSMM truth = f.setup == 1 ? build_setup1(order, rng) : build_setup2();
  const Alphabet alphabet = Alphabet::from_chars("ACGT");
  std::vector<FastaRecord> records;
  for (int i = 0; i < f.count; ++i) {
    const EncodedSequence seq =
        generate_sequence(truth, static_cast<std::size_t>(f.length), rng);
    std::string text;
    text.reserve(seq.size());
    for (int c : seq.codes) text += alphabet.symbol(c);
    records.push_back({"seq" + std::to_string(i + 1), std::move(text)});
  }

  std::ostringstream truth_csv;
  truth_csv << "context,label\n";
  for (std::size_t j = 0; j < truth.labels.size(); ++j) {
    std::string name;
    for (int c : context_tuple(j, truth.order, truth.alphabet_size)) {
      name += alphabet.symbol(c);
    }
    truth_csv << name << ',' << truth.labels[j] << '\n';
  }
  json probs = json::array();
  for (std::size_t g = 0; g < truth.group_probs.rows(); ++g) {
    json row = json::array();
    for (double v : truth.group_probs.row(g)) row.push_back(v);
    probs.push_back(row);
  }

  OutputSet outputs;
  outputs.add("sequences.fa", render([&](std::ostream& s) { write_fasta(s, records); }));
  outputs.add("truth.csv", truth_csv.str());
  json truth_json;
  truth_json["m"] = truth.order;
  truth_json["alphabet"] = alphabet.symbols();
  truth_json["labels"] = truth.labels;
  truth_json["group_probs"] = probs;
  outputs.add("truth.json", truth_json.dump(2) + "\n");

  json cfg;
  cfg["setup"] = f.setup;
  cfg["order"] = order;
  cfg["length"] = f.length;
  cfg["count"] = f.count;
  outputs.commit(common, "generate", cfg, json::object());
  out << "wrote " << f.count << " sequence(s) of length " << f.length << '\n';
  return kExitOk;
}

std::vector<int> encode_dropping(const std::vector<std::string>& tokens,
                                 const Alphabet& alphabet, bool drop) {
  std::vector<int> codes;
  codes.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int c = alphabet.find(tokens[i]);
    if (c < 0) {
      if (drop) continue;
      throw UnknownToken(i, tokens[i]);
    }
    codes.push_back(c);
  }
  return codes;
}

int run_classify(const CommonFlags& common, const ClassifyFlags& f,
                 const SchemeFlags& sf, const SolverFlags& vf, std::ostream& out,
                 std::ostream& err) {
  if (!(f.epsilon > 0.0 && f.epsilon <= 1.0)) {
    throw UsageError("--epsilon must lie in (0, 1]");
  }
  if (f.smoothing < 0.0) throw UsageError("--smoothing must be nonnegative");
  std::error_code ec;
  if (!fs::is_directory(f.refs, ec)) throw UsageError("reference directory not found: " + f.refs);
  require_file(f.samples);

  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(f.refs)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension().string();
    if (ext == ".json" || ext == ".fa" || ext == ".fasta" || ext == ".fna") {
      entries.push_back(e.path());
    }
  }
  std::sort(entries.begin(), entries.end());

  const FitOptions options = make_fit_options(sf, vf, f.smoothing, common.seed);
  ReferenceSet refs;
  json ref_inputs = json::object();
  std::vector<fs::path> fasta_refs;
  for (const auto& p : entries) {
    if (p.extension() == ".json") {
      refs.names.push_back(p.stem().string());
      refs.models.push_back(load_model(p));
      ref_inputs[p.stem().string()] = absolute_string(p.string());
    } else {
      fasta_refs.push_back(p);
    }
  }
  int nonconverged = 0;
  if (!fasta_refs.empty()) {
    if (!refs.models.empty()) {
      throw UsageError("reference directory mixes fitted models and FASTA files");
    }
    std::vector<std::vector<std::vector<std::string>>> texts;
    for (const auto& p : fasta_refs) texts.push_back(read_sequences(p.string(), "fasta"));
    std::vector<std::vector<std::string>> pooled;
    for (const auto& t : texts) pooled.insert(pooled.end(), t.begin(), t.end());
    const Alphabet alphabet = infer_alphabet(pooled);
    for (std::size_t i = 0; i < fasta_refs.size(); ++i) {
      const auto runs = encode_all(texts[i], alphabet, UnknownTokenPolicy::reject);
      const ContextCounts counts =
          count_transitions(runs, f.order, static_cast<int>(alphabet.size()));
      const FitResult fit = fit_smm(counts, alphabet, options);
      nonconverged += fit.path.nonconverged;
      refs.names.push_back(fasta_refs[i].stem().string());
      refs.models.push_back(fit.model);
      ref_inputs[fasta_refs[i].stem().string()] = absolute_string(fasta_refs[i].string());
    }
  }
  try {
    refs.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("references: ") + e.what());
  }

  const Alphabet& alphabet = refs.models.front().alphabet;
  std::map<std::string, int> class_index;
  for (std::size_t i = 0; i < refs.names.size(); ++i) {
    class_index[refs.names[i]] = static_cast<int>(i);
  }
  std::vector<LabeledSequence> samples;
  for (const auto& r : read_fasta(f.samples)) {
    const std::string label = r.id.substr(0, r.id.find('|'));
    const auto it = class_index.find(label);
    if (it == class_index.end()) {
      throw UsageError("sample '" + r.id + "' names unknown class '" + label + "'");
    }
    samples.push_back({it->second, r.id,
                       {encode_dropping(char_tokens(r.sequence), alphabet,
                                        f.unknown == "drop")}});
  }

  Rng rng(common.seed);
  const ConfusionMatrix cm =
      run_classification_experiment(refs, samples, f.epsilon, f.smoothing, rng);

  OutputSet outputs;
  outputs.add("confusion.csv",
              render([&](std::ostream& s) { write_confusion_csv(s, cm, refs.names); }));
  outputs.add("scores.csv",
              render([&](std::ostream& s) { write_scores_csv(s, cm, refs.names); }));
  if (!fasta_refs.empty()) {
    for (std::size_t i = 0; i < refs.size(); ++i) {
      outputs.add("ref_" + refs.names[i] + ".json",
                  model_to_json(refs.models[i]).dump(2) + "\n");
    }
  }
  json cfg;
  cfg["epsilon"] = f.epsilon;
  cfg["smoothing"] = f.smoothing;
  cfg["classes"] = refs.names;
  cfg["unknown"] = f.unknown;
  if (!fasta_refs.empty()) {
    cfg["order"] = f.order;
    cfg["scheme"] = scheme_json(options.scheme);
    cfg["solver"] = solver_json(vf);
  }
  json inputs;
  inputs["references"] = ref_inputs;
  inputs["samples"] = absolute_string(f.samples);
  outputs.commit(common, "classify", cfg, inputs);

  out << "classified " << cm.total() << " sample(s), skipped " << cm.skipped.size()
      << ", accuracy " << format_real(cm.total() > 0 ? cm.accuracy() : 0.0) << '\n';
  return warn_nonconverged(nonconverged, err);
}

int run_metrics(const CommonFlags& common, const MetricsFlags& f, std::ostream& out) {
  require_file(f.first);
  require_file(f.second);
  const auto a = read_labels_csv(f.first);
  const auto b = read_labels_csv(f.second);
  if (a.size() != b.size()) {
    throw UsageError("label files differ in length (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
  if (a.size() < 2) throw UsageError("at least two labelled elements are required");
  json result;
  result["RI"] = rand_index(a, b);
  result["ARI"] = adjusted_rand_index(a, b);
  result["elements"] = a.size();
  OutputSet outputs;
  outputs.add("metrics.json", result.dump(2) + "\n");
  json inputs;
  inputs["first"] = absolute_string(f.first);
  inputs["second"] = absolute_string(f.second);
  outputs.commit(common, "metrics", json::object(), inputs);
  out << "RI=" << format_real(result["RI"].get<double>())
      << " ARI=" << format_real(result["ARI"].get<double>()) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Sparse Markov model fitting by convex clustering of transition vectors",
               "smmfit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommonFlags common;
  SchemeFlags scheme;
  SolverFlags solver;

  FitFlags fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to one or more sequences");
  fit_cmd->add_option("input", fit.input, "FASTA or token file")->required();
  fit_cmd->add_option("--m", fit.order, "Markov order")
      ->check(CLI::Range(1, 16))
      ->capture_default_str();
  fit_cmd->add_option("--format", fit.format, "Input format")
      ->check(CLI::IsMember({"auto", "fasta", "chars", "words"}))
      ->capture_default_str();
  fit_cmd->add_option("--alphabet", fit.alphabet,
                      "Symbols as characters (ACGT) or comma-separated tokens");
  fit_cmd->add_option("--unknown", fit.unknown,
                      "Unknown tokens: reject, split around them, or auto "
                      "(split for FASTA, reject otherwise)")
      ->check(CLI::IsMember({"auto", "reject", "split"}))
      ->capture_default_str();
  fit_cmd->add_option("--smoothing", fit.smoothing, "Pseudo-count stored in the model")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_scheme(fit_cmd, scheme);
  add_solver(fit_cmd, solver);
  add_common(fit_cmd, common);

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Recovery study on a known model");
  sim_cmd->add_option("--setup", sim.setup, "Ground-truth design")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  sim_cmd->add_option("--m", sim.order, "Markov order (setup 1: 2 or 3)");
  sim_cmd->add_option("--n", sim.lengths, "Sequence length(s)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Replicates")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_flag("--diagnostics", sim.diagnostics,
                    "Record lambda_min and lambda_max for the true partition");
  add_scheme(sim_cmd, scheme);
  add_solver(sim_cmd, solver);
  add_common(sim_cmd, common);

  GenerateFlags gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write sequences drawn from a known model");
  gen_cmd->add_option("--setup", gen.setup, "Ground-truth design")
      ->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  gen_cmd->add_option("--m", gen.order, "Markov order (setup 1: 2 or 3)");
  gen_cmd->add_option("--n", gen.length, "Sequence length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen_cmd->add_option("--count", gen.count, "Number of sequences")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_common(gen_cmd, common);

  ClassifyFlags cls;
  auto* cls_cmd = app.add_subcommand("classify", "Classify random segments of labelled samples");
  cls_cmd->add_option("--refs", cls.refs,
                      "Directory of <class>.json models or <class>.fa sequences")
      ->required();
  cls_cmd->add_option("--samples", cls.samples,
                      "FASTA whose headers start with the class name before '|'")
      ->required();
  cls_cmd->add_option("--epsilon", cls.epsilon, "Segment fraction in (0, 1]")
      ->capture_default_str();
  cls_cmd->add_option("--smoothing", cls.smoothing, "Additive pseudo-count")
      ->capture_default_str();
  cls_cmd->add_option("--m", cls.order, "Order used when fitting FASTA references")
      ->check(CLI::Range(1, 16))
      ->capture_default_str();
  cls_cmd->add_option("--unknown", cls.unknown, "Unknown sample tokens: reject or drop")
      ->check(CLI::IsMember({"reject", "drop"}))
      ->capture_default_str();
  add_scheme(cls_cmd, scheme);
  add_solver(cls_cmd, solver);
  add_common(cls_cmd, common);

  MetricsFlags met;
  auto* met_cmd = app.add_subcommand("metrics", "Rand and adjusted Rand index of two labelings");
  met_cmd->add_option("first", met.first, "Labels CSV")->required();
  met_cmd->add_option("second", met.second, "Labels CSV")->required();
  add_common(met_cmd, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(common, fit, scheme, solver, out, err);
    if (sim_cmd->parsed()) return run_simulate(common, sim, scheme, solver, out, err);
    if (gen_cmd->parsed()) return run_generate(common, gen, out);
    if (cls_cmd->parsed()) return run_classify(common, cls, scheme, solver, out, err);
    if (met_cmd->parsed()) return run_metrics(common, met, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace smm
