#include "smm/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "smm/errors.hpp"

namespace smm {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<FastaRecord> parse_fasta(std::istream& in) {
  std::vector<FastaRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '>') {
      std::string id = line.substr(1);
      const auto first = id.find_first_not_of(" \t");
      if (first == std::string::npos) throw MalformedFasta(line_no, "empty header");
      id = id.substr(first);
      while (!id.empty() && std::isspace(static_cast<unsigned char>(id.back()))) {
        id.pop_back();
      }
      records.push_back({std::move(id), {}});
      continue;
    }
    std::string chunk;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        chunk.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
      }
    }
    if (chunk.empty()) continue;
    if (records.empty()) {
      throw MalformedFasta(line_no, "sequence data before the first header");
    }
    records.back().sequence += chunk;
  }
  if (records.empty()) throw MalformedFasta(line_no, "no records");
  return records;
}

std::vector<FastaRecord> read_fasta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return parse_fasta(in);
}

void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records,
                 std::size_t line_width) {
  for (const auto& r : records) {
    out << '>' << r.id << '\n';
    for (std::size_t i = 0; i < r.sequence.size(); i += line_width) {
      out << r.sequence.substr(i, line_width) << '\n';
    }
  }
}

std::vector<std::string> char_tokens(const std::string& s) {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.emplace_back(1, c);
  }
  return out;
}

std::vector<std::vector<std::string>> read_token_file(const fs::path& path,
                                                      bool split_words) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    if (split_words) {
      std::istringstream words(line);
      std::vector<std::string> tokens;
      for (std::string w; words >> w;) tokens.push_back(w);
      out.push_back(std::move(tokens));
    } else {
      out.push_back(char_tokens(line));
    }
  }
  if (out.empty()) throw InvalidArgument(path.string() + " holds no sequences");
  return out;
}

Alphabet infer_alphabet(const std::vector<std::vector<std::string>>& sequences) {
  std::set<std::string> distinct;
  for (const auto& s : sequences) distinct.insert(s.begin(), s.end());
  return Alphabet(std::vector<std::string>(distinct.begin(), distinct.end()));
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

json real_to_json(double v) {
  if (std::isnan(v) || std::isinf(v)) return format_real(v);
  return v;
}

double real_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
    if (s == "nan") return std::nan("");
    throw InvalidArgument("unexpected number string '" + s + "'");
  }
  return j.get<double>();
}

namespace {

template <class T>
json matrix_to_json(const Matrix<T>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    rows.push_back(std::vector<T>(row.begin(), row.end()));
  }
  return rows;
}

template <class T>
Matrix<T> matrix_from_json(const json& j, std::size_t cols) {
  if (!j.is_array()) throw InvalidArgument("expected a matrix");
  Matrix<T> m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = j[r].get<std::vector<T>>();
    if (row.size() != cols) throw InvalidArgument("matrix row has wrong width");
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace

json model_to_json(const SMMModel& model) {
  json j;
  j["version"] = kModelSchemaVersion;
  j["alphabet"] = model.alphabet.symbols();
  j["m"] = model.order;
  j["labels"] = model.labels;
  j["group_probs"] = matrix_to_json(model.group_probs);
  j["group_counts"] = matrix_to_json(model.group_counts);
  j["lambda"] = model.lambda;
  j["bic"] = model.bic;
  j["loglik"] = model.loglik;
  j["k"] = model.k;
  j["n"] = model.n;
  j["smoothing"] = model.smoothing;
  j["seed"] = model.seed;
  return j;
}

SMMModel model_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kModelSchemaVersion) {
      throw InvalidArgument("unsupported model version");
    }
    SMMModel model;
    model.alphabet = Alphabet(j.at("alphabet").get<std::vector<std::string>>());
    model.order = j.at("m").get<int>();
    model.labels = j.at("labels").get<std::vector<int>>();
    const std::size_t d = model.alphabet.size();
    model.group_probs = matrix_from_json<double>(j.at("group_probs"), d);
    model.group_counts = matrix_from_json<long long>(j.at("group_counts"), d);
    model.lambda = j.at("lambda").get<double>();
    model.bic = j.at("bic").get<double>();
    model.loglik = j.at("loglik").get<double>();
    model.k = j.at("k").get<int>();
    model.n = j.at("n").get<long long>();
    model.smoothing = j.at("smoothing").get<double>();
    model.seed = j.at("seed").get<std::uint64_t>();
    if (model.labels.size() != context_count(model.order, static_cast<int>(d))) {
      throw InvalidArgument("labels must cover all d^m contexts");
    }
    if (model.group_probs.rows() != static_cast<std::size_t>(model.k) ||
        model.group_counts.rows() != static_cast<std::size_t>(model.k)) {
      throw InvalidArgument("group tables must have k rows");
    }
    for (int g : model.labels) {
      if (g != kUnseenGroup && (g < 0 || g >= model.k)) {
        throw InvalidArgument("label outside [0, k)");
      }
    }
    return model;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid model JSON: ") + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void save_model(const fs::path& path, const SMMModel& model) {
  write_text_file(path, model_to_json(model).dump(2) + "\n");
}

SMMModel load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

json report_to_json(const RecoveryReport& r) {
  json j;
  j["clusters"] = r.aggregates.clusters;
  j["sizes"] = r.aggregates.sizes;
  j["node_cluster_weights"] = matrix_to_json(r.aggregates.node_to_cluster);
  j["cluster_cluster_weights"] = matrix_to_json(r.aggregates.cluster_to_cluster);
  j["cluster_means"] = matrix_to_json(r.cluster_means);
  j["a1_satisfied"] = r.conditions.a1;
  j["a2_satisfied"] = r.conditions.a2;
  j["a1_violations"] = r.conditions.a1_violations;
  j["a2_violations"] = r.conditions.a2_violations;
  j["lambda_min"] = r.lambda_min ? real_to_json(*r.lambda_min) : json(nullptr);
  j["lambda_max"] = real_to_json(r.lambda_max);
  if (r.separation) {
    j["delta"] = real_to_json(r.separation->delta);
    j["delta1"] = real_to_json(r.separation->delta1);
    j["delta2"] = real_to_json(r.separation->delta2);
  }
  if (r.kernel) {
    j["epsilon_max"] = real_to_json(r.kernel->epsilon_max);
    j["delta1_min"] = real_to_json(r.kernel->delta1_min);
    j["delta2_max"] = real_to_json(r.kernel->delta2_max);
    j["balanced_optimal_k"] = r.kernel->balanced_optimal_k;
  }
  return j;
}

std::vector<int> read_labels_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::string field = line.substr(line.rfind(',') == std::string::npos
                                        ? 0
                                        : line.rfind(',') + 1);
    field.erase(0, field.find_first_not_of(" \t"));
    field.erase(field.find_last_not_of(" \t") + 1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      if (line_no == 1 && labels.empty()) continue;  // header
      throw InvalidArgument(path.string() + ":" + std::to_string(line_no) +
                            ": not an integer label");
    }
    labels.push_back(value);
  }
  return labels;
}

void write_path_csv(std::ostream& out, const PathResult& path) {
  out << "index,lambda,k,loglik,bic,converged,iterations,relative_gap,"
         "duplicate_of,selected\n";
  for (std::size_t i = 0; i < path.solutions.size(); ++i) {
    const auto& s = path.solutions[i];
    out << i << ',' << format_real(s.lambda) << ',' << s.k << ','
        << format_real(s.loglik) << ',' << format_real(s.bic) << ','
        << (s.converged ? 1 : 0) << ',' << s.iterations << ','
        << format_real(s.relative_gap) << ',' << s.duplicate_of << ','
        << (i == path.selected ? 1 : 0) << '\n';
  }
}

void write_records_csv(std::ostream& out,
                       const std::vector<ReplicateRecord>& records) {
  out << "replicate,n,scheme,RI,ARI,k_hat,lambda,recovered,nonconverged,nesting_violations,observed,"
         "lambda_min,lambda_max\n";
  for (const auto& r : records) {
    out << r.replicate << ',' << r.n << ',' << r.scheme << ','
        << format_real(r.ri) << ',' << format_real(r.ari) << ',' << r.k_hat
        << ',' << format_real(r.lambda) << ',' << (r.recovered ? 1 : 0) << ','
        << r.nonconverged << ',' << r.nesting_violations << ',' << r.observed << ',' << format_real(r.lambda_min) << ','
        << format_real(r.lambda_max) << '\n';
  }
}

void write_summary_csv(std::ostream& out,
                       const std::vector<SchemeSummary>& summaries) {
  out << "n,scheme,replicates,RI,RI_se,ARI,ARI_se,recovery,nonconverged_paths\n";
  for (const auto& s : summaries) {
    out << s.n << ',' << s.scheme << ',' << s.replicates << ','
        << format_real(s.mean_ri) << ',' << format_real(s.se_ri) << ','
        << format_real(s.mean_ari) << ',' << format_real(s.se_ari) << ','
        << format_real(s.recovery) << ',' << s.nonconverged_paths << '\n';
  }
}

void write_summary_table(std::ostream& out,
                         const std::vector<SchemeSummary>& summaries) {
  out << std::fixed << std::setprecision(3);
  out << std::left << std::setw(30) << "scheme" << std::setw(8) << "n"
      << std::setw(18) << "RI (se)" << std::setw(18) << "ARI (se)"
      << "recovery\n";
  for (const auto& s : summaries) {
    std::ostringstream ri, ari;
    ri << std::fixed << std::setprecision(3) << s.mean_ri << " (" << s.se_ri << ')';
    ari << std::fixed << std::setprecision(3) << s.mean_ari << " (" << s.se_ari << ')';
    out << std::setw(30) << s.scheme << std::setw(8) << s.n << std::setw(18)
        << ri.str() << std::setw(18) << ari.str() << s.recovery << '\n';
  }
  out.unsetf(std::ios::fixed);
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm,
                         const std::vector<std::string>& names) {
  out << "observed";
  for (const auto& n : names) out << ',' << n;
  out << ",total\n";
  for (std::size_t i = 0; i < cm.counts.rows(); ++i) {
    out << names[i];
    long long total = 0;
    for (std::size_t j = 0; j < cm.counts.cols(); ++j) {
      out << ',' << cm.counts(i, j);
      total += cm.counts(i, j);
    }
    out << ',' << total << '\n';
  }
}

void write_scores_csv(std::ostream& out, const ConfusionMatrix& cm,
                      const std::vector<std::string>& names) {
  out << "sample,observed,fitted,start,length";
  for (const auto& n : names) out << ",score_" << n;
  out << '\n';
  for (const auto& o : cm.outcomes) {
    out << o.id << ',' << names[static_cast<std::size_t>(o.observed)] << ','
        << (o.fitted >= 0 ? names[static_cast<std::size_t>(o.fitted)] : "skipped")
        << ',' << o.start << ',' << o.length;
    for (std::size_t c = 0; c < names.size(); ++c) {
      out << ',' << (c < o.scores.size() ? format_real(o.scores[c]) : "");
    }
    out << '\n';
  }
}

}  // namespace smm
