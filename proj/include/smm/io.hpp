#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "smm/classify.hpp"
#include "smm/diagnostics.hpp"
#include "smm/selection.hpp"
#include "smm/simulate.hpp"

namespace smm {

struct FastaRecord {
  std::string id;
  std::string sequence;
  friend bool operator==(const FastaRecord&, const FastaRecord&) = default;
};

/// Headers ('>') start records; sequence lines are concatenated with
/// whitespace removed and upper-cased. Throws MalformedFasta on an empty file,
/// sequence data before the first header, or an empty header.
std::vector<FastaRecord> parse_fasta(std::istream& in);
std::vector<FastaRecord> read_fasta(const std::filesystem::path& path);
void write_fasta(std::ostream& out, const std::vector<FastaRecord>& records,
                 std::size_t line_width = 60);

/// One sequence per line; blank lines and '#' comments are skipped. With
/// split_words the tokens are whitespace-separated, otherwise each
/// non-whitespace character is a token.
std::vector<std::vector<std::string>> read_token_file(
    const std::filesystem::path& path, bool split_words = false);

/// Sorted distinct tokens across all sequences.
Alphabet infer_alphabet(const std::vector<std::vector<std::string>>& sequences);

/// Splits a string into single-character tokens.
std::vector<std::string> char_tokens(const std::string& s);

inline constexpr int kModelSchemaVersion = 1;

nlohmann::json model_to_json(const SMMModel& model);
/// Throws InvalidArgument on schema violations.
SMMModel model_from_json(const nlohmann::json& j);
void save_model(const std::filesystem::path& path, const SMMModel& model);
SMMModel load_model(const std::filesystem::path& path);

/// +inf and NaN serialize as the strings "inf" and "nan".
nlohmann::json real_to_json(double v);
double real_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const RecoveryReport& report);

/// Shortest round-trip decimal representation.
std::string format_real(double v);

/// Reads a labels CSV: optional header, one label per line, or
/// "index,label" pairs. Throws InvalidArgument on malformed rows.
std::vector<int> read_labels_csv(const std::filesystem::path& path);

void write_path_csv(std::ostream& out, const PathResult& path);
void write_records_csv(std::ostream& out,
                       const std::vector<ReplicateRecord>& records);
void write_summary_csv(std::ostream& out,
                       const std::vector<SchemeSummary>& summaries);
/// Three-decimal human table in the layout "mean (se)".
void write_summary_table(std::ostream& out,
                         const std::vector<SchemeSummary>& summaries);
void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm,
                         const std::vector<std::string>& names);
void write_scores_csv(std::ostream& out, const ConfusionMatrix& cm,
                      const std::vector<std::string>& names);

/// Writes a file in one go; throws Error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace smm
