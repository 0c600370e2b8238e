#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossloss/cluster_model.hpp"
#include "crossloss/influence.hpp"
#include "crossloss/oracle.hpp"
#include "crossloss/training.hpp"
#include "crossloss/vocabulary.hpp"
#include "crossloss/weat.hpp"

namespace crossloss::io {

namespace fs = std::filesystem;
using nlohmann::json;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& where);

/// 16 hex digits of FNV-1a over the compact JSON dump.
std::string config_hash(const json& config);

/// Provenance line written at the top of CSV outputs: "# <command> config=<hash> seed=<seed>".
std::string provenance_comment(const std::string& command, const json& config, std::uint64_t seed);

/// Sidecar "<path>.meta.json" for outputs whose format has no room for metadata.
void write_meta(const fs::path& path, const std::string& command, const json& config, std::uint64_t seed,
                const json& extra = json::object());
json read_meta(const fs::path& path);

std::vector<std::string> read_lines(const fs::path& path);
void write_text(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

// Embeddings: "<vocab_size> <dim>\n" then "<word> <f1> ... <fd>\n" per word, in id order.
struct EmbeddingTable {
  Vocabulary vocab;
  std::size_t dim = 0;
  std::vector<double> values;
};
std::string format_embeddings(const Vocabulary& vocab, std::size_t dim, std::span<const double> table);
EmbeddingTable parse_embeddings(const std::string& text, const std::string& source);
void save_embeddings(const fs::path& path, const Vocabulary& vocab, std::size_t dim, std::span<const double> table);
EmbeddingTable load_embeddings(const fs::path& path);

/// "<prefix>.input.txt", "<prefix>.output.txt", "<prefix>.initial.txt"
struct EmbeddingFiles {
  fs::path input, output, initial;
  static EmbeddingFiles from_prefix(const fs::path& prefix);
};
void save_model(const fs::path& prefix, const SkipGramModel& model, std::span<const double> initial_input);
struct LoadedModel {
  SkipGramModel model;
  std::vector<double> initial_input;
};
LoadedModel load_model(const fs::path& prefix);

// MOG CSV "x,y,label" (generalizes to x0..x{d-1} columns for d != 2).
std::string format_points_csv(const std::vector<LabeledPoint>& points, const std::string& comment = {});
std::vector<LabeledPoint> parse_points_csv(const std::string& text, const std::string& source);

// WeatSpec JSON {name, X, Y, A, B}; words lowercased.
WeatSpec parse_weat_spec(const std::string& text, const std::string& source);
WeatSpec load_weat_spec(const fs::path& path);
json weat_spec_json(const WeatSpec& spec);

// Influence JSON Lines: one {sample_id, score, text, rank} per sample, sorted
// by descending score (ties by id). rank = +i for the i-th amplifying sample,
// -i for the i-th mitigating sample, 0 otherwise.
struct RankedRecord {
  std::size_t sample_id = 0;
  double score = 0.0;
  std::string text;
  long rank = 0;
};
std::vector<RankedRecord> rank_records(std::span<const InfluenceRecord> records, const InfluenceSets& sets,
                                       const std::vector<std::string>& texts);
std::string format_influence_jsonl(const std::vector<RankedRecord>& records);
std::vector<RankedRecord> parse_influence_jsonl(const std::string& text, const std::string& source);

std::string format_report_csv(const std::string& pipeline_name, const CorrelationReport& report,
                              bool with_header);
std::string format_per_point_csv(const std::string& pipeline_name, const CorrelationReport& report,
                                 bool with_header);
std::string format_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory);

// DEC model JSON.
struct DecModelFile {
  ClusterModel model;
  ClusterModel init;
  DecTarget target;
  ClassMap class_map;
};
json dec_model_json(const DecModelFile& m);
DecModelFile parse_dec_model(const std::string& text, const std::string& source);

}  // namespace crossloss::io
