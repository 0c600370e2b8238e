#include "crossloss/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

namespace crossloss::io {

namespace {

std::string at_line(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// Lines split on LF; a trailing LF does not produce an empty final line.
std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::size_t parse_size(std::string_view text, const std::string& where) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw FormatError(where + ": expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json parse_json(std::string_view text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(where + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

std::vector<std::string> string_list(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw FormatError(source + ": missing field '" + key + "'");
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw FormatError(source + ": field '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& w : arr) {
    if (!w.is_string()) throw FormatError(source + ": field '" + key + "' must be an array of strings");
    std::string s = w.get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.push_back(std::move(s));
  }
  if (out.empty()) throw FormatError(source + ": field '" + key + "' is empty");
  return out;
}

template <class J>
std::string dump(const J& j) {
  return j.dump(-1, ' ', false, J::error_handler_t::replace);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericError("format_double: conversion failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::string& where) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw FormatError(where + ": expected a number, got '" + std::string(text) + "'");
  return v;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

std::string provenance_comment(const std::string& command, const json& config, std::uint64_t seed) {
  return "# " + command + " config=" + config_hash(config) + " seed=" + std::to_string(seed) + "\n";
}

void write_meta(const fs::path& path, const std::string& command, const json& config, std::uint64_t seed,
                const json& extra) {
  json meta = {{"command", command}, {"config_hash", config_hash(config)}, {"seed", seed}, {"config", config}};
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  write_text(fs::path(path.string() + ".meta.json"), meta.dump(2) + "\n");
}

json read_meta(const fs::path& path) {
  const fs::path meta = path.string() + ".meta.json";
  return parse_json(read_text(meta), meta.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw FormatError(path.string() + ": write failed");
}

std::vector<std::string> read_lines(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<std::string> out;
  for (auto line : lines_of(text)) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.emplace_back(line);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string format_embeddings(const Vocabulary& vocab, std::size_t dim, std::span<const double> table) {
  if (table.size() != vocab.size() * dim) throw ConfigError("format_embeddings: table size does not match vocab x dim");
  std::string out = std::to_string(vocab.size()) + " " + std::to_string(dim) + "\n";
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    out += vocab.word(static_cast<WordId>(w));
    for (std::size_t j = 0; j < dim; ++j) {
      out += ' ';
      out += format_double(table[w * dim + j]);
    }
    out += '\n';
  }
  return out;
}

EmbeddingTable parse_embeddings(const std::string& text, const std::string& source) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw FormatError(source + ": empty file");
  const auto header = split(lines[0], ' ');
  if (header.size() != 2) throw FormatError(at_line(source, 1) + ": header must be '<vocab_size> <dim>'");
  EmbeddingTable t;
  const std::size_t v = parse_size(header[0], at_line(source, 1));
  t.dim = parse_size(header[1], at_line(source, 1));
  if (lines.size() != v + 1)
    throw FormatError(source + ": header declares " + std::to_string(v) + " words but file has " +
                      std::to_string(lines.size() - 1));
  t.values.reserve(v * t.dim);
  for (std::size_t i = 1; i <= v; ++i) {
    const auto where = at_line(source, i + 1);
    const auto fields = split(lines[i], ' ');
    if (fields.size() != t.dim + 1)
      throw FormatError(where + ": expected word plus " + std::to_string(t.dim) + " values, got " +
                        std::to_string(fields.size()) + " fields");
    if (fields[0].empty()) throw FormatError(where + ": empty word");
    if (t.vocab.contains(fields[0])) throw FormatError(where + ": duplicate word '" + std::string(fields[0]) + "'");
    t.vocab.add(std::string(fields[0]));
    for (std::size_t j = 1; j < fields.size(); ++j) t.values.push_back(parse_double(fields[j], where));
  }
  return t;
}

void save_embeddings(const fs::path& path, const Vocabulary& vocab, std::size_t dim, std::span<const double> table) {
  write_text(path, format_embeddings(vocab, dim, table));
}

EmbeddingTable load_embeddings(const fs::path& path) { return parse_embeddings(read_text(path), path.string()); }

EmbeddingFiles EmbeddingFiles::from_prefix(const fs::path& prefix) {
  const auto p = prefix.string();
  return {p + ".input.txt", p + ".output.txt", p + ".initial.txt"};
}

void save_model(const fs::path& prefix, const SkipGramModel& model, std::span<const double> initial_input) {
  const auto files = EmbeddingFiles::from_prefix(prefix);
  save_embeddings(files.input, model.vocab, model.dim, model.input_table);
  save_embeddings(files.output, model.vocab, model.dim, model.output_table);
  save_embeddings(files.initial, model.vocab, model.dim, initial_input);
}

LoadedModel load_model(const fs::path& prefix) {
  const auto files = EmbeddingFiles::from_prefix(prefix);
  auto in = load_embeddings(files.input);
  auto out = load_embeddings(files.output);
  auto init = load_embeddings(files.initial);
  if (!(in.vocab == out.vocab) || !(in.vocab == init.vocab) || in.dim != out.dim || in.dim != init.dim)
    throw FormatError(prefix.string() + ": input, output and initial tables disagree on vocabulary or dim");
  LoadedModel m;
  m.model.vocab = std::move(in.vocab);
  m.model.dim = in.dim;
  m.model.input_table = std::move(in.values);
  m.model.output_table = std::move(out.values);
  m.initial_input = std::move(init.values);
  return m;
}

// ---------------------------------------------------------------------------

std::string format_points_csv(const std::vector<LabeledPoint>& points, const std::string& comment) {
  const std::size_t dim = points.empty() ? 2 : points.front().x.size();
  std::string out = comment;
  if (dim == 2) {
    out += "x,y,label\n";
  } else {
    for (std::size_t j = 0; j < dim; ++j) out += "x" + std::to_string(j) + ",";
    out += "label\n";
  }
  for (const auto& p : points) {
    if (p.x.size() != dim) throw ConfigError("format_points_csv: points differ in dimension");
    for (double v : p.x) out += format_double(v) + ",";
    out += std::to_string(p.label) + "\n";
  }
  return out;
}

std::vector<LabeledPoint> parse_points_csv(const std::string& text, const std::string& source) {
  const auto lines = lines_of(text);
  std::size_t i = 0;
  while (i < lines.size() && !lines[i].empty() && lines[i][0] == '#') ++i;
  if (i == lines.size()) throw FormatError(source + ": missing header");
  const auto header = split(lines[i], ',');
  if (header.size() < 2 || header.back() != "label")
    throw FormatError(at_line(source, i + 1) + ": header must end with 'label'");
  const std::size_t dim = header.size() - 1;
  std::vector<LabeledPoint> points;
  for (++i; i < lines.size(); ++i) {
    const auto where = at_line(source, i + 1);
    const auto fields = split(lines[i], ',');
    if (fields.size() != dim + 1)
      throw FormatError(where + ": expected " + std::to_string(dim + 1) + " fields, got " + std::to_string(fields.size()));
    LabeledPoint p;
    for (std::size_t j = 0; j < dim; ++j) p.x.push_back(parse_double(fields[j], where));
    int label = 0;
    const auto lf = fields[dim];
    auto [ptr, ec] = std::from_chars(lf.data(), lf.data() + lf.size(), label);
    if (ec != std::errc() || ptr != lf.data() + lf.size() || lf.empty())
      throw FormatError(where + ": bad label '" + std::string(lf) + "'");
    p.label = label;
    points.push_back(std::move(p));
  }
  return points;
}

// ---------------------------------------------------------------------------

WeatSpec parse_weat_spec(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  if (!j.is_object()) throw FormatError(source + ": WEAT spec must be a JSON object");
  WeatSpec spec;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw FormatError(source + ": field 'name' must be a string");
    spec.name = j.at("name").get<std::string>();
  }
  spec.x = string_list(j, "X", source);
  spec.y = string_list(j, "Y", source);
  spec.a = string_list(j, "A", source);
  spec.b = string_list(j, "B", source);
  try {
    spec.validate();
  } catch (const Error& e) {
    throw FormatError(source + ": " + e.what());
  }
  return spec;
}

WeatSpec load_weat_spec(const fs::path& path) { return parse_weat_spec(read_text(path), path.string()); }

json weat_spec_json(const WeatSpec& spec) {
  return {{"name", spec.name}, {"X", spec.x}, {"Y", spec.y}, {"A", spec.a}, {"B", spec.b}};
}

// ---------------------------------------------------------------------------

std::vector<RankedRecord> rank_records(std::span<const InfluenceRecord> records, const InfluenceSets& sets,
                                       const std::vector<std::string>& texts) {
  std::vector<long> rank(records.size(), 0);
  std::vector<std::size_t> pos_of_id;
  std::size_t max_id = 0;
  for (const auto& r : records) max_id = std::max(max_id, r.sample_id);
  pos_of_id.assign(max_id + 1, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < records.size(); ++i) pos_of_id[records[i].sample_id] = i;
  for (std::size_t i = 0; i < sets.amplifying.size(); ++i) rank.at(pos_of_id.at(sets.amplifying[i])) = static_cast<long>(i + 1);
  for (std::size_t i = 0; i < sets.mitigating.size(); ++i) rank.at(pos_of_id.at(sets.mitigating[i])) = -static_cast<long>(i + 1);

  std::vector<RankedRecord> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto id = records[i].sample_id;
    out.push_back({id, records[i].score, id < texts.size() ? texts[id] : std::string(), rank[i]});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedRecord& a, const RankedRecord& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.sample_id < b.sample_id;
  });
  return out;
}

std::string format_influence_jsonl(const std::vector<RankedRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["sample_id"] = r.sample_id;
    j["score"] = r.score;
    j["text"] = r.text;
    j["rank"] = r.rank;
    out += dump(j);
    out += '\n';
  }
  return out;
}

std::vector<RankedRecord> parse_influence_jsonl(const std::string& text, const std::string& source) {
  std::vector<RankedRecord> out;
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto where = at_line(source, i + 1);
    const json j = parse_json(lines[i], where);
    try {
      RankedRecord r;
      r.sample_id = j.at("sample_id").get<std::size_t>();
      r.score = j.at("score").get<double>();
      r.text = j.at("text").get<std::string>();
      r.rank = j.at("rank").get<long>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
std::string threshold_label(double t) { return format_double(t); }

std::string class_key(int c) { return c < 0 ? "all" : std::to_string(c); }
}  // namespace

std::string format_report_csv(const std::string& pipeline_name, const CorrelationReport& report, bool with_header) {
  std::string out;
  if (with_header) {
    out += "pipeline,class,n_points,mean_r";
    for (const auto& [t, _] : report.fraction_above) out += ",fraction_above_" + threshold_label(t);
    out += "\n";
  }
  auto row = [&](int cls, std::size_t n, double mean_r, const std::map<double, double>& fractions) {
    out += pipeline_name + "," + class_key(cls) + "," + std::to_string(n) + "," + format_double(mean_r);
    for (const auto& [t, f] : fractions) out += "," + format_double(f);
    out += "\n";
  };
  row(-1, report.per_point.size(), report.mean_r, report.fraction_above);
  for (const auto& [cls, fractions] : report.class_fraction_above) {
    const auto n = static_cast<std::size_t>(std::count(report.labels.begin(), report.labels.end(), cls));
    row(cls, n, report.class_mean_r.at(cls), fractions);
  }
  return out;
}

std::string format_per_point_csv(const std::string& pipeline_name, const CorrelationReport& report, bool with_header) {
  std::string out = with_header ? "pipeline,test_point,class,pearson_r\n" : "";
  for (std::size_t i = 0; i < report.per_point.size(); ++i) {
    const double r = report.per_point[i];
    out += pipeline_name + "," + std::to_string(i) + "," + std::to_string(report.labels.at(i)) + "," +
           (std::isnan(r) ? std::string("nan") : format_double(r)) + "\n";
  }
  return out;
}

std::string format_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory) {
  std::string out = "iteration,effect\n";
  for (const auto& p : trajectory) out += std::to_string(p.iteration) + "," + format_double(p.effect) + "\n";
  return out;
}

// ---------------------------------------------------------------------------

namespace {
json cluster_json(const ClusterModel& m) { return {{"k", m.k}, {"dim", m.dim}, {"centroids", m.centroids}}; }

ClusterModel cluster_from(const json& j, const std::string& where) {
  ClusterModel m;
  m.k = j.at("k").get<std::size_t>();
  m.dim = j.at("dim").get<std::size_t>();
  m.centroids = j.at("centroids").get<std::vector<double>>();
  if (m.centroids.size() != m.k * m.dim) throw FormatError(where + ": centroid count does not match k x dim");
  return m;
}
}  // namespace

json dec_model_json(const DecModelFile& m) {
  return {{"model", cluster_json(m.model)},
          {"init", cluster_json(m.init)},
          {"target", {{"snapshot", cluster_json(m.target.snapshot)}, {"column_mass", m.target.column_mass}}},
          {"class_map", m.class_map}};
}

DecModelFile parse_dec_model(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  try {
    DecModelFile m;
    m.model = cluster_from(j.at("model"), source + ": model");
    m.init = cluster_from(j.at("init"), source + ": init");
    m.target.snapshot = cluster_from(j.at("target").at("snapshot"), source + ": target");
    m.target.column_mass = j.at("target").at("column_mass").get<std::vector<double>>();
    m.class_map = j.at("class_map").get<ClassMap>();
    if (m.target.column_mass.size() != m.target.snapshot.k || m.class_map.size() != m.model.k)
      throw FormatError(source + ": target or class map size does not match k");
    return m;
  } catch (const json::exception& e) {
    throw FormatError(source + ": " + e.what());
  }
}

}  // namespace crossloss::io
