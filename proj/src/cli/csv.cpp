#include "tagdl/cli/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tagdl/error.hpp"
#include "tagdl/ff.hpp"

namespace tagdl {

std::vector<std::vector<std::string>> parse_csv(std::string_view text, const std::string& source) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw LoadError(source + ": unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

namespace {

std::string row_error(const std::string& source, std::size_t row, const std::string& msg) {
  return source + ": row " + std::to_string(row) + ": " + msg;
}

}  // namespace

std::vector<EdbFact> load_edb_csv(const std::string& relation, const RelationSignature& signature,
                                  std::string_view text, const std::string& source) {
  auto records = parse_csv(text, source);
  if (records.empty()) throw LoadError(source + ": missing header row");
  const auto& header = records.front();
  std::optional<std::size_t> prob_col;
  std::optional<std::size_t> me_col;
  std::vector<std::size_t> data_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "prob" && !prob_col) {
      prob_col = c;
    } else if (header[c] == "me" && !me_col) {
      me_col = c;
    } else {
      data_cols.push_back(c);
    }
  }
  if (data_cols.size() != signature.arity()) {
    throw LoadError(source + ": header has " + std::to_string(data_cols.size()) + " value columns but relation `" +
                    relation + "` has arity " + std::to_string(signature.arity()));
  }

  std::vector<EdbFact> facts;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::size_t row = r + 1;
    if (rec.size() == 1 && rec[0].empty()) continue;
    if (rec.size() != header.size()) {
      throw LoadError(row_error(source, row,
                                "expected " + std::to_string(header.size()) + " fields, found " +
                                    std::to_string(rec.size())));
    }
    EdbFact f;
    f.relation = relation;
    for (std::size_t i = 0; i < data_cols.size(); ++i) {
      const std::string& text_value = rec[data_cols[i]];
      const ValueType t = signature.columns[i];
      std::optional<Value> v;
      if (t == ValueType::String) {
        v = Value::string(text_value);
      } else {
        v = cast_value(Value::string(text_value), t);
      }
      if (!v) {
        throw LoadError(row_error(source, row,
                                  "cannot read `" + text_value + "` as " + std::string(type_name(t)) + " in column " +
                                      std::to_string(i)));
      }
      f.tuple.push_back(std::move(*v));
    }
    if (prob_col && !rec[*prob_col].empty()) {
      const std::string& p = rec[*prob_col];
      double prob = 0;
      auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), prob);
      if (ec != std::errc() || ptr != p.data() + p.size() || std::isnan(prob)) {
        throw LoadError(row_error(source, row, "invalid probability `" + p + "`"));
      }
      if (prob < 0.0 || prob > 1.0) throw LoadError(row_error(source, row, "probability " + p + " is outside [0, 1]"));
      f.tag.prob = prob;
    }
    if (me_col && !rec[*me_col].empty()) {
      const std::string& m = rec[*me_col];
      std::uint64_t id = 0;
      auto [ptr, ec] = std::from_chars(m.data(), m.data() + m.size(), id);
      if (ec != std::errc() || ptr != m.data() + m.size() || id >= kCsvExclusionBase) {
        throw LoadError(row_error(source, row, "invalid exclusion id `" + m + "`"));
      }
      if (!f.tag.prob) throw LoadError(row_error(source, row, "an exclusion id needs a probability"));
      f.tag.exclusion = kCsvExclusionBase | id;
    }
    facts.push_back(std::move(f));
  }
  return facts;
}

std::vector<EdbFact> load_edb_csv(const std::string& relation, const RelationSignature& signature,
                                  const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_edb_csv(relation, signature, ss.str(), path.string());
}

}  // namespace tagdl
