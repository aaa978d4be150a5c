#include "tlds/dataset.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace tlds {

using nlohmann::ordered_json;

std::string to_string(FeatureKind k) {
  return k == FeatureKind::categorical ? "categorical" : "numeric";
}

std::string to_string(ColumnRole r) {
  switch (r) {
    case ColumnRole::feature: return "feature";
    case ColumnRole::label: return "label";
    case ColumnRole::blackbox: return "blackbox";
    case ColumnRole::ignore: return "ignore";
  }
  return "feature";
}

FeatureKind feature_kind_from_string(const std::string& s) {
  if (s == "categorical") return FeatureKind::categorical;
  if (s == "numeric") return FeatureKind::numeric;
  throw Error("unknown feature kind '" + s + "'");
}

ColumnRole column_role_from_string(const std::string& s) {
  if (s == "feature") return ColumnRole::feature;
  if (s == "label") return ColumnRole::label;
  if (s == "blackbox") return ColumnRole::blackbox;
  if (s == "ignore") return ColumnRole::ignore;
  throw Error("unknown column role '" + s + "'");
}

std::string SchemaConfig::to_json() const {
  ordered_json cols = ordered_json::array();
  for (const auto& c : columns) {
    cols.push_back({{"name", c.name},
                    {"kind", to_string(c.kind)},
                    {"role", to_string(c.role)}});
  }
  ordered_json j{{"columns", cols}};
  return j.dump(2) + "\n";
}

SchemaConfig SchemaConfig::from_json(const std::string& text) {
  SchemaConfig cfg;
  ordered_json j = ordered_json::parse(text);
  if (!j.contains("columns") || !j["columns"].is_array())
    throw Error("schema config: missing 'columns' array");
  for (const auto& c : j["columns"]) {
    ColumnSpec spec;
    spec.name = c.at("name").get<std::string>();
    spec.kind = feature_kind_from_string(c.at("kind").get<std::string>());
    spec.role = c.contains("role")
                    ? column_role_from_string(c.at("role").get<std::string>())
                    : ColumnRole::feature;
    cfg.columns.push_back(std::move(spec));
  }
  return cfg;
}

bool TabularDataset::has_feature(const std::string& name) const {
  for (const auto& f : features_)
    if (f.name == name) return true;
  return false;
}

std::size_t TabularDataset::feature_index(const std::string& name) const {
  for (std::size_t i = 0; i < features_.size(); ++i)
    if (features_[i].name == name) return i;
  throw Error("feature '" + name + "' not present in dataset schema");
}

const std::vector<std::string>& TabularDataset::label() const {
  if (label_.empty()) throw Error("dataset has no label column");
  return label_;
}

const std::vector<std::string>& TabularDataset::blackbox() const {
  if (blackbox_.empty()) throw Error("dataset has no blackbox column");
  return blackbox_;
}

void TabularDataset::check_rows(std::size_t n) {
  if (!n_rows_set_) {
    n_rows_ = n;
    n_rows_set_ = true;
    return;
  }
  if (n != n_rows_)
    throw Error("column length " + std::to_string(n) +
                " does not match dataset row count " + std::to_string(n_rows_));
}

void TabularDataset::add_feature(FeatureColumn col) {
  if (has_feature(col.name)) throw Error("duplicate feature '" + col.name + "'");
  check_rows(col.values.size());
  features_.push_back(std::move(col));
}

void TabularDataset::set_label(std::vector<std::string> values) {
  check_rows(values.size());
  label_ = std::move(values);
}

void TabularDataset::set_blackbox(std::vector<std::string> values) {
  check_rows(values.size());
  blackbox_ = std::move(values);
}

TabularDataset TabularDataset::select_rows(
    const std::vector<std::size_t>& idx) const {
  TabularDataset out;
  for (const auto& f : features_) {
    FeatureColumn col{f.name, f.kind, {}};
    col.values.reserve(idx.size());
    for (std::size_t i : idx) col.values.push_back(f.values[i]);
    out.add_feature(std::move(col));
  }
  if (!label_.empty()) {
    std::vector<std::string> l;
    l.reserve(idx.size());
    for (std::size_t i : idx) l.push_back(label_[i]);
    out.set_label(std::move(l));
  }
  if (!blackbox_.empty()) {
    std::vector<std::string> b;
    b.reserve(idx.size());
    for (std::size_t i : idx) b.push_back(blackbox_[i]);
    out.set_blackbox(std::move(b));
  }
  return out;
}

SchemaConfig TabularDataset::schema() const {
  SchemaConfig cfg;
  for (const auto& f : features_)
    cfg.columns.push_back({f.name, f.kind, ColumnRole::feature});
  if (!label_.empty())
    cfg.columns.push_back({"label", FeatureKind::categorical, ColumnRole::label});
  if (!blackbox_.empty())
    cfg.columns.push_back(
        {"blackbox", FeatureKind::categorical, ColumnRole::blackbox});
  return cfg;
}

std::string TabularDataset::to_csv() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& f : features_) {
    if (!first) out << ',';
    out << f.name;
    first = false;
  }
  if (!label_.empty()) {
    if (!first) out << ',';
    out << "label";
    first = false;
  }
  if (!blackbox_.empty()) {
    if (!first) out << ',';
    out << "blackbox";
  }
  out << '\n';
  for (std::size_t r = 0; r < n_rows_; ++r) {
    first = true;
    for (const auto& f : features_) {
      if (!first) out << ',';
      out << format_cell(f.values[r]);
      first = false;
    }
    if (!label_.empty()) {
      if (!first) out << ',';
      out << label_[r];
      first = false;
    }
    if (!blackbox_.empty()) {
      if (!first) out << ',';
      out << blackbox_[r];
    }
    out << '\n';
  }
  return out.str();
}

void TabularDataset::save_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << to_csv();
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TabularDataset parse_csv(const std::string& text, const SchemaConfig& schema) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("csv is empty (no header row)");
  std::vector<std::string> header = split_line(line);

  // Map each declared column to a position in the header.
  std::vector<int> positions(schema.columns.size(), -1);
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == schema.columns[i].name) {
        positions[i] = static_cast<int>(h);
        break;
      }
    }
    if (positions[i] < 0)
      throw Error("declared column '" + schema.columns[i].name +
                  "' not found in csv header");
  }
  for (const auto& h : header) {
    bool known = false;
    for (const auto& c : schema.columns)
      if (c.name == h) known = true;
    if (!known)
      throw Error("csv column '" + h + "' is not declared in the schema config");
  }

  std::vector<std::vector<Cell>> feature_values;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> label_values, blackbox_values;
  int label_col = -1, blackbox_col = -1;
  for (std::size_t i = 0; i < schema.columns.size(); ++i) {
    switch (schema.columns[i].role) {
      case ColumnRole::feature:
        feature_cols.push_back(i);
        feature_values.emplace_back();
        break;
      case ColumnRole::label:
        if (label_col >= 0) throw Error("schema declares two label columns");
        label_col = static_cast<int>(i);
        break;
      case ColumnRole::blackbox:
        if (blackbox_col >= 0)
          throw Error("schema declares two blackbox columns");
        blackbox_col = static_cast<int>(i);
        break;
      case ColumnRole::ignore:
        break;
    }
  }

  std::size_t line_no = 1;  // header was line 1
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw Error("ragged row at line " + std::to_string(line_no) + ": got " +
                  std::to_string(cells.size()) + " cells, expected " +
                  std::to_string(header.size()));
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      const ColumnSpec& spec = schema.columns[feature_cols[k]];
      const std::string& raw = cells[positions[feature_cols[k]]];
      if (spec.kind == FeatureKind::numeric) {
        double v;
        if (!parse_double(raw, v))
          throw Error("cannot parse numeric cell '" + raw + "' in column '" +
                      spec.name + "' at line " + std::to_string(line_no));
        feature_values[k].push_back(v);
      } else {
        if (raw.empty())
          throw Error("missing value in column '" + spec.name + "' at line " +
                      std::to_string(line_no));
        feature_values[k].push_back(raw);
      }
    }
    if (label_col >= 0) label_values.push_back(cells[positions[label_col]]);
    if (blackbox_col >= 0)
      blackbox_values.push_back(cells[positions[blackbox_col]]);
  }
  if (line_no == 1) throw Error("csv has a header but no data rows");

  TabularDataset data;
  for (std::size_t k = 0; k < feature_cols.size(); ++k) {
    const ColumnSpec& spec = schema.columns[feature_cols[k]];
    data.add_feature({spec.name, spec.kind, std::move(feature_values[k])});
  }
  if (label_col >= 0) data.set_label(std::move(label_values));
  if (blackbox_col >= 0) data.set_blackbox(std::move(blackbox_values));
  return data;
}

TabularDataset load_csv(const std::string& path, const SchemaConfig& schema) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open csv file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str(), schema);
}

DatasetSplit split_dataset(const TabularDataset& data, const SplitRatios& ratios,
                           std::uint64_t seed) {
  if (ratios.train <= 0 || ratios.test <= 0 || ratios.validation <= 0)
    throw Error("split ratios must be positive");
  double sum = ratios.train + ratios.test + ratios.validation;
  if (sum < 0.999 || sum > 1.001) throw Error("split ratios must sum to 1");

  std::vector<std::size_t> idx(data.n_rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  Rng rng(seed);
  rng.shuffle(idx);

  std::size_t n = idx.size();
  std::size_t n_train = static_cast<std::size_t>(ratios.train * n);
  std::size_t n_test = static_cast<std::size_t>(ratios.test * n);
  if (n_train == 0 || n_test == 0 || n_train + n_test >= n)
    throw Error("dataset too small for the requested split");

  std::vector<std::size_t> tr(idx.begin(), idx.begin() + n_train);
  std::vector<std::size_t> te(idx.begin() + n_train,
                              idx.begin() + n_train + n_test);
  std::vector<std::size_t> va(idx.begin() + n_train + n_test, idx.end());
  return {data.select_rows(tr), data.select_rows(te), data.select_rows(va)};
}

}  // namespace tlds
