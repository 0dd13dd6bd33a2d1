#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "excmine/crf.hpp"
#include "excmine/phrase_clf.hpp"
#include "excmine/util.hpp"

namespace excmine {

inline constexpr const char* kModelFormatVersion = "excm-1";

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Temp file in the target directory, then rename, so readers never observe
// a half-written file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path + "'");
}

namespace detail {

inline void serialize_template(const FeatureTemplate& tmpl, std::ostream& out) {
  out << "template dim " << tmpl.embedding_dim << " window " << tmpl.window << " min_count "
      << tmpl.min_word_count << " frozen " << (tmpl.frozen ? 1 : 0) << "\n";
  out << "sparse " << tmpl.sparse_names.size() << "\n";
  for (const std::string& name : tmpl.sparse_names) out << name << "\n";
}

struct LineReader {
  std::istringstream in;
  std::string line;

  explicit LineReader(const std::string& text) : in(text) {}

  bool next() { return static_cast<bool>(std::getline(in, line)); }

  std::string expect(const std::string& what) {
    if (!next()) throw ChecksumMismatch("model file truncated: expected " + what);
    return line;
  }
};

inline std::vector<double> parse_doubles(const std::string& line, std::size_t expected,
                                         const std::string& what) {
  std::vector<std::string> cols = split_ws(line);
  if (cols.size() != expected)
    throw Error("model file: expected " + std::to_string(expected) + " values for " + what +
                ", got " + std::to_string(cols.size()));
  std::vector<double> out;
  out.reserve(expected);
  for (const std::string& c : cols) {
    bool ok = false;
    double v = parse_double(c, &ok);
    if (!ok) throw Error("model file: bad number '" + c + "' in " + what);
    out.push_back(v);
  }
  return out;
}

inline FeatureTemplate parse_template(LineReader& r) {
  std::vector<std::string> cols = split_ws(r.expect("template line"));
  if (cols.size() != 9 || cols[0] != "template")
    throw Error("model file: malformed template line");
  FeatureTemplate tmpl;
  std::size_t dim = 0, window = 0, min_count = 0, frozen = 0;
  if (!parse_size(cols[2], &dim) || !parse_size(cols[4], &window) ||
      !parse_size(cols[6], &min_count) || !parse_size(cols[8], &frozen))
    throw Error("model file: malformed template line");
  tmpl.embedding_dim = dim;
  tmpl.window = window;
  tmpl.min_word_count = min_count;

  cols = split_ws(r.expect("sparse header"));
  std::size_t n_sparse = 0;
  if (cols.size() != 2 || cols[0] != "sparse" || !parse_size(cols[1], &n_sparse))
    throw Error("model file: malformed sparse header");
  // Fixed flag features are re-interned by the constructor; the stored list
  // must match them prefix-wise.
  for (std::size_t i = 0; i < n_sparse; ++i) {
    std::string name = r.expect("sparse feature name");
    if (i < tmpl.sparse_names.size()) {
      if (tmpl.sparse_names[i] != name)
        throw Error("model file: unexpected sparse feature order at id " + std::to_string(i));
    } else {
      tmpl.intern(name);
    }
  }
  if (tmpl.sparse_names.size() != n_sparse)
    throw Error("model file: sparse feature count mismatch");
  if (frozen) tmpl.freeze();
  return tmpl;
}

// Everything between the first line and the checksum line is covered by the
// checksum. Returns {kind, body}.
inline std::pair<std::string, std::string> open_model_payload(const std::string& path) {
  std::string text = read_text_file(path);
  std::size_t eol = text.find('\n');
  if (eol == std::string::npos) throw VersionMismatch("not a model file: '" + path + "'");
  std::vector<std::string> head = split_ws(text.substr(0, eol));
  if (head.size() != 2) throw VersionMismatch("malformed model header in '" + path + "'");
  if (head[0] != kModelFormatVersion)
    throw VersionMismatch("unsupported model format '" + head[0] + "' (expected " +
                          kModelFormatVersion + ")");

  std::size_t mark = text.rfind("\nchecksum ");
  if (mark == std::string::npos || mark < eol)
    throw ChecksumMismatch("model file has no checksum line: '" + path + "'");
  std::string body = text.substr(eol + 1, mark + 1 - (eol + 1));
  std::string tail = text.substr(mark + 1);
  std::vector<std::string> cols = split_ws(tail);
  if (cols.size() != 2 || cols[0] != "checksum")
    throw ChecksumMismatch("malformed checksum line in '" + path + "'");
  if (fnv1a64_hex(body) != cols[1])
    throw ChecksumMismatch("model file checksum mismatch in '" + path + "'");
  return {head[1], body};
}

}  // namespace detail

inline std::string serialize_crf_model(const CrfModel& model, const nlohmann::json& meta) {
  std::ostringstream body;
  body << "meta " << meta.dump() << "\n";
  detail::serialize_template(model.tmpl, body);
  body << "labels";
  for (int y = 0; y < kNumTags; ++y) body << ' ' << tag_name(static_cast<BioTag>(y));
  body << "\n";
  body << "emission " << kNumTags << ' ' << model.width() << "\n";
  for (int y = 0; y < kNumTags; ++y) {
    const double* row = model.emission.data() + static_cast<std::size_t>(y) * model.width();
    for (std::size_t j = 0; j < model.width(); ++j) {
      if (j) body << ' ';
      body << format_double(row[j]);
    }
    body << "\n";
  }
  body << "transition\n";
  for (int y = 0; y < kNumTags; ++y) {
    for (int q = 0; q < kNumTags; ++q) {
      if (q) body << ' ';
      body << format_double(model.transition[y][q]);
    }
    body << "\n";
  }
  body << "start\n";
  for (int y = 0; y < kNumTags; ++y) {
    if (y) body << ' ';
    body << format_double(model.start[y]);
  }
  body << "\n";

  std::string payload = body.str();
  std::ostringstream out;
  out << kModelFormatVersion << " crf\n" << payload << "checksum " << fnv1a64_hex(payload)
      << "\n";
  return out.str();
}

inline void save_crf_model(const CrfModel& model, const nlohmann::json& meta,
                           const std::string& path) {
  write_file_atomic(path, serialize_crf_model(model, meta));
}

struct LoadedCrfModel {
  CrfModel model;
  nlohmann::json meta;
};

inline LoadedCrfModel load_crf_model(const std::string& path) {
  auto [kind, body] = detail::open_model_payload(path);
  if (kind != "crf") throw Error("'" + path + "' holds a " + kind + " model, expected crf");

  detail::LineReader r(body);
  std::string meta_line = r.expect("meta line");
  if (meta_line.rfind("meta ", 0) != 0) throw Error("model file: missing meta line");
  nlohmann::json meta = nlohmann::json::parse(meta_line.substr(5), nullptr, false);
  if (meta.is_discarded()) throw Error("model file: invalid meta JSON");

  LoadedCrfModel loaded;
  loaded.meta = std::move(meta);
  FeatureTemplate tmpl = detail::parse_template(r);

  std::vector<std::string> cols = split_ws(r.expect("labels line"));
  if (cols.size() != 1 + kNumTags || cols[0] != "labels")
    throw Error("model file: malformed labels line");
  for (int y = 0; y < kNumTags; ++y)
    if (cols[static_cast<std::size_t>(y) + 1] != tag_name(static_cast<BioTag>(y)))
      throw Error("model file: unexpected label inventory");

  cols = split_ws(r.expect("emission header"));
  std::size_t rows = 0, width = 0;
  if (cols.size() != 3 || cols[0] != "emission" || !parse_size(cols[1], &rows) ||
      !parse_size(cols[2], &width) || rows != kNumTags)
    throw Error("model file: malformed emission header");
  if (width != tmpl.total_width())
    throw Error("model file: emission width does not match template");

  CrfModel model(std::move(tmpl));
  for (int y = 0; y < kNumTags; ++y) {
    auto row = detail::parse_doubles(r.expect("emission row"), width, "emission row");
    std::copy(row.begin(), row.end(),
              model.emission.begin() + static_cast<std::ptrdiff_t>(y * static_cast<int>(width)));
  }
  if (r.expect("transition header") != "transition")
    throw Error("model file: missing transition section");
  for (int y = 0; y < kNumTags; ++y) {
    auto row = detail::parse_doubles(r.expect("transition row"), kNumTags, "transition row");
    for (int q = 0; q < kNumTags; ++q) model.transition[y][q] = row[q];
  }
  if (r.expect("start header") != "start")
    throw Error("model file: missing start section");
  auto start = detail::parse_doubles(r.expect("start row"), kNumTags, "start row");
  for (int y = 0; y < kNumTags; ++y) model.start[y] = start[y];

  loaded.model = std::move(model);
  return loaded;
}

inline std::string serialize_softmax_model(const SoftmaxModel& model, std::size_t embedding_dim,
                                           const nlohmann::json& meta) {
  std::ostringstream body;
  body << "meta " << meta.dump() << "\n";
  body << "embedding_dim " << embedding_dim << "\n";
  body << "categories";
  for (int c = 0; c < kNumCategories; ++c) body << ' ' << category_name(static_cast<Category>(c));
  body << "\n";
  body << "weights " << kNumCategories << ' ' << model.width << "\n";
  for (int k = 0; k < kNumCategories; ++k) {
    const double* row = model.weights.data() + static_cast<std::size_t>(k) * model.width;
    for (std::size_t j = 0; j < model.width; ++j) {
      if (j) body << ' ';
      body << format_double(row[j]);
    }
    body << "\n";
  }
  body << "bias\n";
  for (int k = 0; k < kNumCategories; ++k) {
    if (k) body << ' ';
    body << format_double(model.bias[k]);
  }
  body << "\n";

  std::string payload = body.str();
  std::ostringstream out;
  out << kModelFormatVersion << " softmax\n" << payload << "checksum " << fnv1a64_hex(payload)
      << "\n";
  return out.str();
}

inline void save_softmax_model(const SoftmaxModel& model, std::size_t embedding_dim,
                               const nlohmann::json& meta, const std::string& path) {
  write_file_atomic(path, serialize_softmax_model(model, embedding_dim, meta));
}

struct LoadedSoftmaxModel {
  SoftmaxModel model;
  std::size_t embedding_dim = 0;
  nlohmann::json meta;
};

inline LoadedSoftmaxModel load_softmax_model(const std::string& path) {
  auto [kind, body] = detail::open_model_payload(path);
  if (kind != "softmax") throw Error("'" + path + "' holds a " + kind + " model, expected softmax");

  detail::LineReader r(body);
  std::string meta_line = r.expect("meta line");
  if (meta_line.rfind("meta ", 0) != 0) throw Error("model file: missing meta line");
  nlohmann::json meta = nlohmann::json::parse(meta_line.substr(5), nullptr, false);
  if (meta.is_discarded()) throw Error("model file: invalid meta JSON");

  LoadedSoftmaxModel loaded;
  loaded.meta = std::move(meta);

  std::vector<std::string> cols = split_ws(r.expect("embedding_dim line"));
  if (cols.size() != 2 || cols[0] != "embedding_dim" || !parse_size(cols[1], &loaded.embedding_dim))
    throw Error("model file: malformed embedding_dim line");

  cols = split_ws(r.expect("categories line"));
  if (cols.size() != 1 + kNumCategories || cols[0] != "categories")
    throw Error("model file: malformed categories line");
  for (int c = 0; c < kNumCategories; ++c)
    if (cols[static_cast<std::size_t>(c) + 1] != category_name(static_cast<Category>(c)))
      throw Error("model file: unexpected category inventory");

  cols = split_ws(r.expect("weights header"));
  std::size_t rows = 0, width = 0;
  if (cols.size() != 3 || cols[0] != "weights" || !parse_size(cols[1], &rows) ||
      !parse_size(cols[2], &width) || rows != kNumCategories)
    throw Error("model file: malformed weights header");

  SoftmaxModel model(width);
  for (int k = 0; k < kNumCategories; ++k) {
    auto row = detail::parse_doubles(r.expect("weight row"), width, "weight row");
    std::copy(row.begin(), row.end(),
              model.weights.begin() + static_cast<std::ptrdiff_t>(k * static_cast<int>(width)));
  }
  if (r.expect("bias header") != "bias") throw Error("model file: missing bias section");
  auto bias = detail::parse_doubles(r.expect("bias row"), kNumCategories, "bias row");
  for (int k = 0; k < kNumCategories; ++k) model.bias[k] = bias[k];

  loaded.model = std::move(model);
  return loaded;
}

}  // namespace excmine
