//
// Project ChemScreen - Copyright 2026 ChemScreen Developers.
// SPDX-License-Identifier: Apache-2.0
//

#include "chemscreen/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "chemscreen/hash.hpp"
#include "chemscreen/rng.hpp"

namespace chemscreen::models {

namespace {

constexpr double kMinImpurity = 1e-12;

double midpoint(double lo, double hi) { return lo + (hi - lo) / 2.0; }

struct NodeStats {
  double sumw = 0.0;
  double sumwy = 0.0;
  double sumwyy = 0.0;
  std::size_t count = 0;

  void add(double weight, double target) {
    sumw += weight;
    sumwy += weight * target;
    sumwyy += weight * target * target;
    ++count;
  }

  double impurity() const {
    return std::max(0.0, sumwyy - sumwy * sumwy / sumw);
  }

  double mean() const { return sumwy / sumw; }

  NodeStats minus(const NodeStats &other) const {
    return {sumw - other.sumw, sumwy - other.sumwy, sumwyy - other.sumwyy,
            count - other.count};
  }
};

struct TreeBuilder {
  const Eigen::MatrixXd &X;
  const Eigen::VectorXd &y;
  const Eigen::VectorXd &w;
  const ForestConfig &config;
  int k_features;
  SeededRng rng;
  Tree tree;
  std::vector<int> col_pool;

  TreeBuilder(const Eigen::MatrixXd &x, const Eigen::VectorXd &targets,
              const Eigen::VectorXd &weights, const ForestConfig &cfg,
              std::uint64_t tree_seed)
      : X(x), y(targets), w(weights), config(cfg), rng(tree_seed) {
    const int n_cols = static_cast<int>(X.cols());
    k_features = static_cast<int>(
        std::ceil(config.features_per_split * static_cast<double>(n_cols)));
    k_features = std::clamp(k_features, 1, n_cols);
    col_pool.resize(static_cast<std::size_t>(n_cols));
    std::iota(col_pool.begin(), col_pool.end(), 0);
  }

  // Columns scanned at this node, ascending so that equal-gain ties resolve
  // toward the lowest feature index.
  std::vector<int> sample_columns() {
    const int n_cols = static_cast<int>(X.cols());
    if (k_features == n_cols) return col_pool;
    for (int i = 0; i < k_features; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) +
          static_cast<std::size_t>(rng.uniform_below(
              static_cast<std::uint64_t>(n_cols - i)));
      std::swap(col_pool[static_cast<std::size_t>(i)], col_pool[j]);
    }
    std::vector<int> cols(col_pool.begin(), col_pool.begin() + k_features);
    std::sort(cols.begin(), cols.end());
    return cols;
  }

  int build(const std::vector<int> &rows, int depth) {
    NodeStats total;
    for (int r : rows) total.add(w(r), y(r));

    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({-1, 0.0, total.mean(), -1, -1});

    if (depth >= config.max_depth ||
        rows.size() < 2 * static_cast<std::size_t>(config.min_samples_leaf) ||
        total.impurity() <= kMinImpurity) {
      return node_index;
    }

    const double parent_impurity = total.impurity();
    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> sorted_rows;
    for (const int f : sample_columns()) {
      double vmin = std::numeric_limits<double>::infinity();
      double vmax = -std::numeric_limits<double>::infinity();
      for (int r : rows) {
        const double v = X(r, f);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
      if (vmin == vmax) continue;

      // Two-valued columns (fingerprint bits, standardized or not) split in
      // one pass; continuous columns fall back to sort-and-scan.
      bool binary = true;
      NodeStats left;
      for (int r : rows) {
        const double v = X(r, f);
        if (v == vmin) {
          left.add(w(r), y(r));
        } else if (v != vmax) {
          binary = false;
          break;
        }
      }

      if (binary) {
        const NodeStats right = total.minus(left);
        if (left.count < static_cast<std::size_t>(config.min_samples_leaf) ||
            right.count < static_cast<std::size_t>(config.min_samples_leaf)) {
          continue;
        }
        const double gain =
            parent_impurity - left.impurity() - right.impurity();
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = midpoint(vmin, vmax);
        }
        continue;
      }

      sorted_rows.clear();
      sorted_rows.reserve(rows.size());
      for (int r : rows) sorted_rows.emplace_back(X(r, f), r);
      std::sort(sorted_rows.begin(), sorted_rows.end(),
                [](const auto &a, const auto &b) { return a.first < b.first; });

      NodeStats prefix;
      for (std::size_t i = 0; i + 1 < sorted_rows.size(); ++i) {
        prefix.add(w(sorted_rows[i].second), y(sorted_rows[i].second));
        if (sorted_rows[i].first == sorted_rows[i + 1].first) continue;
        if (prefix.count < static_cast<std::size_t>(config.min_samples_leaf) ||
            rows.size() - prefix.count <
                static_cast<std::size_t>(config.min_samples_leaf)) {
          continue;
        }
        const NodeStats right = total.minus(prefix);
        const double gain =
            parent_impurity - prefix.impurity() - right.impurity();
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold =
              midpoint(sorted_rows[i].first, sorted_rows[i + 1].first);
        }
      }
    }

    if (best_feature < 0) return node_index;

    std::vector<int> left_rows;
    std::vector<int> right_rows;
    for (int r : rows) {
      (X(r, best_feature) <= best_threshold ? left_rows : right_rows)
          .push_back(r);
    }

    tree.nodes[static_cast<std::size_t>(node_index)].feature = best_feature;
    tree.nodes[static_cast<std::size_t>(node_index)].threshold = best_threshold;
    const int left_child = build(left_rows, depth + 1);
    const int right_child = build(right_rows, depth + 1);
    tree.nodes[static_cast<std::size_t>(node_index)].left = left_child;
    tree.nodes[static_cast<std::size_t>(node_index)].right = right_child;
    return node_index;
  }
};

Tree train_one_tree(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                    const Eigen::VectorXd &w, const ForestConfig &config,
                    int tree_index) {
  const std::uint64_t tree_seed =
      derive_seed(config.seed, static_cast<std::uint64_t>(tree_index));
  TreeBuilder builder(X, y, w, config, tree_seed);

  const std::size_t n = static_cast<std::size_t>(X.rows());
  std::vector<int> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = static_cast<int>(builder.rng.uniform_below(n));
  }
  builder.build(rows, 0);
  return std::move(builder.tree);
}

std::uint64_t dataset_fingerprint(const Eigen::MatrixXd &X,
                                  const Eigen::VectorXd &y,
                                  const Eigen::VectorXd &w,
                                  const ForestConfig &config) {
  std::uint64_t h = mix64(0x5eed5eedULL);
  auto mix_in = [&h](std::uint64_t word) { h = hash_combine(h, word); };
  mix_in(static_cast<std::uint64_t>(X.rows()));
  mix_in(static_cast<std::uint64_t>(X.cols()));
  for (Eigen::Index r = 0; r < X.rows(); ++r) {
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
      mix_in(std::bit_cast<std::uint64_t>(X(r, c)));
    }
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    mix_in(std::bit_cast<std::uint64_t>(y(i)));
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    mix_in(std::bit_cast<std::uint64_t>(w(i)));
  }
  mix_in(static_cast<std::uint64_t>(config.n_estimators));
  mix_in(static_cast<std::uint64_t>(config.max_depth));
  mix_in(static_cast<std::uint64_t>(config.min_samples_leaf));
  mix_in(std::bit_cast<std::uint64_t>(config.features_per_split));
  mix_in(config.seed);
  return h;
}

}  // namespace

double weighted_mse(const Eigen::VectorXd &y, const Eigen::VectorXd &yhat,
                    const Eigen::VectorXd &w) {
  if (y.size() != yhat.size() || y.size() != w.size()) {
    throw std::invalid_argument("weighted_mse: length mismatch");
  }
  if (y.size() == 0) throw std::invalid_argument("weighted_mse: empty input");
  if ((w.array() <= 0.0).any()) {
    throw std::invalid_argument("weighted_mse: weights must be positive");
  }
  const Eigen::ArrayXd diff = (y - yhat).array();
  return (w.array() * diff * diff).sum() / static_cast<double>(y.size());
}

RandomPredictorModel fit_random(const Eigen::VectorXd &train_targets,
                                std::uint64_t seed) {
  if (train_targets.size() == 0) {
    throw std::invalid_argument("random predictor needs training targets");
  }
  RandomPredictorModel model;
  model.low = train_targets.minCoeff();
  model.high = train_targets.maxCoeff();
  model.seed = seed;
  if (!(model.low < model.high)) {
    throw std::invalid_argument(
        "random predictor needs a non-degenerate target range");
  }
  return model;
}

Eigen::VectorXd random_predict(const RandomPredictorModel &model,
                               Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("random_predict: n must be >= 1");
  SeededRng rng(model.seed);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i) = rng.uniform_real(model.low, model.high);
  }
  return out;
}

std::string random_model_to_json(const RandomPredictorModel &model) {
  nlohmann::json doc;
  doc["type"] = "random_predictor";
  doc["low"] = model.low;
  doc["high"] = model.high;
  doc["seed"] = model.seed;
  return doc.dump(2) + "\n";
}

RandomPredictorModel random_model_from_json(const std::string &text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  if (doc.value("type", "") != "random_predictor") {
    throw std::runtime_error("not a random-predictor model");
  }
  RandomPredictorModel model;
  model.low = doc.at("low").get<double>();
  model.high = doc.at("high").get<double>();
  model.seed = doc.at("seed").get<std::uint64_t>();
  return model;
}

double Tree::predict_row(const Eigen::MatrixXd &X, Eigen::Index row) const {
  const TreeNode *node = &nodes[0];
  while (!node->is_leaf()) {
    node = X(row, node->feature) <= node->threshold
               ? &nodes[static_cast<std::size_t>(node->left)]
               : &nodes[static_cast<std::size_t>(node->right)];
  }
  return node->value;
}

int Tree::depth() const {
  // Nodes are stored preorder; walk explicitly to avoid recursion limits.
  std::vector<std::pair<int, int>> stack{{0, 1}};
  int depth = 0;
  while (!stack.empty()) {
    const auto [index, level] = stack.back();
    stack.pop_back();
    depth = std::max(depth, level);
    const TreeNode &node = nodes[static_cast<std::size_t>(index)];
    if (!node.is_leaf()) {
      stack.emplace_back(node.left, level + 1);
      stack.emplace_back(node.right, level + 1);
    }
  }
  return depth;
}

RandomForestModel rf_train(const features::FeatureMatrix &X,
                           const Eigen::VectorXd &y, const Eigen::VectorXd &w,
                           const ForestConfig &config, int n_threads) {
  if (X.n_rows() < 2) throw std::invalid_argument("rf_train: need >= 2 rows");
  if (X.n_rows() != y.size()) {
    throw std::invalid_argument("rf_train: X and y row mismatch");
  }
  if (w.size() != 0 && w.size() != y.size()) {
    throw std::invalid_argument("rf_train: weight length mismatch");
  }
  if (!X.values.allFinite() || !y.allFinite()) {
    throw std::invalid_argument("rf_train: non-finite features or targets");
  }
  if (config.n_estimators < 1 || config.max_depth < 1 ||
      config.min_samples_leaf < 1 || config.features_per_split <= 0.0 ||
      config.features_per_split > 1.0) {
    throw std::invalid_argument("rf_train: invalid configuration");
  }

  const Eigen::VectorXd weights =
      w.size() == 0 ? Eigen::VectorXd::Ones(y.size()) : w;

  RandomForestModel model;
  model.config = config;
  model.feature_schema = X.column_names;
  model.train_fingerprint = dataset_fingerprint(X.values, y, weights, config);
  model.trees.resize(static_cast<std::size_t>(config.n_estimators));

  auto train_range = [&](int lo, int hi) {
    for (int t = lo; t < hi; ++t) {
      model.trees[static_cast<std::size_t>(t)] =
          train_one_tree(X.values, y, weights, config, t);
    }
  };

  if (n_threads <= 1 || config.n_estimators < 2) {
    train_range(0, config.n_estimators);
  } else {
    const int workers = std::min(n_threads, config.n_estimators);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (config.n_estimators + workers - 1) / workers;
    for (int t = 0; t < workers; ++t) {
      const int lo = t * chunk;
      const int hi = std::min(config.n_estimators, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(train_range, lo, hi);
    }
    for (auto &worker : pool) worker.join();
  }
  return model;
}

Eigen::VectorXd rf_predict(const RandomForestModel &model,
                           const features::FeatureMatrix &X) {
  if (X.column_names != model.feature_schema) {
    throw std::invalid_argument(
        "rf_predict: feature columns do not match the model schema");
  }
  Eigen::VectorXd out(X.n_rows());
  const double inv_trees = 1.0 / static_cast<double>(model.trees.size());
  for (Eigen::Index r = 0; r < X.n_rows(); ++r) {
    double sum = 0.0;
    for (const Tree &tree : model.trees) sum += tree.predict_row(X.values, r);
    out(r) = sum * inv_trees;
  }
  return out;
}

Eigen::VectorXd rf_predict_preprocessed(const RandomForestModel &model,
                                        const features::FeatureMatrix &X) {
  if (!model.preprocess) return rf_predict(model, X);
  const Preprocess &prep = *model.preprocess;

  if (X.column_names == model.feature_schema &&
      X.standardized == prep.standardized) {
    return rf_predict(model, X);
  }
  if (X.column_names == prep.source_columns && !X.standardized) {
    features::FeatureMatrix sub =
        features::select_columns(X, model.feature_schema);
    if (prep.standardized) {
      sub = features::apply_scaler(sub, prep.scaler);
    }
    return rf_predict(model, sub);
  }
  throw std::invalid_argument(
      "rf_predict: input matches neither the model schema nor its raw source "
      "columns");
}

// ---------------------------------------------------------------------------
// Artifact serialization (little-endian, checksummed)
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'S', 'R', 'F', 'M', 'D', 'L', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void append_u32(std::string &out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void append_u64(std::string &out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void append_i32(std::string &out, std::int32_t v) {
  append_u32(out, static_cast<std::uint32_t>(v));
}

void append_f64(std::string &out, double v) {
  append_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
  const std::string &bytes;
  std::size_t pos = 0;

  void require(std::size_t n) const {
    if (pos + n > bytes.size()) {
      throw std::runtime_error("model artifact truncated");
    }
  }
  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) {
      v |= static_cast<std::uint32_t>(
               static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(b)]))
           << (8 * b);
    }
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) {
      v |= static_cast<std::uint64_t>(
               static_cast<unsigned char>(bytes[pos + static_cast<std::size_t>(b)]))
           << (8 * b);
    }
    pos += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string chunk(std::size_t n) {
    require(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }
};

nlohmann::json scaler_to_json(const features::Scaler &scaler) {
  nlohmann::json doc;
  doc["mean"] = std::vector<double>(scaler.mean.data(),
                                    scaler.mean.data() + scaler.mean.size());
  doc["stddev"] = std::vector<double>(
      scaler.stddev.data(), scaler.stddev.data() + scaler.stddev.size());
  return doc;
}

features::Scaler scaler_from_json(const nlohmann::json &doc) {
  const auto mean = doc.at("mean").get<std::vector<double>>();
  const auto stddev = doc.at("stddev").get<std::vector<double>>();
  features::Scaler scaler;
  scaler.mean = Eigen::Map<const Eigen::VectorXd>(
      mean.data(), static_cast<Eigen::Index>(mean.size()));
  scaler.stddev = Eigen::Map<const Eigen::VectorXd>(
      stddev.data(), static_cast<Eigen::Index>(stddev.size()));
  return scaler;
}

}  // namespace

std::string rf_save(const RandomForestModel &model) {
  nlohmann::json header;
  header["config"] = {
      {"n_estimators", model.config.n_estimators},
      {"max_depth", model.config.max_depth},
      {"min_samples_leaf", model.config.min_samples_leaf},
      {"features_per_split", model.config.features_per_split},
      {"seed", model.config.seed},
  };
  header["feature_schema"] = model.feature_schema;
  header["train_fingerprint"] = to_hex(model.train_fingerprint);
  header["n_trees"] = model.trees.size();
  if (model.preprocess) {
    header["preprocess"] = {
        {"source_columns", model.preprocess->source_columns},
        {"dropped_columns", model.preprocess->dropped_columns},
        {"standardized", model.preprocess->standardized},
    };
    if (model.preprocess->standardized) {
      header["preprocess"]["scaler"] = scaler_to_json(model.preprocess->scaler);
    }
  }
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  append_u32(out, kFormatVersion);
  append_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out += header_text;
  for (const Tree &tree : model.trees) {
    append_u32(out, static_cast<std::uint32_t>(tree.nodes.size()));
    for (const TreeNode &node : tree.nodes) {
      append_i32(out, node.feature);
      append_f64(out, node.threshold);
      append_f64(out, node.value);
      append_i32(out, node.left);
      append_i32(out, node.right);
    }
  }
  append_u64(out, fnv1a64(out));
  return out;
}

RandomForestModel rf_load(const std::string &bytes) {
  if (bytes.size() < sizeof(kMagic) + 16 ||
      bytes.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a chemscreen random-forest artifact");
  }
  const std::string body = bytes.substr(0, bytes.size() - 8);
  Reader tail{bytes, bytes.size() - 8};
  if (tail.u64() != fnv1a64(body)) {
    throw std::runtime_error("model artifact checksum mismatch");
  }

  Reader reader{bytes, sizeof(kMagic)};
  if (reader.u32() != kFormatVersion) {
    throw std::runtime_error("unsupported model artifact version");
  }
  const std::uint32_t header_len = reader.u32();
  const nlohmann::json header = nlohmann::json::parse(reader.chunk(header_len));

  RandomForestModel model;
  const auto &config = header.at("config");
  model.config.n_estimators = config.at("n_estimators").get<int>();
  model.config.max_depth = config.at("max_depth").get<int>();
  model.config.min_samples_leaf = config.at("min_samples_leaf").get<int>();
  model.config.features_per_split = config.at("features_per_split").get<double>();
  model.config.seed = config.at("seed").get<std::uint64_t>();
  model.feature_schema =
      header.at("feature_schema").get<std::vector<std::string>>();
  model.train_fingerprint =
      std::stoull(header.at("train_fingerprint").get<std::string>(), nullptr, 16);
  if (header.contains("preprocess")) {
    Preprocess prep;
    const auto &p = header.at("preprocess");
    prep.source_columns = p.at("source_columns").get<std::vector<std::string>>();
    prep.dropped_columns =
        p.at("dropped_columns").get<std::vector<std::string>>();
    prep.standardized = p.at("standardized").get<bool>();
    if (prep.standardized) prep.scaler = scaler_from_json(p.at("scaler"));
    model.preprocess = std::move(prep);
  }

  const std::size_t n_trees = header.at("n_trees").get<std::size_t>();
  model.trees.resize(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    const std::uint32_t n_nodes = reader.u32();
    model.trees[t].nodes.resize(n_nodes);
    for (std::uint32_t k = 0; k < n_nodes; ++k) {
      TreeNode &node = model.trees[t].nodes[k];
      node.feature = reader.i32();
      node.threshold = reader.f64();
      node.value = reader.f64();
      node.left = reader.i32();
      node.right = reader.i32();
    }
  }
  if (reader.pos != bytes.size() - 8) {
    throw std::runtime_error("model artifact has trailing bytes");
  }
  return model;
}

void rf_save_file(const std::string &path, const RandomForestModel &model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model artifact: " + path);
  const std::string bytes = rf_save(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("model artifact write failed: " + path);
}

RandomForestModel rf_load_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model artifact: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return rf_load(buf.str());
}

}  // namespace chemscreen::models
