#include "kgstress/ml.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"
#include "kgstress/fuzzy.hpp"
#include "kgstress/hash.hpp"
#include "kgstress/kernels.hpp"
#include "kgstress/metrics.hpp"
#include "kgstress/rng.hpp"

namespace kgstress {

namespace {

using nlohmann::json;

class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string base_url, std::string model, std::size_t dimension)
      : base_url_(std::move(base_url)), model_(std::move(model)), dimension_(dimension) {}

  std::size_t dimension() const override { return dimension_; }
  const std::string& model() const override { return model_; }

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
    httplib::Client client(base_url_);
    client.set_read_timeout(60, 0);
    const json body{{"model", model_}, {"texts", texts}};
    auto res = client.Post("/embed", body.dump(), "application/json");
    if (!res || res->status != 200)
      throw ProviderUnavailableError("embedding provider at " + base_url_ +
                                     " did not answer");
    const json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("vectors"))
      throw ProviderUnavailableError("embedding provider returned malformed payload");
    std::vector<EmbeddingVector> out;
    for (const auto& v : parsed.at("vectors")) {
      EmbeddingVector vec = v.get<EmbeddingVector>();
      if (vec.size() != dimension_)
        throw ProviderUnavailableError("embedding dimension mismatch: expected " +
                                       std::to_string(dimension_) + ", got " +
                                       std::to_string(vec.size()));
      out.push_back(std::move(vec));
    }
    if (out.size() != texts.size())
      throw ProviderUnavailableError("embedding provider returned wrong vector count");
    return out;
  }

 private:
  std::string base_url_;
  std::string model_;
  std::size_t dimension_;
};

class CachedEmbeddingProvider : public EmbeddingProvider {
 public:
  CachedEmbeddingProvider(std::string cache_path,
                          std::unique_ptr<EmbeddingProvider> upstream, std::string model,
                          std::size_t dimension)
      : cache_path_(std::move(cache_path)),
        upstream_(std::move(upstream)),
        model_(std::move(model)),
        dimension_(dimension) {
    load();
  }

  ~CachedEmbeddingProvider() override { flush(); }

  std::size_t dimension() const override { return dimension_; }
  const std::string& model() const override { return model_; }

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override {
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      auto it = cache_.find(key_for(texts[i]));
      if (it != cache_.end())
        out[i] = it->second;
      else
        missing.push_back(i);
    }
    if (!missing.empty()) {
      if (upstream_ == nullptr)
        throw ProviderUnavailableError("embedding cache miss and no live provider");
      std::vector<std::string> to_fetch;
      for (std::size_t i : missing) to_fetch.push_back(texts[i]);
      const auto fetched = upstream_->embed(to_fetch);
      for (std::size_t k = 0; k < missing.size(); ++k) {
        out[missing[k]] = fetched[k];
        cache_[key_for(texts[missing[k]])] = fetched[k];
      }
      dirty_ = true;
      flush();
    }
    return out;
  }

 private:
  std::string key_for(const std::string& text) const {
    return model_ + ":" + sha256_hex(text);
  }

  void load() {
    std::ifstream in(cache_path_);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      if (first) {
        first = false;
        if (j.contains("format")) {
          if (j.value("format", "") != "kgstress-embedding-cache" ||
              j.value("version", 0) != 1)
            throw ProviderUnavailableError("unsupported embedding cache header in " +
                                           cache_path_);
          dimension_ = j.value("dimension", dimension_);
          continue;
        }
      }
      if (j.contains("key")) cache_[j.at("key").get<std::string>()] =
          j.at("vector").get<EmbeddingVector>();
    }
  }

  void flush() {
    if (!dirty_) return;
    std::ofstream out(cache_path_, std::ios::trunc);
    out << json{{"format", "kgstress-embedding-cache"},
                {"version", 1},
                {"model", model_},
                {"dimension", dimension_}}
               .dump()
        << "\n";
    for (const auto& [key, vec] : cache_)
      out << json{{"key", key}, {"vector", vec}}.dump() << "\n";
    dirty_ = false;
  }

  std::string cache_path_;
  std::unique_ptr<EmbeddingProvider> upstream_;
  std::string model_;
  std::size_t dimension_;
  std::map<std::string, EmbeddingVector> cache_;
  bool dirty_ = false;
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_prob(double p) { return std::clamp(p, 1e-15, 1.0 - 1e-15); }

std::string join_values(const std::vector<std::string>& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ", ";
    out += v;
  }
  return out;
}

}  // namespace

std::unique_ptr<EmbeddingProvider> make_http_embedding_provider(
    const std::string& base_url, const std::string& model, std::size_t dimension) {
  return std::make_unique<HttpEmbeddingProvider>(base_url, model, dimension);
}

std::unique_ptr<EmbeddingProvider> make_cached_embedding_provider(
    const std::string& cache_path, std::unique_ptr<EmbeddingProvider> upstream,
    const std::string& model, std::size_t dimension) {
  return std::make_unique<CachedEmbeddingProvider>(cache_path, std::move(upstream), model,
                                                   dimension);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size()) throw DimensionMismatchError();
  const double na = kernels::l2_norm(a);
  const double nb = kernels::l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw ZeroVectorError();
  return kernels::dot(a, b) / (na * nb);
}

double field_similarity(const std::vector<std::string>& truth,
                        const std::vector<std::string>& generated,
                        EmbeddingProvider& provider) {
  const std::string ts = join_values(truth);
  const std::string gs = join_values(generated);
  if (ts.empty() && gs.empty()) return 1.0;
  if (ts.empty() || gs.empty()) return 0.0;
  const auto vectors = provider.embed({ts, gs});
  return cosine_similarity(vectors[0], vectors[1]);
}

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t la = a.size(), lb = b.size();
  if (lb == 0) return la;
  std::vector<std::size_t> prev(lb + 1), cur(lb + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= la; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= lb; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    prev.swap(cur);
  }
  return prev[lb];
}

FeatureVector featurize(const std::string& truth, const std::string& generated,
                        EmbeddingProvider& provider) {
  FeatureVector f;
  const auto ta = whitespace_tokens(truth);
  const auto tb = whitespace_tokens(generated);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  f.token_jaccard = jaccard(sa, sb);
  const std::size_t max_len = std::max(truth.size(), generated.size());
  f.norm_edit_distance =
      max_len == 0 ? 0.0
                   : static_cast<double>(levenshtein_distance(truth, generated)) / max_len;
  if (truth.empty() && generated.empty()) {
    f.cosine_sim = 1.0;
  } else if (truth.empty() || generated.empty()) {
    f.cosine_sim = 0.0;
  } else if (truth == generated) {
    f.cosine_sim = 1.0;
  } else {
    const auto vectors = provider.embed({truth, generated});
    f.cosine_sim = cosine_similarity(vectors[0], vectors[1]);
  }
  return f;
}

double ClassifierModel::predict(const FeatureVector& f) const {
  const double raw[3] = {f.token_jaccard, f.norm_edit_distance, f.cosine_sim};
  double z = bias;
  for (std::size_t i = 0; i < 3; ++i) {
    const double sd = feature_std[i] > 0.0 ? feature_std[i] : 1.0;
    z += weights[i] * ((raw[i] - feature_mean[i]) / sd);
  }
  return sigmoid(z);
}

std::string ClassifierModel::to_json() const {
  json j;
  j["weights"] = weights;
  j["bias"] = bias;
  j["feature_mean"] = feature_mean;
  j["feature_std"] = feature_std;
  j["train_meta"] = {{"seed", train_meta.seed},
                     {"epochs", train_meta.epochs},
                     {"learning_rate", train_meta.learning_rate},
                     {"l2", train_meta.l2},
                     {"holdout_fraction", train_meta.holdout_fraction}};
  return j.dump(2);
}

ClassifierModel ClassifierModel::from_json(const std::string& text) {
  const json j = json::parse(text);
  ClassifierModel m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
  m.feature_std = j.at("feature_std").get<std::vector<double>>();
  const json& meta = j.at("train_meta");
  m.train_meta.seed = meta.at("seed").get<std::uint64_t>();
  m.train_meta.epochs = meta.at("epochs").get<std::size_t>();
  m.train_meta.learning_rate = meta.at("learning_rate").get<double>();
  m.train_meta.l2 = meta.at("l2").get<double>();
  m.train_meta.holdout_fraction = meta.at("holdout_fraction").get<double>();
  return m;
}

TrainResult train(const std::vector<LabeledSample>& samples, TrainConfig config) {
  // Stratified holdout: shuffle each class separately, reserve the tail.
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < samples.size(); ++i)
    (samples[i].label ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw SingleClassTrainingError();
  seeded_shuffle(pos, config.seed);
  seeded_shuffle(neg, config.seed + 1);
  const auto split = [&](std::vector<std::size_t>& idx, std::vector<std::size_t>& train_idx,
                         std::vector<std::size_t>& hold_idx) {
    const std::size_t n_hold =
        static_cast<std::size_t>(std::floor(config.holdout_fraction * idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k)
      (k < idx.size() - n_hold ? train_idx : hold_idx).push_back(idx[k]);
  };
  std::vector<std::size_t> train_idx, hold_idx;
  split(pos, train_idx, hold_idx);
  split(neg, train_idx, hold_idx);
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(hold_idx.begin(), hold_idx.end());

  bool train_pos = false, train_neg = false;
  for (std::size_t i : train_idx) (samples[i].label ? train_pos : train_neg) = true;
  if (!train_pos || !train_neg) throw SingleClassTrainingError();

  const std::size_t n = train_idx.size();
  std::vector<std::array<double, 3>> x(n);
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& s = samples[train_idx[k]];
    x[k] = {s.features.token_jaccard, s.features.norm_edit_distance,
            s.features.cosine_sim};
    y[k] = s.label ? 1.0 : 0.0;
  }

  // Standardize with training-split statistics.
  std::vector<double> mean(3, 0.0), sd(3, 0.0);
  for (const auto& row : x)
    for (std::size_t j = 0; j < 3; ++j) mean[j] += row[j];
  for (std::size_t j = 0; j < 3; ++j) mean[j] /= static_cast<double>(n);
  for (const auto& row : x)
    for (std::size_t j = 0; j < 3; ++j) {
      const double d = row[j] - mean[j];
      sd[j] += d * d;
    }
  for (std::size_t j = 0; j < 3; ++j)
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
  for (auto& row : x)
    for (std::size_t j = 0; j < 3; ++j)
      row[j] = (row[j] - mean[j]) / (sd[j] > 0.0 ? sd[j] : 1.0);

  std::vector<double> w(3, 0.0);
  double b = 0.0;
  std::vector<double> losses;
  losses.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<double> grad(3, 0.0);
    double grad_b = 0.0, loss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double z = b;
      for (std::size_t j = 0; j < 3; ++j) z += w[j] * x[k][j];
      const double p = sigmoid(z);
      const double err = p - y[k];
      for (std::size_t j = 0; j < 3; ++j) grad[j] += err * x[k][j];
      grad_b += err;
      const double pc = clamp_prob(p);
      loss -= y[k] * std::log(pc) + (1.0 - y[k]) * std::log(1.0 - pc);
    }
    double penalty = 0.0;
    for (std::size_t j = 0; j < 3; ++j) penalty += w[j] * w[j];
    loss = loss / static_cast<double>(n) + config.l2 * penalty;
    losses.push_back(loss);
    for (std::size_t j = 0; j < 3; ++j)
      w[j] -= config.learning_rate *
              (grad[j] / static_cast<double>(n) + 2.0 * config.l2 * w[j]);
    b -= config.learning_rate * grad_b / static_cast<double>(n);
  }

  TrainResult result;
  result.model.weights = std::move(w);
  result.model.bias = b;
  result.model.feature_mean = std::move(mean);
  result.model.feature_std = std::move(sd);
  result.model.train_meta = config;
  result.loss_history = std::move(losses);
  std::size_t correct = 0;
  for (std::size_t i : hold_idx) {
    result.holdout.push_back(samples[i]);
    const bool predicted = result.model.predict(samples[i].features) >= 0.5;
    correct += predicted == samples[i].label ? 1 : 0;
  }
  result.holdout_accuracy =
      hold_idx.empty() ? 0.0 : static_cast<double>(correct) / hold_idx.size();
  return result;
}

std::map<std::string, double> classifier_metrics(const ClassifierModel& model,
                                                 const std::vector<LabeledSample>& test) {
  if (test.empty()) throw EmptyTestSetError();
  std::vector<double> scores;
  scores.reserve(test.size());
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double log_loss = 0.0;
  for (const auto& s : test) {
    const double p = model.predict(s.features);
    scores.push_back(p);
    const bool predicted = p >= 0.5;
    if (predicted && s.label) ++tp;
    else if (predicted && !s.label) ++fp;
    else if (!predicted && !s.label) ++tn;
    else ++fn;
    const double pc = clamp_prob(p);
    log_loss -= s.label ? std::log(pc) : std::log(1.0 - pc);
  }
  log_loss /= static_cast<double>(test.size());

  const double precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
  const double f1 =
      (precision + recall > 0.0) ? 2.0 * precision * recall / (precision + recall) : 0.0;
  const double accuracy = static_cast<double>(tp + tn) / test.size();

  // ROC-AUC by rank statistic with average ranks for tied scores.
  const std::vector<double> ranks = average_ranks(scores);
  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test[i].label) {
      pos_rank_sum += ranks[i];
      ++n_pos;
    }
  }
  const std::size_t n_neg = test.size() - n_pos;
  double auc = 0.5;
  if (n_pos > 0 && n_neg > 0)
    auc = (pos_rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
          (static_cast<double>(n_pos) * n_neg);

  const double mcc_den = std::sqrt(static_cast<double>(tp + fp)) *
                         std::sqrt(static_cast<double>(tp + fn)) *
                         std::sqrt(static_cast<double>(tn + fp)) *
                         std::sqrt(static_cast<double>(tn + fn));
  const double mcc =
      mcc_den > 0.0
          ? (static_cast<double>(tp) * tn - static_cast<double>(fp) * fn) / mcc_den
          : 0.0;

  return {{"f1", f1},         {"precision", precision}, {"recall", recall},
          {"accuracy", accuracy}, {"roc_auc", auc},     {"log_loss", log_loss},
          {"mcc", mcc}};
}

}  // namespace kgstress
