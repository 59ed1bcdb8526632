#pragma once
// Embedding-backed semantic similarity and the logistic-regression
// hallucination classifier with its metric suite.

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgstress {

struct MlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatchError : MlError {
  DimensionMismatchError() : MlError("embedding vectors have different lengths") {}
};
struct ZeroVectorError : MlError {
  ZeroVectorError() : MlError("cosine similarity undefined for a zero vector") {}
};
struct ProviderUnavailableError : MlError {
  using MlError::MlError;
};
struct SingleClassTrainingError : MlError {
  SingleClassTrainingError()
      : MlError("training requires both classes in the training split") {}
};
struct EmptyTestSetError : MlError {
  EmptyTestSetError() : MlError("classifier metrics undefined on an empty test set") {}
};

using EmbeddingVector = std::vector<double>;

// Sentence-embedding source. The default production backend is an HTTP
// service speaking {"model", "texts"} -> {"vectors"}; tests and replay
// runs use the cache.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual const std::string& model() const = 0;
  // Throws ProviderUnavailableError when the backend cannot answer.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

std::unique_ptr<EmbeddingProvider> make_http_embedding_provider(
    const std::string& base_url, const std::string& model = "all-MiniLM-L6-v2",
    std::size_t dimension = 384);

// File-backed cache keyed by (model, text hash); entries survive process
// restarts so whole benchmarks replay without a live provider.
std::unique_ptr<EmbeddingProvider> make_cached_embedding_provider(
    const std::string& cache_path, std::unique_ptr<EmbeddingProvider> upstream,
    const std::string& model = "all-MiniLM-L6-v2", std::size_t dimension = 384);

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Cosine of the two concatenated-list embeddings. Empty vs empty -> 1.0,
// empty vs non-empty -> 0.0.
double field_similarity(const std::vector<std::string>& truth,
                        const std::vector<std::string>& generated,
                        EmbeddingProvider& provider);

struct FeatureVector {
  double token_jaccard = 0.0;
  double norm_edit_distance = 0.0;
  double cosine_sim = 0.0;
};

// Classic Levenshtein (substitutions allowed), unlike the indel distance
// used by the token-set ratio.
std::size_t levenshtein_distance(std::string_view a, std::string_view b);

FeatureVector featurize(const std::string& truth, const std::string& generated,
                        EmbeddingProvider& provider);

struct TrainConfig {
  std::uint64_t seed = 42;
  std::size_t epochs = 500;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  double holdout_fraction = 0.2;
};

struct ClassifierModel {
  std::vector<double> weights;       // length 3
  double bias = 0.0;
  std::vector<double> feature_mean;  // training-split standardization
  std::vector<double> feature_std;
  TrainConfig train_meta;

  double predict(const FeatureVector& f) const;
  std::string to_json() const;
  static ClassifierModel from_json(const std::string& text);
};

struct LabeledSample {
  FeatureVector features;
  bool label = false;  // true = hallucinated
};

struct TrainResult {
  ClassifierModel model;
  std::vector<double> loss_history;  // per-epoch training log-loss
  std::vector<LabeledSample> holdout;
  double holdout_accuracy = 0.0;
};

TrainResult train(const std::vector<LabeledSample>& samples, TrainConfig config = {});

// f1, precision, recall, accuracy, roc_auc, log_loss, mcc.
std::map<std::string, double> classifier_metrics(const ClassifierModel& model,
                                                 const std::vector<LabeledSample>& test);

}  // namespace kgstress
