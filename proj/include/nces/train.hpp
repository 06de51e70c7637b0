// Minibatched Adam training loop with gradient clipping and per-epoch
// loss / soft-accuracy / hard-accuracy tracking.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nces/embeddings.hpp"
#include "nces/kb.hpp"
#include "nces/synthesizers.hpp"

namespace nces::synth {

struct TrainSample {
    ExampleMatrices examples;
    std::vector<int> target_tokens;  // padded with pad_id to seq_len
};

struct TrainConfig {
    int epochs = 500;
    int batch_size = 256;
    double lr = 0.0003;
    double grad_clip = 5.0;
    std::uint64_t seed = 0;
};

struct EpochMetrics {
    double loss = 0.0;
    double soft_acc = 0.0;
    double hard_acc = 0.0;
};

/// Embeds each problem's examples and tokenizes its target (must fit in
/// seq_len tokens).  Embeddings are frozen inputs.
std::vector<TrainSample> build_training_samples(const std::vector<LearningProblem>& problems,
                                                const EmbeddingTable& table,
                                                const KnowledgeBase& kb,
                                                const Vocabulary& vocab, int seq_len);

/// `on_epoch` (optional) observes each epoch's metrics; returning false stops
/// training early.
std::vector<EpochMetrics> train_synthesizer(
    Synthesizer& model, const std::vector<TrainSample>& samples, const TrainConfig& cfg,
    const std::function<bool(int, const EpochMetrics&)>& on_epoch = {});

/// CSV: epoch,loss,soft_acc,hard_acc
void save_metrics_csv(const std::string& path, const std::vector<EpochMetrics>& metrics);

/// Argmax tokens per position, truncated at the first PAD.
std::vector<int> greedy_tokens(const Tensor& batch_scores, int row, int num_classes,
                               int seq_len, int pad_id);

}  // namespace nces::synth
