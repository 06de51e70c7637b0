// Triple conversion and TransE embedding training.
//
// Role assertion (a, r, b) becomes (a, r, b); class assertion C(a) becomes
// (a, type, C); an atomic subclass axiom A ⊑ B becomes (A, subclassof, B).
// Entities are all individuals followed by all classes; predicates are all
// roles followed by the reserved `type` and `subclassof`.
//
// Training minimizes the margin-ranking objective
//   max(0, margin + ||s+p-o|| - ||s'+p-o'||)
// over corrupted negatives (head or tail replaced uniformly, resampled on
// collision with a true triple).  Entity vectors are renormalized to unit
// Euclidean norm after every epoch.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "nces/datagen.hpp"
#include "nces/kb.hpp"

namespace nces {

class EmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TripleStore {
    std::vector<std::array<int, 3>> triples;  // (subject, predicate, object)
    std::vector<std::string> entities;
    std::vector<std::string> predicates;
    std::unordered_map<std::string, int> entity_index;
    std::unordered_map<std::string, int> predicate_index;
};

TripleStore kb_to_triples(const KnowledgeBase& kb);

struct EmbeddingTable {
    int d = 0;
    std::vector<std::string> entity_names;
    std::vector<std::string> relation_names;
    std::vector<std::vector<double>> entity_vectors;
    std::vector<std::vector<double>> relation_vectors;
    std::unordered_map<std::string, int> entity_index;

    const std::vector<double>& entity(const std::string& name) const;
};

struct TransEConfig {
    int d = 40;
    int epochs = 100;
    double margin = 1.0;
    double lr = 0.01;
    std::uint64_t seed = 0;
};

EmbeddingTable train_transe(const TripleStore& store, const TransEConfig& cfg);

/// Mean ||s+p-o|| over the store's triples (diagnostic; lower is better).
double mean_positive_distance(const TripleStore& store, const EmbeddingTable& table);
/// Mean distance over one deterministic corruption per triple.
double mean_corrupted_distance(const TripleStore& store, const EmbeddingTable& table,
                               std::uint64_t seed);

/// Embedding rows for a problem's examples, in list order.
struct ExampleMatrices {
    std::vector<std::vector<double>> pos;  // n1 x d
    std::vector<std::vector<double>> neg;  // n2 x d
};
ExampleMatrices lookup_examples(const EmbeddingTable& table, const LearningProblem& problem,
                                const KnowledgeBase& kb);

/// File format: header `d <dim>`, then one `<name> <v1> ... <vd>` line per
/// entity followed by one per relation; floats at 17 significant digits.
void save_embeddings(const std::string& path, const EmbeddingTable& table);
EmbeddingTable load_embeddings(const std::string& path);

}  // namespace nces
