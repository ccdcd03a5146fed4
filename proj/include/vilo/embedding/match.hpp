#pragma once

#include <vector>

#include "vilo/embedding/model.hpp"

namespace vilo::embedding {

struct MatchResult {
    int predicted_person = -1;
    // (person_id, mean pair distance over that person's part tracks)
    std::vector<std::pair<int, Scalar>> distances;
    std::vector<int> excluded;  // candidates with zero part tracks
};

// TSP-averaged argmin matcher: each candidate scores the mean pair distance
// between its per-part visual embeddings and the query inertial embedding.
// Ties break to the smallest person_id.
MatchResult match(const EmbeddingModel& model,
                  const std::vector<features::PersonWindow>& candidates,
                  const Mat& query_imu_features);

}  // namespace vilo::embedding
