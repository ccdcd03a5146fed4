#include "vilo/embedding/match.hpp"

#include <algorithm>

namespace vilo::embedding {

MatchResult match(const EmbeddingModel& model,
                  const std::vector<features::PersonWindow>& candidates,
                  const Mat& query_imu_features) {
    require_dim(!candidates.empty(), "match: no candidates");
    const EmbeddingSequence imu = encode_inertial_raw(model, query_imu_features);

    MatchResult result;
    for (const auto& person : candidates) {
        if (person.parts.empty()) {
            result.excluded.push_back(person.person_id);
            continue;
        }
        Scalar sum = 0.0;
        for (const auto& part : person.parts) {
            const EmbeddingSequence vis = encode_visual(
                model, part, person.box, person.keypoints, person.pad_mask);
            sum += pair_distance(vis, imu);
        }
        result.distances.emplace_back(person.person_id,
                                      sum / static_cast<Scalar>(person.parts.size()));
    }
    if (result.distances.empty())
        throw DimensionError("match: every candidate lacked part tracks");

    std::sort(result.distances.begin(), result.distances.end());
    auto best = result.distances.front();
    for (const auto& [pid, d] : result.distances)
        if (d < best.second) best = {pid, d};
    result.predicted_person = best.first;
    return result;
}

}  // namespace vilo::embedding
