#include "verifact/metrics.hpp"

#include <algorithm>

#include "verifact/error.hpp"

namespace verifact {

double mrr_at_k(const std::map<QueryId, RankedList>& rankings, const QrelSet& qrels, std::size_t k) {
    if (rankings.empty()) throw Error("mrr_at_k: no rankings");
    if (k == 0) throw Error("mrr_at_k: k must be positive");
    double sum = 0.0;
    for (const auto& [qid, ranking] : rankings) {
        const auto* relevant = qrels.find(qid);
        if (!relevant) continue;
        const std::size_t depth = std::min(k, ranking.size());
        for (std::size_t r = 0; r < depth; ++r) {
            if (std::find(relevant->begin(), relevant->end(), ranking[r].pid) != relevant->end()) {
                sum += 1.0 / static_cast<double>(r + 1);
                break;
            }
        }
    }
    return sum / static_cast<double>(rankings.size());
}

}  // namespace verifact
