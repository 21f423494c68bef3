#pragma once

#include <cstddef>
#include <map>

#include "verifact/bm25_index.hpp"
#include "verifact/corpus.hpp"

namespace verifact {

/// Mean reciprocal rank of the first relevant passage within the top `k`. Queries with
/// no relevant passage in range, or absent from `qrels`, count as 0. Throws Error on an
/// empty `rankings` map or k == 0.
double mrr_at_k(const std::map<QueryId, RankedList>& rankings, const QrelSet& qrels, std::size_t k = 10);

}  // namespace verifact
