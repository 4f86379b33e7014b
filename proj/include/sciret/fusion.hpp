#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sciret/candidate.hpp"

namespace sciret {

/// Union of the two branch outputs keyed by doc_id. A document found by both
/// branches becomes one candidate carrying both ranks. Output order:
/// semantic rank first, then lexical-only documents by lexical rank.
/// Throws DataError if either input repeats a doc_id.
std::vector<Candidate> merge_candidates(const std::vector<Candidate>& lexical,
                                        const std::vector<Candidate>& semantic);

struct RrfParams {
  double rank_constant = 20.0;
  /// Only the first `window` entries of each list contribute.
  std::size_t window = 100;

  void validate() const;
};

/// score(d) = sum over lists of 1 / (rank_constant + rank of d), ranks
/// 1-based and limited to the window. Result covers every document that
/// contributed, score descending then doc_id ascending. Contributions are
/// summed in rank order so the result does not depend on list order.
std::vector<ScoredDoc> rrf_fuse(const std::vector<std::vector<std::string>>& lists,
                                const RrfParams& params);

/// doc_ids of a ranked candidate list, in order.
std::vector<std::string> ids_of(const std::vector<Candidate>& ranked);
std::vector<std::string> ids_of(const std::vector<ScoredDoc>& ranked);

}  // namespace sciret
