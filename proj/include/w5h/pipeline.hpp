#pragma once
// Glue shared by the command line tool and the python bindings.

#include <string>
#include <vector>

#include "w5h/config.hpp"
#include "w5h/entity.hpp"
#include "w5h/storage.hpp"

namespace w5h {

// Rebuilds the entity tables from a resolved corpus (surface forms grouped
// by assigned id). Addresses are only known to resolve-time entities.
std::pair<std::vector<PersonEntity>, std::vector<LocationEntity>>
entities_from_corpus(const std::vector<TraceObject>& corpus);

// Builds frequency and text indexes over a resolved corpus.
IndexBundle build_indexes(const std::vector<TraceObject>& corpus,
                          const FreqWeights& weights = {});

}  // namespace w5h
