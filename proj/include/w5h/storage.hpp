#pragma once
// Index persistence. One JSON file with a versioned header and a checksum:
// { format_version, corpus_hash, weights_hash, checksum, freq, text?,
//   persons?, locations? }

#include <string>
#include <vector>

#include "w5h/entity.hpp"
#include "w5h/freq_index.hpp"
#include "w5h/model.hpp"
#include "w5h/text_index.hpp"

namespace w5h {

inline constexpr int kIndexFormatVersion = 1;

std::string fnv1a64_hex(const std::string& data);

std::string corpus_hash(const std::vector<TraceObject>& corpus);
std::string weights_hash(const FreqWeights& weights);

// Frequency-only index file.
void save_index(const FreqIndex& index, const std::string& path,
                const std::string& corpus_hash = "",
                const std::string& weights_hash = "");
FreqIndex load_index(const std::string& path);

// Everything search needs: frequency counters, text postings and the
// resolved entities.
struct IndexBundle {
    FreqIndex freq;
    TextIndex text;
    std::vector<PersonEntity> persons;
    std::vector<LocationEntity> locations;
    std::string corpus_hash;
    std::string weights_hash;
};

void save_bundle(const IndexBundle& bundle, const std::string& path);
IndexBundle load_bundle(const std::string& path);

}  // namespace w5h
