#ifndef PAAP_FEATURE_IO_HPP
#define PAAP_FEATURE_IO_HPP

#include <string>

#include "paap/lld_extractor.hpp"
#include "paap/phoneme_align.hpp"

namespace paap {

// Feature CSV: optional leading `# key=value` comment lines, then a
// header row `frame,<25 canonical names>`, one row per frame.
void write_features_csv(const std::string& path, const AcousticParamMatrix& d,
                        const std::string& config_digest = "");
AcousticParamMatrix read_features_csv(const std::string& path);

// Feature binary: magic PAAPD1, u32 N, u32 25, little-endian float32
// row-major.
void write_features_bin(const std::string& path, const AcousticParamMatrix& d);
AcousticParamMatrix read_features_bin(const std::string& path);

// Logits binary: magic PAAPL1, u32 N, u32 41, little-endian float32
// row-major.
void write_logits_bin(const std::string& path, const PhonemeLogits& p);
PhonemeLogits read_logits_bin(const std::string& path,
                              const PhonemeVocab& vocab);

// Dispatch on extension: .csv / .bin for features.
AcousticParamMatrix read_features(const std::string& path);

}  // namespace paap

#endif
