#pragma once

#include <filesystem>

#include "typology/pipeline.hpp"

namespace typology {

// Directory layout:
//   manifest.json      system, alpha, radius_km, weighting, partitions and one
//                      entry per feature {kind, file | value, schema_hash}
//   model_NNNN.bin     one ridge estimator each:
//     "TYPRIDGE" (8 bytes), uint32 version, uint64 header length,
//     JSON header (target, classes, alpha, schema without scaler, hash, shapes),
//     then little-endian doubles: mean, stddev, weights (row-major d x k), intercepts.
// Writing the same ModelSet twice produces identical bytes.
void save_models(const ModelSet& models, const std::filesystem::path& dir);

// Throws Error if a file is malformed or a stored schema hash does not match the
// schema it was saved with.
ModelSet load_models(const std::filesystem::path& dir);

}  // namespace typology
