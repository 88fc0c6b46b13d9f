#pragma once

#include <filesystem>

#include "hocd/cumulants.hpp"

namespace hocd {

/// Writes the pinned two-column dataset format: header `X,Y`, one row per
/// observation, full-precision decimals (%.17g) so values round-trip bit
/// for bit.
void write_dataset_csv(const PairedSample& sample, const std::filesystem::path& path);

/// Reads the format back. Throws ParseError naming the offending line on
/// malformed rows, NonFiniteInput on NaN/Inf values.
PairedSample read_dataset_csv(const std::filesystem::path& path);

} // namespace hocd
