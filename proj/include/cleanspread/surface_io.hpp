#pragma once

#include <filesystem>
#include <string>

#include "cleanspread/allowance_solver.hpp"

namespace cleanspread {

/// Binary container: magic "CSSURF01", header (precision, axes, dt, n_t, cap, retained steps)
/// then the row-major slice payload, all little-endian. A JSON sidecar `<path>.json`
/// describes the same header in readable form together with the payload checksum.
void write_surface(const AllowanceSurface& surface, const std::filesystem::path& path);

/// Throws std::runtime_error on I/O failure, bad magic, truncation or checksum mismatch.
AllowanceSurface read_surface(const std::filesystem::path& path);

/// Hex form of the payload checksum, as written to sidecars and manifests.
std::string checksum_hex(std::uint64_t checksum);

}  // namespace cleanspread
