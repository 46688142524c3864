#pragma once

#include "pfdyn/state.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace pfdyn {

/// A state stored as `<base>.bin` (little-endian float64: theta on interior nodes,
/// then chi on all nodes) with a `<base>.json` sidecar holding the grid spec,
/// time, step, dissipation integral, value counts and the CRC-32 of the binary.
struct LoadedState {
    State state;
    long step = 0;
    double dissipation_integral = 0.0;
};

/// Strips a trailing .bin or .json so either file or the bare base can be passed.
std::filesystem::path snapshot_base(const std::filesystem::path& p);

/// Writes both files through a temporary name and rename.
void write_state_file(const std::filesystem::path& base, const State& state, long step = 0,
                      double dissipation_integral = 0.0);

/// Reads and verifies a state. With `disc` given the stored grid must match it;
/// otherwise a discretization is built from the sidecar. Throws IoError on missing
/// or corrupt files and DimensionError on a grid mismatch.
LoadedState read_state_file(const std::filesystem::path& base,
                            std::shared_ptr<const Discretization> disc = nullptr);

/// `<dir>/step_00000042` style base name.
std::filesystem::path step_file_base(const std::filesystem::path& dir, long step);

/// Bases of all step_* snapshots in `dir`, ascending in step. Empty if dir is missing.
std::vector<std::filesystem::path> list_step_files(const std::filesystem::path& dir);

/// CRC-32 (IEEE) of a byte range.
std::uint32_t crc32(const void* data, std::size_t size);

}  // namespace pfdyn
