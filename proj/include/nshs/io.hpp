#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nshs/kernels.hpp"
#include "nshs/solvers.hpp"

namespace nshs {

/// Checkpoint format "NSHS": magic, version u32, config block, grid nodes,
/// then per-snapshot (time f64, K u32, complex f64 pairs per mode),
/// little-endian throughout.
void write_checkpoint(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_checkpoint(const std::filesystem::path& path);

/// Kernel dump "NSHK": magic, version u32, xi i64, t f64, nu f64, n u64,
/// row-major f64 entries, little-endian.
void write_kernel(const std::filesystem::path& path, const KernelMatrix& k);
KernelMatrix read_kernel(const std::filesystem::path& path,
                         std::shared_ptr<const YGrid> grid);

/// One artifact to be persisted by emit_outputs.
struct Artifact {
    std::string name;       // file name within the output directory
    std::string bytes;      // exact content
};

/// Writes all artifacts plus an index manifest (manifest.json with size and
/// sha256 per file). On failure, partially written files are removed.
/// Returns the manifest path.
std::filesystem::path emit_outputs(const std::filesystem::path& out_dir,
                                   const std::vector<Artifact>& artifacts);

std::string file_sha256(const std::filesystem::path& path);

}  // namespace nshs
