#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "isc/image.hpp"
#include "isc/phase_codec.hpp"
#include "isc/projector_dlt.hpp"
#include "isc/synth_sim.hpp"

namespace isc::io {

namespace fs = std::filesystem;

/// Binary PGM (P5). Values in [0, 1] are quantized to 8 or 16 bits.
void write_pgm(const fs::path& path, const ImageF& img, int bits);
/// Reads 8- or 16-bit PGM back to [0, 1].
ImageF read_pgm(const fs::path& path);
void write_mask_pgm(const fs::path& path, int width, int height, const std::vector<std::uint8_t>& mask);
std::vector<std::uint8_t> read_mask_pgm(const fs::path& path, int& width, int& height);

/// Flat little-endian float32 raster with a JSON sidecar {width, height}
/// at `path` + ".json".
void write_f32(const fs::path& path, const ImageF& img);
ImageF read_f32(const fs::path& path);

/// Phase as float32 raster plus a mask PGM (`prefix`.f32 / `prefix`_mask.pgm).
void write_phase_map(const fs::path& prefix, const PhaseMap& map);
PhaseMap read_phase_map(const fs::path& prefix);

/// One "x,y" pair per line, no header.
void write_points_csv(const fs::path& path, const std::vector<Vec2>& pts);
std::vector<Vec2> read_points_csv(const fs::path& path);

/// Header "x_c,y_c,x_p,y_p,X,Y,Z" then one correspondence per line.
void write_correspondences_csv(const fs::path& path, const std::vector<Correspondence>& corrs);
std::vector<Correspondence> read_correspondences_csv(const fs::path& path);

/// ASCII PLY; `error` adds a per-vertex scalar property when non-empty.
void write_ply(const fs::path& path, const std::vector<Vec3>& points, const std::vector<double>& error);

enum class StackFormat { Float32, Pgm16 };

/// Bundle directory: manifest.json, sphereN/ (contour.csv, stack images) and
/// oracle/ (hidden correspondences).
void write_bundle(const fs::path& dir, const SceneBundle& bundle, StackFormat format = StackFormat::Float32);
/// `has_oracle` reports whether oracle/ was present.
SceneBundle read_bundle(const fs::path& dir, bool* has_oracle = nullptr);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace isc::io
