#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rscorrect/frame.hpp"

namespace rscorrect::tools {

/// 8-bit sample nearest to v (clamped to [0,1]), ties away from zero.
std::uint8_t quantize(float v);

/// Frame re-sampled through 8-bit quantization, as a PNG round trip gives.
Frame quantized(const Frame& f);

/// Reads any 8/16-bit PNG as a 3-channel frame in [0,1].
Frame read_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG; single-channel frames are replicated.
void write_png(const std::filesystem::path& path, const Frame& frame);

/// Middlebury .flo. Invalid vectors are stored as 1e10 and read back as
/// invalid when either component exceeds 1e9 in magnitude.
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const std::filesystem::path& path, const FlowField& flow);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
std::string sha256_hex(const std::vector<std::uint8_t>& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace rscorrect::tools
