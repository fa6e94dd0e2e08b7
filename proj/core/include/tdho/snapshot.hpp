#pragma once

#include <string>

#include "tdho/grid.hpp"

namespace tdho {

/// Binary state snapshot. Layout, all little-endian:
///   bytes 0..3   magic "TDHO"
///   u32          format version (1)
///   u32          dim
///   u32          points per axis
///   f64          grid half width
///   f64          time tag
///   f64 pairs    (re, im) amplitudes, row-major
void write_snapshot(const std::string& path, const WaveFunction& psi);

WaveFunction read_snapshot(const std::string& path);

}  // namespace tdho
