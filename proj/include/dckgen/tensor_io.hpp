#pragma once

// Tensor serialization (DCKT container) and 8-bit image export.
//
// DCKT layout: magic "DCKT" (0x44 0x43 0x4B 0x54), version byte (1), dtype
// byte (0 = float32), rank byte, rank u32 little-endian dims, then the
// row-major float32 little-endian payload. Multiple tensors may be written
// back to back in one file.

#include <iosfwd>
#include <string>
#include <vector>

#include "dckgen/tensor.hpp"

namespace dckgen {

void write_dckt(std::ostream& os, const Tensor& t);
Tensor read_dckt(std::istream& is);

void save_dckt(const std::string& path, const Tensor& t);
void save_dckt(const std::string& path, const std::vector<Tensor>& ts);
Tensor load_dckt(const std::string& path);
std::vector<Tensor> load_dckt_all(const std::string& path);

// RGB image in [-1,1], shape (3,H,W) -> binary PPM (P6).
// pixel = round(clamp((v+1)/2, 0, 1) * 255)
void write_ppm(const std::string& path, const Tensor& img);

// Grayscale image in [0,1], shape (H,W) -> binary PGM (P5). pixel = round(v*255)
void write_pgm(const std::string& path, const Tensor& img);

}  // namespace dckgen
