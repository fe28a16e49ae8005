#include "dckgen/tensor_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dckgen {

namespace {

constexpr unsigned char kMagic[4] = {0x44, 0x43, 0x4B, 0x54};  // "DCKT"
constexpr unsigned char kVersion = 1;
constexpr unsigned char kDtypeF32 = 0;

void put_u32_le(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                          (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
    os.write((const char*)b, 4);
}

uint32_t get_u32_le(std::istream& is) {
    unsigned char b[4];
    is.read((char*)b, 4);
    if (!is) throw std::runtime_error("dckt: truncated header");
    return (uint32_t)b[0] | ((uint32_t)b[1] << 8) | ((uint32_t)b[2] << 16) | ((uint32_t)b[3] << 24);
}

}  // namespace

void write_dckt(std::ostream& os, const Tensor& t) {
    if (t.rank() > 255) throw std::invalid_argument("dckt: rank > 255");
    os.write((const char*)kMagic, 4);
    os.put((char)kVersion);
    os.put((char)kDtypeF32);
    os.put((char)t.rank());
    for (int i = 0; i < t.rank(); ++i) {
        if (t.dim(i) > 0xffffffffLL) throw std::invalid_argument("dckt: dim too large for u32");
        put_u32_le(os, (uint32_t)t.dim(i));
    }
    // floats are stored little-endian; this code assumes a little-endian host
    static_assert(sizeof(float) == 4);
    os.write((const char*)t.data(), (std::streamsize)(t.numel() * 4));
    if (!os) throw std::runtime_error("dckt: write failed");
}

Tensor read_dckt(std::istream& is) {
    unsigned char hdr[7];
    is.read((char*)hdr, 7);
    if (!is) throw std::runtime_error("dckt: truncated header");
    if (std::memcmp(hdr, kMagic, 4) != 0) throw std::runtime_error("dckt: bad magic");
    if (hdr[4] != kVersion)
        throw std::runtime_error("dckt: unsupported version " + std::to_string((int)hdr[4]));
    if (hdr[5] != kDtypeF32)
        throw std::runtime_error("dckt: unsupported dtype " + std::to_string((int)hdr[5]));
    int rank = (int)hdr[6];
    std::vector<int64_t> shape(rank);
    for (int i = 0; i < rank; ++i) shape[i] = (int64_t)get_u32_le(is);
    Tensor t(shape);
    is.read((char*)t.data(), (std::streamsize)(t.numel() * 4));
    if (!is) throw std::runtime_error("dckt: truncated payload, expected " +
                                      std::to_string(t.numel() * 4) + " bytes");
    return t;
}

void save_dckt(const std::string& path, const Tensor& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    write_dckt(f, t);
}

void save_dckt(const std::string& path, const std::vector<Tensor>& ts) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    for (const auto& t : ts) write_dckt(f, t);
}

Tensor load_dckt(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    return read_dckt(f);
}

std::vector<Tensor> load_dckt_all(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::vector<Tensor> out;
    while (f.peek() != EOF) out.push_back(read_dckt(f));
    return out;
}

static unsigned char quant_pm1(float v) {
    float u = (v + 1.0f) / 2.0f;
    if (u < 0.0f) u = 0.0f;
    if (u > 1.0f) u = 1.0f;
    return (unsigned char)std::lround(u * 255.0f);
}

void write_ppm(const std::string& path, const Tensor& img) {
    if (img.rank() != 3 || img.dim(0) != 3)
        throw std::invalid_argument("write_ppm: want shape (3,H,W), got " + shape_str(img.shape()));
    int64_t h = img.dim(1), w = img.dim(2);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "P6\n" << w << " " << h << "\n255\n";
    for (int64_t y = 0; y < h; ++y)
        for (int64_t x = 0; x < w; ++x)
            for (int64_t c = 0; c < 3; ++c) f.put((char)quant_pm1(img.at3(c, y, x)));
    if (!f) throw std::runtime_error("write_ppm: write failed");
}

void write_pgm(const std::string& path, const Tensor& img) {
    if (img.rank() != 2)
        throw std::invalid_argument("write_pgm: want shape (H,W), got " + shape_str(img.shape()));
    int64_t h = img.dim(0), w = img.dim(1);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "P5\n" << w << " " << h << "\n255\n";
    for (int64_t y = 0; y < h; ++y)
        for (int64_t x = 0; x < w; ++x) {
            float u = img.at2(y, x);
            if (u < 0.0f) u = 0.0f;
            if (u > 1.0f) u = 1.0f;
            f.put((char)(unsigned char)std::lround(u * 255.0f));
        }
    if (!f) throw std::runtime_error("write_pgm: write failed");
}

}  // namespace dckgen
