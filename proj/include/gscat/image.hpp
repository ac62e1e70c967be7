#pragma once

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gscat/math.hpp"
#include "gscat/types.hpp"

namespace gscat {

/// RGB frame buffer, values nominally in [0,1] (clamped on write).
struct Image {
    int width = 0, height = 0;
    std::vector<double> data;  // interleaved rgb, row-major

    Image() = default;
    Image(int w, int h) : width(w), height(h), data(std::size_t(w) * h * 3, 0.0) {}

    double& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * 3 + c]; }
    double at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * 3 + c]; }
};

/// Channel value to byte: clamp to [0,1], scale by 255, round half to even.
inline std::uint8_t channel_to_byte(double v) {
    double c = std::clamp(v, 0.0, 1.0) * 255.0;
    return static_cast<std::uint8_t>(round_half_even(c));
}

namespace detail {

inline std::vector<std::uint8_t> image_bytes(const Image& img) {
    std::vector<std::uint8_t> bytes(img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) bytes[i] = channel_to_byte(img.data[i]);
    return bytes;
}

inline void put_u32_be(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(std::uint8_t(x >> 24));
    v.push_back(std::uint8_t(x >> 16));
    v.push_back(std::uint8_t(x >> 8));
    v.push_back(std::uint8_t(x));
}

inline void write_png_chunk(std::ofstream& out, const char* type,
                            const std::vector<std::uint8_t>& payload) {
    std::vector<std::uint8_t> head;
    put_u32_be(head, std::uint32_t(payload.size()));
    out.write(reinterpret_cast<const char*>(head.data()), 4);
    out.write(type, 4);
    if (!payload.empty())
        out.write(reinterpret_cast<const char*>(payload.data()), std::streamsize(payload.size()));
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
    if (!payload.empty()) crc = crc32(crc, payload.data(), uInt(payload.size()));
    std::vector<std::uint8_t> tail;
    put_u32_be(tail, std::uint32_t(crc));
    out.write(reinterpret_cast<const char*>(tail.data()), 4);
}

inline void write_png(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("image: cannot write " + path);
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    out.write(reinterpret_cast<const char*>(sig), 8);

    std::vector<std::uint8_t> ihdr;
    put_u32_be(ihdr, std::uint32_t(img.width));
    put_u32_be(ihdr, std::uint32_t(img.height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(2);   // truecolor
    ihdr.push_back(0);   // compression
    ihdr.push_back(0);   // filter method
    ihdr.push_back(0);   // no interlace
    write_png_chunk(out, "IHDR", ihdr);

    std::vector<std::uint8_t> bytes = image_bytes(img);
    std::size_t row = std::size_t(img.width) * 3;
    std::vector<std::uint8_t> raw;
    raw.reserve((row + 1) * std::size_t(img.height));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter: none
        raw.insert(raw.end(), bytes.begin() + std::size_t(y) * row,
                   bytes.begin() + std::size_t(y + 1) * row);
    }
    uLongf dst_len = compressBound(uLong(raw.size()));
    std::vector<std::uint8_t> compressed(dst_len);
    if (compress2(compressed.data(), &dst_len, raw.data(), uLong(raw.size()), 6) != Z_OK)
        throw IoError("image: png compression failed");
    compressed.resize(dst_len);
    write_png_chunk(out, "IDAT", compressed);
    write_png_chunk(out, "IEND", {});
    if (!out) throw IoError("image: write failed: " + path);
}

inline void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("image: cannot write " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> bytes = image_bytes(img);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError("image: write failed: " + path);
}

inline int paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

inline Image read_png(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("image: cannot open " + path);
    std::vector<std::uint8_t> file((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (file.size() < 8 || std::memcmp(file.data(), sig, 8) != 0)
        throw IoError("image: not a PNG: " + path);

    auto u32 = [&](std::size_t off) {
        return (std::uint32_t(file[off]) << 24) | (std::uint32_t(file[off + 1]) << 16) |
               (std::uint32_t(file[off + 2]) << 8) | std::uint32_t(file[off + 3]);
    };
    std::size_t pos = 8;
    int w = 0, h = 0;
    std::vector<std::uint8_t> idat;
    while (pos + 8 <= file.size()) {
        std::uint32_t len = u32(pos);
        std::string type(reinterpret_cast<const char*>(&file[pos + 4]), 4);
        std::size_t payload = pos + 8;
        if (payload + len + 4 > file.size()) throw IoError("image: truncated PNG: " + path);
        if (type == "IHDR") {
            w = int(u32(payload));
            h = int(u32(payload + 4));
            if (file[payload + 8] != 8 || file[payload + 9] != 2)
                throw IoError("image: only 8-bit RGB PNG supported");
        } else if (type == "IDAT") {
            idat.insert(idat.end(), file.begin() + std::ptrdiff_t(payload),
                        file.begin() + std::ptrdiff_t(payload + len));
        } else if (type == "IEND") {
            break;
        }
        pos = payload + len + 4;
    }
    if (w <= 0 || h <= 0) throw IoError("image: missing IHDR: " + path);

    std::size_t row = std::size_t(w) * 3;
    std::vector<std::uint8_t> raw((row + 1) * std::size_t(h));
    uLongf raw_len = uLongf(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(), uLong(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw IoError("image: png decompression failed: " + path);

    Image img(w, h);
    std::vector<std::uint8_t> prev(row, 0), cur(row);
    for (int y = 0; y < h; ++y) {
        std::uint8_t filter = raw[std::size_t(y) * (row + 1)];
        const std::uint8_t* src = &raw[std::size_t(y) * (row + 1) + 1];
        for (std::size_t i = 0; i < row; ++i) {
            int a = i >= 3 ? cur[i - 3] : 0;
            int b = prev[i];
            int c = i >= 3 ? prev[i - 3] : 0;
            int x = src[i];
            switch (filter) {
                case 0: break;
                case 1: x += a; break;
                case 2: x += b; break;
                case 3: x += (a + b) / 2; break;
                case 4: x += paeth(a, b, c); break;
                default: throw IoError("image: bad PNG filter type");
            }
            cur[i] = std::uint8_t(x & 0xff);
        }
        for (std::size_t i = 0; i < row; ++i) img.data[std::size_t(y) * row + i] = cur[i] / 255.0;
        std::swap(prev, cur);
    }
    return img;
}

inline Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("image: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P6") throw IoError("image: not a P6 PPM: " + path);
    int w = 0, h = 0, maxval = 0;
    in >> w >> h >> maxval;
    if (maxval != 255 || w <= 0 || h <= 0) throw IoError("image: unsupported PPM: " + path);
    in.get();  // single whitespace after maxval
    Image img(w, h);
    std::vector<std::uint8_t> bytes(std::size_t(w) * h * 3);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
    if (std::size_t(in.gcount()) != bytes.size()) throw IoError("image: truncated PPM: " + path);
    for (std::size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0;
    return img;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

/// Write an 8-bit image; the format is chosen from the extension (.ppm or .png).
inline void write_image(const Image& img, const std::string& path) {
    for (double v : img.data)
        if (!std::isfinite(v)) throw ConfigError("image: non-finite pixel value");
    if (detail::ends_with(path, ".png"))
        detail::write_png(img, path);
    else if (detail::ends_with(path, ".ppm"))
        detail::write_ppm(img, path);
    else
        throw ConfigError("image: unsupported extension (want .ppm or .png): " + path);
}

inline Image read_image(const std::string& path) {
    if (detail::ends_with(path, ".png")) return detail::read_png(path);
    if (detail::ends_with(path, ".ppm")) return detail::read_ppm(path);
    throw ConfigError("image: unsupported extension (want .ppm or .png): " + path);
}

}  // namespace gscat
