#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "gelulab/errors.hpp"
#include "gelulab/tensor.hpp"

namespace gelulab {

namespace detail {

inline std::uint32_t read_be_u32(const std::vector<std::uint8_t>& bytes, std::size_t offset) {
    if (offset + 4 > bytes.size()) {
        throw DataError("unexpected EOF at byte " + std::to_string(bytes.size()) +
                        " (need " + std::to_string(offset + 4) + " bytes)");
    }
    return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
           (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[offset + 3]);
}

}  // namespace detail

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

// IDX3 image container -> n x (rows*cols) tensor with pixels scaled to
// [0, 1] by division by 255.
inline Tensor2D parse_idx_images(const std::vector<std::uint8_t>& bytes) {
    if (detail::read_be_u32(bytes, 0) != kIdxImageMagic) {
        throw DataError("not an IDX3 image file");
    }
    const std::uint32_t n = detail::read_be_u32(bytes, 4);
    const std::uint32_t rows = detail::read_be_u32(bytes, 8);
    const std::uint32_t cols = detail::read_be_u32(bytes, 12);
    const std::size_t need = 16 + static_cast<std::size_t>(n) * rows * cols;
    if (bytes.size() < need) {
        throw DataError("unexpected EOF at byte " + std::to_string(bytes.size()) +
                        " (need " + std::to_string(need) + " bytes)");
    }
    Tensor2D out(n, static_cast<std::size_t>(rows) * cols);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = static_cast<double>(bytes[16 + i]) / 255.0;
    }
    return out;
}

// IDX1 label container -> vector of class indices in [0, 9].
inline std::vector<int> parse_idx_labels(const std::vector<std::uint8_t>& bytes) {
    if (detail::read_be_u32(bytes, 0) != kIdxLabelMagic) {
        throw DataError("not an IDX1 label file");
    }
    const std::uint32_t n = detail::read_be_u32(bytes, 4);
    const std::size_t need = 8 + static_cast<std::size_t>(n);
    if (bytes.size() < need) {
        throw DataError("unexpected EOF at byte " + std::to_string(bytes.size()) +
                        " (need " + std::to_string(need) + " bytes)");
    }
    std::vector<int> labels(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint8_t v = bytes[8 + i];
        if (v > 9) {
            throw DataError("label out of range at index " + std::to_string(i) + ": " +
                            std::to_string(v));
        }
        labels[i] = static_cast<int>(v);
    }
    return labels;
}

inline bool is_gzip(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

// Inflates a gzip stream with zlib; non-gzip input passes through.
inline std::vector<std::uint8_t> gunzip_if_needed(const std::vector<std::uint8_t>& bytes) {
    if (!is_gzip(bytes)) return bytes;
    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
        throw DataError("gzip: inflateInit failed");
    }
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> chunk(1 << 16);
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    int ret = Z_OK;
    do {
        zs.next_out = chunk.data();
        zs.avail_out = static_cast<uInt>(chunk.size());
        ret = inflate(&zs, Z_NO_FLUSH);
        if (ret != Z_OK && ret != Z_STREAM_END) {
            inflateEnd(&zs);
            throw DataError("gzip: corrupt stream (zlib code " + std::to_string(ret) + ")");
        }
        out.insert(out.end(), chunk.data(), chunk.data() + (chunk.size() - zs.avail_out));
    } while (ret != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

inline Tensor2D load_idx_images(const std::string& path) {
    return parse_idx_images(gunzip_if_needed(read_file_bytes(path)));
}

inline std::vector<int> load_idx_labels(const std::string& path) {
    return parse_idx_labels(gunzip_if_needed(read_file_bytes(path)));
}

}  // namespace gelulab
