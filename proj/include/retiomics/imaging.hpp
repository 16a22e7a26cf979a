#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "retiomics/common.hpp"

namespace retiomics::imaging {

/// The six retinal image types collected per eye.
enum class Modality { FR, OCT, OCTA33S, OCTA33D, OCTA66S, OCTA66D };

inline constexpr std::array<Modality, 6> kAllModalities = {
    Modality::FR,  Modality::OCT,     Modality::OCTA33S,
    Modality::OCTA33D, Modality::OCTA66S, Modality::OCTA66D};

const std::string& to_string(Modality m);
Modality parse_modality(const std::string& name);

/// Grayscale image with physical pixel spacing in mm. Immutable by
/// convention once built.
struct GrayImage {
    int width = 0;
    int height = 0;
    int max_value = 255;
    std::vector<std::uint16_t> pixels;  // row-major, each in [0, max_value]
    double spacing_x = 1.0;
    double spacing_y = 1.0;

    void validate() const;  // throws DataError on any invariant breach
};

struct RoiMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> included;  // row-major booleans
};

struct PgmParseError : DataError {
    std::size_t offset;
    PgmParseError(const std::string& what, std::size_t byte_offset)
        : DataError(what + " (byte offset " + std::to_string(byte_offset) + ")"), offset(byte_offset) {}
};

/// Netpbm grayscale decoder, P2 (ASCII) and P5 (binary). P5 samples with
/// max_value > 255 are big-endian two-byte words.
GrayImage load_pgm(const std::filesystem::path& path);
GrayImage parse_pgm(const std::string& bytes, const std::string& origin = "<memory>");

/// P5 when binary, P2 otherwise. Round-trips bit-exactly through load_pgm.
void save_pgm(const GrayImage& image, const std::filesystem::path& path, bool binary = true);
std::string encode_pgm(const GrayImage& image, bool binary = true);

RoiMask full_mask(const GrayImage& image);

/// Included pixel values in row-major scan order.
std::vector<double> sample_intensities(const GrayImage& image, const RoiMask& mask);

}  // namespace retiomics::imaging
