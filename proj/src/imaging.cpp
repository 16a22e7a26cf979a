#include "retiomics/imaging.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "retiomics/csv.hpp"

namespace retiomics::imaging {

namespace {

const std::array<std::string, 6> kModalityNames = {"FR",      "OCT",     "OCTA33S",
                                                   "OCTA33D", "OCTA66S", "OCTA66D"};

bool is_pgm_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

const std::string& to_string(Modality m) {
    return kModalityNames[static_cast<std::size_t>(m)];
}

Modality parse_modality(const std::string& name) {
    for (std::size_t i = 0; i < kModalityNames.size(); ++i) {
        if (kModalityNames[i] == name) return static_cast<Modality>(i);
    }
    throw UsageError("unknown modality '" + name +
                     "' (expected one of FR, OCT, OCTA33S, OCTA33D, OCTA66S, OCTA66D)");
}

void GrayImage::validate() const {
    if (width <= 0 || height <= 0) {
        throw DataError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
    if (max_value < 1 || max_value > 65535) {
        throw DataError("image max_value must be in [1, 65535], got " + std::to_string(max_value));
    }
    if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw DataError("pixel buffer holds " + std::to_string(pixels.size()) +
                        " samples, expected " + std::to_string(width * height));
    }
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        if (pixels[i] > max_value) {
            throw DataError("pixel " + std::to_string(i) + " value " + std::to_string(pixels[i]) +
                            " exceeds max_value " + std::to_string(max_value));
        }
    }
    if (!(spacing_x > 0.0) || !(spacing_y > 0.0)) {
        throw DataError("pixel spacing must be positive");
    }
}

GrayImage parse_pgm(const std::string& bytes, const std::string& origin) {
    std::size_t pos = 0;
    auto fail = [&](const std::string& what, std::size_t at) -> void {
        throw PgmParseError(origin + ": " + what, at);
    };
    // Whitespace and '#' comments (comment runs to end of line) separate
    // header tokens.
    auto skip_separators = [&]() {
        while (pos < bytes.size()) {
            char c = bytes[pos];
            if (is_pgm_space(c)) {
                ++pos;
            } else if (c == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
    };
    auto read_number = [&](const std::string& what) -> long {
        skip_separators();
        if (pos >= bytes.size()) fail("unexpected end of file while reading " + what, pos);
        if (!std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            fail("expected digit for " + what + ", found '" + std::string(1, bytes[pos]) + "'",
                 pos);
        }
        long value = 0;
        while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
            value = value * 10 + (bytes[pos] - '0');
            if (value > 1'000'000'000L) fail(what + " out of range", pos);
            ++pos;
        }
        return value;
    };

    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        fail("not a PGM file: magic number must be P2 or P5", 0);
    }
    const bool binary = bytes[1] == '5';
    pos = 2;

    GrayImage image;
    long w = read_number("width");
    long h = read_number("height");
    long maxv = read_number("max_value");
    if (w <= 0 || h <= 0) fail("image dimensions must be positive", pos);
    if (w > (1 << 20) || h > (1 << 20)) fail("image dimensions unreasonably large", pos);
    if (maxv < 1 || maxv > 65535) fail("max_value must be in [1, 65535]", pos);
    image.width = static_cast<int>(w);
    image.height = static_cast<int>(h);
    image.max_value = static_cast<int>(maxv);
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    image.pixels.reserve(count);

    if (binary) {
        if (pos >= bytes.size() || !is_pgm_space(bytes[pos])) {
            fail("expected single whitespace byte before binary raster", pos);
        }
        ++pos;
        const std::size_t bytes_per_sample = maxv > 255 ? 2 : 1;
        const std::size_t need = count * bytes_per_sample;
        if (bytes.size() - pos < need) {
            fail("binary raster truncated: need " + std::to_string(need) + " bytes, have " +
                     std::to_string(bytes.size() - pos),
                 bytes.size());
        }
        for (std::size_t i = 0; i < count; ++i) {
            std::uint16_t v;
            if (bytes_per_sample == 2) {
                // Big-endian per the Netpbm convention: most significant byte first.
                v = static_cast<std::uint16_t>((static_cast<unsigned char>(bytes[pos]) << 8) |
                                               static_cast<unsigned char>(bytes[pos + 1]));
                pos += 2;
            } else {
                v = static_cast<unsigned char>(bytes[pos]);
                ++pos;
            }
            if (v > maxv) {
                fail("sample " + std::to_string(i) + " value " + std::to_string(v) +
                         " exceeds max_value " + std::to_string(maxv),
                     pos - bytes_per_sample);
            }
            image.pixels.push_back(v);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t at = pos;
            long v = read_number("sample " + std::to_string(i));
            if (v > maxv) {
                fail("sample " + std::to_string(i) + " value " + std::to_string(v) +
                         " exceeds max_value " + std::to_string(maxv),
                     at);
            }
            image.pixels.push_back(static_cast<std::uint16_t>(v));
        }
        skip_separators();
        if (pos < bytes.size()) {
            fail("trailing content after " + std::to_string(count) + " samples", pos);
        }
    }
    return image;
}

GrayImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pgm(buf.str(), path.string());
}

std::string encode_pgm(const GrayImage& image, bool binary) {
    image.validate();
    std::string out;
    out += binary ? "P5" : "P2";
    out += '\n';
    out += std::to_string(image.width) + " " + std::to_string(image.height) + "\n";
    out += std::to_string(image.max_value) + "\n";
    if (binary) {
        const bool wide = image.max_value > 255;
        out.reserve(out.size() + image.pixels.size() * (wide ? 2 : 1));
        for (std::uint16_t v : image.pixels) {
            if (wide) {
                out += static_cast<char>((v >> 8) & 0xFF);
                out += static_cast<char>(v & 0xFF);
            } else {
                out += static_cast<char>(v & 0xFF);
            }
        }
    } else {
        for (int r = 0; r < image.height; ++r) {
            for (int c = 0; c < image.width; ++c) {
                if (c) out += ' ';
                out += std::to_string(image.pixels[static_cast<std::size_t>(r) * image.width + c]);
            }
            out += '\n';
        }
    }
    return out;
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path, bool binary) {
    atomic_write_file(path, encode_pgm(image, binary));
}

RoiMask full_mask(const GrayImage& image) {
    RoiMask mask;
    mask.width = image.width;
    mask.height = image.height;
    mask.included.assign(static_cast<std::size_t>(image.width) * image.height, 1);
    return mask;
}

std::vector<double> sample_intensities(const GrayImage& image, const RoiMask& mask) {
    if (mask.width != image.width || mask.height != image.height) {
        throw DataError("mask dimensions " + std::to_string(mask.width) + "x" +
                        std::to_string(mask.height) + " do not match image " +
                        std::to_string(image.width) + "x" + std::to_string(image.height));
    }
    std::vector<double> values;
    values.reserve(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        if (mask.included[i]) values.push_back(static_cast<double>(image.pixels[i]));
    }
    return values;
}

}  // namespace retiomics::imaging
