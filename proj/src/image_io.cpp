#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include "tmot/error.hpp"
#include "tmot/io.hpp"

namespace tmot {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct DecodedPng {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 8;
    int channels = 1;
    std::vector<unsigned char> pixels;  // native-endian when 16-bit
    std::vector<png_bytep> rows;
};

std::string lowercase_ext(const fs::path& p) {
    std::string ext = p.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

// Only trivially destructible locals live in this frame so libpng's
// longjmp cannot skip a destructor.
bool decode_png(std::FILE* fp, DecodedPng& out) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) return false;
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (png_get_bit_depth(png, info) == 16) png_set_swap(png);
    png_read_update_info(png, info);

    out.width = png_get_image_width(png, info);
    out.height = png_get_image_height(png, info);
    out.bit_depth = png_get_bit_depth(png, info);
    out.channels = png_get_channels(png, info);
    const png_size_t row_bytes = png_get_rowbytes(png, info);
    out.pixels.resize(row_bytes * out.height);
    out.rows.resize(out.height);
    for (png_uint_32 y = 0; y < out.height; ++y) out.rows[y] = out.pixels.data() + y * row_bytes;
    png_read_image(png, out.rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

GrayImage load_png(const fs::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open " + path.string());
    DecodedPng png;
    if (!decode_png(fp.get(), png)) throw IoError("cannot decode PNG " + path.string());
    if (png.bit_depth != 8 && png.bit_depth != 16) throw IoError("unsupported PNG depth in " + path.string());
    if (png.channels != 1 && png.channels != 3) throw IoError("unsupported PNG channel layout in " + path.string());

    const std::size_t count = static_cast<std::size_t>(png.width) * png.height;
    std::vector<std::uint16_t> data(count);
    const auto sample = [&](std::size_t idx) -> std::uint32_t {
        if (png.bit_depth == 16) {
            std::uint16_t v;
            std::memcpy(&v, png.pixels.data() + idx * 2, 2);
            return v;
        }
        return png.pixels[idx];
    };
    for (std::size_t i = 0; i < count; ++i) {
        if (png.channels == 1) {
            data[i] = static_cast<std::uint16_t>(sample(i));
        } else {
            const std::uint64_t r = sample(i * 3);
            const std::uint64_t g = sample(i * 3 + 1);
            const std::uint64_t b = sample(i * 3 + 2);
            data[i] = static_cast<std::uint16_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
        }
    }
    return GrayImage(static_cast<int>(png.width), static_cast<int>(png.height), png.bit_depth, std::move(data));
}

bool encode_png(std::FILE* fp, const GrayImage& img, std::vector<png_bytep>& rows) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) return false;
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        return false;
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()),
                 img.bit_depth(), PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (img.bit_depth() == 16) png_set_swap(png);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

void save_png(const fs::path& path, const GrayImage& img) {
    const std::size_t bytes_per = img.bit_depth() == 16 ? 2 : 1;
    const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * bytes_per;
    std::vector<unsigned char> buffer(row_bytes * static_cast<std::size_t>(img.height()));
    const auto data = img.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (bytes_per == 2) {
            std::memcpy(buffer.data() + i * 2, &data[i], 2);
        } else {
            buffer[i] = static_cast<unsigned char>(data[i]);
        }
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
    for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = buffer.data() + y * row_bytes;

    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path.string());
    if (!encode_png(fp.get(), img, rows)) throw IoError("cannot encode PNG " + path.string());
    if (std::fflush(fp.get()) != 0) throw IoError("write failed for " + path.string());
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            if (!tok.empty()) break;
        } else {
            tok.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return tok;
}

GrayImage load_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const std::string magic = pnm_token(in);
    if (magic != "P5" && magic != "P2") throw IoError("not a PGM file: " + path.string());
    int width = 0;
    int height = 0;
    long maxval = 0;
    try {
        width = std::stoi(pnm_token(in));
        height = std::stoi(pnm_token(in));
        maxval = std::stol(pnm_token(in));
    } catch (const std::exception&) {
        throw IoError("malformed PGM header in " + path.string());
    }
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
        throw IoError("malformed PGM header in " + path.string());
    }
    const int depth = maxval > 255 ? 16 : 8;
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::uint16_t> data(count);
    if (magic == "P5") {
        const std::size_t bytes = depth == 16 ? 2 : 1;
        std::vector<unsigned char> raw(count * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw IoError("truncated PGM " + path.string());
        for (std::size_t i = 0; i < count; ++i) {
            data[i] = bytes == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::string tok = pnm_token(in);
            if (tok.empty()) throw IoError("truncated PGM " + path.string());
            data[i] = static_cast<std::uint16_t>(std::stoul(tok));
        }
    }
    for (std::uint16_t v : data) {
        if (v > maxval) throw IoError("PGM sample exceeds maxval in " + path.string());
    }
    return GrayImage(width, height, depth, std::move(data));
}

void save_pgm(const fs::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << '\n' << (img.bit_depth() == 16 ? 65535 : 255) << '\n';
    for (std::uint16_t v : img.data()) {
        if (img.bit_depth() == 16) {
            out.put(static_cast<char>(v >> 8));
            out.put(static_cast<char>(v & 0xff));
        } else {
            out.put(static_cast<char>(v));
        }
    }
    if (!out.flush()) throw IoError("write failed for " + path.string());
}

}  // namespace

GrayImage load_image(const fs::path& path, int expected_bit_depth) {
    if (!fs::exists(path)) throw IoError("image not found: " + path.string());
    const std::string ext = lowercase_ext(path);
    GrayImage img;
    if (ext == ".png") {
        img = load_png(path);
    } else if (ext == ".pgm" || ext == ".pnm") {
        img = load_pgm(path);
    } else {
        throw IoError("unsupported image format '" + ext + "' for " + path.string());
    }
    if (expected_bit_depth != 0 && img.bit_depth() != expected_bit_depth) {
        throw IoError("image " + path.string() + " has bit depth " + std::to_string(img.bit_depth()) +
                      ", expected " + std::to_string(expected_bit_depth));
    }
    return img;
}

void save_image(const fs::path& path, const GrayImage& img) {
    if (img.empty()) throw IoError("refusing to save an empty image to " + path.string());
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    const std::string ext = lowercase_ext(path);
    if (ext == ".png") {
        save_png(path, img);
    } else if (ext == ".pgm") {
        save_pgm(path, img);
    } else {
        throw IoError("unsupported image format '" + ext + "' for " + path.string());
    }
}

}  // namespace tmot
