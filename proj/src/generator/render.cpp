#include "olab/generator/render.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace olab::gen {

Image::Image(int width, int height, Rgb fill)
    : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height * 3) {
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill.r;
        data_[i + 1] = fill.g;
        data_[i + 2] = fill.b;
    }
}

Rgb Image::at(int x, int y) const {
    const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
    return {data_[i], data_[i + 1], data_[i + 2]};
}

void Image::set(int x, int y, Rgb value) {
    const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
    data_[i] = value.r;
    data_[i + 1] = value.g;
    data_[i + 2] = value.b;
}

bool shapeCovers(ShapeKind shape, int x, int y, int inner) {
    const double half = inner / 2.0;
    const double px = x + 0.5 - half;
    const double py = y + 0.5 - half;
    switch (shape) {
        case ShapeKind::Square:
            return true;
        case ShapeKind::Circle:
            return px * px + py * py <= half * half;
        case ShapeKind::Triangle: {
            // Apex at top center, base on the bottom edge.
            const double fromTop = y + 0.5;
            return std::abs(px) <= fromTop / 2.0;
        }
        case ShapeKind::Diamond:
            return std::abs(px) + std::abs(py) <= half;
        case ShapeKind::Clover: {
            const double r = half / 2.0;
            auto inLeaf = [&](double cx, double cy) {
                return (px - cx) * (px - cx) + (py - cy) * (py - cy) <= r * r;
            };
            if (inLeaf(0, -r) || inLeaf(0, r) || inLeaf(-r, 0) || inLeaf(r, 0)) return true;
            return std::abs(px) <= r / 2.0 && std::abs(py) <= r / 2.0;
        }
    }
    return false;
}

Image renderGrid(const Grid& grid, const RenderSpec& spec) {
    if (spec.imageSize != spec.gridDim * spec.cellSize) {
        throw std::invalid_argument("render spec: imageSize must equal gridDim * cellSize");
    }
    Image image(spec.imageSize, spec.imageSize, spec.background);
    const int inner = spec.innerSize();
    for (int row = 0; row < spec.gridDim; ++row) {
        for (int col = 0; col < spec.gridDim; ++col) {
            const auto& stim = grid.cells[static_cast<std::size_t>(row * spec.gridDim + col)];
            const Rgb rgb = stim.color.rgb();
            const int ox = col * spec.cellSize + spec.padding;
            const int oy = row * spec.cellSize + spec.padding;
            for (int y = 0; y < inner; ++y) {
                for (int x = 0; x < inner; ++x) {
                    if (shapeCovers(stim.shape.kind(), x, y, inner)) image.set(ox + x, oy + y, rgb);
                }
            }
        }
    }
    return image;
}

namespace {

struct PngWriteState {
    std::vector<std::uint8_t>* out;
};

void pngWrite(png_structp png, png_bytep data, png_size_t length) {
    auto* state = static_cast<PngWriteState*>(png_get_io_ptr(png));
    state->out->insert(state->out->end(), data, data + length);
}

void pngFlush(png_structp) {}

struct PngReadState {
    std::span<const std::uint8_t> in;
    std::size_t offset = 0;
};

void pngRead(png_structp png, png_bytep data, png_size_t length) {
    auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (state->offset + length > state->in.size()) png_error(png, "truncated PNG stream");
    std::memcpy(data, state->in.data() + state->offset, length);
    state->offset += length;
}

void pngWarn(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encodePng(const Image& image) {
    std::vector<std::uint8_t> out;
    PngWriteState state{&out};
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, pngWarn);
    if (!png) throw std::runtime_error("png: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png: encode failed");
    }
    png_set_write_fn(png, &state, pngWrite, pngFlush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
                 static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const auto bytes = image.bytes();
    const auto stride = static_cast<std::size_t>(image.width()) * 3;
    for (int y = 0; y < image.height(); ++y) {
        png_write_row(png, bytes.data() + static_cast<std::size_t>(y) * stride);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

Image decodePng(std::span<const std::uint8_t> data) {
    if (data.size() < 8 || png_sig_cmp(data.data(), 0, 8) != 0) {
        throw std::runtime_error("png: not a PNG stream");
    }
    PngReadState state{data, 0};
    Image image;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, pngWarn);
    if (!png) throw std::runtime_error("png: cannot create read struct");
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png: decode failed");
    }
    png_set_read_fn(png, &state, pngRead);
    png_read_info(png, info);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_palette_to_rgb(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);
    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width) * 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png: unsupported pixel layout");
    }
    image = Image(width, height, Rgb{});
    auto bytes = image.bytes();
    for (int y = 0; y < height; ++y) {
        png_read_row(png, bytes.data() + static_cast<std::size_t>(y) * width * 3, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return image;
}

void writePng(const std::filesystem::path& path, const Image& image) {
    const auto bytes = encodePng(image);
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

Image readPng(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decodePng(bytes);
}

}  // namespace olab::gen
