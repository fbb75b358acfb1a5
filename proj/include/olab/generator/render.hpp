#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "olab/core/model.hpp"

namespace olab::gen {

struct RenderSpec {
    int imageSize = 256;
    int gridDim = kGridDim;
    int cellSize = 32;
    int padding = 3;
    Rgb background{255, 255, 255};

    int innerSize() const { return cellSize - 2 * padding; }
};

/// Packed 8-bit RGB raster, row-major.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill);

    int width() const { return width_; }
    int height() const { return height_; }

    Rgb at(int x, int y) const;
    void set(int x, int y, Rgb value);

    std::span<const std::uint8_t> bytes() const { return data_; }
    std::span<std::uint8_t> bytes() { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Hard-edged coverage test of a shape inside its inner box, in local pixel
/// coordinates (0..inner-1). A pixel is inside when its center is.
bool shapeCovers(ShapeKind shape, int x, int y, int inner);

Image renderGrid(const Grid& grid, const RenderSpec& spec = {});

std::vector<std::uint8_t> encodePng(const Image& image);
Image decodePng(std::span<const std::uint8_t> png);

void writePng(const std::filesystem::path& path, const Image& image);
Image readPng(const std::filesystem::path& path);

}  // namespace olab::gen
