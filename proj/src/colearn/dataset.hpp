#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colearn/errors.hpp"

namespace colearn::data {

// A single H x W x C 8-bit image, channel-interleaved row-major.
struct Image {
    std::size_t height = 0, width = 0, channels = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t& at(std::size_t r, std::size_t c, std::size_t ch) {
        return pixels[(r * width + c) * channels + ch];
    }
    std::uint8_t at(std::size_t r, std::size_t c, std::size_t ch) const {
        return pixels[(r * width + c) * channels + ch];
    }
    std::size_t size() const { return pixels.size(); }
};

// Images with given (possibly corrupted) labels plus the hidden clean labels.
struct ImageDataset {
    std::size_t height = 0, width = 0, channels = 0;
    std::size_t num_classes = 0;
    std::vector<std::uint8_t> pixels;  // N * H * W * C, channel-interleaved
    std::vector<std::uint8_t> clean_labels;
    std::vector<std::uint8_t> noisy_labels;
    std::vector<std::uint8_t> corruption_mask;  // 1 where noisy != clean

    std::size_t size() const { return clean_labels.size(); }
    std::size_t image_bytes() const { return height * width * channels; }

    const std::uint8_t* image_data(std::size_t i) const {
        return pixels.data() + i * image_bytes();
    }
    Image image(std::size_t i) const;
    void push_image(const Image& img, std::uint8_t clean_label);

    // Checks label ranges, mask consistency, and buffer sizes.
    void validate() const;
};

// Binary dataset file: 16-byte header (magic "CLDS", version u16, N u32,
// H u16, W u16, C u8, num_classes u8) then N records of
// (clean u8, noisy u8, pixels H*W*C), little-endian.
void save_clds(const ImageDataset& ds, const std::string& path);
ImageDataset load_clds(const std::string& path);

}  // namespace colearn::data
