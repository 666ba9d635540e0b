#include "colearn/dataset.hpp"

#include <cstring>
#include <fstream>

namespace colearn::data {

namespace {

constexpr char kMagic[4] = {'C', 'L', 'D', 'S'};
constexpr std::uint16_t kVersion = 1;

template <typename T>
void write_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = (v >> (8 * i)) & 0xff;
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
}

}  // namespace

Image ImageDataset::image(std::size_t i) const {
    Image img;
    img.height = height;
    img.width = width;
    img.channels = channels;
    const std::uint8_t* p = image_data(i);
    img.pixels.assign(p, p + image_bytes());
    return img;
}

void ImageDataset::push_image(const Image& img, std::uint8_t clean_label) {
    if (size() == 0 && pixels.empty()) {
        height = img.height;
        width = img.width;
        channels = img.channels;
    }
    if (img.height != height || img.width != width || img.channels != channels)
        throw DimensionError("push_image: image shape differs from dataset shape");
    pixels.insert(pixels.end(), img.pixels.begin(), img.pixels.end());
    clean_labels.push_back(clean_label);
    noisy_labels.push_back(clean_label);
    corruption_mask.push_back(0);
}

void ImageDataset::validate() const {
    const std::size_t n = size();
    if (noisy_labels.size() != n || corruption_mask.size() != n)
        throw DimensionError("dataset: label/mask arrays disagree in length");
    if (pixels.size() != n * image_bytes())
        throw DimensionError("dataset: pixel buffer size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (clean_labels[i] >= num_classes || noisy_labels[i] >= num_classes)
            throw ParameterError("dataset: label out of range at index " + std::to_string(i));
        if ((corruption_mask[i] != 0) != (clean_labels[i] != noisy_labels[i]))
            throw ParameterError("dataset: corruption mask inconsistent at index " +
                                 std::to_string(i));
    }
}

void save_clds(const ImageDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(kMagic, 4);
    write_le<std::uint16_t>(out, kVersion);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(ds.size()));
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(ds.height));
    write_le<std::uint16_t>(out, static_cast<std::uint16_t>(ds.width));
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(ds.channels));
    write_le<std::uint8_t>(out, static_cast<std::uint8_t>(ds.num_classes));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        write_le<std::uint8_t>(out, ds.clean_labels[i]);
        write_le<std::uint8_t>(out, ds.noisy_labels[i]);
        out.write(reinterpret_cast<const char*>(ds.image_data(i)),
                  static_cast<std::streamsize>(ds.image_bytes()));
    }
    if (!out) throw IoError("write failed: " + path);
}

ImageDataset load_clds(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("bad magic in dataset file: " + path);
    const auto version = read_le<std::uint16_t>(in);
    if (version != kVersion) throw FormatError("unsupported dataset version");
    const auto n = read_le<std::uint32_t>(in);
    ImageDataset ds;
    ds.height = read_le<std::uint16_t>(in);
    ds.width = read_le<std::uint16_t>(in);
    ds.channels = read_le<std::uint8_t>(in);
    ds.num_classes = read_le<std::uint8_t>(in);
    const std::size_t img_bytes = ds.image_bytes();
    ds.pixels.resize(static_cast<std::size_t>(n) * img_bytes);
    ds.clean_labels.resize(n);
    ds.noisy_labels.resize(n);
    ds.corruption_mask.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        ds.clean_labels[i] = read_le<std::uint8_t>(in);
        ds.noisy_labels[i] = read_le<std::uint8_t>(in);
        in.read(reinterpret_cast<char*>(ds.pixels.data() + i * img_bytes),
                static_cast<std::streamsize>(img_bytes));
        ds.corruption_mask[i] = ds.clean_labels[i] != ds.noisy_labels[i] ? 1 : 0;
    }
    if (!in) throw FormatError("truncated dataset file: " + path);
    ds.validate();
    return ds;
}

}  // namespace colearn::data
